import type { StatePayload, TransitionEntry, Transitions } from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const res = await fetch(url, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  if (!res.ok) {
    let detail = `${res.status} ${res.statusText}`;
    try {
      const body = await res.json();
      if (body && typeof body.detail === "string") detail = body.detail;
    } catch {
      // keep the status line
    }
    throw new ApiError(res.status, detail);
  }
  if (res.status === 204) return undefined as T;
  return (await res.json()) as T;
}

/** Thin typed client; every mutation returns the fresh server state. */
export class ApiClient {
  constructor(readonly base: string) {}

  createSession(program: string): Promise<{ session_id: string; state: string }> {
    return request(`${this.base}/sessions`, {
      method: "POST",
      body: JSON.stringify({ program }),
    });
  }

  getState(sid: string): Promise<StatePayload> {
    return request(`${this.base}/sessions/${sid}`);
  }

  getTransitions(sid: string): Promise<Transitions> {
    return request(`${this.base}/sessions/${sid}/transitions`);
  }

  step(sid: string, t: Pick<TransitionEntry, "dir" | "act" | "key">): Promise<StatePayload> {
    return request(`${this.base}/sessions/${sid}/step`, {
      method: "POST",
      body: JSON.stringify({ dir: t.dir, act: t.act, key: t.key }),
    });
  }

  normalize(sid: string): Promise<{
    parabolic: { steps: { dir: string; act: string; key: number }[] };
    length: number;
  }> {
    return request(`${this.base}/sessions/${sid}/normalize`, { method: "POST" });
  }

  deleteSession(sid: string): Promise<void> {
    return request(`${this.base}/sessions/${sid}`, { method: "DELETE" });
  }
}
