// Boots the real session service for the integration tests.
import { spawn, type ChildProcess } from "node:child_process";

export const API = "http://127.0.0.1:7412";

let proc: ChildProcess | undefined;

export default async function setup(): Promise<() => void> {
  proc = spawn("python3", ["-m", "rtpl.cli", "serve", "--port", "7412"], {
    stdio: "ignore",
  });
  const deadline = Date.now() + 30000;
  for (;;) {
    try {
      const res = await fetch(`${API}/sessions/probe`);
      if (res.status === 404) break;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) {
      proc.kill();
      throw new Error("rtpl service did not come up on :7412");
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  return () => {
    proc?.kill();
  };
}
