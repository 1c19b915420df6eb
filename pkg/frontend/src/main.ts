import { ApiClient } from "./api.js";
import { App } from "./app.js";

const params = new URLSearchParams(window.location.search);
const base = params.get("api") ?? "http://127.0.0.1:7411";

const form = document.getElementById("loader") as HTMLFormElement;
const input = document.getElementById("program") as HTMLTextAreaElement;
const root = document.getElementById("app") as HTMLElement;

const app = new App(root, new ApiClient(base));

form.addEventListener("submit", (ev) => {
  ev.preventDefault();
  void app.load(input.value).catch((e) => {
    app.errorBar.textContent = String(e instanceof Error ? e.message : e);
  });
});
