import { ApiClient } from "./api.js";
import { ExplorerApp } from "./app.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("service") ?? "http://127.0.0.1:8000";

const app = new ExplorerApp(new ApiClient(baseUrl));
const container = document.getElementById("app");
if (!container) {
  throw new Error("missing #app container");
}
void app.mount(container);
