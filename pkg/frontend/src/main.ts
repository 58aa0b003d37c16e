import { boot } from "./app.js";

const params = new URLSearchParams(window.location.search);
const base = params.get("api") ?? "http://127.0.0.1:8765";

boot({ base, bookId: params.get("book") ?? undefined }).catch((error) => {
  const el = document.getElementById("app");
  if (el) el.textContent = `failed to start: ${error}`;
});
