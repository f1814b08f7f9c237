import { ApiClient } from "./api.js";
import { boot } from "./app.js";

const root = document.getElementById("app");
if (root) {
  boot(root, new ApiClient()).catch((err) => {
    root.textContent = `Failed to start: ${err}`;
  });
}
