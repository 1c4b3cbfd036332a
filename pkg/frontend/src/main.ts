import { ApiClient } from "./api";
import { SearchApp } from "./app";

document.addEventListener("DOMContentLoaded", () => {
  const root = document.getElementById("app");
  if (root) {
    new SearchApp(root, new ApiClient());
  }
});
