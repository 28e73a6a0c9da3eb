/** Browser entry point; tests import main.ts directly instead. */
import { Client } from "./api.js";
import { bootstrap } from "./main.js";

const root = document.getElementById("app");
if (root) {
  bootstrap(root, new Client(""));
}
