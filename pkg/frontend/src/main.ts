import { ApiClient } from "./api.js";
import { Workbench } from "./app.js";

document.addEventListener("DOMContentLoaded", () => {
  const workbench = new Workbench(new ApiClient(""), document);
  void workbench.init().then(() => workbench.attach());
});
