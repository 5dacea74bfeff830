import { ApiClient } from "./api.js";
import { apiBase } from "./config.js";
import { mount } from "./render.js";
import { SessionController } from "./state.js";

const api = new ApiClient(apiBase());
const controller = new SessionController(api);

const root = document.getElementById("app");
if (!root) throw new Error("missing #app root element");

const startForm = document.createElement("div");
startForm.className = "start-form";
const roundsInput = document.createElement("input");
roundsInput.type = "number";
roundsInput.min = "1";
roundsInput.value = "300";
const startButton = document.createElement("button");
startButton.textContent = "start session";
startForm.append(roundsInput, startButton);

const gameRoot = document.createElement("div");
root.append(startForm, gameRoot);

const update = mount(gameRoot, controller);

startButton.addEventListener("click", () => {
  startButton.disabled = true;
  controller
    .start({ rounds: Number(roundsInput.value) || 300 })
    .then(update)
    .catch((err) => {
      startButton.disabled = false;
      gameRoot.querySelector(".error-panel")?.replaceChildren(
        document.createTextNode(`could not start: ${err.message ?? err}`),
      );
      const panel = gameRoot.querySelector<HTMLElement>(".error-panel");
      if (panel) panel.hidden = false;
    });
});

// ticking repaint for the countdown; poll keeps a dropped line honest
setInterval(update, 250);
setInterval(() => {
  if (controller.started && !controller.finished) {
    void controller.poll().then(update, update);
  }
}, 5000);
