/** DOM wiring: information window on top, decision window below.
 *
 * mount() builds the skeleton once and returns an update function that
 * refreshes it from the controller's view. The action buttons appear in
 * the order Rock, Scissors, Paper and are disabled while a submission
 * is pending or the session is over, so a double click cannot produce
 * a second request (the controller guards again underneath).
 */

import { MoveCode } from "./api.js";
import { SessionController, ViewState } from "./state.js";

const MOVE_WORD: Record<MoveCode, string> = { R: "Rock", P: "Paper", S: "Scissors" };
const BUTTON_ORDER: MoveCode[] = ["R", "S", "P"];

function el(tag: string, className: string, text = ""): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  node.textContent = text;
  return node;
}

export function mount(root: HTMLElement, controller: SessionController): () => void {
  root.textContent = "";

  const info = el("section", "info-window");
  const upper = el("div", "upper-panel");
  const roundLine = el("div", "round-line", "round - / -");
  const timerLine = el("div", "timer-line green", "-");
  upper.append(roundLine, timerLine);

  const lower = el("div", "lower-panel");
  const theirs = el("div", "their-move", "opponent: -");
  const mine = el("div", "my-move", "you: -");
  const payoff = el("div", "payoff", "payoff: -");
  const cumulative = el("div", "cumulative", "total points: -");
  const lateBadge = el("div", "late-badge", "late move");
  lateBadge.hidden = true;
  lower.append(theirs, mine, payoff, cumulative, lateBadge);

  const stalledBanner = el("div", "stalled-banner", "connection lost - timer paused");
  stalledBanner.hidden = true;
  const errorPanel = el("div", "error-panel");
  errorPanel.hidden = true;
  info.append(upper, lower, stalledBanner, errorPanel);

  const decision = el("section", "decision-window");
  const buttons = new Map<MoveCode, HTMLButtonElement>();
  for (const code of BUTTON_ORDER) {
    const button = document.createElement("button");
    button.className = "move-button";
    button.dataset.move = code;
    button.textContent = MOVE_WORD[code];
    button.disabled = true;
    button.addEventListener("click", () => {
      const settled = controller.submit(code);
      update(); // disable immediately, before the response lands
      void settled.then(update);
    });
    buttons.set(code, button);
    decision.append(button);
  }

  const summaryPanel = el("section", "summary-panel");
  summaryPanel.hidden = true;

  root.append(info, decision, summaryPanel);

  function renderSummary(view: ViewState): void {
    summaryPanel.hidden = !view.finished;
    if (!view.finished) return;
    summaryPanel.textContent = "";
    summaryPanel.append(el("h2", "summary-title", "session complete"));
    const points = view.summary?.player_points ?? view.cumulativePoints;
    summaryPanel.append(el("div", "summary-points", `virtual points: ${points}`));
    if (view.summary) {
      summaryPanel.append(
        el("div", "summary-reward", `reward: ${view.summary.reward_rmb} RMB`),
        el(
          "div",
          "summary-formula",
          `= points x ${view.summary.reward_formula.exchange_rate} + ${view.summary.reward_formula.show_up_fee}`,
        ),
        el(
          "div",
          "summary-record",
          `opponent record: ${view.summary.wins}W ${view.summary.draws}D ${view.summary.losses}L`,
        ),
      );
    }
  }

  function update(): void {
    const view = controller.view();
    roundLine.textContent = view.started
      ? `round ${view.round} / ${view.rounds} (limit ${view.limitS} s)`
      : "no session";
    timerLine.textContent = view.started ? `${Math.ceil(view.remainingS)} s` : "-";
    timerLine.className = `timer-line ${view.phase}`;

    const last = view.lastResult;
    theirs.textContent = `opponent: ${last ? MOVE_WORD[last.ai_move] : "-"}`;
    mine.textContent = `you: ${last ? MOVE_WORD[last.player_move] : "-"}`;
    payoff.textContent = `payoff: ${last ? last.player_points : "-"}`;
    cumulative.textContent = view.started ? `total points: ${view.cumulativePoints}` : "total points: -";
    lateBadge.hidden = !(last && last.late);

    stalledBanner.hidden = !view.stalled;
    errorPanel.hidden = view.error === null;
    if (view.error) {
      errorPanel.textContent = `${view.error.message} - ${view.error.guidance}`;
    }

    const locked = !view.started || view.pending || view.finished;
    for (const button of buttons.values()) button.disabled = locked;

    renderSummary(view);
  }

  update();
  return update;
}
