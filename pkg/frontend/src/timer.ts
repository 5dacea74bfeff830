/** Countdown phases for the information window, pure in the inputs.
 *
 * The round timer starts green, turns yellow at the warning threshold,
 * red when the limit runs out, and blue the moment a decision is made,
 * regardless of elapsed time. Time is passed in, never read from a
 * clock here, so the mapping is unit-testable at exact boundaries.
 */

export type TimerPhase = "green" | "yellow" | "red" | "blue";

export const WARN_S = 20;
export const LIMIT_S = 40;

export function timerPhase(
  elapsedS: number,
  decided: boolean,
  warnS: number = WARN_S,
  limitS: number = LIMIT_S,
): TimerPhase {
  if (decided) return "blue";
  if (elapsedS < warnS) return "green";
  if (elapsedS < limitS) return "yellow";
  return "red";
}

export function remainingS(elapsedS: number, limitS: number = LIMIT_S): number {
  return Math.max(0, limitS - elapsedS);
}
