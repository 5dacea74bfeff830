import { describe, expect, it } from "vitest";

import { LIMIT_S, WARN_S, remainingS, timerPhase } from "./timer.js";

describe("timer phase function", () => {
  it("is green strictly before the warning threshold", () => {
    expect(timerPhase(0, false)).toBe("green");
    expect(timerPhase(12, false)).toBe("green");
    expect(timerPhase(19.999, false)).toBe("green");
  });

  it("turns yellow on [20, 40)", () => {
    expect(timerPhase(20, false)).toBe("yellow");
    expect(timerPhase(25, false)).toBe("yellow");
    expect(timerPhase(39.999, false)).toBe("yellow");
  });

  it("turns red at and past the limit", () => {
    expect(timerPhase(40, false)).toBe("red");
    expect(timerPhase(41, false)).toBe("red");
    expect(timerPhase(1e6, false)).toBe("red");
  });

  it("is blue immediately once decided, at any elapsed time", () => {
    for (const t of [0, 5, 12, 20, 39, 40, 77]) {
      expect(timerPhase(t, true)).toBe("blue");
    }
  });

  it("never steps backwards over a time sweep", () => {
    const rank = { green: 0, yellow: 1, red: 2 } as const;
    let prev = -1;
    for (let t = 0; t <= 60; t += 0.25) {
      const phase = timerPhase(t, false);
      expect(phase).not.toBe("blue");
      const r = rank[phase as keyof typeof rank];
      expect(r).toBeGreaterThanOrEqual(prev);
      prev = r;
    }
  });

  it("honors injected thresholds", () => {
    expect(timerPhase(3, false, 2, 10)).toBe("yellow");
    expect(timerPhase(3, false, 5, 10)).toBe("green");
    expect(timerPhase(11, false, 5, 10)).toBe("red");
  });

  it("defaults match the experiment timings", () => {
    expect(WARN_S).toBe(20);
    expect(LIMIT_S).toBe(40);
  });

  it("remaining time counts down and clamps at zero", () => {
    expect(remainingS(0)).toBe(40);
    expect(remainingS(12.5)).toBe(27.5);
    expect(remainingS(40)).toBe(0);
    expect(remainingS(55)).toBe(0);
  });
});
