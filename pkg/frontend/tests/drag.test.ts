import { describe, expect, it } from "vitest";

import { DragTracker, RateLimiter, pointerToDialAngle } from "../src/drag.js";

describe("pointer angle", () => {
  it("uses the same 12-o'clock, clockwise-positive convention as the dial", () => {
    expect(pointerToDialAngle({ x: 100, y: 20 }, 100, 100)).toBeCloseTo(0, 6);
    expect(pointerToDialAngle({ x: 180, y: 100 }, 100, 100)).toBeCloseTo(90, 6);
    expect(pointerToDialAngle({ x: 100, y: 180 }, 100, 100)).toBeCloseTo(180, 6);
    expect(pointerToDialAngle({ x: 20, y: 100 }, 100, 100)).toBeCloseTo(270, 6);
  });
});

describe("drag tracker", () => {
  it("anchors the target at the knob's current angle", () => {
    const tracker = new DragTracker();
    tracker.begin(10, 350);
    expect(tracker.currentTarget).toBe(350);
    expect(tracker.move(15)).toBeCloseTo(355, 9);
  });

  it("stays continuous across the 360 wrap", () => {
    const tracker = new DragTracker();
    tracker.begin(350, 350);
    expect(tracker.move(359)).toBeCloseTo(359, 9);
    expect(tracker.move(2)).toBeCloseTo(362, 9); // not a 357-degree jump back
    expect(tracker.move(350)).toBeCloseTo(350, 9);
  });

  it("accumulates whole turns", () => {
    const tracker = new DragTracker();
    tracker.begin(0, 0);
    for (let k = 1; k <= 20; k++) tracker.move((k * 36) % 360);
    expect(tracker.currentTarget).toBeCloseTo(720, 9);
  });

  it("ignores moves when not engaged", () => {
    const tracker = new DragTracker();
    tracker.begin(0, 100);
    tracker.end();
    expect(tracker.engaged).toBe(false);
    expect(tracker.move(90)).toBe(100);
  });
});

describe("rate limiter", () => {
  it("caps sends at the configured rate", () => {
    const limiter = new RateLimiter(60);
    let sent = 0;
    for (let t = 0; t < 1000; t += 1) {
      if (limiter.ready(t)) sent++;
    }
    expect(sent).toBeLessThanOrEqual(61);
    expect(sent).toBeGreaterThanOrEqual(55);
  });

  it("always allows the first send", () => {
    expect(new RateLimiter(60).ready(0)).toBe(true);
  });
});
