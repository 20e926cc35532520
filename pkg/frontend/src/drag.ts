// Drag-to-turn: pointer motion on the dial becomes a position-grip hand.
// The tracker unwraps pointer angles so crossing 359 -> 0 keeps the target
// continuous, and the throttle caps outbound set_hand traffic at 60 Hz.

import { positionToAngleDeg, type Point } from "./geometry.js";

export const DRAG_GRIP_STIFFNESS = 2.0; // N*cm/deg
export const DRAG_GRIP_DAMPING = 0.02; // N*cm*s/deg
export const DRAG_MAX_RATE_HZ = 60;

export class DragTracker {
  private lastPointerDeg = 0;
  private target = 0;
  private active = false;

  /** Anchor the grip at the knob's current angle so grabbing never jerks. */
  begin(pointerDeg: number, knobThetaDeg: number): void {
    this.lastPointerDeg = pointerDeg;
    this.target = knobThetaDeg;
    this.active = true;
  }

  /** Returns the new unwrapped grip target for a pointer move. */
  move(pointerDeg: number): number {
    if (!this.active) return this.target;
    let delta = pointerDeg - this.lastPointerDeg;
    if (delta > 180) delta -= 360;
    if (delta < -180) delta += 360;
    this.lastPointerDeg = pointerDeg;
    this.target += delta;
    return this.target;
  }

  end(): void {
    this.active = false;
  }

  get engaged(): boolean {
    return this.active;
  }

  get currentTarget(): number {
    return this.target;
  }
}

export class RateLimiter {
  private lastSent = -Infinity;

  constructor(private readonly maxRateHz: number = DRAG_MAX_RATE_HZ) {}

  ready(nowMs: number): boolean {
    if (nowMs - this.lastSent >= 1000 / this.maxRateHz) {
      this.lastSent = nowMs;
      return true;
    }
    return false;
  }
}

export function pointerToDialAngle(
  p: Point,
  cx: number,
  cy: number,
): number {
  return positionToAngleDeg(p, cx, cy);
}
