// Pure display math for the dial, torque bar and fin top view.
// Convention everywhere: 0 deg points at 12 o'clock, positive is clockwise
// (matching the simulator's positive-clockwise torque/angle signs).

export const MAX_TORQUE_NCM = 25;
export const KNOB_BASE_RADIUS_MM = 26;
export const FIN_TRAVEL_MM = 8;

export function wrapDeg(angle: number): number {
  return ((angle % 360) + 360) % 360;
}

export interface Point {
  x: number;
  y: number;
}

/** Marker center for a knob angle on a circle of the given radius. */
export function markerPosition(
  thetaDeg: number,
  cx: number,
  cy: number,
  radius: number,
): Point {
  const rad = (wrapDeg(thetaDeg) * Math.PI) / 180;
  return { x: cx + radius * Math.sin(rad), y: cy - radius * Math.cos(rad) };
}

/** Angle a marker position represents; inverse of markerPosition. */
export function positionToAngleDeg(p: Point, cx: number, cy: number): number {
  return wrapDeg((Math.atan2(p.x - cx, cy - p.y) * 180) / Math.PI);
}

/** Signed fill fraction of the torque bar: |tau|/max, clamped to [0, 1]. */
export function torqueBarFraction(
  torqueNcm: number,
  maxTorque: number = MAX_TORQUE_NCM,
): number {
  return Math.min(Math.abs(torqueNcm) / maxTorque, 1);
}

export function torqueBarSide(torqueNcm: number): "cw" | "ccw" | "none" {
  if (torqueNcm > 0) return "cw";
  if (torqueNcm < 0) return "ccw";
  return "none";
}

// Each fin occupies a 36-degree arc centered in its 60-degree sector; between
// fins the outline falls back to the knob body radius.
const FIN_ARC_DEG = 36;

export function outlineRadiusMm(angleDeg: number, finsMm: number[]): number {
  const a = wrapDeg(angleDeg);
  const sector = Math.floor(wrapDeg(a + 30) / 60) % 6;
  const center = sector * 60;
  let offset = Math.abs(a - center);
  if (offset > 180) offset = 360 - offset;
  if (offset <= FIN_ARC_DEG / 2) {
    return KNOB_BASE_RADIUS_MM + (finsMm[sector] ?? 0);
  }
  return KNOB_BASE_RADIUS_MM;
}

/** Closed polygon tracing the knob's outer profile, in mm-scaled units. */
export function finOutline(
  finsMm: number[],
  cx: number,
  cy: number,
  pxPerMm: number,
  samples = 360,
): Point[] {
  const points: Point[] = [];
  for (let i = 0; i < samples; i++) {
    const angle = (360 * i) / samples;
    const radius = outlineRadiusMm(angle, finsMm) * pxPerMm;
    points.push(markerPosition(angle, cx, cy, radius));
  }
  return points;
}
