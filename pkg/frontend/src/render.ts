// Canvas drawing for the dial, the torque bar, and the fin top view.

import {
  finOutline,
  markerPosition,
  torqueBarFraction,
  torqueBarSide,
  wrapDeg,
} from "./geometry.js";
import type { Snapshot } from "./protocol.js";

const DIAL_BLUE = "#2563eb";
const MARKER_RED = "#dc2626";
const BAR_GREEN = "#16a34a";
const BODY_GREY = "#9ca3af";
const FIN_FILL = "#dbeafe";

export function drawDial(
  ctx: CanvasRenderingContext2D,
  snapshot: Snapshot | null,
  size: number,
): void {
  const c = size / 2;
  const radius = size * 0.38;
  ctx.clearRect(0, 0, size, size);

  ctx.strokeStyle = DIAL_BLUE;
  ctx.lineWidth = 3;
  ctx.beginPath();
  ctx.arc(c, c, radius, 0, 2 * Math.PI);
  ctx.stroke();

  // 12 o'clock reference notch
  ctx.strokeStyle = BODY_GREY;
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(c, c - radius - 8);
  ctx.lineTo(c, c - radius + 6);
  ctx.stroke();

  if (snapshot) {
    const pos = markerPosition(snapshot.theta_deg, c, c, radius);
    ctx.fillStyle = MARKER_RED;
    ctx.beginPath();
    ctx.arc(pos.x, pos.y, 7, 0, 2 * Math.PI);
    ctx.fill();

    ctx.fillStyle = "#111827";
    ctx.font = "14px system-ui, sans-serif";
    ctx.textAlign = "center";
    ctx.fillText(
      `${wrapDeg(snapshot.theta_deg).toFixed(1)}°`,
      c,
      c + 5,
    );
  }
}

export function drawTorqueBar(
  ctx: CanvasRenderingContext2D,
  snapshot: Snapshot | null,
  width: number,
  height: number,
  maxTorque: number,
): void {
  ctx.clearRect(0, 0, width, height);
  const mid = width / 2;
  ctx.strokeStyle = BODY_GREY;
  ctx.strokeRect(0.5, 0.5, width - 1, height - 1);
  ctx.beginPath();
  ctx.moveTo(mid, 0);
  ctx.lineTo(mid, height);
  ctx.stroke();

  if (!snapshot) return;
  const fraction = torqueBarFraction(snapshot.torque_cmd_ncm, maxTorque);
  const side = torqueBarSide(snapshot.torque_cmd_ncm);
  const length = fraction * (width / 2 - 2);
  ctx.fillStyle = BAR_GREEN;
  if (side === "cw") {
    ctx.fillRect(mid, 2, length, height - 4);
  } else if (side === "ccw") {
    ctx.fillRect(mid - length, 2, length, height - 4);
  }
}

export function drawFinView(
  ctx: CanvasRenderingContext2D,
  snapshot: Snapshot | null,
  size: number,
): void {
  const c = size / 2;
  ctx.clearRect(0, 0, size, size);
  const fins = snapshot ? snapshot.fins_mm : [0, 0, 0, 0, 0, 0];
  const pxPerMm = (size * 0.42) / 34; // full expansion still fits
  const outline = finOutline(fins, c, c, pxPerMm);

  ctx.beginPath();
  outline.forEach((p, i) => (i === 0 ? ctx.moveTo(p.x, p.y) : ctx.lineTo(p.x, p.y)));
  ctx.closePath();
  ctx.fillStyle = FIN_FILL;
  ctx.fill();
  ctx.strokeStyle = DIAL_BLUE;
  ctx.lineWidth = 2;
  ctx.stroke();

  // knob body
  ctx.beginPath();
  ctx.arc(c, c, 26 * pxPerMm, 0, 2 * Math.PI);
  ctx.strokeStyle = BODY_GREY;
  ctx.lineWidth = 1;
  ctx.stroke();
}
