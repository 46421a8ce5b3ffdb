// Pure view-space helpers: pan/zoom transform and the line-constrained drag.

export interface Transform {
  scale: number; // screen px per world unit
  offsetX: number; // screen position of world origin
  offsetY: number;
}

export function worldToScreen(t: Transform, x: number, y: number): [number, number] {
  // model y grows upward, screen y grows downward
  return [t.offsetX + x * t.scale, t.offsetY - y * t.scale];
}

export function screenToWorld(t: Transform, sx: number, sy: number): [number, number] {
  return [(sx - t.offsetX) / t.scale, (t.offsetY - sy) / t.scale];
}

/** Zoom by `factor` keeping the world point under (sx, sy) fixed. */
export function zoomAt(t: Transform, sx: number, sy: number, factor: number): Transform {
  const scale = Math.min(400, Math.max(2, t.scale * factor));
  const f = scale / t.scale;
  return {
    scale,
    offsetX: sx - (sx - t.offsetX) * f,
    offsetY: sy - (sy - t.offsetY) * f,
  };
}

export function pan(t: Transform, dx: number, dy: number): Transform {
  return { ...t, offsetX: t.offsetX + dx, offsetY: t.offsetY + dy };
}

/** Orthogonal projection of a world point onto the line u*x + v*y + c = 0. */
export function projectOntoLine(
  coeffs: [number, number, number],
  x: number,
  y: number,
): [number, number] {
  const [u, v, c] = coeffs;
  const d = (u * x + v * y + c) / (u * u + v * v);
  return [x - d * u, y - d * v];
}

export function lineResidual(coeffs: [number, number, number], x: number, y: number): number {
  const [u, v, c] = coeffs;
  return Math.abs(u * x + v * y + c) / Math.max(Math.hypot(u, v), 1e-30);
}

export function distToSegment(
  px: number, py: number,
  ax: number, ay: number,
  bx: number, by: number,
): number {
  const vx = bx - ax;
  const vy = by - ay;
  const len2 = vx * vx + vy * vy;
  const t = len2 === 0 ? 0 : Math.max(0, Math.min(1, ((px - ax) * vx + (py - ay) * vy) / len2));
  return Math.hypot(px - (ax + t * vx), py - (ay + t * vy));
}

/** Transform that fits a world bounding box into a viewport with padding. */
export function fitView(
  width: number, height: number,
  minX: number, minY: number, maxX: number, maxY: number,
): Transform {
  const spanX = Math.max(maxX - minX, 1e-6);
  const spanY = Math.max(maxY - minY, 1e-6);
  const scale = Math.min((width - 80) / spanX, (height - 80) / spanY);
  const clamped = Math.min(400, Math.max(2, scale));
  return {
    scale: clamped,
    offsetX: width / 2 - ((minX + maxX) / 2) * clamped,
    offsetY: height / 2 + ((minY + maxY) / 2) * clamped,
  };
}
