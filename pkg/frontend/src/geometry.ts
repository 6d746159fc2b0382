/** Box math shared by the canvas controller and renderer. */

export interface Rect {
  xMin: number;
  yMin: number;
  xMax: number;
  yMax: number;
}

export interface Point {
  x: number;
  y: number;
}

/** Build a rect from two opposite corners in either order. */
export function rectFromCorners(a: Point, b: Point): Rect | null {
  const xMin = Math.min(a.x, b.x);
  const xMax = Math.max(a.x, b.x);
  const yMin = Math.min(a.y, b.y);
  const yMax = Math.max(a.y, b.y);
  if (xMax <= xMin || yMax <= yMin) {
    return null; // zero-area pair, e.g. a double-click on one spot
  }
  return { xMin, yMin, xMax, yMax };
}

/**
 * Distance from a point to a rectangle's border (its outline, not its
 * center or interior): outside points measure to the nearest edge point,
 * inside points to the nearest edge.
 */
export function borderDistance(p: Point, r: Rect): number {
  const dx = Math.max(r.xMin - p.x, 0, p.x - r.xMax);
  const dy = Math.max(r.yMin - p.y, 0, p.y - r.yMax);
  if (dx > 0 || dy > 0) {
    return Math.hypot(dx, dy);
  }
  return Math.min(p.x - r.xMin, r.xMax - p.x, p.y - r.yMin, r.yMax - p.y);
}

export function clampToImage(p: Point, width: number, height: number): Point {
  return {
    x: Math.min(Math.max(p.x, 0), width),
    y: Math.min(Math.max(p.y, 0), height),
  };
}

/** Screen pixels -> image pixels at the given display scale. */
export function screenToImage(p: Point, scale: number): Point {
  return { x: p.x / scale, y: p.y / scale };
}

/** Image pixels -> screen pixels at the given display scale. */
export function imageToScreen(p: Point, scale: number): Point {
  return { x: p.x * scale, y: p.y * scale };
}
