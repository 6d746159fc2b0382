/** Canvas drawing: the only module that touches rendering APIs. */
import { imageToScreen } from "./geometry.js";
import { CanvasState } from "./state.js";

const COLORS = { prediction: "#19b219", user: "#e02020" } as const;

export function drawScene(
  ctx: CanvasRenderingContext2D,
  image: HTMLImageElement | null,
  state: CanvasState
): void {
  const w = state.imageWidth * state.scale;
  const h = state.imageHeight * state.scale;
  ctx.canvas.width = Math.max(1, Math.round(w));
  ctx.canvas.height = Math.max(1, Math.round(h));
  ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  if (image !== null && image.complete && image.naturalWidth > 0) {
    ctx.drawImage(image, 0, 0, w, h);
  } else {
    ctx.fillStyle = "#202228";
    ctx.fillRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  }

  ctx.lineWidth = 2;
  for (const { rect, provenance } of state.boxes) {
    const a = imageToScreen({ x: rect.xMin, y: rect.yMin }, state.scale);
    const b = imageToScreen({ x: rect.xMax, y: rect.yMax }, state.scale);
    ctx.strokeStyle = COLORS[provenance];
    ctx.strokeRect(a.x, a.y, b.x - a.x, b.y - a.y);
  }

  if (state.pendingCorner !== null) {
    const p = imageToScreen(state.pendingCorner, state.scale);
    ctx.strokeStyle = COLORS.user;
    ctx.beginPath();
    ctx.moveTo(p.x - 6, p.y);
    ctx.lineTo(p.x + 6, p.y);
    ctx.moveTo(p.x, p.y - 6);
    ctx.lineTo(p.x, p.y + 6);
    ctx.stroke();
  }
}
