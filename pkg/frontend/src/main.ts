/** Browser bootstrap: DOM wiring, keyboard bindings, status polling. */
import { ApiClient } from "./api.js";
import { screenToImage } from "./geometry.js";
import { drawScene } from "./render.js";
import { AnnotationController } from "./state.js";

const STATUS_POLL_MS = 2000;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

export function boot(baseUrl: string): AnnotationController {
  const canvas = el<HTMLCanvasElement>("canvas");
  const ctx = canvas.getContext("2d")!;
  const statusBar = el<HTMLDivElement>("status");
  const coords = el<HTMLDivElement>("coords");
  const banner = el<HTMLDivElement>("banner");
  const help = el<HTMLDivElement>("help");
  const imageList = el<HTMLUListElement>("image-list");
  const scaleInput = el<HTMLInputElement>("scale");

  const api = new ApiClient(baseUrl);
  let currentImage: HTMLImageElement | null = null;
  let loadedFor: string | null = null;

  const controller = new AnnotationController(api, () => {
    const s = controller.state;
    if (s.imageId !== null && s.imageId !== loadedFor) {
      loadedFor = s.imageId;
      currentImage = new Image();
      currentImage.onload = () => drawScene(ctx, currentImage, s);
      currentImage.src = api.imageFileUrl(s.imageId);
    }
    drawScene(ctx, currentImage, s);

    const st = s.status;
    statusBar.textContent =
      `model v${s.modelVersion}` +
      (st && st.last_loss !== null ? ` loss ${st.last_loss.toFixed(3)}` : "") +
      (st ? ` | ${st.labeled}/${st.total} labeled` : "") +
      (s.degraded ? " | no assistance" : "") +
      (s.edgeCue ? " | end of dataset" : "");
    coords.textContent = s.mouse
      ? `${s.mouse.x.toFixed(0)}, ${s.mouse.y.toFixed(0)}`
      : "";
    banner.textContent = s.banner ?? "";
    banner.style.display = s.banner ? "block" : "none";
    help.style.display = s.helpVisible ? "block" : "none";

    imageList.innerHTML = "";
    s.images.forEach((info, idx) => {
      const li = document.createElement("li");
      li.textContent = `${info.labeled ? "[x]" : "[ ]"} ${info.path}`;
      if (idx === s.imageIndex) {
        li.className = "current";
      }
      li.onclick = () => void controller.openImage(idx);
      imageList.appendChild(li);
    });
  });

  canvas.addEventListener("mousedown", (e) => {
    const rect = canvas.getBoundingClientRect();
    const p = screenToImage(
      { x: e.clientX - rect.left, y: e.clientY - rect.top },
      controller.state.scale
    );
    if (e.button === 2) {
      controller.rightClick(p);
    } else {
      controller.leftClick(p);
    }
  });
  canvas.addEventListener("contextmenu", (e) => e.preventDefault());
  canvas.addEventListener("mousemove", (e) => {
    const rect = canvas.getBoundingClientRect();
    controller.mouseMove(
      screenToImage({ x: e.clientX - rect.left, y: e.clientY - rect.top }, controller.state.scale)
    );
  });

  document.addEventListener("keydown", (e) => {
    if (e.key === "Delete") {
      void controller.clearAll();
    } else if (e.key === "ArrowRight") {
      void controller.next();
    } else if (e.key === "ArrowLeft") {
      void controller.prev();
    } else if (e.key === "h") {
      controller.toggleHelp();
    }
  });

  el<HTMLButtonElement>("help-button").onclick = () => controller.toggleHelp();
  scaleInput.onchange = () => controller.setScale(Number(scaleInput.value) || 1);

  void controller.start();
  setInterval(() => void controller.refreshStatus(), STATUS_POLL_MS);
  return controller;
}

declare global {
  interface Window {
    iadetBoot: typeof boot;
  }
}

if (typeof window !== "undefined") {
  window.iadetBoot = boot;
}
