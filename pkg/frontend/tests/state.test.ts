import { beforeEach, describe, expect, it } from "vitest";

import type { ApiClient, ImageInfo, PredictionsResponse, StatusResponse } from "../src/api.js";
import { AnnotationController } from "../src/state.js";

/** In-memory stand-in for the service with the same surface the UI uses. */
class FakeApi {
  images: ImageInfo[] = [
    { id: "a.png", path: "a.png", width: 640, height: 480, labeled: false, labeled_at: null },
    { id: "b.png", path: "b.png", width: 640, height: 480, labeled: false, labeled_at: null },
    { id: "c.png", path: "c.png", width: 640, height: 480, labeled: false, labeled_at: null },
  ];
  saved = new Map<string, number[][]>();
  proposals = new Map<string, number[][]>([["a.png", [[100, 100, 200, 180]]]]);
  failPredictions = false;
  failAll = false;
  puts: Array<{ id: string; boxes: number[][] }> = [];

  async listImages(): Promise<ImageInfo[]> {
    if (this.failAll) throw new Error("down");
    return this.images.map((i) => ({ ...i }));
  }

  async predictions(imageId: string): Promise<PredictionsResponse> {
    if (this.failAll || this.failPredictions) throw new Error("down");
    const user = this.saved.get(imageId);
    if (user) {
      return {
        image_id: imageId,
        precedence: "user",
        model_version: 1,
        degraded: false,
        boxes: user.map(([x1, y1, x2, y2]) => ({
          x_min: x1!, y_min: y1!, x_max: x2!, y_max: y2!, score: null,
        })),
      };
    }
    const prop = this.proposals.get(imageId) ?? [];
    return {
      image_id: imageId,
      precedence: "prediction",
      model_version: 1,
      degraded: false,
      boxes: prop.map(([x1, y1, x2, y2]) => ({
        x_min: x1!, y_min: y1!, x_max: x2!, y_max: y2!, score: 0.9,
      })),
    };
  }

  async annotations(imageId: string) {
    return { image_id: imageId, labeled: this.saved.has(imageId), boxes: this.saved.get(imageId) ?? [] };
  }

  async putAnnotations(imageId: string, boxes: number[][]): Promise<void> {
    if (this.failAll) throw new Error("down");
    this.puts.push({ id: imageId, boxes });
    this.saved.set(imageId, boxes);
    const info = this.images.find((i) => i.id === imageId);
    if (info) info.labeled = true;
  }

  async status(): Promise<StatusResponse> {
    if (this.failAll) throw new Error("down");
    return {
      model_version: 1, source: "builtin", epochs: null, last_loss: 0.25,
      labeled: this.saved.size, total: this.images.length,
      strategy: "sequential", elapsed_seconds: 1,
    };
  }

  async nextImage() {
    return { image_id: this.images.find((i) => !i.labeled)?.id ?? "" };
  }

  imageFileUrl(imageId: string): string {
    return `/images/${imageId}/file`;
  }
}

function makeController() {
  const api = new FakeApi();
  const controller = new AnnotationController(api as unknown as ApiClient);
  return { api, controller };
}

describe("two-click creation", () => {
  let api: FakeApi;
  let controller: AnnotationController;
  beforeEach(async () => {
    ({ api, controller } = makeController());
    await controller.start();
  });

  it("arms a corner then closes the box, either order", () => {
    controller.leftClick({ x: 50, y: 40 });
    expect(controller.state.pendingCorner).toEqual({ x: 50, y: 40 });
    controller.leftClick({ x: 10, y: 10 });
    const drawn = controller.state.boxes.at(-1)!;
    expect(drawn.rect).toEqual({ xMin: 10, yMin: 10, xMax: 50, yMax: 40 });
    expect(drawn.provenance).toBe("user");
    expect(controller.state.pendingCorner).toBeNull();
  });

  it("double-click on one point clears the pending corner, no box", () => {
    const before = controller.state.boxes.length;
    controller.leftClick({ x: 30, y: 30 });
    controller.leftClick({ x: 30, y: 30 });
    expect(controller.state.boxes.length).toBe(before);
    expect(controller.state.pendingCorner).toBeNull();
  });

  it("ignores clicks outside the image area", () => {
    controller.leftClick({ x: -5, y: 10 });
    expect(controller.state.pendingCorner).toBeNull();
    controller.leftClick({ x: 700, y: 10 });
    expect(controller.state.pendingCorner).toBeNull();
  });
});

describe("nearest-border removal", () => {
  it("removes the box with the nearest border, not the nearest center", async () => {
    const { controller } = makeController();
    await controller.start();
    await controller.clearAll();
    controller.leftClick({ x: 0, y: 0 });
    controller.leftClick({ x: 10, y: 10 }); // small box
    controller.leftClick({ x: 12, y: 0 });
    controller.leftClick({ x: 112, y: 100 }); // big box, border nearer to the click
    controller.rightClick({ x: 11.5, y: 5 });
    expect(controller.state.boxes.length).toBe(1);
    expect(controller.state.boxes[0]!.rect).toEqual({ xMin: 0, yMin: 0, xMax: 10, yMax: 10 });
  });

  it("ties go to the most recently created box", async () => {
    const { controller } = makeController();
    await controller.start();
    await controller.clearAll();
    // identical boxes: distances tie exactly
    for (let i = 0; i < 2; i++) {
      controller.leftClick({ x: 20, y: 20 });
      controller.leftClick({ x: 40, y: 40 });
    }
    const first = controller.state.boxes[0]!;
    controller.rightClick({ x: 30, y: 30 });
    expect(controller.state.boxes.length).toBe(1);
    expect(controller.state.boxes[0]!).toBe(first); // the newer twin was removed
  });

  it("click far outside all boxes still removes the nearest", async () => {
    const { controller } = makeController();
    await controller.start();
    expect(controller.state.boxes.length).toBe(1); // the proposal
    controller.rightClick({ x: 639, y: 479 });
    expect(controller.state.boxes.length).toBe(0);
  });

  it("no boxes is a no-op", async () => {
    const { controller } = makeController();
    await controller.start();
    await controller.clearAll();
    controller.rightClick({ x: 5, y: 5 });
    expect(controller.state.boxes.length).toBe(0);
  });
});

describe("keyboard bindings", () => {
  it("Del clears all boxes and issues a PUT", async () => {
    const { api, controller } = makeController();
    await controller.start();
    controller.leftClick({ x: 10, y: 10 });
    controller.leftClick({ x: 30, y: 30 });
    await controller.clearAll();
    expect(controller.state.boxes).toEqual([]);
    expect(api.puts.at(-1)).toEqual({ id: "a.png", boxes: [] });
  });

  it("navigation past either end is a no-op with a visual cue", async () => {
    const { controller } = makeController();
    await controller.start();
    await controller.prev();
    expect(controller.state.imageIndex).toBe(0);
    expect(controller.state.edgeCue).toBe(true);
    for (let i = 0; i < 5; i++) {
      await controller.next();
    }
    expect(controller.state.imageIndex).toBe(2); // lands on the last image
    expect(controller.state.imageId).toBe("c.png");
  });

  it("draw, next, prev: the box persisted through navigation", async () => {
    const { api, controller } = makeController();
    await controller.start();
    controller.leftClick({ x: 10, y: 10 });
    controller.leftClick({ x: 60, y: 50 });
    await controller.next();
    expect(api.saved.get("a.png")).toContainEqual([10, 10, 60, 50]);
    await controller.prev();
    expect(controller.state.imageId).toBe("a.png");
    expect(controller.state.boxes.some(
      (b) => b.rect.xMin === 10 && b.rect.yMax === 50 && b.provenance === "user"
    )).toBe(true);
  });
});

describe("image view loading", () => {
  it("unlabeled image shows proposals as green prediction boxes", async () => {
    const { controller } = makeController();
    await controller.start();
    expect(controller.state.imageId).toBe("a.png");
    expect(controller.state.boxes.map((b) => b.provenance)).toEqual(["prediction"]);
    expect(controller.state.userOwned).toBe(false);
  });

  it("previously labeled image shows user boxes only", async () => {
    const { api, controller } = makeController();
    api.saved.set("a.png", [[1, 1, 9, 9]]);
    await controller.start();
    // a.png is saved, so the first unlabeled is b.png; go back to a.png
    await controller.openImage(0);
    expect(controller.state.userOwned).toBe(true);
    expect(controller.state.boxes.every((b) => b.provenance === "user")).toBe(true);
  });

  it("accepting proposals needs no click: navigating away saves them", async () => {
    const { api, controller } = makeController();
    await controller.start();
    expect(controller.state.boxes.length).toBe(1); // untouched proposal
    await controller.next();
    expect(api.saved.get("a.png")).toEqual([[100, 100, 200, 180]]);
  });

  it("prediction fetch failure degrades to an unassisted view", async () => {
    const { api, controller } = makeController();
    api.failPredictions = true;
    await controller.start();
    expect(controller.state.degraded).toBe(true);
    expect(controller.state.boxes).toEqual([]);
  });

  it("service down keeps the cached list and raises a banner", async () => {
    const { api, controller } = makeController();
    await controller.start();
    api.failAll = true;
    await controller.start();
    expect(controller.state.banner).toBe("service unreachable");
    expect(controller.state.images.length).toBe(3); // cached view survives
  });

  it("clean already-saved views are not re-sent on navigation", async () => {
    const { api, controller } = makeController();
    api.saved.set("a.png", [[1, 1, 9, 9]]);
    await controller.start(); // opens b.png (first unlabeled)
    await controller.openImage(0); // a.png, user-owned, clean
    const putCount = api.puts.length;
    await controller.next();
    expect(api.puts.length).toBe(putCount);
  });
});

describe("status polling", () => {
  it("surfaces model version, loss, and progress", async () => {
    const { controller } = makeController();
    await controller.start();
    await controller.refreshStatus();
    expect(controller.state.status?.model_version).toBe(1);
    expect(controller.state.status?.last_loss).toBeCloseTo(0.25);
    expect(controller.state.status?.total).toBe(3);
  });
});
