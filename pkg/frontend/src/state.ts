/**
 * Canvas-state controller: all UI behavior with no DOM dependency, so the
 * whole interaction contract is testable headlessly against a live service.
 *
 * Box provenance: proposals load green ("prediction"), boxes the user draws
 * are red ("user"). An image with saved user annotations loads red-only --
 * stored annotations and model proposals are never shown together.
 */
import { ApiClient, ImageInfo, StatusResponse } from "./api.js";
import { Point, Rect, borderDistance, rectFromCorners } from "./geometry.js";

export type Provenance = "prediction" | "user";

export interface DisplayedBox {
  rect: Rect;
  provenance: Provenance;
}

export interface CanvasState {
  images: ImageInfo[];
  imageIndex: number;
  imageId: string | null;
  imageWidth: number;
  imageHeight: number;
  boxes: DisplayedBox[];
  pendingCorner: Point | null;
  mouse: Point | null;
  scale: number;
  modelVersion: number;
  degraded: boolean;
  userOwned: boolean; // the displayed boxes came from saved user annotations
  dirty: boolean;
  edgeCue: boolean;
  banner: string | null;
  helpVisible: boolean;
  status: StatusResponse | null;
}

function freshState(): CanvasState {
  return {
    images: [],
    imageIndex: -1,
    imageId: null,
    imageWidth: 0,
    imageHeight: 0,
    boxes: [],
    pendingCorner: null,
    mouse: null,
    scale: 1.0,
    modelVersion: 0,
    degraded: false,
    userOwned: false,
    dirty: false,
    edgeCue: false,
    banner: null,
    helpVisible: false,
    status: null,
  };
}

export class AnnotationController {
  readonly state: CanvasState = freshState();

  constructor(
    private readonly api: ApiClient,
    private readonly onChange: () => void = () => {}
  ) {}

  private changed(): void {
    this.onChange();
  }

  async start(): Promise<void> {
    try {
      this.state.images = await this.api.listImages();
      this.state.banner = null;
    } catch {
      // keep whatever list we had; the view stays usable offline
      this.state.banner = "service unreachable";
      this.changed();
      return;
    }
    await this.refreshStatus();
    if (this.state.images.length > 0) {
      const firstUnlabeled = this.state.images.findIndex((i) => !i.labeled);
      await this.openImage(firstUnlabeled >= 0 ? firstUnlabeled : 0);
    } else {
      this.changed();
    }
  }

  /** Load one image's view; saved user boxes win over model proposals. */
  async openImage(index: number): Promise<void> {
    const info = this.state.images[index];
    if (!info) {
      return;
    }
    this.state.imageIndex = index;
    this.state.imageId = info.id;
    this.state.imageWidth = info.width;
    this.state.imageHeight = info.height;
    this.state.pendingCorner = null;
    this.state.dirty = false;
    this.state.edgeCue = false;
    try {
      const pred = await this.api.predictions(info.id);
      this.state.modelVersion = pred.model_version;
      this.state.degraded = pred.degraded;
      this.state.userOwned = pred.precedence === "user";
      this.state.boxes = pred.boxes.map((b) => ({
        rect: { xMin: b.x_min, yMin: b.y_min, xMax: b.x_max, yMax: b.y_max },
        provenance: pred.precedence,
      }));
      this.state.banner = null;
    } catch {
      // unassisted fallback: show the bare image with a degraded badge
      this.state.boxes = [];
      this.state.degraded = true;
      this.state.userOwned = false;
    }
    this.changed();
  }

  // -- pointer input (image coordinates) ------------------------------------

  private insideImage(p: Point): boolean {
    return p.x >= 0 && p.y >= 0 && p.x <= this.state.imageWidth && p.y <= this.state.imageHeight;
  }

  /** Two-click creation: first click arms a corner, second closes the box. */
  leftClick(p: Point): void {
    if (this.state.imageId === null || !this.insideImage(p)) {
      return;
    }
    if (this.state.pendingCorner === null) {
      this.state.pendingCorner = p;
      this.changed();
      return;
    }
    const rect = rectFromCorners(this.state.pendingCorner, p);
    this.state.pendingCorner = null;
    if (rect !== null) {
      this.state.boxes.push({ rect, provenance: "user" });
      this.state.dirty = true;
    }
    this.changed();
  }

  /** Remove the box whose border is closest to the click; ties go to the newest. */
  rightClick(p: Point): void {
    if (this.state.boxes.length === 0) {
      return;
    }
    let bestIndex = 0;
    let best = Infinity;
    this.state.boxes.forEach((b, i) => {
      const d = borderDistance(p, b.rect);
      if (d <= best) {
        best = d;
        bestIndex = i;
      }
    });
    this.state.boxes.splice(bestIndex, 1);
    this.state.dirty = true;
    this.changed();
  }

  mouseMove(p: Point): void {
    this.state.mouse = p;
    this.changed();
  }

  setScale(scale: number): void {
    if (scale > 0) {
      this.state.scale = scale;
      this.changed();
    }
  }

  toggleHelp(): void {
    this.state.helpVisible = !this.state.helpVisible;
    this.changed();
  }

  // -- keyboard -------------------------------------------------------------

  /** Del: clear every box and persist the empty set immediately. */
  async clearAll(): Promise<void> {
    if (this.state.imageId === null) {
      return;
    }
    this.state.boxes = [];
    this.state.pendingCorner = null;
    this.state.dirty = true;
    this.changed();
    await this.save();
  }

  async next(): Promise<void> {
    await this.navigate(this.state.imageIndex + 1);
  }

  async prev(): Promise<void> {
    await this.navigate(this.state.imageIndex - 1);
  }

  private async navigate(target: number): Promise<void> {
    if (target < 0 || target >= this.state.images.length) {
      this.state.edgeCue = true; // visual cue only, nothing else happens
      this.changed();
      return;
    }
    await this.autosave();
    await this.openImage(target);
  }

  /**
   * Leaving an image commits what is on screen. Accepting proposals is a
   * plain navigation: prediction-seeded boxes are saved as annotations
   * without any extra click. A clean already-saved view is not re-sent.
   */
  private async autosave(): Promise<void> {
    if (this.state.imageId === null) {
      return;
    }
    if (this.state.userOwned && !this.state.dirty) {
      return;
    }
    await this.save();
  }

  /** PUT the displayed boxes; the view is marked clean only after the ack. */
  async save(): Promise<void> {
    if (this.state.imageId === null) {
      return;
    }
    const payload = this.state.boxes.map((b) => [
      b.rect.xMin,
      b.rect.yMin,
      b.rect.xMax,
      b.rect.yMax,
    ]);
    try {
      await this.api.putAnnotations(this.state.imageId, payload);
    } catch {
      this.state.banner = "save failed; annotations kept locally";
      this.changed();
      return;
    }
    this.state.boxes = this.state.boxes.map((b) => ({ ...b, provenance: "user" }));
    this.state.userOwned = true;
    this.state.dirty = false;
    const info = this.state.images[this.state.imageIndex];
    if (info) {
      info.labeled = true;
    }
    this.state.banner = null;
    this.changed();
  }

  async refreshStatus(): Promise<void> {
    try {
      this.state.status = await this.api.status();
      this.state.banner = null;
    } catch {
      this.state.banner = "service unreachable";
    }
    this.changed();
  }
}
