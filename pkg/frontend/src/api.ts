/** Typed client for the annotation service; the UI's only data source. */

export interface ImageInfo {
  id: string;
  path: string;
  width: number;
  height: number;
  labeled: boolean;
  labeled_at: number | null;
}

export interface BoxEntry {
  x_min: number;
  y_min: number;
  x_max: number;
  y_max: number;
  score: number | null;
}

export interface PredictionsResponse {
  image_id: string;
  precedence: "user" | "prediction";
  model_version: number;
  degraded: boolean;
  boxes: BoxEntry[];
}

export interface StatusResponse {
  model_version: number;
  source: string;
  epochs: number | null;
  last_loss: number | null;
  labeled: number;
  total: number;
  strategy: string;
  elapsed_seconds: number;
}

export class ApiClient {
  constructor(private readonly baseUrl: string) {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  private async getJson<T>(path: string): Promise<T> {
    const res = await fetch(this.url(path));
    if (!res.ok) {
      throw new Error(`GET ${path} -> ${res.status}`);
    }
    return (await res.json()) as T;
  }

  listImages(): Promise<ImageInfo[]> {
    return this.getJson("/images");
  }

  predictions(imageId: string): Promise<PredictionsResponse> {
    return this.getJson(`/images/${encodeURIComponent(imageId)}/predictions`);
  }

  annotations(imageId: string): Promise<{ image_id: string; labeled: boolean; boxes: number[][] }> {
    return this.getJson(`/images/${encodeURIComponent(imageId)}/annotations`);
  }

  async putAnnotations(imageId: string, boxes: number[][]): Promise<void> {
    const res = await fetch(this.url(`/images/${encodeURIComponent(imageId)}/annotations`), {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ boxes }),
    });
    if (!res.ok) {
      throw new Error(`PUT annotations -> ${res.status}`);
    }
  }

  status(): Promise<StatusResponse> {
    return this.getJson("/status");
  }

  nextImage(): Promise<{ image_id: string }> {
    return this.getJson("/next");
  }

  imageFileUrl(imageId: string): string {
    return this.url(`/images/${encodeURIComponent(imageId)}/file`);
  }
}
