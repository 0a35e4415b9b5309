/** Typed client for the evir search service. The UI consumes only these
 * /api endpoints; the only configuration is the base URL. */

export type Engine = 'A' | 'B' | 'C';

export const ENGINES: Engine[] = ['A', 'B', 'C'];

export interface VideoHit {
  video_id: string;
  best_score: number;
  best_timestamp: number;
  best_frame_index: number;
  matched_timestamps: number[];
}

export interface SearchResponse {
  query_id: string;
  engine: Engine;
  elapsed_ms: number;
  videos: VideoHit[];
}

export interface VideoInfo {
  video_id: string;
  frame_count: number;
  duration: number;
}

export interface HealthResponse {
  status: 'ok' | 'loading';
  frames: number;
}

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
    this.name = 'ApiError';
  }
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = `${response.status}`;
    try {
      const body = (await response.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      /* non-JSON error body; keep the status code */
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(private baseUrl: string = '') {}

  async health(): Promise<HealthResponse> {
    return asJson(await fetch(`${this.baseUrl}/api/health`));
  }

  async listVideos(): Promise<VideoInfo[]> {
    return asJson(await fetch(`${this.baseUrl}/api/videos`));
  }

  /** URL of one indexed frame, for poster display when only frames are served. */
  frameUrl(videoId: string, frameIndex: number): string {
    return `${this.baseUrl}/api/videos/${encodeURIComponent(videoId)}/frames/${frameIndex}`;
  }

  async search(image: Blob, engine: Engine, filename = 'query.png'): Promise<SearchResponse> {
    const form = new FormData();
    form.append('image', image, filename);
    form.append('engine', engine);
    return asJson(await fetch(`${this.baseUrl}/api/search`, { method: 'POST', body: form }));
  }
}
