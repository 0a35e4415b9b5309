/** Single-page search view: submit a query image, switch among the blindly
 * labeled engines A/B/C, and inspect the ranked videos on marker timelines.
 *
 * The view is presentation-only — it never re-ranks; panels always appear in
 * the order of the API payload. Results are cached per (query, engine) and
 * stale responses are discarded by request sequence number.
 */

import { ApiClient, ApiError, Engine, ENGINES, SearchResponse, VideoInfo } from './api';
import { Timeline } from './timeline';

interface QueryState {
  key: number;
  image: Blob;
  filename: string;
}

export class App {
  readonly api: ApiClient;
  private doc: Document;
  private tabs = new Map<Engine, HTMLButtonElement>();
  private banner: HTMLElement;
  private results: HTMLElement;
  private poster: HTMLImageElement;

  private query: QueryState | null = null;
  private nextQueryKey = 1;
  private activeEngine: Engine = 'A';
  private cache = new Map<string, SearchResponse>();
  private sequence = 0;
  private latestSeq = new Map<Engine, number>();
  private videoInfo: Map<string, VideoInfo> | null = null;

  constructor(root: HTMLElement, api: ApiClient) {
    this.api = api;
    this.doc = root.ownerDocument;

    const tabBar = this.doc.createElement('div');
    tabBar.className = 'engine-tabs';
    for (const engine of ENGINES) {
      const tab = this.doc.createElement('button');
      tab.textContent = `Engine ${engine}`;
      tab.dataset.engine = engine;
      tab.addEventListener('click', () => void this.switchEngine(engine));
      this.tabs.set(engine, tab);
      tabBar.appendChild(tab);
    }
    this.banner = this.doc.createElement('div');
    this.banner.className = 'banner';
    this.banner.hidden = true;
    this.results = this.doc.createElement('div');
    this.results.className = 'results';
    this.poster = this.doc.createElement('img');
    this.poster.className = 'poster';
    this.poster.hidden = true;

    root.append(tabBar, this.banner, this.poster, this.results);
    this.markActiveTab();
  }

  /** Start a new search session for one query image on the given engine. */
  async submitQuery(image: Blob, engine: Engine = this.activeEngine, filename = 'query.png'): Promise<void> {
    this.query = { key: this.nextQueryKey++, image, filename };
    this.activeEngine = engine;
    this.markActiveTab();
    await this.runSearch(engine);
  }

  /** Show another engine's view of the current query; cached per (query, engine). */
  async switchEngine(engine: Engine): Promise<void> {
    this.activeEngine = engine;
    this.markActiveTab();
    if (this.query === null) return;
    await this.runSearch(engine);
  }

  private cacheKey(queryKey: number, engine: Engine): string {
    return `${queryKey}:${engine}`;
  }

  private async runSearch(engine: Engine): Promise<void> {
    const query = this.query;
    if (query === null) return;

    const cached = this.cache.get(this.cacheKey(query.key, engine));
    if (cached !== undefined) {
      await this.render(cached);
      return;
    }

    const seq = ++this.sequence;
    this.latestSeq.set(engine, seq);
    this.clearBanner();
    try {
      const response = await this.api.search(query.image, engine, query.filename);
      // discard responses superseded by a newer request on this tab or a new query
      if (this.latestSeq.get(engine) !== seq || this.query?.key !== query.key) return;
      this.cache.set(this.cacheKey(query.key, engine), response);
      if (this.activeEngine === engine) await this.render(response);
    } catch (error) {
      if (this.latestSeq.get(engine) !== seq || this.query?.key !== query.key) return;
      if (error instanceof ApiError && error.status === 400) {
        this.showBanner(`invalid image: ${error.message}`, false);
      } else {
        this.showBanner('search failed — service unreachable', true);
      }
    }
  }

  /** Render every queried engine side by side, preserving each ordering. */
  async compareEngines(): Promise<void> {
    const query = this.query;
    if (query === null) return;
    this.results.textContent = '';
    for (const engine of ENGINES) {
      const cached = this.cache.get(this.cacheKey(query.key, engine));
      if (cached === undefined) continue;
      const column = this.doc.createElement('section');
      column.className = 'compare-column';
      column.dataset.engine = engine;
      const heading = this.doc.createElement('h2');
      heading.textContent = `Engine ${engine}`;
      column.appendChild(heading);
      column.appendChild(await this.buildPanels(cached));
      this.results.appendChild(column);
    }
  }

  private async render(response: SearchResponse): Promise<void> {
    this.results.textContent = '';
    const status = this.doc.createElement('p');
    status.className = 'elapsed';
    status.textContent = `engine ${response.engine} answered in ${response.elapsed_ms.toFixed(1)} ms`;
    this.results.appendChild(status);
    this.results.appendChild(await this.buildPanels(response));
  }

  private async buildPanels(response: SearchResponse): Promise<HTMLElement> {
    const list = this.doc.createElement('div');
    list.className = 'video-panels';
    if (response.videos.length === 0) {
      const empty = this.doc.createElement('p');
      empty.className = 'empty';
      empty.textContent = response.engine === 'C'
        ? 'no local matches'
        : 'no matches';
      list.appendChild(empty);
      return list;
    }
    const info = await this.loadVideoInfo();
    for (const hit of response.videos) {
      const panel = this.doc.createElement('div');
      panel.className = 'video-panel';
      panel.dataset.videoId = hit.video_id;

      const title = this.doc.createElement('h3');
      title.textContent = `${hit.video_id} — best ${hit.best_score.toFixed(4)} at ${hit.best_timestamp.toFixed(2)} s`;
      panel.appendChild(title);

      const meta = info.get(hit.video_id);
      const duration = meta?.duration ?? 0;
      const fps = meta && meta.duration > 0 ? meta.frame_count / meta.duration : 0;
      const timeline = new Timeline(this.doc, hit, duration, fps, {
        onSeek: (_timestamp, frame) => this.showPoster(hit.video_id, frame),
      });
      panel.appendChild(timeline.element);
      list.appendChild(panel);
    }
    return list;
  }

  /** Frame-only media: a marker click fetches the nearest indexed frame. */
  private showPoster(videoId: string, frameIndex: number): void {
    this.poster.src = this.api.frameUrl(videoId, frameIndex);
    this.poster.hidden = false;
  }

  private async loadVideoInfo(): Promise<Map<string, VideoInfo>> {
    if (this.videoInfo === null) {
      const infos = await this.api.listVideos();
      this.videoInfo = new Map(infos.map((v) => [v.video_id, v]));
    }
    return this.videoInfo;
  }

  private markActiveTab(): void {
    for (const [engine, tab] of this.tabs) {
      tab.classList.toggle('active', engine === this.activeEngine);
    }
  }

  private showBanner(message: string, retryable: boolean): void {
    this.banner.textContent = retryable ? `${message} (retry)` : message;
    this.banner.hidden = false;
    this.banner.dataset.retryable = String(retryable);
  }

  private clearBanner(): void {
    this.banner.hidden = true;
    this.banner.textContent = '';
  }
}
