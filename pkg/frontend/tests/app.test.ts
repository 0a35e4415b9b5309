// @vitest-environment jsdom
import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest';

import { ApiClient, SearchResponse, VideoInfo } from '../src/api';
import { App } from '../src/app';

const VIDEOS: VideoInfo[] = [
  { video_id: 'vid001', frame_count: 40, duration: 8.0 },
  { video_id: 'vid002', frame_count: 40, duration: 8.0 },
  { video_id: 'vid003', frame_count: 40, duration: 8.0 },
];

function searchPayload(engine: string, videos?: SearchResponse['videos']): SearchResponse {
  return {
    query_id: 'q1',
    engine: engine as SearchResponse['engine'],
    elapsed_ms: 12.5,
    videos: videos ?? [
      {
        video_id: 'vid001',
        best_score: 0.9,
        best_timestamp: 2.0,
        best_frame_index: 10,
        matched_timestamps: [1.6, 2.0],
      },
    ],
  };
}

function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { 'content-type': 'application/json' },
  });
}

type FetchMock = ReturnType<typeof vi.fn>;

function mockFetch(onSearch: (form: FormData) => Response | Promise<Response>): FetchMock {
  const mock = vi.fn(async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    if (url.endsWith('/api/videos')) return jsonResponse(VIDEOS);
    if (url.endsWith('/api/search')) return onSearch(init!.body as FormData);
    throw new Error(`unexpected fetch ${url}`);
  });
  vi.stubGlobal('fetch', mock);
  return mock;
}

function searchCalls(mock: FetchMock): FormData[] {
  return mock.mock.calls
    .filter(([input]) => String(input).endsWith('/api/search'))
    .map(([, init]) => (init as RequestInit).body as FormData);
}

const QUERY = new Blob(['fake-image-bytes'], { type: 'image/png' });

describe('App', () => {
  let root: HTMLElement;

  beforeEach(() => {
    root = document.createElement('div');
    document.body.appendChild(root);
  });

  afterEach(() => {
    vi.unstubAllGlobals();
    root.remove();
  });

  it('renders markers at 20% and 25% for timestamps 1.6/2.0 on an 8 s video', async () => {
    mockFetch((form) => jsonResponse(searchPayload(form.get('engine') as string)));
    const app = new App(root, new ApiClient());
    await app.submitQuery(QUERY, 'A');

    const markers = root.querySelectorAll<HTMLElement>('.marker');
    expect(markers).toHaveLength(2);
    expect(markers[0].style.left).toBe('20%');
    expect(markers[1].style.left).toBe('25%');
  });

  it('shows the elapsed time of the answering engine', async () => {
    mockFetch((form) => jsonResponse(searchPayload(form.get('engine') as string)));
    const app = new App(root, new ApiClient());
    await app.submitQuery(QUERY, 'A');
    expect(root.querySelector('.elapsed')!.textContent).toContain('12.5 ms');
  });

  it('issues a new request on engine switch and caches per (query, engine)', async () => {
    const mock = mockFetch((form) => jsonResponse(searchPayload(form.get('engine') as string)));
    const app = new App(root, new ApiClient());
    await app.submitQuery(QUERY, 'A');
    expect(searchCalls(mock)).toHaveLength(1);

    await app.switchEngine('B');
    const calls = searchCalls(mock);
    expect(calls).toHaveLength(2);
    expect(calls[1].get('engine')).toBe('B');

    // back to A: served from the per-(query, engine) cache, no third request
    await app.switchEngine('A');
    expect(searchCalls(mock)).toHaveLength(2);
  });

  it('a new query invalidates nothing but gets fresh requests', async () => {
    const mock = mockFetch((form) => jsonResponse(searchPayload(form.get('engine') as string)));
    const app = new App(root, new ApiClient());
    await app.submitQuery(QUERY, 'A');
    await app.submitQuery(new Blob(['other'], { type: 'image/png' }), 'A');
    expect(searchCalls(mock)).toHaveLength(2);
  });

  it('displays videos in exactly the payload order', async () => {
    const videos = [
      { video_id: 'vid002', best_score: 0.8, best_timestamp: 1.0, best_frame_index: 5, matched_timestamps: [1.0] },
      { video_id: 'vid003', best_score: 0.7, best_timestamp: 3.0, best_frame_index: 15, matched_timestamps: [3.0] },
      { video_id: 'vid001', best_score: 0.6, best_timestamp: 5.0, best_frame_index: 25, matched_timestamps: [5.0] },
    ];
    mockFetch(() => jsonResponse(searchPayload('A', videos)));
    const app = new App(root, new ApiClient());
    await app.submitQuery(QUERY, 'A');

    const panels = root.querySelectorAll<HTMLElement>('.video-panel');
    expect([...panels].map((p) => p.dataset.videoId)).toEqual(['vid002', 'vid003', 'vid001']);
  });

  it('marker click swaps in the nearest indexed frame as poster', async () => {
    mockFetch((form) => jsonResponse(searchPayload(form.get('engine') as string)));
    const app = new App(root, new ApiClient('http://svc'));
    await app.submitQuery(QUERY, 'A');

    const marker = root.querySelectorAll<HTMLElement>('.marker')[1]; // 2.0 s
    marker.click();
    const poster = root.querySelector<HTMLImageElement>('img.poster')!;
    expect(poster.hidden).toBe(false);
    expect(poster.src).toBe('http://svc/api/videos/vid001/frames/10');
  });

  it('shows the explicit empty state for engine C without local matches', async () => {
    mockFetch(() => jsonResponse(searchPayload('C', [])));
    const app = new App(root, new ApiClient());
    await app.submitQuery(QUERY, 'C');
    expect(root.querySelector('.empty')!.textContent).toBe('no local matches');
  });

  it('surfaces a 400 as an invalid-image banner', async () => {
    mockFetch(() => jsonResponse({ detail: 'image bytes are not decodable' }, 400));
    const app = new App(root, new ApiClient());
    await app.submitQuery(QUERY, 'A');
    const banner = root.querySelector<HTMLElement>('.banner')!;
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toContain('invalid image');
    expect(banner.dataset.retryable).toBe('false');
  });

  it('surfaces network failure as a retryable banner', async () => {
    mockFetch(() => Promise.reject(new TypeError('network down')));
    const app = new App(root, new ApiClient());
    await app.submitQuery(QUERY, 'A');
    const banner = root.querySelector<HTMLElement>('.banner')!;
    expect(banner.hidden).toBe(false);
    expect(banner.dataset.retryable).toBe('true');
  });

  it('discards a stale response superseded by a newer request', async () => {
    let resolveFirst: (r: Response) => void;
    const first = new Promise<Response>((resolve) => {
      resolveFirst = resolve;
    });
    let call = 0;
    mockFetch(() => {
      call += 1;
      if (call === 1) return first; // hangs until released
      return jsonResponse(searchPayload('A', [
        { video_id: 'vid002', best_score: 0.5, best_timestamp: 1.0, best_frame_index: 5, matched_timestamps: [1.0] },
      ]));
    });
    const app = new App(root, new ApiClient());

    const slow = app.submitQuery(QUERY, 'A');
    const fast = app.submitQuery(new Blob(['newer'], { type: 'image/png' }), 'A');
    await fast;
    expect(root.querySelector<HTMLElement>('.video-panel')!.dataset.videoId).toBe('vid002');

    // the first (stale) response arrives late and must not replace the view
    resolveFirst!(jsonResponse(searchPayload('A')));
    await slow;
    expect(root.querySelector<HTMLElement>('.video-panel')!.dataset.videoId).toBe('vid002');
  });

  it('compare view shows each queried engine with its own ordering', async () => {
    mockFetch((form) => {
      const engine = form.get('engine') as string;
      const videos = engine === 'A'
        ? [
            { video_id: 'vid001', best_score: 0.9, best_timestamp: 2.0, best_frame_index: 10, matched_timestamps: [2.0] },
            { video_id: 'vid002', best_score: 0.8, best_timestamp: 1.0, best_frame_index: 5, matched_timestamps: [1.0] },
          ]
        : [
            { video_id: 'vid002', best_score: 0.7, best_timestamp: 1.0, best_frame_index: 5, matched_timestamps: [1.0] },
            { video_id: 'vid001', best_score: 0.6, best_timestamp: 2.0, best_frame_index: 10, matched_timestamps: [2.0] },
          ];
      return jsonResponse(searchPayload(engine, videos));
    });
    const app = new App(root, new ApiClient());
    await app.submitQuery(QUERY, 'A');
    await app.switchEngine('C');
    await app.compareEngines();

    const columns = root.querySelectorAll<HTMLElement>('.compare-column');
    expect([...columns].map((c) => c.dataset.engine)).toEqual(['A', 'C']);
    const order = (column: HTMLElement) =>
      [...column.querySelectorAll<HTMLElement>('.video-panel')].map((p) => p.dataset.videoId);
    expect(order(columns[0])).toEqual(['vid001', 'vid002']);
    expect(order(columns[1])).toEqual(['vid002', 'vid001']);
  });
});
