/** Video timeline with matched-frame markers: the marker position is a pure
 * function of (timestamp, duration), so resizing preserves fractions. */

import { VideoHit } from './api';

export interface TimelineCallbacks {
  /** Called when a marker is activated (click or keyboard). */
  onSeek?: (timestamp: number, frameIndex: number) => void;
}

export function markerFraction(timestamp: number, duration: number): number {
  if (duration <= 0) return 0;
  return Math.min(1, Math.max(0, timestamp / duration));
}

/** Nearest indexed frame for a timestamp at the service's sampling rate. */
export function nearestFrameIndex(timestamp: number, fps: number): number {
  return Math.round(timestamp * fps);
}

export class Timeline {
  readonly element: HTMLElement;
  private playhead: HTMLElement;
  private markers: HTMLElement[] = [];
  private current = -1;

  constructor(
    private doc: Document,
    hit: VideoHit,
    private duration: number,
    private fps: number,
    private callbacks: TimelineCallbacks = {},
  ) {
    this.element = doc.createElement('div');
    this.element.className = 'timeline';
    this.element.dataset.videoId = hit.video_id;
    this.element.tabIndex = 0;

    this.playhead = doc.createElement('div');
    this.playhead.className = 'playhead';
    this.element.appendChild(this.playhead);

    for (const ts of hit.matched_timestamps) {
      this.element.appendChild(this.buildMarker(ts));
    }

    this.element.addEventListener('keydown', (event) => {
      if (event.key === 'ArrowRight') this.cycleMarker(1);
      if (event.key === 'ArrowLeft') this.cycleMarker(-1);
    });
  }

  private buildMarker(timestamp: number): HTMLElement {
    const marker = this.doc.createElement('span');
    marker.className = 'marker';
    const fraction = markerFraction(timestamp, this.duration);
    marker.style.left = `${(fraction * 100).toFixed(4)}%`;
    marker.dataset.timestamp = String(timestamp);
    marker.dataset.frame = String(nearestFrameIndex(timestamp, this.fps));
    marker.title = `${timestamp.toFixed(2)} s`;
    marker.addEventListener('click', () => this.seekTo(this.markers.indexOf(marker)));
    this.markers.push(marker);
    return marker;
  }

  /** Move the playhead to one marker and notify the host view. */
  seekTo(markerIndex: number): void {
    if (markerIndex < 0 || markerIndex >= this.markers.length) return;
    this.current = markerIndex;
    const marker = this.markers[markerIndex];
    this.playhead.style.left = marker.style.left;
    const timestamp = Number(marker.dataset.timestamp);
    const frame = Number(marker.dataset.frame);
    this.element.dataset.playhead = String(timestamp);
    this.callbacks.onSeek?.(timestamp, frame);
  }

  /** Keyboard next/prev marker, cycling in timestamp order. */
  cycleMarker(step: 1 | -1): void {
    if (this.markers.length === 0) return;
    const n = this.markers.length;
    this.seekTo(((this.current + step) % n + n) % n);
  }

  get playheadTimestamp(): number | null {
    const raw = this.element.dataset.playhead;
    return raw === undefined ? null : Number(raw);
  }
}
