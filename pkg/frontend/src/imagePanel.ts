/** The image panel: channel / aggregate / projection / optical tabs, the
 * lasso, and the mu/sigma threshold sliders. Lasso polygons convert to
 * dataset pixel coordinates before they hit the API. */

import { GraphStore } from './store';
import { LassoState, datasetToDisplay, fitTransform, type DisplayTransform, type Point } from './lasso';
import type { DatasetMeta } from './types';

type Tab = { key: string; label: string; url: () => string | null };

export class ImagePanel {
  private canvas: HTMLCanvasElement;
  private tabBar: HTMLDivElement;
  private message: HTMLDivElement;
  private lasso = new LassoState();
  private transform: DisplayTransform;
  private image: HTMLImageElement | null = null;
  private activeTab = 'channel';
  private activeChannel: string | null = null;
  private lastPolygon: Point[] | null = null;

  constructor(private root: HTMLElement, private store: GraphStore, private meta: DatasetMeta) {
    root.innerHTML = `
      <div class="panel-title">Images <span data-role="active-label"></span></div>
      <div class="tab-bar" data-role="tabs"></div>
      <canvas data-role="image-canvas" width="420" height="420"></canvas>
      <div class="sliders">
        <label>&mu; <input data-role="mu" type="range" min="0" max="1" step="0.01" value="${store.mu}">
          <span data-role="mu-value">${store.mu.toFixed(2)}</span></label>
        <label>&sigma; <input data-role="sigma" type="range" min="0" max="1" step="0.01" value="${store.sigma}">
          <span data-role="sigma-value">${store.sigma.toFixed(2)}</span></label>
        <button data-role="clear-roi">clear</button>
      </div>
      <div data-role="message" class="message"></div>`;
    this.canvas = root.querySelector('[data-role=image-canvas]')!;
    this.tabBar = root.querySelector('[data-role=tabs]')!;
    this.message = root.querySelector('[data-role=message]')!;
    this.transform = fitTransform(meta.width, meta.height, this.canvas.width, this.canvas.height);

    this.buildTabs();
    this.wireSliders();
    this.wireLasso();
    store.subscribe('selection', () => {
      if (this.activeTab === 'aggregate') this.show('aggregate');
    });
  }

  private tabs(): Tab[] {
    const tabs: Tab[] = [
      {
        key: 'channel',
        label: 'channel',
        url: () => (this.activeChannel ? this.store.api.channelImageUrl(this.activeChannel) : null),
      },
      {
        key: 'aggregate',
        label: 'stack mean',
        url: () => {
          const channels = [...this.store.selected].filter((id) =>
            this.meta.channels.some((c) => c.id === id));
          return channels.length ? this.store.api.aggregateImageUrl(channels) : null;
        },
      },
      { key: 'projection', label: 'RGB projection', url: () => this.store.api.projectionImageUrl() },
    ];
    for (const name of this.meta.optical_images) {
      tabs.push({ key: `optical:${name}`, label: name, url: () => this.store.api.opticalImageUrl(name) });
    }
    return tabs;
  }

  private buildTabs(): void {
    this.tabBar.innerHTML = '';
    for (const tab of this.tabs()) {
      const button = document.createElement('button');
      button.textContent = tab.label;
      button.dataset.tab = tab.key;
      button.addEventListener('click', () => this.show(tab.key));
      this.tabBar.appendChild(button);
    }
  }

  showChannel(id: string): void {
    this.activeChannel = id;
    this.show('channel');
  }

  show(tabKey: string): void {
    this.activeTab = tabKey;
    for (const button of this.tabBar.querySelectorAll('button')) {
      button.classList.toggle('active', button.dataset.tab === tabKey);
    }
    const tab = this.tabs().find((t) => t.key === tabKey);
    const url = tab?.url() ?? null;
    const label = this.root.querySelector('[data-role=active-label]')!;
    label.textContent = tabKey === 'channel' && this.activeChannel ? `(${this.activeChannel})` : '';
    if (!url) {
      this.image = null;
      this.message.textContent = tabKey === 'aggregate'
        ? 'Select channel nodes to average.' : 'Pick a channel from the list.';
      this.redraw();
      return;
    }
    this.message.textContent = '';
    const image = new Image();
    image.crossOrigin = 'anonymous';
    image.onload = () => {
      this.image = image;
      this.redraw();
    };
    image.src = url;
  }

  private wireSliders(): void {
    const mu = this.root.querySelector<HTMLInputElement>('[data-role=mu]')!;
    const sigma = this.root.querySelector<HTMLInputElement>('[data-role=sigma]')!;
    mu.addEventListener('input', () => {
      this.store.mu = Number(mu.value);
      this.root.querySelector('[data-role=mu-value]')!.textContent = this.store.mu.toFixed(2);
      void this.requery();
    });
    sigma.addEventListener('input', () => {
      this.store.sigma = Number(sigma.value);
      this.root.querySelector('[data-role=sigma-value]')!.textContent = this.store.sigma.toFixed(2);
      void this.requery();
    });
    this.root.querySelector('[data-role=clear-roi]')!.addEventListener('click', () => {
      this.lastPolygon = null;
      this.store.clearHighlight();
      this.redraw();
    });
  }

  /** Re-run the last lasso with the current thresholds. */
  private async requery(): Promise<void> {
    if (!this.lastPolygon) return;
    try {
      await this.store.runRoi(this.lastPolygon as [number, number][]);
      this.message.textContent = `${this.store.highlighted.size} channels match`;
    } catch (error) {
      this.message.textContent = error instanceof Error ? error.message : String(error);
    }
  }

  private canvasPoint(event: MouseEvent): Point {
    const rect = this.canvas.getBoundingClientRect();
    return [event.clientX - rect.left, event.clientY - rect.top];
  }

  private wireLasso(): void {
    this.canvas.addEventListener('mousedown', (e) => {
      this.lasso.start(this.canvasPoint(e));
    });
    this.canvas.addEventListener('mousemove', (e) => {
      if (!this.lasso.active) return;
      this.lasso.extend(this.canvasPoint(e));
      this.redraw();
    });
    this.canvas.addEventListener('mouseup', () => void this.finishLasso());
  }

  async finishLasso(): Promise<void> {
    if (!this.lasso.active) return;
    const polygon = this.lasso.finish(this.transform);
    if (polygon.length < 3) {
      this.redraw();
      return;
    }
    this.lastPolygon = polygon;
    try {
      const matched = await this.store.runRoi(polygon as [number, number][]);
      this.message.textContent = `${matched.length} channels match`;
    } catch (error) {
      this.message.textContent = error instanceof Error ? error.message : String(error);
    }
    this.redraw();
  }

  private redraw(): void {
    const ctx = this.canvas.getContext('2d');
    if (!ctx) return;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    if (this.image) {
      ctx.imageSmoothingEnabled = false;
      const [x0, y0] = datasetToDisplay([0, 0], this.transform);
      ctx.drawImage(this.image, x0, y0,
                    this.meta.width * this.transform.scale,
                    this.meta.height * this.transform.scale);
    }
    const path = this.lasso.displayPath();
    const polygon = path.length
      ? path
      : this.lastPolygon?.map((p) => datasetToDisplay(p, this.transform)) ?? [];
    if (polygon.length >= 2) {
      ctx.beginPath();
      ctx.strokeStyle = '#d0452c';
      ctx.lineWidth = 1.5;
      ctx.setLineDash([5, 3]);
      const first = polygon[0]!;
      ctx.moveTo(first[0], first[1]);
      for (const point of polygon.slice(1)) ctx.lineTo(point[0], point[1]);
      if (!this.lasso.active) ctx.closePath();
      ctx.stroke();
      ctx.setLineDash([]);
    }
  }
}
