/** The graph panel: force layout on canvas, expand/collapse, selection,
 * hover annotations, ROI highlights, and the embedded NodeTrix toggle. */

import type { Simulation } from 'd3-force';

import { drawHeatmap } from './nodetrix';
import { GraphStore } from './store';
import {
  DEFAULT_LAYOUT,
  buildLayoutGraph,
  createSimulation,
  type LayoutLink,
  type LayoutNode,
} from './layout';

const COMMUNITY_FILL = '#7b6fb5';
const CHANNEL_FILL = '#4a8fd4';
const HIGHLIGHT = '#e0a03c';
const SELECTED_RING = '#d0452c';

export class GraphPanel {
  private canvas: HTMLCanvasElement;
  private trixCanvas: HTMLCanvasElement;
  private tooltip: HTMLDivElement;
  private status: HTMLDivElement;
  private simulation: Simulation<LayoutNode, LayoutLink> | null = null;
  private nodes: LayoutNode[] = [];
  private links: LayoutLink[] = [];
  private nodetrixMode = false;
  private hovered: LayoutNode | null = null;

  constructor(private root: HTMLElement, private store: GraphStore) {
    root.innerHTML = `
      <div class="panel-title">Graph
        <button data-role="nodetrix-toggle" title="NodeTrix view of the selected nodes">NodeTrix</button>
        <label>level <select data-role="level-select"></select></label>
      </div>
      <div class="graph-body">
        <canvas data-role="graph-canvas" width="760" height="560"></canvas>
        <canvas data-role="nodetrix-canvas" class="hidden"></canvas>
        <div data-role="tooltip" class="tooltip hidden"></div>
        <div data-role="status" class="graph-status"></div>
      </div>`;
    this.canvas = root.querySelector('[data-role=graph-canvas]')!;
    this.trixCanvas = root.querySelector('[data-role=nodetrix-canvas]')!;
    this.tooltip = root.querySelector('[data-role=tooltip]')!;
    this.status = root.querySelector('[data-role=status]')!;

    this.canvas.addEventListener('dblclick', (e) => void this.onDoubleClick(e));
    this.canvas.addEventListener('click', (e) => this.onClick(e));
    this.canvas.addEventListener('mousemove', (e) => this.onHover(e));
    this.canvas.addEventListener('mouseleave', () => this.setHover(null));
    root.querySelector('[data-role=nodetrix-toggle]')!
      .addEventListener('click', () => void this.toggleNodetrix());

    store.subscribe('view', () => this.rebuild());
    store.subscribe('graph', () => this.populateLevels());
    store.subscribe('highlight', () => this.draw());
    store.subscribe('selection', () => this.draw());
  }

  private populateLevels(): void {
    const select = this.root.querySelector<HTMLSelectElement>('[data-role=level-select]')!;
    const levels = this.store.graph.hierarchy;
    select.innerHTML = '';
    for (let level = 0; level < Math.max(levels, 1); level += 1) {
      const option = document.createElement('option');
      option.value = String(level);
      option.textContent = String(level);
      select.appendChild(option);
    }
    select.value = String(this.store.level);
    select.onchange = () => void this.store.setLevel(Number(select.value));
  }

  private memberCounts(): Map<string, number> {
    return new Map(this.store.communities().map((c) => [c.id, c.members.length]));
  }

  private rebuild(): void {
    const view = this.store.view;
    this.simulation?.stop();
    if (!view) {
      this.nodes = [];
      this.links = [];
      this.status.textContent = this.store.loaded
        ? 'No communities: the graph has no edges at this threshold.'
        : 'Loading…';
      this.draw();
      return;
    }
    this.status.textContent = '';
    const graph = buildLayoutGraph(view, this.memberCounts());
    this.nodes = graph.nodes;
    this.links = graph.links;
    if (this.nodes.length === 0) {
      this.status.textContent = 'Empty graph.';
      this.draw();
      return;
    }
    this.simulation = createSimulation(this.nodes, this.links, {
      ...DEFAULT_LAYOUT,
      seed: this.store.layoutSeed,
      width: this.canvas.width,
      height: this.canvas.height,
    });
    this.simulation.on('tick', () => this.draw());
    this.simulation.alpha(1).restart();
  }

  private radius(node: LayoutNode): number {
    return node.kind === 'community' ? Math.min(26, 8 + 2 * Math.sqrt(node.size)) : 6;
  }

  private draw(): void {
    const ctx = this.canvas.getContext('2d');
    if (!ctx) return;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    const highlightedCommunities = this.store.highlightedCommunities();

    for (const link of this.links) {
      const source = link.source as LayoutNode;
      const target = link.target as LayoutNode;
      if (typeof source === 'string' || typeof target === 'string') continue;
      ctx.beginPath();
      ctx.setLineDash(link.kind === 'hybrid' ? [4, 4] : []);
      ctx.strokeStyle = link.kind === 'hybrid' ? '#b5b5b5' : '#8c8c8c';
      ctx.lineWidth = link.kind === 'hybrid' ? 1 : 0.5 + 2.5 * link.weight;
      ctx.moveTo(source.x ?? 0, source.y ?? 0);
      ctx.lineTo(target.x ?? 0, target.y ?? 0);
      ctx.stroke();
    }
    ctx.setLineDash([]);

    for (const node of this.nodes) {
      const highlighted = node.kind === 'channel'
        ? this.store.highlighted.has(node.id)
        : highlightedCommunities.has(node.id);
      ctx.beginPath();
      ctx.arc(node.x ?? 0, node.y ?? 0, this.radius(node), 0, Math.PI * 2);
      ctx.fillStyle = highlighted
        ? HIGHLIGHT
        : node.kind === 'community' ? COMMUNITY_FILL : CHANNEL_FILL;
      ctx.fill();
      if (this.store.selected.has(node.id)) {
        ctx.strokeStyle = SELECTED_RING;
        ctx.lineWidth = 2.5;
        ctx.stroke();
      }
      if (node.kind === 'community') {
        ctx.fillStyle = '#fff';
        ctx.font = '10px sans-serif';
        ctx.textAlign = 'center';
        ctx.fillText(String(node.size), node.x ?? 0, (node.y ?? 0) + 3);
      }
    }
  }

  private nodeAt(event: MouseEvent): LayoutNode | null {
    const rect = this.canvas.getBoundingClientRect();
    const x = event.clientX - rect.left;
    const y = event.clientY - rect.top;
    for (const node of this.nodes) {
      const dx = (node.x ?? 0) - x;
      const dy = (node.y ?? 0) - y;
      if (dx * dx + dy * dy <= this.radius(node) ** 2 + 16) return node;
    }
    return null;
  }

  private async onDoubleClick(event: MouseEvent): Promise<void> {
    const node = this.nodeAt(event);
    if (!node) return;
    if (node.kind === 'community') {
      await this.store.toggleExpand(node.id);
    } else {
      const community = this.store.communityOf(node.id);
      if (community) await this.store.toggleExpand(community.id); // collapse back
    }
  }

  private onClick(event: MouseEvent): void {
    const node = this.nodeAt(event);
    if (!node) {
      if (!event.shiftKey) this.store.setSelection([]);
      return;
    }
    if (event.shiftKey) this.store.toggleSelected(node.id);
    else this.store.setSelection([node.id]);
  }

  private setHover(node: LayoutNode | null): void {
    this.hovered = node;
    if (!node) {
      this.tooltip.classList.add('hidden');
      return;
    }
    const lines: string[] = [];
    if (node.kind === 'community') {
      const community = this.store.communities().find((c) => c.id === node.id);
      lines.push(`community ${node.id}`, `${community?.members.length ?? 0} channels`);
      if (community?.parent) lines.push(`parent ${community.parent}`);
    } else {
      const meta = this.store.graph.nodes.find((n) => n.id === node.id);
      lines.push(`channel ${node.id}`);
      if (meta && meta.kind === 'channel' && meta.mz !== undefined) {
        lines.push(`m/z ${meta.mz.toFixed(4)}`);
      }
    }
    this.tooltip.textContent = lines.join(' · ');
    this.tooltip.style.left = `${(node.x ?? 0) + 12}px`;
    this.tooltip.style.top = `${(node.y ?? 0) - 10}px`;
    this.tooltip.classList.remove('hidden');
  }

  private onHover(event: MouseEvent): void {
    const node = this.nodeAt(event);
    if (node !== this.hovered) this.setHover(node);
  }

  private async toggleNodetrix(): Promise<void> {
    this.nodetrixMode = !this.nodetrixMode;
    if (!this.nodetrixMode) {
      this.trixCanvas.classList.add('hidden');
      this.canvas.classList.remove('hidden');
      return;
    }
    const channels = [...this.store.selected].filter((id) =>
      this.store.graph.nodes.some((n) => n.id === id && n.kind === 'channel'));
    if (channels.length < 2) {
      this.status.textContent = 'Select at least two channel nodes for NodeTrix.';
      this.nodetrixMode = false;
      return;
    }
    const payload = await this.store.api.nodetrix(channels);
    drawHeatmap(this.trixCanvas, payload);
    this.canvas.classList.add('hidden');
    this.trixCanvas.classList.remove('hidden');
  }
}
