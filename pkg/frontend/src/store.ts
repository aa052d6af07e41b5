/** Client-side session state. The graph document is always the backend's last
 * payload, verbatim: every mutation stores the response body and every
 * refresh refetches, so no weight or membership is ever derived locally.
 * Expansion, selection, and highlights are view state layered on top. */

import type { ApiClient } from './api';
import type { CommunityNode, GraphDocument, GraphView, QgpRow } from './types';

export type StoreEvent = 'graph' | 'view' | 'selection' | 'highlight' | 'busy' | 'error';

export class GraphStore {
  private doc: GraphDocument | null = null;
  private currentView: GraphView | null = null;
  private listeners = new Map<StoreEvent, Set<() => void>>();

  readonly expanded = new Set<string>();
  readonly selected = new Set<string>();
  highlighted = new Set<string>();
  level = 0;
  mu = 0.5;
  sigma = 0.6;
  layoutSeed = 1;
  busy = false;
  lastWarnings: string[] = [];
  lastError: string | null = null;

  constructor(readonly api: ApiClient) {}

  get graph(): GraphDocument {
    if (!this.doc) throw new Error('graph not loaded yet');
    return this.doc;
  }

  get view(): GraphView | null {
    return this.currentView;
  }

  get loaded(): boolean {
    return this.doc !== null;
  }

  communities(level?: number): CommunityNode[] {
    const wanted = level ?? this.level;
    return this.graph.nodes.filter(
      (n): n is CommunityNode => n.kind === 'community' && n.level === wanted,
    );
  }

  communityOf(channelId: string, level?: number): CommunityNode | undefined {
    return this.communities(level).find((c) => c.members.includes(channelId));
  }

  /** Communities to co-highlight: those containing a highlighted channel. */
  highlightedCommunities(): Set<string> {
    const out = new Set<string>();
    for (const community of this.communities()) {
      if (community.members.some((m) => this.highlighted.has(m))) out.add(community.id);
    }
    return out;
  }

  subscribe(event: StoreEvent, listener: () => void): () => void {
    if (!this.listeners.has(event)) this.listeners.set(event, new Set());
    this.listeners.get(event)!.add(listener);
    return () => this.listeners.get(event)!.delete(listener);
  }

  private emit(event: StoreEvent): void {
    for (const listener of this.listeners.get(event) ?? []) listener();
  }

  async refresh(): Promise<void> {
    this.doc = await this.api.graph();
    this.emit('graph');
    await this.refreshView();
  }

  async refreshView(): Promise<void> {
    const levelIds = new Set(this.communities().map((c) => c.id));
    for (const id of [...this.expanded]) {
      if (!levelIds.has(id)) this.expanded.delete(id); // dropped by an edit
    }
    this.currentView =
      this.graph.hierarchy > 0
        ? await this.api.graphView(this.level, this.expanded)
        : null;
    this.emit('view');
  }

  async setLevel(level: number): Promise<void> {
    this.level = level;
    this.expanded.clear();
    await this.refreshView();
  }

  async toggleExpand(communityId: string): Promise<void> {
    if (this.expanded.has(communityId)) this.expanded.delete(communityId);
    else this.expanded.add(communityId);
    await this.refreshView();
  }

  setSelection(ids: Iterable<string>): void {
    this.selected.clear();
    for (const id of ids) this.selected.add(id);
    this.emit('selection');
  }

  toggleSelected(id: string): void {
    if (this.selected.has(id)) this.selected.delete(id);
    else this.selected.add(id);
    this.emit('selection');
  }

  /** All mutations funnel through here: one in flight at a time, and the
   * response graph becomes the model without any local rewriting. */
  private async mutate(
    call: () => Promise<{ applied: boolean; warnings?: string[]; graph: GraphDocument }>,
  ): Promise<boolean> {
    if (this.busy) throw new Error('a mutation is already in flight');
    this.busy = true;
    this.lastError = null;
    this.emit('busy');
    try {
      const response = await call();
      this.doc = response.graph;
      this.lastWarnings = response.warnings ?? [];
      this.emit('graph');
      await this.refreshView();
      return response.applied;
    } catch (error) {
      this.lastError = error instanceof Error ? error.message : String(error);
      this.emit('error');
      throw error;
    } finally {
      this.busy = false;
      this.emit('busy');
    }
  }

  merge(targets: string[]): Promise<boolean> {
    return this.mutate(() => this.api.edit({ kind: 'merge', targets }));
  }

  split(target: string, partA: string[], partB: string[]): Promise<boolean> {
    return this.mutate(() => this.api.edit({ kind: 'split', target, parts: [partA, partB] }));
  }

  reassign(node: string, destination: string): Promise<boolean> {
    return this.mutate(() => this.api.edit({ kind: 'reassign', node, destination }));
  }

  undo(): Promise<boolean> {
    return this.mutate(() => this.api.undo());
  }

  redo(): Promise<boolean> {
    return this.mutate(() => this.api.redo());
  }

  importDocument(document: GraphDocument): Promise<boolean> {
    return this.mutate(() => this.api.importDocument(document));
  }

  /** Lasso query: the highlight set is the server's matched set, verbatim. */
  async runRoi(polygon: [number, number][]): Promise<string[]> {
    const response = await this.api.roi(polygon, this.mu, this.sigma);
    this.highlighted = new Set(response.matched_nodes);
    this.emit('highlight');
    return response.matched_nodes;
  }

  clearHighlight(): void {
    this.highlighted = new Set();
    this.emit('highlight');
  }

  async fetchQgp(sortBy?: string, thresholds?: Record<string, number>): Promise<QgpRow[]> {
    const payload = await this.api.qgp(sortBy, thresholds);
    return payload.nodes;
  }
}
