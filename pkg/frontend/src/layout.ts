/** Force-directed layout of a graph view.
 *
 * Spring rest length is proportional to 1 - weight, so strongly co-localized
 * nodes settle close together. Hybrid edges join with negligible strength:
 * they are visual indicators and must not move the layout. Initial positions
 * come from a seeded generator so the same view and seed reproduce the same
 * picture.
 */

import {
  forceCenter,
  forceLink,
  forceManyBody,
  forceSimulation,
  type Simulation,
  type SimulationLinkDatum,
  type SimulationNodeDatum,
} from 'd3-force';

import type { GraphView } from './types';

export interface LayoutNode extends SimulationNodeDatum {
  id: string;
  kind: 'channel' | 'community';
  size: number; // member count for communities, 1 for channels
}

export interface LayoutLink extends SimulationLinkDatum<LayoutNode> {
  source: string | LayoutNode;
  target: string | LayoutNode;
  weight: number;
  kind: 'channel' | 'community' | 'hybrid';
}

export interface LayoutOptions {
  width: number;
  height: number;
  seed: number;
  edgeLength: number; // display length of a hypothetical zero-weight edge
  hybridStrength: number;
}

export const DEFAULT_LAYOUT: Omit<LayoutOptions, 'width' | 'height'> = {
  seed: 1,
  edgeLength: 220,
  hybridStrength: 1e-4,
};

/** Deterministic uniform generator (mulberry32). */
export function seededRandom(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function restLength(weight: number, edgeLength: number): number {
  return Math.max(8, (1 - weight) * edgeLength);
}

export function buildLayoutGraph(
  view: GraphView,
  memberCounts: Map<string, number>,
): { nodes: LayoutNode[]; links: LayoutLink[] } {
  const nodes: LayoutNode[] = [
    ...view.visible_channels.map<LayoutNode>((id) => ({ id, kind: 'channel', size: 1 })),
    ...view.collapsed_communities.map<LayoutNode>((id) => ({
      id,
      kind: 'community',
      size: memberCounts.get(id) ?? 1,
    })),
  ];
  const links: LayoutLink[] = [
    ...view.channel_edges.map<LayoutLink>((e) => ({
      source: e.source, target: e.target, weight: e.weight, kind: 'channel',
    })),
    ...view.community_edges.map<LayoutLink>((e) => ({
      source: e.source, target: e.target, weight: e.weight, kind: 'community',
    })),
    ...view.hybrid_edges.map<LayoutLink>((e) => ({
      source: e.source, target: e.target, weight: e.weight, kind: 'hybrid',
    })),
  ];
  return { nodes, links };
}

export function createSimulation(
  nodes: LayoutNode[],
  links: LayoutLink[],
  options: LayoutOptions,
): Simulation<LayoutNode, LayoutLink> {
  const random = seededRandom(options.seed);
  for (const node of nodes) {
    node.x = (random() - 0.5) * options.width * 0.8 + options.width / 2;
    node.y = (random() - 0.5) * options.height * 0.8 + options.height / 2;
  }
  const link = forceLink<LayoutNode, LayoutLink>(links)
    .id((n) => n.id)
    .distance((l) => restLength(l.weight, options.edgeLength))
    .strength((l) => (l.kind === 'hybrid' ? options.hybridStrength : 0.7));
  return forceSimulation(nodes)
    .randomSource(random)
    .force('link', link)
    .force('charge', forceManyBody().strength(-40))
    .force('center', forceCenter(options.width / 2, options.height / 2))
    .stop();
}

/** Synchronous layout: run a fixed number of ticks and return positions. */
export function computeLayout(
  view: GraphView,
  memberCounts: Map<string, number>,
  options: LayoutOptions,
  ticks = 300,
): Map<string, { x: number; y: number }> {
  const { nodes, links } = buildLayoutGraph(view, memberCounts);
  const simulation = createSimulation(nodes, links, options);
  for (let i = 0; i < ticks; i += 1) simulation.tick();
  const out = new Map<string, { x: number; y: number }>();
  for (const node of nodes) out.set(node.id, { x: node.x ?? 0, y: node.y ?? 0 });
  return out;
}
