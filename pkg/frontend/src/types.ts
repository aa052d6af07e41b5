/** Wire types for the mcsg HTTP API (graph schema version 2). */

export interface ChannelNode {
  id: string;
  kind: 'channel';
  mz?: number;
}

export interface CommunityNode {
  id: string;
  kind: 'community';
  level: number;
  members: string[];
  parent: string | null;
}

export type GraphNode = ChannelNode | CommunityNode;

export interface GraphEdge {
  source: string;
  target: string;
  kind: 'channel' | 'community';
  weight: number;
}

export interface EditCommandJson {
  kind: 'merge' | 'split' | 'reassign';
  targets?: string[];
  target?: string;
  parts?: string[][];
  node?: string;
  destination?: string;
}

export interface GraphDocument {
  mcsg_version: number;
  dataset_name: string;
  hierarchy: number;
  nodes: GraphNode[];
  edges: GraphEdge[];
  edit_log: EditCommandJson[];
}

export interface ViewEdge {
  source: string;
  target: string;
  weight: number;
}

export interface GraphView {
  level: number;
  expanded: string[];
  visible_channels: string[];
  collapsed_communities: string[];
  channel_edges: ViewEdge[];
  community_edges: ViewEdge[];
  hybrid_edges: ViewEdge[];
}

export interface NodeTrixPayload {
  order: string[];
  cells: number[][];
}

export interface QgpRow {
  node_id: string;
  weighted_degree: number;
  within_community_degree_z: number;
  participation_coefficient: number;
  betweenness: number;
  local_clustering_coefficient: number;
  flags: string[];
}

export interface QgpPayload {
  tau: number;
  nodes: QgpRow[];
}

export interface ChannelMeta {
  id: string;
  mz: number;
}

export interface DatasetMeta {
  name: string;
  width: number;
  height: number;
  valid_pixels: number;
  channels: ChannelMeta[];
  optical_images: string[];
  config: {
    similarity: string;
    tau: number;
    seed: number;
    max_depth: number;
    min_split_size: number;
    epsilon: number;
  };
}

export interface RoiResponse {
  matched_nodes: string[];
  region_size: number;
  mu: number;
  sigma: number;
}

export interface MutationResponse {
  applied: boolean;
  warnings?: string[];
  graph: GraphDocument;
}

export type QgpMetric =
  | 'weighted_degree'
  | 'within_community_degree_z'
  | 'participation_coefficient'
  | 'betweenness'
  | 'local_clustering_coefficient';

export const QGP_METRICS: QgpMetric[] = [
  'weighted_degree',
  'within_community_degree_z',
  'participation_coefficient',
  'betweenness',
  'local_clustering_coefficient',
];
