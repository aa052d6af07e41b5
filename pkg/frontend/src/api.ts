/** Typed fetch client; the only place the frontend talks to the backend. */

import type {
  DatasetMeta,
  EditCommandJson,
  GraphDocument,
  GraphView,
  MutationResponse,
  NodeTrixPayload,
  QgpPayload,
  RoiResponse,
} from './types';

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
  }
}

async function parseError(response: Response): Promise<never> {
  let detail = `${response.status} ${response.statusText}`;
  try {
    const body = (await response.json()) as { detail?: string };
    if (body.detail) detail = body.detail;
  } catch {
    // non-JSON error body; keep the status line
  }
  throw new ApiError(response.status, detail);
}

export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await fetch(this.baseUrl + path);
    if (!response.ok) await parseError(response);
    return (await response.json()) as T;
  }

  private async postJson<T>(path: string, body: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    });
    if (!response.ok) await parseError(response);
    return (await response.json()) as T;
  }

  datasetMeta(): Promise<DatasetMeta> {
    return this.getJson('/dataset/meta');
  }

  graph(): Promise<GraphDocument> {
    return this.getJson('/graph');
  }

  graphView(level: number, expanded: Iterable<string>): Promise<GraphView> {
    const ids = [...expanded].join(',');
    return this.getJson(`/graph/view?level=${level}&expanded=${encodeURIComponent(ids)}`);
  }

  nodetrix(nodes: Iterable<string>): Promise<NodeTrixPayload> {
    return this.getJson(`/graph/nodetrix?nodes=${encodeURIComponent([...nodes].join(','))}`);
  }

  qgp(sortBy?: string, thresholds?: Record<string, number>): Promise<QgpPayload> {
    const params = new URLSearchParams();
    if (sortBy) params.set('sort_by', sortBy);
    for (const [key, value] of Object.entries(thresholds ?? {})) {
      params.set(key, String(value));
    }
    const query = params.toString();
    return this.getJson(`/qgp${query ? '?' + query : ''}`);
  }

  roi(polygon: [number, number][], mu: number, sigma: number): Promise<RoiResponse> {
    return this.postJson('/roi', { polygon, mu, sigma });
  }

  edit(command: EditCommandJson): Promise<MutationResponse> {
    return this.postJson('/edit', command);
  }

  undo(): Promise<MutationResponse> {
    return this.postJson('/undo', {});
  }

  redo(): Promise<MutationResponse> {
    return this.postJson('/redo', {});
  }

  importDocument(document: GraphDocument): Promise<MutationResponse> {
    return this.postJson('/import', { document });
  }

  async exportText(): Promise<string> {
    const response = await fetch(this.baseUrl + '/export');
    if (!response.ok) await parseError(response);
    return response.text();
  }

  channelImageUrl(id: string, colormap = 'viridis'): string {
    return `${this.baseUrl}/image/channel/${encodeURIComponent(id)}?colormap=${colormap}`;
  }

  aggregateImageUrl(ids: Iterable<string>, colormap = 'viridis'): string {
    return `${this.baseUrl}/image/aggregate?nodes=${encodeURIComponent([...ids].join(','))}&colormap=${colormap}`;
  }

  projectionImageUrl(): string {
    return `${this.baseUrl}/image/projection`;
  }

  opticalImageUrl(name: string): string {
    return `${this.baseUrl}/image/optical/${encodeURIComponent(name)}`;
  }
}
