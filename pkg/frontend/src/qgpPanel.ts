/** Sortable table of per-node graph statistics; sorting is server-side so
 * the displayed order always comes from the API. */

import { GraphStore } from './store';
import { QGP_METRICS, type QgpMetric, type QgpRow } from './types';

const SHORT: Record<QgpMetric, string> = {
  weighted_degree: 'degree',
  within_community_degree_z: 'z',
  participation_coefficient: 'part.',
  betweenness: 'betw.',
  local_clustering_coefficient: 'clust.',
};

export class QgpPanel {
  private table: HTMLTableElement;
  sortColumn: QgpMetric | null = null;
  thresholds: Record<string, number> = {};

  constructor(private root: HTMLElement, private store: GraphStore,
              private onPick?: (id: string) => void) {
    root.innerHTML = `
      <div class="panel-title">Graph statistics</div>
      <table data-role="qgp-table"><thead></thead><tbody></tbody></table>`;
    this.table = root.querySelector('[data-role=qgp-table]')!;
    store.subscribe('graph', () => void this.reload());
    store.subscribe('highlight', () => void this.reload());
  }

  async reload(): Promise<void> {
    const rows = await this.store.fetchQgp(this.sortColumn ?? undefined, this.thresholds);
    this.render(rows);
  }

  async sortBy(metric: QgpMetric): Promise<void> {
    this.sortColumn = metric;
    await this.reload();
  }

  private render(rows: QgpRow[]): void {
    const head = this.table.querySelector('thead')!;
    head.innerHTML = '';
    const headerRow = document.createElement('tr');
    for (const column of ['node', ...QGP_METRICS.map((m) => SHORT[m]), 'flags']) {
      const th = document.createElement('th');
      th.textContent = column;
      const metric = QGP_METRICS.find((m) => SHORT[m] === column);
      if (metric) {
        th.classList.add('sortable');
        if (metric === this.sortColumn) th.classList.add('sorted');
        th.addEventListener('click', () => void this.sortBy(metric));
      }
      headerRow.appendChild(th);
    }
    head.appendChild(headerRow);

    const body = this.table.querySelector('tbody')!;
    body.innerHTML = '';
    for (const row of rows) {
      const tr = document.createElement('tr');
      tr.dataset.nodeId = row.node_id;
      if (this.store.highlighted.has(row.node_id)) tr.classList.add('highlighted');
      const cells = [
        row.node_id,
        row.weighted_degree.toFixed(3),
        row.within_community_degree_z.toFixed(2),
        row.participation_coefficient.toFixed(2),
        row.betweenness.toFixed(3),
        row.local_clustering_coefficient.toFixed(2),
        row.flags.join(' '),
      ];
      for (const text of cells) {
        const td = document.createElement('td');
        td.textContent = text;
        tr.appendChild(td);
      }
      tr.addEventListener('click', () => {
        this.store.setSelection([row.node_id]);
        this.onPick?.(row.node_id);
      });
      body.appendChild(tr);
    }
  }
}
