/** Settings: layout seed and the statistic flag thresholds. Threshold edits
 * refetch the statistics from the server with override parameters. */

import { GraphStore } from './store';
import { QgpPanel } from './qgpPanel';

const THRESHOLDS: Array<{ key: string; label: string; initial: number; step: number }> = [
  { key: 'hub_z', label: 'hub z ≥', initial: 2.0, step: 0.1 },
  { key: 'misassigned_ratio', label: 'misassigned ratio >', initial: 1.5, step: 0.1 },
  { key: 'bridge_participation', label: 'bridge participation ≥', initial: 0.5, step: 0.05 },
  { key: 'bridge_betweenness_percentile', label: 'bridge betweenness pct ≥', initial: 90, step: 1 },
];

export class SettingsPanel {
  constructor(root: HTMLElement, store: GraphStore, qgp: QgpPanel,
              onSeedChange: () => void) {
    const rows = THRESHOLDS.map((t) =>
      `<label>${t.label}
         <input data-threshold="${t.key}" type="number" value="${t.initial}" step="${t.step}">
       </label>`).join('');
    root.innerHTML = `
      <div class="panel-title">Settings</div>
      <label>layout seed
        <input data-role="seed" type="number" value="${store.layoutSeed}" step="1">
      </label>
      ${rows}`;

    const seed = root.querySelector<HTMLInputElement>('[data-role=seed]')!;
    seed.addEventListener('change', () => {
      store.layoutSeed = Number(seed.value);
      onSeedChange();
    });
    for (const input of root.querySelectorAll<HTMLInputElement>('input[data-threshold]')) {
      input.addEventListener('change', () => {
        qgp.thresholds = { ...qgp.thresholds, [input.dataset.threshold!]: Number(input.value) };
        void qgp.reload();
      });
    }
  }
}
