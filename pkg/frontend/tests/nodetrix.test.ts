/** NodeTrix data model: rendered cells carry the served values unchanged. */

import { describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api';
import { heatColor, heatmapModel } from '../src/nodetrix';
import { API_BASE, patternChannels } from './config';

const api = new ApiClient(API_BASE);

describe('nodetrix heatmap model', () => {
  it('cells equal the served adjacency values', async () => {
    const nodes = [...patternChannels(0).slice(0, 3), ...patternChannels(1).slice(0, 3)];
    const payload = await api.nodetrix(nodes);
    expect(payload.order).toHaveLength(6);
    expect(new Set(payload.order)).toEqual(new Set(nodes));

    const cells = heatmapModel(payload);
    expect(cells).toHaveLength(36);
    for (const cell of cells) {
      expect(cell.value).toBe(payload.cells[cell.row]![cell.col]!);
      if (cell.row === cell.col) expect(cell.value).toBe(0);
    }
    // symmetric: the model mirrors the matrix
    const byPos = new Map(cells.map((c) => [`${c.row},${c.col}`, c.value]));
    for (const cell of cells) {
      expect(byPos.get(`${cell.col},${cell.row}`)).toBe(cell.value);
    }
  });

  it('seriation groups each planted clique contiguously', async () => {
    const nodes = [...patternChannels(0).slice(0, 3), ...patternChannels(1).slice(0, 3)];
    const payload = await api.nodetrix(nodes);
    const positions = new Map(payload.order.map((id, i) => [id, i]));
    for (const k of [0, 1]) {
      const indexes = patternChannels(k).slice(0, 3)
        .map((id) => positions.get(id)!)
        .sort((a, b) => a - b);
      expect(indexes[2]! - indexes[0]!).toBe(2); // contiguous block
    }
  });

  it('zero similarity renders white, strong similarity darker', () => {
    expect(heatColor(0)).toBe('rgb(255, 255, 255)');
    const strong = heatColor(0.9);
    const weak = heatColor(0.2);
    const red = (c: string) => Number(c.match(/\d+/g)![0]);
    expect(red(strong)).toBeLessThan(red(weak));
  });
});
