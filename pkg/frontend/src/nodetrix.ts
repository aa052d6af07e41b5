/** NodeTrix: the adjacency submatrix of selected nodes as a heatmap. */

import type { NodeTrixPayload } from './types';

export interface HeatmapCell {
  row: number;
  col: number;
  rowId: string;
  colId: string;
  value: number; // similarity in [0, 1], 0 where no edge
}

/** Flatten the payload into draw-ready cells; values stay untouched. */
export function heatmapModel(payload: NodeTrixPayload): HeatmapCell[] {
  const cells: HeatmapCell[] = [];
  payload.order.forEach((rowId, row) => {
    payload.order.forEach((colId, col) => {
      cells.push({ row, col, rowId, colId, value: payload.cells[row]?.[col] ?? 0 });
    });
  });
  return cells;
}

export function heatColor(value: number): string {
  // white -> deep blue ramp; zero (no edge) stays white
  const v = Math.max(0, Math.min(1, value));
  const r = Math.round(255 - 205 * v);
  const g = Math.round(255 - 170 * v);
  const b = 255;
  return `rgb(${r}, ${g}, ${b})`;
}

export function drawHeatmap(
  canvas: HTMLCanvasElement,
  payload: NodeTrixPayload,
  cellSize = 18,
  labelGutter = 64,
): void {
  const n = payload.order.length;
  canvas.width = labelGutter + n * cellSize + 4;
  canvas.height = labelGutter + n * cellSize + 4;
  const ctx = canvas.getContext('2d');
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.font = '10px sans-serif';
  for (const cell of heatmapModel(payload)) {
    ctx.fillStyle = heatColor(cell.value);
    ctx.fillRect(labelGutter + cell.col * cellSize, labelGutter + cell.row * cellSize,
                 cellSize - 1, cellSize - 1);
  }
  ctx.fillStyle = '#333';
  payload.order.forEach((id, i) => {
    ctx.save();
    ctx.translate(labelGutter + i * cellSize + cellSize / 2, labelGutter - 4);
    ctx.rotate(-Math.PI / 4);
    ctx.fillText(id, 0, 0);
    ctx.restore();
    ctx.fillText(id, 2, labelGutter + i * cellSize + cellSize / 2 + 3);
  });
}
