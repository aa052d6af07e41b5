/** Lasso capture and the display <-> dataset pixel coordinate mapping.
 *
 * The displayed raster is the dataset grid scaled uniformly and offset inside
 * the canvas, so the mapping is affine and bijective; queries always go to
 * the backend in dataset coordinates.
 */

export type Point = [number, number];

export interface DisplayTransform {
  scale: number; // display pixels per dataset pixel
  offsetX: number;
  offsetY: number;
}

export function fitTransform(
  datasetWidth: number,
  datasetHeight: number,
  canvasWidth: number,
  canvasHeight: number,
): DisplayTransform {
  const scale = Math.min(canvasWidth / datasetWidth, canvasHeight / datasetHeight);
  return {
    scale,
    offsetX: (canvasWidth - datasetWidth * scale) / 2,
    offsetY: (canvasHeight - datasetHeight * scale) / 2,
  };
}

export function displayToDataset(point: Point, t: DisplayTransform): Point {
  return [(point[0] - t.offsetX) / t.scale, (point[1] - t.offsetY) / t.scale];
}

export function datasetToDisplay(point: Point, t: DisplayTransform): Point {
  return [point[0] * t.scale + t.offsetX, point[1] * t.scale + t.offsetY];
}

/** Freehand lasso being drawn: display-space points, closed on finish. */
export class LassoState {
  private points: Point[] = [];
  active = false;

  start(point: Point): void {
    this.points = [point];
    this.active = true;
  }

  extend(point: Point, minDistance = 3): void {
    if (!this.active) return;
    const last = this.points[this.points.length - 1];
    if (!last) return;
    const dx = point[0] - last[0];
    const dy = point[1] - last[1];
    if (dx * dx + dy * dy >= minDistance * minDistance) this.points.push(point);
  }

  /** Close the polygon and return it in dataset coordinates. */
  finish(t: DisplayTransform): Point[] {
    this.active = false;
    const polygon = this.points.map((p) => displayToDataset(p, t));
    this.points = [];
    return polygon;
  }

  cancel(): void {
    this.points = [];
    this.active = false;
  }

  displayPath(): Point[] {
    return this.points;
  }
}
