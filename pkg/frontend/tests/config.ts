/** Shared test constants: the backend spawned by global-setup. */

export const TEST_PORT = 8123;
export const API_BASE = `http://127.0.0.1:${TEST_PORT}`;

/** Planted layout of the seed-7 synthetic dataset served by the test backend:
 * 3 patterns x 15 channels on a 32x32 grid, tiled 2x2 with margin 2. */
export const PATTERN_RECTS: Record<number, [number, number, number, number]> = {
  0: [2, 2, 14, 14],
  1: [18, 2, 30, 14],
  2: [2, 18, 14, 30],
};

export function patternChannels(k: number): string[] {
  return Array.from({ length: 15 }, (_, j) => `p${k}c${String(j).padStart(2, '0')}`);
}

export async function waitUntil(
  condition: () => boolean,
  timeoutMs = 5000,
  stepMs = 20,
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (!condition()) {
    if (Date.now() > deadline) throw new Error('waitUntil timed out');
    await new Promise((resolve) => setTimeout(resolve, stepMs));
  }
}
