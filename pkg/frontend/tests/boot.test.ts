// @vitest-environment happy-dom
// @vitest-environment-options {"url": "http://localhost/?api=http://127.0.0.1:8123"}
/** Boot path: main.ts assembles every panel against the live backend. */

import { describe, expect, it } from 'vitest';

import { waitUntil } from './config';

describe('application boot', () => {
  it('builds all panels and fills them from the API', async () => {
    const app = document.createElement('div');
    app.id = 'app';
    document.body.appendChild(app);

    await import('../src/main');
    await waitUntil(() => document.querySelectorAll('#qgp-panel tbody tr').length > 0, 15000);

    expect(document.querySelector('#graph-panel .panel-title')).not.toBeNull();
    expect(document.querySelectorAll('#channel-panel li').length).toBe(45);
    expect(document.querySelectorAll('#qgp-panel tbody tr').length).toBe(45);
    expect(document.querySelectorAll('#image-panel .tab-bar button').length).toBe(4);
    expect(document.querySelector('#edit-panel [data-role=merge]')).not.toBeNull();
    expect(document.querySelector('#settings-panel [data-role=seed]')).not.toBeNull();
    const levelOptions = document.querySelectorAll('#graph-panel [data-role=level-select] option');
    expect(levelOptions.length).toBeGreaterThanOrEqual(1);

    // let in-flight work (image fetches, layout frames) settle before teardown
    const happyWindow = window as unknown as { happyDOM?: { waitUntilComplete(): Promise<void> } };
    await happyWindow.happyDOM?.waitUntilComplete();
  }, 30000);
});
