/** Bootstrap: wire the panels to one store and load the session. */

import { ApiClient } from './api';
import { ChannelList } from './channelList';
import { EditControls } from './editControls';
import { GraphPanel } from './graphPanel';
import { ImagePanel } from './imagePanel';
import { QgpPanel } from './qgpPanel';
import { SettingsPanel } from './settings';
import { GraphStore } from './store';
import './style.css';

const DEFAULT_API = 'http://127.0.0.1:8077';

async function boot(): Promise<void> {
  const base = new URLSearchParams(window.location.search).get('api') ?? DEFAULT_API;
  const api = new ApiClient(base);
  const store = new GraphStore(api);

  const app = document.getElementById('app')!;
  app.innerHTML = `
    <div id="graph-panel" class="panel"></div>
    <div id="image-panel" class="panel"></div>
    <div id="side-panels">
      <div id="edit-panel" class="panel"></div>
      <div id="qgp-panel" class="panel scroll"></div>
      <div id="channel-panel" class="panel scroll"></div>
      <div id="settings-panel" class="panel"></div>
    </div>`;

  let meta;
  try {
    meta = await api.datasetMeta();
  } catch (error) {
    app.innerHTML = `<div class="boot-error">Cannot reach the mcsg service at ${base} — ` +
      `start it with <code>mcsg serve --data …</code> or pass <code>?api=…</code>. ` +
      `(${error instanceof Error ? error.message : String(error)})</div>`;
    return;
  }

  const graphPanel = new GraphPanel(document.getElementById('graph-panel')!, store);
  const imagePanel = new ImagePanel(document.getElementById('image-panel')!, store, meta);
  new EditControls(document.getElementById('edit-panel')!, store);
  const qgpPanel = new QgpPanel(document.getElementById('qgp-panel')!, store,
                                (id) => imagePanel.showChannel(id));
  new ChannelList(document.getElementById('channel-panel')!, store, meta,
                  (id) => imagePanel.showChannel(id));
  new SettingsPanel(document.getElementById('settings-panel')!, store, qgpPanel,
                    () => store.refreshView().catch(() => undefined));

  await store.refresh();
  await qgpPanel.reload();
  const firstChannel = meta.channels[0];
  if (firstChannel) imagePanel.showChannel(firstChannel.id);
  void graphPanel; // retained by event subscriptions
}

void boot();
