/** Channel list with m/z values; clicking shows the image and selects the node. */

import { GraphStore } from './store';
import type { DatasetMeta } from './types';

export class ChannelList {
  constructor(private root: HTMLElement, private store: GraphStore, meta: DatasetMeta,
              onPick: (id: string) => void) {
    root.innerHTML = `<div class="panel-title">Channels (${meta.channels.length})</div>
      <ul data-role="channel-list"></ul>`;
    const list = root.querySelector('[data-role=channel-list]')!;
    for (const channel of meta.channels) {
      const item = document.createElement('li');
      item.dataset.channelId = channel.id;
      item.innerHTML = `<span class="cid">${channel.id}</span>` +
        `<span class="mz">m/z ${channel.mz.toFixed(4)}</span>`;
      item.addEventListener('click', (event) => {
        if (event.shiftKey) this.store.toggleSelected(channel.id);
        else this.store.setSelection([channel.id]);
        onPick(channel.id);
      });
      list.appendChild(item);
    }
    store.subscribe('highlight', () => this.paint());
    store.subscribe('selection', () => this.paint());
  }

  private paint(): void {
    for (const item of this.root.querySelectorAll<HTMLLIElement>('li[data-channel-id]')) {
      const id = item.dataset.channelId!;
      item.classList.toggle('highlighted', this.store.highlighted.has(id));
      item.classList.toggle('selected', this.store.selected.has(id));
    }
  }
}
