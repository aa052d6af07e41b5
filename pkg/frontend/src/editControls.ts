/** Edit toolbar: merge / split / reassign the current selection, undo/redo,
 * export and import. Buttons disable while a mutation is in flight and API
 * validation errors surface inline. */

import { GraphStore } from './store';
import type { GraphDocument } from './types';

export class EditControls {
  private feedback: HTMLDivElement;

  constructor(private root: HTMLElement, private store: GraphStore) {
    root.innerHTML = `
      <div class="panel-title">Edit</div>
      <div class="edit-buttons">
        <button data-role="merge" title="merge the selected communities">merge</button>
        <button data-role="split" title="split the selected channels out of their community">split</button>
        <button data-role="reassign" title="move the selected channel into the selected community">reassign</button>
        <button data-role="undo">undo</button>
        <button data-role="redo">redo</button>
        <button data-role="export">export</button>
        <label class="import-label">import<input data-role="import" type="file" accept=".json"></label>
      </div>
      <div data-role="feedback" class="message"></div>`;
    this.feedback = root.querySelector('[data-role=feedback]')!;

    this.wire('merge', () => this.merge());
    this.wire('split', () => this.split());
    this.wire('reassign', () => this.reassign());
    this.wire('undo', async () => {
      const applied = await this.store.undo();
      this.feedback.textContent = applied ? 'undone' : 'nothing to undo';
    });
    this.wire('redo', async () => {
      const applied = await this.store.redo();
      this.feedback.textContent = applied ? 'redone' : 'nothing to redo';
    });
    this.wire('export', () => this.exportGraph());
    this.root.querySelector<HTMLInputElement>('[data-role=import]')!
      .addEventListener('change', (e) => void this.importGraph(e));

    store.subscribe('busy', () => {
      for (const button of root.querySelectorAll('button')) {
        (button as HTMLButtonElement).disabled = store.busy;
      }
    });
  }

  private wire(role: string, handler: () => Promise<void> | void): void {
    this.root.querySelector(`[data-role=${role}]`)!.addEventListener('click', () => {
      void (async () => {
        try {
          await handler();
        } catch (error) {
          this.feedback.textContent = error instanceof Error ? error.message : String(error);
        }
      })();
    });
  }

  private selectedCommunities(): string[] {
    const finest = this.store.graph.hierarchy - 1;
    return [...this.store.selected].filter((id) =>
      this.store.graph.nodes.some((n) => n.kind === 'community' && n.id === id && n.level === finest));
  }

  private selectedChannels(): string[] {
    return [...this.store.selected].filter((id) =>
      this.store.graph.nodes.some((n) => n.kind === 'channel' && n.id === id));
  }

  private async merge(): Promise<void> {
    const communities = this.selectedCommunities();
    if (communities.length < 2) {
      this.feedback.textContent = 'select at least two finest-level communities to merge';
      return;
    }
    await this.store.merge(communities);
    this.feedback.textContent = `merged ${communities.length} communities`;
  }

  /** The selected channels become one part; the rest of their community the other. */
  private async split(): Promise<void> {
    const channels = this.selectedChannels();
    if (channels.length === 0) {
      this.feedback.textContent = 'select the channels to split out of their community';
      return;
    }
    const finest = this.store.graph.hierarchy - 1;
    const community = this.store.communities(finest)
      .find((c) => channels.every((id) => c.members.includes(id)));
    if (!community) {
      this.feedback.textContent = 'selected channels must share one finest-level community';
      return;
    }
    const rest = community.members.filter((m) => !channels.includes(m));
    if (rest.length === 0) {
      this.feedback.textContent = 'cannot split out every member';
      return;
    }
    await this.store.split(community.id, channels, rest);
    this.feedback.textContent = `split ${channels.length} channels out of ${community.id}`;
  }

  private async reassign(): Promise<void> {
    const channels = this.selectedChannels();
    const communities = this.selectedCommunities();
    if (channels.length !== 1 || communities.length !== 1) {
      this.feedback.textContent = 'select exactly one channel and one destination community';
      return;
    }
    const channel = channels[0]!;
    const destination = communities[0]!;
    const applied = await this.store.reassign(channel, destination);
    this.feedback.textContent = applied
      ? `moved ${channel} into ${destination}`
      : this.store.lastWarnings.join('; ') || 'no-op';
  }

  private async exportGraph(): Promise<void> {
    const text = await this.store.api.exportText();
    const blob = new Blob([text], { type: 'application/json' });
    const link = document.createElement('a');
    link.href = URL.createObjectURL(blob);
    link.download = `${this.store.graph.dataset_name}-mcsg.json`;
    link.click();
    URL.revokeObjectURL(link.href);
    this.feedback.textContent = 'exported';
  }

  private async importGraph(event: Event): Promise<void> {
    const input = event.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    try {
      const document = JSON.parse(await file.text()) as GraphDocument;
      await this.store.importDocument(document);
      this.feedback.textContent = `imported ${file.name}`;
    } catch (error) {
      this.feedback.textContent = error instanceof Error ? error.message : String(error);
    } finally {
      input.value = '';
    }
  }
}
