// Page controller: owns the view state, talks to the service, and keeps
// the DOM in sync. One in-flight mutation at a time; a 1s poll watches
// for a pending revision (another tab may have parked the session).

import { ApiClient, ApiError } from './api.js';
import type { EntryRecord, EventOutcome, PendingView } from './types.js';
import {
  renderBeliefTable,
  renderEntryDetail,
  renderHierarchy,
  renderPendingModal,
  renderTrace,
  selectedCulprits,
} from './view.js';

export interface AppElements {
  input: HTMLInputElement;
  assertButton: HTMLElement;
  beliefBody: HTMLElement;
  hierarchy: HTMLElement;
  trace: HTMLElement;
  detail: HTMLElement;
  modal: HTMLElement;
  culpritBody: HTMLElement;
  resolveButton: HTMLElement;
  cancelButton: HTMLElement;
  modalMessage: HTMLElement;
  sessionLabel: HTMLElement;
}

export class App {
  private busy = false;
  private lastOutcome: EventOutcome | null = null;
  private highlight = new Set<number>();
  private pollTimer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private doc: Document,
    private api: ApiClient,
    private sessionId: string,
    private el: AppElements,
  ) {}

  start(pollMs = 1000): void {
    this.el.sessionLabel.textContent = this.sessionId;
    this.el.assertButton.addEventListener('click', () => {
      void this.assertFormula();
    });
    this.el.input.addEventListener('keydown', (event) => {
      if ((event as KeyboardEvent).key === 'Enter') void this.assertFormula();
    });
    this.el.resolveButton.addEventListener('click', () => {
      void this.resolveContradiction();
    });
    this.el.cancelButton.addEventListener('click', () => {
      // pending state persists on the engine; just close the modal
      this.el.modal.classList.remove('open');
    });
    if (pollMs > 0) {
      this.pollTimer = setInterval(() => void this.pollPending(), pollMs);
    }
    void this.refresh();
  }

  stop(): void {
    if (this.pollTimer !== null) clearInterval(this.pollTimer);
  }

  async assertFormula(): Promise<void> {
    const text = this.el.input.value.trim();
    if (!text || this.busy) return; // client-side guard, no request
    this.busy = true;
    try {
      const outcome = await this.api.postInput(this.sessionId, text);
      this.lastOutcome = outcome;
      this.highlight = new Set(outcome.new_entries);
      if (outcome.accepted) this.el.input.value = '';
      renderTrace(this.doc, this.el.trace, outcome);
      await this.refresh();
    } catch (err) {
      renderTrace(this.doc, this.el.trace, null, describeError(err));
      await this.refresh();
    } finally {
      this.busy = false;
    }
  }

  async resolveContradiction(): Promise<void> {
    const chosen = selectedCulprits(this.el.modal);
    if (chosen.length === 0) {
      this.el.modalMessage.textContent = 'select at least one entry';
      return; // empty selection never leaves the client
    }
    this.busy = true;
    try {
      const report = await this.api.postResolution(this.sessionId, chosen);
      this.el.modalMessage.textContent = '';
      this.lastOutcome = {
        accepted: true,
        new_entries: [],
        removed_links: [],
        revision: report,
      };
      renderTrace(this.doc, this.el.trace, this.lastOutcome);
      await this.refresh();
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.el.modalMessage.textContent = `stale selection: ${err.message}`;
        await this.refresh(); // re-pull the pending list
      } else {
        this.el.modalMessage.textContent = describeError(err);
      }
    } finally {
      this.busy = false;
    }
  }

  async inspectEntry(t: number): Promise<void> {
    try {
      const entry = await this.api.getEntry(this.sessionId, t);
      renderEntryDetail(this.doc, this.el.detail, entry, (other) => {
        void this.inspectEntry(other);
      });
    } catch (err) {
      this.el.detail.textContent = describeError(err);
    }
  }

  async refresh(): Promise<void> {
    const [entries, hierarchy, pending] = await Promise.all([
      this.api.getBeliefs(this.sessionId, 'all'),
      this.api.getHierarchy(this.sessionId),
      this.api.getPending(this.sessionId),
    ]);
    this.renderAll(entries, pending);
    renderHierarchy(this.doc, this.el.hierarchy, hierarchy);
  }

  private renderAll(entries: EntryRecord[], pending: PendingView): void {
    renderBeliefTable(this.doc, this.el.beliefBody, entries, this.highlight,
      (t) => void this.inspectEntry(t));
    renderPendingModal(this.doc, this.el.modal, this.el.culpritBody, pending);
  }

  private async pollPending(): Promise<void> {
    if (this.busy) return;
    try {
      const pending = await this.api.getPending(this.sessionId);
      const open = this.el.modal.classList.contains('open');
      if (pending.pending && !open) {
        renderPendingModal(this.doc, this.el.modal, this.el.culpritBody,
          pending);
      } else if (!pending.pending && open) {
        this.el.modal.classList.remove('open');
      }
    } catch {
      // transient poll errors are ignored; the next tick retries
    }
  }
}

function describeError(err: unknown): string {
  if (err instanceof ApiError) return `service error ${err.status}: ${err.message}`;
  return err instanceof Error ? err.message : String(err);
}
