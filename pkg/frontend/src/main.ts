// Browser entry point: create a session against the service and wire
// the page. The service URL can be overridden with ?service=http://...

import { ApiClient } from './api.js';
import { App, AppElements } from './app.js';

function grab(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const base = params.get('service') ?? 'http://127.0.0.1:8000';
  const api = new ApiClient(base);
  const sessionId = params.get('session') ?? (await api.createSession());
  const elements: AppElements = {
    input: grab('formula-input') as HTMLInputElement,
    assertButton: grab('assert-button'),
    beliefBody: grab('belief-body'),
    hierarchy: grab('hierarchy-panel'),
    trace: grab('trace-panel'),
    detail: grab('detail-panel'),
    modal: grab('pending-modal'),
    culpritBody: grab('culprit-body'),
    resolveButton: grab('resolve-button'),
    cancelButton: grab('cancel-button'),
    modalMessage: grab('modal-message'),
    sessionLabel: grab('session-label'),
  };
  new App(document, api, sessionId, elements).start();
}

document.addEventListener('DOMContentLoaded', () => {
  void boot();
});
