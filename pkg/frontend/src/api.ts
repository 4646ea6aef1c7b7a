import type {
  EntryRecord,
  EventOutcome,
  HierarchyView,
  PendingView,
  RevisionReport,
} from './types.js';

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

type Fetch = typeof fetch;

/** Thin typed client over the session endpoints. The fetch function is
 * injectable so tests can run against a mock or a live service. */
export class ApiClient {
  constructor(
    private base: string,
    private fetchFn: Fetch = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.base}${path}`, {
      headers: { 'Content-Type': 'application/json' },
      ...init,
    });
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = await response.json();
        if (body && typeof body.detail === 'string') detail = body.detail;
      } catch {
        // keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  async createSession(): Promise<string> {
    const data = await this.request<{ id: string }>('/sessions', {
      method: 'POST',
    });
    return data.id;
  }

  postInput(sessionId: string, formula: string): Promise<EventOutcome> {
    return this.request(`/sessions/${sessionId}/inputs`, {
      method: 'POST',
      body: JSON.stringify({ formula }),
    });
  }

  async getBeliefs(
    sessionId: string,
    status: 'believed' | 'disbelieved' | 'all' = 'all',
  ): Promise<EntryRecord[]> {
    const data = await this.request<{ entries: EntryRecord[] }>(
      `/sessions/${sessionId}/beliefs?status=${status}`,
    );
    return data.entries;
  }

  getEntry(sessionId: string, t: number): Promise<EntryRecord> {
    return this.request(`/sessions/${sessionId}/entries/${t}`);
  }

  getHierarchy(sessionId: string): Promise<HierarchyView> {
    return this.request(`/sessions/${sessionId}/hierarchy`);
  }

  getPending(sessionId: string): Promise<PendingView> {
    return this.request(`/sessions/${sessionId}/pending`);
  }

  postResolution(
    sessionId: string,
    retract: number[],
  ): Promise<RevisionReport> {
    return this.request(`/sessions/${sessionId}/pending`, {
      method: 'POST',
      body: JSON.stringify({ retract }),
    });
  }
}
