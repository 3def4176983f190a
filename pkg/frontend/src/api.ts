import type {
  ActionResponse,
  AnomaliesResponse,
  AnomalyRecord,
  ChartKind,
  ChartPayload,
  ColorMode,
  DatasetResponse,
  PreviewResponse,
  RepairActionJson,
  ScriptResponse,
  SessionResponse,
  SuggestionsResponse,
  SummaryResponse,
} from './types.js';

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<never> {
  let code = 'HTTP_ERROR';
  let message = `${response.status} ${response.statusText}`;
  try {
    const body = await response.json();
    if (body?.error) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the status line
  }
  throw new ApiError(response.status, code, message);
}

/** Thin typed client over the /api endpoints. Holds no session state. */
export class ApiClient {
  constructor(private baseUrl: string = '/api') {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`, init);
    if (!response.ok) await parseError(response);
    return (await response.json()) as T;
  }

  private post<T>(path: string, body?: unknown): Promise<T> {
    return this.request<T>(path, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
  }

  health(): Promise<{ status: string; version: string }> {
    return this.request('/health');
  }

  async uploadDataset(csv: string, name: string): Promise<DatasetResponse> {
    const response = await fetch(
      `${this.baseUrl}/datasets?name=${encodeURIComponent(name)}`,
      { method: 'POST', headers: { 'content-type': 'text/csv' }, body: csv },
    );
    if (!response.ok) await parseError(response);
    return (await response.json()) as DatasetResponse;
  }

  createSession(datasetId: string, config?: Record<string, unknown>): Promise<SessionResponse> {
    return this.post('/sessions', { dataset_id: datasetId, ...(config ? { config } : {}) });
  }

  anomalies(sessionId: string, topK?: number): Promise<AnomaliesResponse> {
    const query = topK !== undefined ? `?top_k=${topK}` : '';
    return this.request(`/sessions/${sessionId}/anomalies${query}`);
  }

  summary(sessionId: string): Promise<SummaryResponse> {
    return this.request(`/sessions/${sessionId}/summary`);
  }

  chart(
    sessionId: string,
    groupBy: string,
    target: string,
    kind: ChartKind,
    mode: ColorMode,
  ): Promise<ChartPayload> {
    const params = new URLSearchParams({ group_by: groupBy, target, kind, mode });
    return this.request(`/sessions/${sessionId}/chart?${params}`);
  }

  suggestions(sessionId: string, record: AnomalyRecord): Promise<SuggestionsResponse> {
    return this.post(`/sessions/${sessionId}/suggestions`, { record });
  }

  preview(sessionId: string, action: RepairActionJson): Promise<PreviewResponse> {
    return this.post(`/sessions/${sessionId}/preview`, { action });
  }

  commit(sessionId: string, action: RepairActionJson): Promise<ActionResponse> {
    return this.post(`/sessions/${sessionId}/actions`, { action });
  }

  undo(sessionId: string): Promise<ActionResponse> {
    return this.post(`/sessions/${sessionId}/undo`);
  }

  redo(sessionId: string): Promise<ActionResponse> {
    return this.post(`/sessions/${sessionId}/redo`);
  }

  script(sessionId: string): Promise<ScriptResponse> {
    return this.request(`/sessions/${sessionId}/script`);
  }

  async tableCsv(sessionId: string): Promise<string> {
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}/table?format=csv`);
    if (!response.ok) await parseError(response);
    return response.text();
  }
}
