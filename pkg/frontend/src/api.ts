import type {
  AllocationDoc,
  ApiEnvelope,
  AtePayload,
  DiagnosticsDoc,
  DistributionDoc,
  ExtremeJudgment,
  SessionPayload,
  Stage,
  StudyContext,
} from './types';

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public expectedStage?: Stage,
    public retryable?: boolean,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

export interface DiagnosticsRequest {
  se?: number;
  design?: {
    n_treat: number;
    n_control: number;
    outcome?: { kind: 'binary' | 'continuous'; base_rate?: number; conservative?: boolean; sd?: number };
  };
  effect?: number;
  distribution?: DistributionDoc;
  range?: [number, number];
  p_null?: number;
  alpha?: number;
  sides?: string;
  draws?: number;
  seed?: number;
}

export type AteRequest =
  | { distribution: DistributionDoc }
  | { range: [number, number]; p_null?: number }
  | { types: [number, number, number, number] };

async function unwrap<T>(res: Response): Promise<T> {
  const doc = (await res.json()) as ApiEnvelope<T>;
  if (doc.error) {
    throw new ApiError(
      res.status,
      doc.error.code,
      doc.error.message,
      doc.error.expected_stage as Stage | undefined,
      doc.error.retryable,
    );
  }
  if (!res.ok || doc.payload === undefined) {
    throw new ApiError(res.status, 'protocol', `unexpected response (HTTP ${res.status})`);
  }
  return doc.payload;
}

/** Client for the v1 JSON routes; the UI gets every statistic from here. */
export class ApiClient {
  constructor(private baseUrl = '') {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    const res = await fetch(`${this.baseUrl}${path}`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
    return unwrap<T>(res);
  }

  private async get<T>(path: string): Promise<T> {
    const res = await fetch(`${this.baseUrl}${path}`);
    return unwrap<T>(res);
  }

  createSession(context?: StudyContext): Promise<SessionPayload> {
    return this.post('/v1/sessions', context ? { context } : {});
  }

  getSession(id: string): Promise<SessionPayload> {
    return this.get(`/v1/sessions/${id}`);
  }

  advance(
    id: string,
    stage: Stage,
    payload: unknown,
    revision: number,
  ): Promise<SessionPayload> {
    return this.post(`/v1/sessions/${id}/advance`, { stage, payload, revision });
  }

  advanceContext(id: string, context: StudyContext, revision: number) {
    return this.advance(id, 'context', context, revision);
  }

  advanceAtePre(id: string, atePre: number, revision: number) {
    return this.advance(id, 'ate_pre', atePre, revision);
  }

  advanceExtremes(
    id: string,
    largest: ExtremeJudgment,
    smallest: ExtremeJudgment,
    revision: number,
  ) {
    return this.advance(id, 'extremes', { largest, smallest }, revision);
  }

  advanceAllocation(id: string, allocation: AllocationDoc, revision: number) {
    return this.advance(id, 'allocation', allocation, revision);
  }

  advanceNullShare(id: string, pNull: number, revision: number) {
    return this.advance(id, 'null_share', pNull, revision);
  }

  advanceReflection(id: string, reflection: string, revision: number) {
    return this.advance(id, 'derived', reflection, revision);
  }

  ate(body: AteRequest): Promise<AtePayload> {
    return this.post('/v1/ate', body);
  }

  diagnostics(body: DiagnosticsRequest): Promise<DiagnosticsDoc> {
    return this.post('/v1/diagnostics', body);
  }

  listScenarios(): Promise<{ scenarios: string[] }> {
    return this.get('/v1/scenarios');
  }

  runScenario(name: string): Promise<unknown> {
    return this.post(`/v1/scenarios/${name}/run`, {});
  }
}
