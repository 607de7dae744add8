// Wire types for the /v1 JSON API. Every response is an envelope holding
// exactly one of payload or error.

export interface ApiEnvelope<T> {
  schema_version: number;
  payload?: T;
  error?: ApiErrorBody;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  expected_stage?: string;
  retryable?: boolean;
}

export type Stage =
  | 'context'
  | 'ate_pre'
  | 'extremes'
  | 'allocation'
  | 'null_share'
  | 'derived'
  | 'compared';

export const STAGES: Stage[] = [
  'context',
  'ate_pre',
  'extremes',
  'allocation',
  'null_share',
  'derived',
  'compared',
];

export interface StudyContext {
  population: string;
  unit: string;
  treatment: string;
  control: string;
  outcome: string;
  time_horizon: string;
  assignment: string;
  sample_size_estimate: number;
}

export interface ExtremeJudgment {
  kind: 'largest' | 'smallest';
  effect: number;
  description: string;
  uncertainty: number;
  tail_share: number;
}

export interface BallsAllocationDoc {
  type: 'balls';
  bin_edges: number[];
  balls: number[];
  total_balls: number;
}

export interface MidpointSplitDoc {
  type: 'midpoint_split';
  share_lower: number;
  share_upper: number;
}

export type AllocationDoc = BallsAllocationDoc | MidpointSplitDoc;

export interface DistributionComponent {
  weight: number;
  kind: 'point_mass' | 'uniform' | 'normal' | 'discrete';
  [param: string]: unknown;
}

export interface DistributionDoc {
  schema_version: number;
  units?: string;
  components: DistributionComponent[];
}

export interface SessionDoc {
  schema_version: number;
  id: string;
  stage: Stage;
  context: StudyContext | null;
  ate_pre: number | null;
  largest: ExtremeJudgment | null;
  smallest: ExtremeJudgment | null;
  allocation: AllocationDoc | null;
  p_null: number | null;
  ate_post: number | null;
  distribution: DistributionDoc | null;
  reflection: string | null;
  log: Array<{ timestamp: string; transition: string; payload: unknown }>;
  warnings: string[];
}

export interface SessionPayload {
  revision: number;
  session: SessionDoc;
}

export interface DiagnosticsDoc {
  power: number;
  type_s: number;
  exaggeration: number | 'undefined';
  se: number;
  z_crit: number;
  median_significant_magnitude: number | null;
  inputs: Record<string, unknown>;
}

export interface AtePayload {
  ate: number;
  treat_rate?: number;
  control_rate?: number;
  distribution: DistributionDoc;
}
