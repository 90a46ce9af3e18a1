/** Shapes mirrored from the jobs HTTP API. */

export interface ModelDescriptor {
  model_id: string;
  arity: string;
  cutoff_param: string;
  description: string;
}

export interface ParameterSpec {
  name: string;
  unit: string;
  lower: number;
  upper: number;
  default_low: number;
  default_high: number;
}

export interface ParameterSpacePayload {
  model_id: string;
  species: string[];
  parameters: ParameterSpec[];
}

export type JobStatus = 'created' | 'running' | 'completed' | 'cancelled' | 'failed';

export interface JobRecord {
  job_id: string;
  config: Record<string, unknown>;
  status: JobStatus;
  created_at: number;
  started_at: number | null;
  ended_at: number | null;
  progress: ProgressEvent | null;
  error: string | null;
}

export interface ProgressEvent {
  job_id: string;
  iteration: number;
  best_objective: number | null;
  mean_objective: number | null;
  evaluations: number;
  timestamp: number;
  [extra: string]: unknown;
}

export interface FieldError {
  path: string;
  reason: string;
}
