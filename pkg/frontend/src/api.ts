/** Thin typed client for the jobs HTTP API. The fetch implementation is
 * injectable so tests can mock the server. */

import type {
  FieldError,
  JobRecord,
  ModelDescriptor,
  ParameterSpacePayload,
} from './types';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
    readonly errors: FieldError[] = [],
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchFn(this.baseUrl + path, init);
    if (!res.ok) {
      let detail = `${res.status}`;
      let errors: FieldError[] = [];
      try {
        const body = await res.json();
        if (Array.isArray(body.errors)) errors = body.errors;
        if (typeof body.detail === 'string') detail = body.detail;
      } catch {
        // non-JSON error body: keep the status text
      }
      throw new ApiError(detail, res.status, errors);
    }
    return (await res.json()) as T;
  }

  listModels(): Promise<{ models: ModelDescriptor[] }> {
    return this.request('/api/models');
  }

  showModel(
    modelId: string,
    species: string[],
  ): Promise<{ model: ModelDescriptor; parameter_space: ParameterSpacePayload }> {
    const q = encodeURIComponent(species.join(','));
    return this.request(`/api/models/${modelId}?species=${q}`);
  }

  submitJob(config: unknown): Promise<{ job_id: string }> {
    return this.request('/api/jobs', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: typeof config === 'string' ? config : JSON.stringify(config),
    });
  }

  listJobs(): Promise<{ jobs: JobRecord[] }> {
    return this.request('/api/jobs');
  }

  getJob(jobId: string): Promise<JobRecord> {
    return this.request(`/api/jobs/${jobId}`);
  }

  jobAction(jobId: string, action: 'start' | 'cancel' | 'restart'): Promise<JobRecord> {
    return this.request(`/api/jobs/${jobId}/${action}`, { method: 'POST' });
  }

  getResult(jobId: string): Promise<Record<string, unknown>> {
    return this.request(`/api/jobs/${jobId}/result`);
  }

  progressUrl(jobId: string): string {
    return `${this.baseUrl}/api/jobs/${jobId}/progress`;
  }

  /** Raw streaming fetch of the progress endpoint (SSE body). */
  openProgress(jobId: string): Promise<Response> {
    return this.fetchFn(this.progressUrl(jobId));
  }
}
