/** Dashboard row model and job actions. The row never fabricates state:
 * every displayed status comes from the latest server response. */

import { ApiClient, ApiError } from './api';
import type { JobRecord, JobStatus } from './types';

export type JobAction = 'start' | 'cancel' | 'restart';

/** Mirror of the server's legal-transition table. */
const ALLOWED: Record<JobStatus, readonly JobAction[]> = {
  created: ['start'],
  running: ['cancel'],
  cancelled: ['restart'],
  failed: ['restart'],
  completed: [],
};

export function allowedActions(status: JobStatus): readonly JobAction[] {
  return ALLOWED[status];
}

export function actionEnabled(status: JobStatus, action: JobAction): boolean {
  return ALLOWED[status].includes(action);
}

export interface JobRow {
  jobId: string;
  name: string;
  status: JobStatus;
  iteration: number;
  bestObjective: number | null;
  elapsedSeconds: number | null;
  /** inline message from the last rejected action, cleared on success */
  actionError: string | null;
}

export function rowFromRecord(record: JobRecord, now?: number): JobRow {
  const started = record.started_at;
  const end = record.ended_at ?? now ?? null;
  return {
    jobId: record.job_id,
    name: String((record.config as { name?: unknown }).name ?? record.job_id),
    status: record.status,
    iteration: record.progress?.iteration ?? 0,
    bestObjective: record.progress?.best_objective ?? null,
    elapsedSeconds: started !== null && end !== null ? end - started : null,
    actionError: record.error,
  };
}

/** Run an action against the server and return the refreshed row. Illegal
 * actions are disabled up front (the row comes back unchanged); server
 * rejections leave the row unchanged except for an inline message. */
export async function performAction(
  client: ApiClient,
  row: JobRow,
  action: JobAction,
): Promise<JobRow> {
  if (!actionEnabled(row.status, action)) return row;
  try {
    await client.jobAction(row.jobId, action);
  } catch (err) {
    const message = err instanceof ApiError ? err.message : String(err);
    return { ...row, actionError: message };
  }
  // one refresh: display whatever the server now reports
  const record = await client.getJob(row.jobId);
  return { ...rowFromRecord(record), actionError: null };
}

export async function refreshRows(client: ApiClient, now?: number): Promise<JobRow[]> {
  const { jobs } = await client.listJobs();
  return jobs
    .slice()
    .sort((a, b) => b.created_at - a.created_at)
    .map((record) => rowFromRecord(record, now));
}
