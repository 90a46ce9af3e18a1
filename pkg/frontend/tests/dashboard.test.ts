import { describe, expect, it } from 'vitest';

import { ApiClient, FetchLike } from '../src/api';
import {
  actionEnabled,
  allowedActions,
  performAction,
  refreshRows,
  rowFromRecord,
} from '../src/dashboard';
import type { JobRecord, JobStatus } from '../src/types';

function record(status: JobStatus, overrides: Partial<JobRecord> = {}): JobRecord {
  return {
    job_id: 'j1',
    config: { name: 'fit-1' },
    status,
    created_at: 100,
    started_at: status === 'created' ? null : 110,
    ended_at: null,
    progress:
      status === 'created'
        ? null
        : {
            job_id: 'j1',
            iteration: 7,
            best_objective: 0.25,
            mean_objective: 0.5,
            evaluations: 70,
            timestamp: 117,
          },
    error: null,
    ...overrides,
  };
}

/** In-memory stand-in for the jobs API: one job whose cancel succeeds. */
function mockServer(job: { record: JobRecord }, log: string[]): FetchLike {
  return async (url, init) => {
    const method = init?.method ?? 'GET';
    log.push(`${method} ${url}`);
    if (url === '/api/jobs' && method === 'GET') {
      return Response.json({ jobs: [job.record] });
    }
    if (url === '/api/jobs/j1' && method === 'GET') {
      return Response.json(job.record);
    }
    if (url === '/api/jobs/j1/cancel' && method === 'POST') {
      if (job.record.status !== 'running') {
        return Response.json({ detail: 'illegal transition' }, { status: 409 });
      }
      job.record = { ...job.record, status: 'cancelled', ended_at: 120 };
      return Response.json(job.record);
    }
    return Response.json({ detail: 'unknown' }, { status: 404 });
  };
}

describe('action enablement mirrors the lifecycle', () => {
  it('exposes exactly the legal actions per status', () => {
    expect(allowedActions('created')).toEqual(['start']);
    expect(allowedActions('running')).toEqual(['cancel']);
    expect(allowedActions('cancelled')).toEqual(['restart']);
    expect(allowedActions('failed')).toEqual(['restart']);
    expect(allowedActions('completed')).toEqual([]);
    expect(actionEnabled('completed', 'cancel')).toBe(false);
  });
});

describe('performAction', () => {
  it('cancel on a running job shows cancelled after the server confirms', async () => {
    const job = { record: record('running') };
    const log: string[] = [];
    const client = new ApiClient('', mockServer(job, log));
    const row = rowFromRecord(job.record);
    const updated = await performAction(client, row, 'cancel');
    expect(updated.status).toBe('cancelled');
    // the displayed status came from the refresh, not from optimism
    expect(log).toEqual(['POST /api/jobs/j1/cancel', 'GET /api/jobs/j1']);
  });

  it('disabled actions never reach the network and leave the row unchanged', async () => {
    const job = { record: record('completed') };
    const log: string[] = [];
    const client = new ApiClient('', mockServer(job, log));
    const row = rowFromRecord(job.record);
    const updated = await performAction(client, row, 'cancel');
    expect(updated).toBe(row);
    expect(log).toEqual([]);
  });

  it('a server rejection leaves the row unchanged with an inline message', async () => {
    const job = { record: record('running') };
    const log: string[] = [];
    const client = new ApiClient('', async (url, init) => {
      log.push(url);
      return Response.json({ detail: 'illegal transition' }, { status: 409 });
    });
    const row = rowFromRecord(job.record);
    const updated = await performAction(client, row, 'cancel');
    expect(updated.status).toBe('running');
    expect(updated.actionError).toBe('illegal transition');
    expect(log).toEqual(['/api/jobs/j1/cancel']); // no refresh after rejection
  });
});

describe('rows', () => {
  it('display exactly what the server reported', async () => {
    const job = { record: record('running') };
    const client = new ApiClient('', mockServer(job, []));
    const rows = await refreshRows(client, 130);
    expect(rows).toHaveLength(1);
    expect(rows[0]).toMatchObject({
      jobId: 'j1',
      name: 'fit-1',
      status: 'running',
      iteration: 7,
      bestObjective: 0.25,
      elapsedSeconds: 20,
    });
  });

  it('handles never-started jobs', () => {
    const row = rowFromRecord(record('created'));
    expect(row.iteration).toBe(0);
    expect(row.bestObjective).toBeNull();
    expect(row.elapsedSeconds).toBeNull();
  });
});
