/** Convergence chart state as a pure fold over progress events.
 *
 * Replay safety: events are keyed by iteration, so feeding any prefix and
 * then the full stream again produces the identical state (including the
 * warning count for skipped non-finite points). */

import type { ProgressEvent } from './types';

export interface ChartPoint {
  iteration: number;
  best: number;
  mean: number | null;
}

export interface ChartState {
  points: ChartPoint[];
  /** iterations already handled, plotted or skipped */
  seen: ReadonlySet<number>;
  /** count of events skipped for non-finite objectives (warning badge) */
  warnings: number;
  logScale: boolean;
}

export function emptyChart(): ChartState {
  return { points: [], seen: new Set(), warnings: 0, logScale: false };
}

function finite(v: number | null | undefined): v is number {
  return typeof v === 'number' && Number.isFinite(v);
}

/** Fold one event into the chart. Duplicate iterations are ignored;
 * non-finite best objectives are skipped and counted as warnings. */
export function applyEvent(state: ChartState, event: ProgressEvent): ChartState {
  if (state.seen.has(event.iteration)) return state;
  const seen = new Set(state.seen);
  seen.add(event.iteration);
  if (!finite(event.best_objective)) {
    return { ...state, seen, warnings: state.warnings + 1 };
  }
  const point: ChartPoint = {
    iteration: event.iteration,
    best: event.best_objective,
    mean: finite(event.mean_objective) ? event.mean_objective : null,
  };
  const points = [...state.points, point].sort((a, b) => a.iteration - b.iteration);
  return { ...state, seen, points };
}

export function foldEvents(
  events: Iterable<ProgressEvent>,
  initial: ChartState = emptyChart(),
): ChartState {
  let state = initial;
  for (const event of events) state = applyEvent(state, event);
  return state;
}

export function toggleLogScale(state: ChartState): ChartState {
  return { ...state, logScale: !state.logScale };
}

/** Y values as plotted: log10 when the log toggle is on (non-positive
 * values map to null so the axis stays defined). */
export function plottedBest(state: ChartState): Array<number | null> {
  if (!state.logScale) return state.points.map((p) => p.best);
  return state.points.map((p) => (p.best > 0 ? Math.log10(p.best) : null));
}
