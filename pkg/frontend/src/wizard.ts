/** New-task wizard: model selection, parameter-space table, training-data
 * editor, optimizer picker. `buildConfig` turns a valid WizardState into a
 * canonical (byte-stable) job config document. */

import type { FieldError, ParameterSpacePayload } from './types';

export type WizardStep = 'model' | 'data' | 'learn' | 'review';

export const STEP_ORDER: readonly WizardStep[] = ['model', 'data', 'learn', 'review'];

/** One editable row of the parameter-space table. A fixed value pins the
 * parameter; otherwise the bounds and GA sampling range apply. */
export interface ParamRow {
  name: string;
  unit: string;
  lower: number;
  upper: number;
  defaultLow: number;
  defaultHigh: number;
  fixedValue?: number;
}

/** One row of the training-data editor. Blank rank means rank 1; blank
 * weight means weight 1; tolerance is optional (server default applies). */
export interface TargetRow {
  id: string;
  kind: Record<string, unknown>; // e.g. {property: 'dimer_energy', r: 1.2}
  target: number;
  unit?: string;
  weight?: number | '';
  rank?: number | '';
  tolerance?: number | '';
}

export type ObjectiveMode = 'single' | 'hierarchical' | 'pareto';

export interface WizardState {
  step: WizardStep;
  name: string;
  modelId: string;
  species: string[];
  rows: ParamRow[];
  targets: TargetRow[];
  holdoutFraction: number;
  splitSeed: number;
  strategy: string;
  learnerParams: Record<string, number>;
  objectiveMode: ObjectiveMode;
  tolerances: Record<string, number>;
  seed: number;
}

const STRATEGIES = ['ga', 'nelder_mead', 'two_stage', 'hoga', 'nsga2', 'random'];

/** Untouched registry defaults pass straight through into the table. */
export function rowsFromSpace(space: ParameterSpacePayload): ParamRow[] {
  return space.parameters.map((p) => ({
    name: p.name,
    unit: p.unit,
    lower: p.lower,
    upper: p.upper,
    defaultLow: p.default_low,
    defaultHigh: p.default_high,
  }));
}

function blank(v: number | '' | undefined): boolean {
  return v === undefined || v === '';
}

export function validateStep(state: WizardState, step: WizardStep): FieldError[] {
  const errors: FieldError[] = [];
  const bad = (path: string, reason: string) => errors.push({ path, reason });

  if (step === 'model') {
    if (!state.name.trim()) bad('name', 'task name is required');
    if (!state.modelId) bad('modelId', 'choose a model');
    if (state.species.length === 0) bad('species', 'at least one species');
    for (const row of state.rows) {
      const at = `rows.${row.name}`;
      if (!(row.lower <= row.upper)) bad(`${at}.lower`, 'lower must be <= upper');
      if (!(row.defaultLow <= row.defaultHigh)) {
        bad(`${at}.defaultLow`, 'range low must be <= range high');
      }
      if (row.fixedValue !== undefined && !Number.isFinite(row.fixedValue)) {
        bad(`${at}.fixedValue`, 'fixed value must be a number');
      }
    }
  } else if (step === 'data') {
    if (state.targets.length === 0) bad('targets', 'add at least one target');
    const seen = new Set<string>();
    state.targets.forEach((t, i) => {
      const at = `targets.${i}`;
      if (!t.id.trim()) bad(`${at}.id`, 'target id is required');
      else if (seen.has(t.id)) bad(`${at}.id`, `duplicate id ${t.id}`);
      seen.add(t.id);
      if (!Number.isFinite(t.target)) bad(`${at}.target`, 'target value must be a number');
      if (!blank(t.weight) && (t.weight as number) < 0) bad(`${at}.weight`, 'weight must be >= 0');
      if (!blank(t.rank) && ((t.rank as number) < 1 || !Number.isInteger(t.rank))) {
        bad(`${at}.rank`, 'rank must be a positive integer');
      }
      if (!blank(t.tolerance) && (t.tolerance as number) <= 0) {
        bad(`${at}.tolerance`, 'tolerance must be positive');
      }
    });
    if (!(state.holdoutFraction >= 0 && state.holdoutFraction < 1)) {
      bad('holdoutFraction', 'holdout fraction must be in [0, 1)');
    }
  } else if (step === 'learn') {
    if (!STRATEGIES.includes(state.strategy)) bad('strategy', `unknown strategy ${state.strategy}`);
    if (state.objectiveMode === 'hierarchical') {
      const ranks = new Set(
        state.targets.map((t) => (blank(t.rank) ? 1 : (t.rank as number))),
      );
      for (const r of ranks) {
        if (!(state.tolerances[String(r)] > 0)) {
          bad(`tolerances.${r}`, `hierarchical mode needs a positive tolerance for rank ${r}`);
        }
      }
    }
  }
  return errors;
}

/** "review" is reachable only when every prior step validates. */
export function canEnter(state: WizardState, step: WizardStep): boolean {
  const upto = STEP_ORDER.indexOf(step);
  return STEP_ORDER.slice(0, upto).every((s) => validateStep(state, s).length === 0);
}

export function validateAll(state: WizardState): FieldError[] {
  return STEP_ORDER.flatMap((s) => validateStep(state, s));
}

/** Recursively sort object keys so serialization is canonical. */
function canonical(value: unknown): unknown {
  if (Array.isArray(value)) return value.map(canonical);
  if (value !== null && typeof value === 'object') {
    const out: Record<string, unknown> = {};
    for (const key of Object.keys(value as Record<string, unknown>).sort()) {
      out[key] = canonical((value as Record<string, unknown>)[key]);
    }
    return out;
  }
  return value;
}

/** Emit the job config document as a byte-stable string (sorted keys,
 * two-space indent, trailing newline). Assumes the state validates; call
 * validateAll first for per-field messages. */
export function buildConfig(state: WizardState): string {
  const parameters: Record<string, unknown> = {};
  for (const row of state.rows) {
    if (row.fixedValue !== undefined) {
      parameters[row.name] = { value: row.fixedValue };
    } else {
      parameters[row.name] = {
        lower: row.lower,
        upper: row.upper,
        default_low: row.defaultLow,
        default_high: row.defaultHigh,
      };
    }
  }

  const targets = state.targets.map((t) => {
    const out: Record<string, unknown> = {
      id: t.id,
      kind: t.kind,
      target: t.target,
      weight: blank(t.weight) ? 1 : t.weight,
      rank: blank(t.rank) ? 1 : t.rank,
    };
    if (t.unit) out.unit = t.unit;
    if (!blank(t.tolerance)) out.tolerance = t.tolerance;
    return out;
  });

  const doc: Record<string, unknown> = {
    name: state.name,
    model: { model_id: state.modelId, species: state.species, parameters },
    data: {
      targets,
      holdout_fraction: state.holdoutFraction,
      split_seed: state.splitSeed,
    },
    learner: { strategy: state.strategy, ...state.learnerParams },
    seed: state.seed,
  };
  if (state.objectiveMode !== 'single') {
    doc.objective =
      state.objectiveMode === 'hierarchical'
        ? { mode: 'hierarchical', tolerances: state.tolerances }
        : { mode: 'pareto' };
  }
  return JSON.stringify(canonical(doc), null, 2) + '\n';
}

export function emptyWizard(): WizardState {
  return {
    step: 'model',
    name: '',
    modelId: '',
    species: ['X'],
    rows: [],
    targets: [],
    holdoutFraction: 0.2,
    splitSeed: 0,
    strategy: 'two_stage',
    learnerParams: { population: 64, generations: 100 },
    objectiveMode: 'single',
    tolerances: {},
    seed: 1,
  };
}
