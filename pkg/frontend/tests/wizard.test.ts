import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';

import { describe, expect, it } from 'vitest';

import type { ParameterSpacePayload } from '../src/types';
import {
  buildConfig,
  canEnter,
  emptyWizard,
  rowsFromSpace,
  validateAll,
  validateStep,
} from '../src/wizard';
import { goldenWizard } from './golden';

const here = dirname(fileURLToPath(import.meta.url));

const LJ_SPACE: ParameterSpacePayload = {
  model_id: 'lennard_jones',
  species: ['X'],
  parameters: [
    { name: 'epsilon', unit: 'eV', lower: 0.001, upper: 10, default_low: 0.05, default_high: 2 },
    { name: 'sigma', unit: 'A', lower: 0.5, upper: 5, default_low: 1, default_high: 4 },
    { name: 'cutoff', unit: 'A', lower: 1, upper: 12, default_low: 3, default_high: 9 },
  ],
};

describe('buildConfig', () => {
  it('matches the checked-in golden document byte for byte', () => {
    const golden = readFileSync(join(here, 'golden-config.json'), 'utf8');
    expect(buildConfig(goldenWizard())).toBe(golden);
  });

  it('is deterministic', () => {
    expect(buildConfig(goldenWizard())).toBe(buildConfig(goldenWizard()));
  });

  it('passes untouched registry defaults through', () => {
    const state = { ...goldenWizard(), rows: rowsFromSpace(LJ_SPACE) };
    const doc = JSON.parse(buildConfig(state));
    expect(doc.model.parameters.sigma).toEqual({
      lower: 0.5,
      upper: 5,
      default_low: 1,
      default_high: 4,
    });
  });

  it('defaults a blank rank (and weight) to 1', () => {
    const doc = JSON.parse(buildConfig(goldenWizard()));
    expect(doc.data.targets[0].rank).toBe(1); // rank was ''
    expect(doc.data.targets[1].rank).toBe(1); // rank was absent
    expect(doc.data.targets[1].weight).toBe(1);
    expect(doc.data.targets[0].weight).toBe(2); // explicit weight kept
  });

  it('emits canonical sorted keys', () => {
    const text = buildConfig(goldenWizard());
    const top = [...text.matchAll(/^  "(\w+)":/gm)].map((m) => m[1]);
    expect(top).toEqual([...top].sort());
    expect(text.endsWith('\n')).toBe(true);
  });
});

describe('validation', () => {
  it('collects per-field messages instead of throwing', () => {
    const state = goldenWizard();
    state.rows[0].lower = 5;
    state.rows[0].upper = 1;
    state.targets[1].id = 'd1.4'; // duplicate
    const errors = validateAll(state);
    const paths = errors.map((e) => e.path);
    expect(paths).toContain('rows.epsilon.lower');
    expect(paths).toContain('targets.1.id');
  });

  it('gates review behind all prior steps', () => {
    const invalid = { ...goldenWizard(), name: '' };
    expect(canEnter(invalid, 'review')).toBe(false);
    expect(canEnter(goldenWizard(), 'review')).toBe(true);
    // the broken step is identifiable
    expect(validateStep(invalid, 'model').length).toBeGreaterThan(0);
  });

  it('requires a tolerance per rank in hierarchical mode', () => {
    const state = goldenWizard();
    state.objectiveMode = 'hierarchical';
    state.targets[0].rank = 2;
    const paths = validateStep(state, 'learn').map((e) => e.path);
    expect(paths).toContain('tolerances.1');
    expect(paths).toContain('tolerances.2');
    state.tolerances = { '1': 0.01, '2': 0.05 };
    expect(validateStep(state, 'learn')).toEqual([]);
    const doc = JSON.parse(buildConfig(state));
    expect(doc.objective).toEqual({ mode: 'hierarchical', tolerances: { '1': 0.01, '2': 0.05 } });
  });

  it('starts from an empty state that does not reach review', () => {
    expect(canEnter(emptyWizard(), 'review')).toBe(false);
  });
});
