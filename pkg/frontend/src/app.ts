/** Minimal DOM wiring: dashboard table with action buttons, a wizard pane
 * that previews the canonical config, and a live convergence readout. */

import { ApiClient } from './api';
import { applyEvent, ChartState, emptyChart, plottedBest } from './chart';
import {
  allowedActions,
  JobRow,
  performAction,
  refreshRows,
} from './dashboard';
import { subscribeProgress } from './stream';
import {
  buildConfig,
  emptyWizard,
  rowsFromSpace,
  validateAll,
  WizardState,
} from './wizard';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (text !== undefined) node.textContent = text;
  return node;
}

export class App {
  private rows: JobRow[] = [];
  private chart: ChartState = emptyChart();
  private watching: string | null = null;
  private unsubscribe: (() => void) | null = null;
  private wizard: WizardState = emptyWizard();

  constructor(
    private readonly client: ApiClient,
    private readonly root: HTMLElement,
  ) {}

  async start(refreshMs = 2000): Promise<void> {
    await this.refresh();
    setInterval(() => void this.refresh(), refreshMs);
  }

  private async refresh(): Promise<void> {
    this.rows = await refreshRows(this.client, Date.now() / 1000);
    this.render();
  }

  private watch(jobId: string): void {
    this.unsubscribe?.();
    this.watching = jobId;
    this.chart = emptyChart();
    const sub = subscribeProgress(this.client, jobId, (event) => {
      this.chart = applyEvent(this.chart, event);
      this.render();
    });
    this.unsubscribe = () => sub.close();
  }

  async loadWizardModel(modelId: string): Promise<void> {
    const { parameter_space } = await this.client.showModel(modelId, this.wizard.species);
    this.wizard = { ...this.wizard, modelId, rows: rowsFromSpace(parameter_space) };
    this.render();
  }

  async submitWizard(): Promise<void> {
    if (validateAll(this.wizard).length > 0) return;
    await this.client.submitJob(buildConfig(this.wizard));
    await this.refresh();
  }

  private render(): void {
    this.root.replaceChildren();
    const table = el('table');
    const head = el('tr');
    for (const h of ['name', 'status', 'iter', 'best', 'elapsed', 'actions']) {
      head.append(el('th', h));
    }
    table.append(head);
    for (const row of this.rows) {
      const tr = el('tr');
      tr.append(
        el('td', row.name),
        el('td', row.status),
        el('td', String(row.iteration)),
        el('td', row.bestObjective === null ? '-' : row.bestObjective.toPrecision(4)),
        el('td', row.elapsedSeconds === null ? '-' : `${row.elapsedSeconds.toFixed(0)}s`),
      );
      const actions = el('td');
      for (const action of allowedActions(row.status)) {
        const button = el('button', action);
        button.onclick = async () => {
          const updated = await performAction(this.client, row, action);
          this.rows = this.rows.map((r) => (r.jobId === updated.jobId ? updated : r));
          if (action === 'start') this.watch(row.jobId);
          this.render();
        };
        actions.append(button);
      }
      if (row.actionError) actions.append(el('em', row.actionError));
      tr.append(actions);
      table.append(tr);
    }
    this.root.append(table);

    if (this.watching) {
      const ys = plottedBest(this.chart);
      const last = ys.length > 0 ? ys[ys.length - 1] : null;
      const line = el(
        'p',
        `watching ${this.watching}: ${this.chart.points.length} points` +
          (last === null ? '' : `, latest best ${last}`) +
          (this.chart.warnings > 0 ? ` (${this.chart.warnings} skipped)` : ''),
      );
      this.root.append(line);
    }
  }
}

export function mount(root: HTMLElement, baseUrl = ''): App {
  const app = new App(new ApiClient(baseUrl), root);
  void app.start();
  return app;
}
