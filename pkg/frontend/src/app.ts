import { ApiClient, ApiError } from './api.js';
import { binHeights, renderChart } from './charts/index.js';
import { groupColor } from './palette.js';
import { renderAttributePanel } from './panels/attributePanel.js';
import { renderExportView } from './panels/exportView.js';
import { loadRepairEntries, renderRepairKit } from './panels/repairKit.js';
import { Tooltip } from './panels/tooltip.js';
import { ViewState } from './state.js';
import type {
  AnomalyRecord,
  ChartKind,
  ChartPayload,
  ColorMode,
  RankedGroup,
  RepairActionJson,
  SpecRef,
  SummaryResponse,
} from './types.js';

const CHART_KINDS: ChartKind[] = ['stacked_histogram', 'scatter', 'line', 'heatmap'];

function specKey(spec: SpecRef): string {
  return `${spec.group_by}|${spec.target}`;
}

function groupKeyOf(groupBy: string, target: string, key: string | null): string {
  // JSON-encode the key so null and the literal string "null" stay distinct
  return `${groupBy}|${target}|${JSON.stringify(key)}`;
}

/**
 * Single-page wrangling UI. All numbers on screen come from API payloads;
 * the client never recomputes statistics. Mutations are serialized (one in
 * flight) and every refresh is epoch-guarded so payloads from two table
 * versions are never mixed in one render.
 */
export class App {
  readonly state = new ViewState();
  /** Last async job kicked off by a DOM event; tests await this. */
  lastTask: Promise<void> = Promise.resolve();

  private records: AnomalyRecord[] = [];
  private groupTypes = new Map<string, Record<string, number>>();
  private summary: SummaryResponse | null = null;
  private payloads = new Map<string, ChartPayload>();
  private undoDepth = 0;
  private redoDepth = 0;

  private matrix!: HTMLElement;
  private attributePanel!: HTMLElement;
  private repairPanel!: HTMLElement;
  private exportPanel!: HTMLElement;
  private statusLine!: HTMLElement;
  private versionLabel!: HTMLElement;
  private undoButton!: HTMLButtonElement;
  private redoButton!: HTMLButtonElement;
  private modeButton!: HTMLButtonElement;
  private kindSelect!: HTMLSelectElement;
  private tooltip!: Tooltip;

  constructor(
    private rootElement: HTMLElement,
    private api: ApiClient,
  ) {
    this.buildSkeleton();
  }

  private buildSkeleton(): void {
    this.rootElement.innerHTML = '';
    const header = document.createElement('header');

    const upload = document.createElement('input');
    upload.type = 'file';
    upload.id = 'upload-input';
    upload.accept = '.csv,text/csv';
    upload.addEventListener('change', () => {
      const file = upload.files?.[0];
      if (!file) return;
      this.lastTask = file.text().then((text) => this.uploadCsv(text, file.name));
    });

    this.kindSelect = document.createElement('select');
    this.kindSelect.id = 'kind-select';
    for (const kind of CHART_KINDS) {
      const option = document.createElement('option');
      option.value = kind;
      option.textContent = kind.replace('_', ' ');
      this.kindSelect.appendChild(option);
    }
    this.kindSelect.addEventListener('change', () => {
      this.lastTask = this.setKind(this.kindSelect.value as ChartKind);
    });

    this.modeButton = document.createElement('button');
    this.modeButton.id = 'mode-toggle';
    this.modeButton.textContent = 'color: group name';
    this.modeButton.addEventListener('click', () => this.toggleMode());

    this.undoButton = document.createElement('button');
    this.undoButton.id = 'undo-button';
    this.undoButton.textContent = 'undo';
    this.undoButton.disabled = true;
    this.undoButton.addEventListener('click', () => {
      this.lastTask = this.undo();
    });

    this.redoButton = document.createElement('button');
    this.redoButton.id = 'redo-button';
    this.redoButton.textContent = 'redo';
    this.redoButton.disabled = true;
    this.redoButton.addEventListener('click', () => {
      this.lastTask = this.redo();
    });

    const exportButton = document.createElement('button');
    exportButton.id = 'export-button';
    exportButton.textContent = 'export script';
    exportButton.addEventListener('click', () => {
      this.lastTask = this.showExport();
    });

    this.versionLabel = document.createElement('span');
    this.versionLabel.id = 'version-label';
    this.versionLabel.textContent = 'no session';

    this.statusLine = document.createElement('span');
    this.statusLine.id = 'status-line';

    header.append(
      upload, this.kindSelect, this.modeButton,
      this.undoButton, this.redoButton, exportButton,
      this.versionLabel, this.statusLine,
    );

    const main = document.createElement('main');
    this.attributePanel = document.createElement('aside');
    this.attributePanel.id = 'attribute-panel';
    this.matrix = document.createElement('section');
    this.matrix.id = 'chart-matrix';
    this.repairPanel = document.createElement('aside');
    this.repairPanel.id = 'repair-kit';
    main.append(this.attributePanel, this.matrix, this.repairPanel);

    this.exportPanel = document.createElement('section');
    this.exportPanel.id = 'export-view';
    this.exportPanel.setAttribute('hidden', '');

    this.rootElement.append(header, main, this.exportPanel);
    this.tooltip = new Tooltip(this.rootElement);
  }

  private setStatus(text: string, isError = false): void {
    this.statusLine.textContent = text;
    this.statusLine.classList.toggle('error', isError);
  }

  private reportError(error: unknown): void {
    if (error instanceof ApiError) {
      this.setStatus(`${error.code}: ${error.message}`, true);
    } else {
      this.setStatus(String(error), true);
    }
  }

  /** Upload CSV text, create a session over all inferred specs, render. */
  async uploadCsv(csv: string, name: string): Promise<void> {
    try {
      const dataset = await this.api.uploadDataset(csv, name);
      const session = await this.api.createSession(dataset.dataset_id);
      this.state.sessionId = session.session_id;
      this.state.specs = this.specsFromSchema(dataset.schema);
      this.state.advanceVersion(session.version);
      this.undoDepth = 0;
      this.redoDepth = 0;
      this.setStatus(`${name}: ${dataset.row_count} rows, ${session.total_records} anomaly records`);
      await this.refreshAll();
    } catch (error) {
      this.reportError(error);
      throw error;
    }
  }

  private specsFromSchema(schema: { name: string; kind: string }[]): SpecRef[] {
    const categorical = schema.filter((c) => c.kind === 'categorical').map((c) => c.name);
    const numeric = schema.filter((c) => c.kind === 'numeric').map((c) => c.name);
    const specs: SpecRef[] = [];
    for (const groupBy of categorical) {
      for (const target of numeric) {
        specs.push({ group_by: groupBy, target, min_support: 1 });
      }
    }
    return specs;
  }

  /** Re-fetch anomalies, summary, and chart payloads for the current
   * version; drop everything if the version moved mid-flight. */
  async refreshAll(): Promise<void> {
    const sessionId = this.state.sessionId;
    if (!sessionId) return;
    const epoch = this.state.beginFetch();

    const anomalies = await this.api.anomalies(sessionId, 10_000);
    const summary = await this.api.summary(sessionId);
    const fetched = new Map<string, ChartPayload>();
    for (const spec of this.state.specs) {
      for (const mode of ['group_name', 'error_type'] as ColorMode[]) {
        const payload = await this.api.chart(
          sessionId, spec.group_by, spec.target, this.state.chartKind, mode,
        );
        fetched.set(`${specKey(spec)}|${this.state.chartKind}|${mode}`, payload);
      }
    }
    if (!this.state.acceptFetch(epoch)) return; // a mutation landed meanwhile

    this.records = anomalies.records;
    this.groupTypes = new Map(
      anomalies.ranked.map((r: RankedGroup) => [
        groupKeyOf(r.group.group_by, r.group.target, r.group.key),
        r.per_type,
      ]),
    );
    this.summary = summary;
    this.payloads = fetched;
    this.versionLabel.textContent = `version ${this.state.version}`;
    this.undoButton.disabled = this.undoDepth === 0;
    this.redoButton.disabled = this.redoDepth === 0;
    this.renderMatrix();
    renderAttributePanel(this.attributePanel, summary);
  }

  private payloadFor(spec: SpecRef): ChartPayload | undefined {
    return this.payloads.get(`${specKey(spec)}|${this.state.chartKind}|${this.state.mode}`);
  }

  /** Render one chart card per spec from cached payloads. */
  renderMatrix(): void {
    this.matrix.innerHTML = '';
    for (const spec of this.state.specs) {
      const payload = this.payloadFor(spec);
      const card = document.createElement('div');
      card.className = 'chart-card';
      card.dataset.groupBy = spec.group_by;
      card.dataset.target = spec.target;

      const caption = document.createElement('h3');
      caption.textContent = `${spec.target} by ${spec.group_by}`;
      card.appendChild(caption);

      if (!payload) {
        const empty = document.createElement('p');
        empty.className = 'empty-state';
        empty.textContent = 'no data';
        card.appendChild(empty);
        this.matrix.appendChild(card);
        continue;
      }

      const svg = renderChart(payload, {
        onSegmentClick: (event) => {
          this.lastTask = this.selectSegment(spec, event.segment.group_key);
        },
        onSegmentHover: (event) => {
          const group = payload.groups.find((g) => g.key === event.segment.group_key);
          const perType = this.groupTypes.get(
            groupKeyOf(spec.group_by, spec.target, event.segment.group_key),
          );
          this.tooltip.show(group?.label ?? '', perType, event.element);
        },
        onSegmentLeave: () => this.tooltip.hide(),
      });
      card.appendChild(svg);

      const legend = document.createElement('div');
      legend.className = 'legend';
      for (const group of payload.groups) {
        const chip = document.createElement('span');
        chip.className = 'legend-chip';
        chip.textContent = group.label;
        chip.style.borderColor = groupColor(group.color_class);
        chip.addEventListener('mouseenter', () => {
          const perType = this.groupTypes.get(
            groupKeyOf(spec.group_by, spec.target, group.key),
          );
          this.tooltip.show(group.label, perType, chip);
        });
        chip.addEventListener('mouseleave', () => this.tooltip.hide());
        chip.addEventListener('click', () => {
          this.lastTask = this.selectSegment(spec, group.key);
        });
        legend.appendChild(chip);
      }
      card.appendChild(legend);
      this.matrix.appendChild(card);
    }
  }

  /** Selecting an error bar: load the group's anomalies and their repair
   * candidates (each with a preview diff) into the repair kit. */
  async selectSegment(spec: SpecRef, groupKey: string | null): Promise<void> {
    const sessionId = this.state.sessionId;
    if (!sessionId) return;
    this.state.select(spec, groupKey);
    const selectionVersion = this.state.version;
    const groupRecords = this.records.filter(
      (r) =>
        r.group.group_by === spec.group_by &&
        r.group.target === spec.target &&
        r.group.key === groupKey,
    );
    try {
      const entries = await loadRepairEntries(this.api, sessionId, groupRecords);
      if (this.state.version !== selectionVersion) return; // stale selection
      const payload = this.payloadFor(spec);
      const label = payload?.groups.find((g) => g.key === groupKey)?.label ?? String(groupKey);
      renderRepairKit(this.repairPanel, `Repairs for ${label}`, entries, (action) => {
        this.lastTask = this.applyAction(action);
      });
    } catch (error) {
      this.reportError(error);
    }
  }

  async applyAction(action: RepairActionJson): Promise<void> {
    const sessionId = this.state.sessionId;
    if (!sessionId || !this.state.beginMutation()) return;
    try {
      const response = await this.api.commit(sessionId, action);
      this.undoDepth += 1;
      this.redoDepth = 0;
      this.state.advanceVersion(response.version);
      this.repairPanel.innerHTML = '';
      this.setStatus(`applied; now at version ${response.version}`);
      await this.refreshAll();
    } catch (error) {
      this.reportError(error);
    } finally {
      this.state.endMutation();
    }
  }

  async undo(): Promise<void> {
    const sessionId = this.state.sessionId;
    if (!sessionId || !this.state.beginMutation()) return;
    try {
      const response = await this.api.undo(sessionId);
      this.undoDepth -= 1;
      this.redoDepth += 1;
      this.state.advanceVersion(response.version);
      this.repairPanel.innerHTML = '';
      await this.refreshAll();
    } catch (error) {
      this.reportError(error);
    } finally {
      this.state.endMutation();
    }
  }

  async redo(): Promise<void> {
    const sessionId = this.state.sessionId;
    if (!sessionId || !this.state.beginMutation()) return;
    try {
      const response = await this.api.redo(sessionId);
      this.undoDepth += 1;
      this.redoDepth -= 1;
      this.state.advanceVersion(response.version);
      this.repairPanel.innerHTML = '';
      await this.refreshAll();
    } catch (error) {
      this.reportError(error);
    } finally {
      this.state.endMutation();
    }
  }

  async setKind(kind: ChartKind): Promise<void> {
    this.state.chartKind = kind;
    await this.refreshAll();
  }

  /** Mode toggle re-renders from cached payloads; no fetch, counts cannot
   * change. */
  toggleMode(): void {
    this.state.mode = this.state.mode === 'group_name' ? 'error_type' : 'group_name';
    this.modeButton.textContent =
      this.state.mode === 'group_name' ? 'color: group name' : 'color: error type';
    this.renderMatrix();
  }

  async showExport(): Promise<void> {
    const sessionId = this.state.sessionId;
    if (!sessionId) return;
    try {
      const script = await this.api.script(sessionId);
      renderExportView(this.exportPanel, script);
      this.exportPanel.removeAttribute('hidden');
    } catch (error) {
      this.reportError(error);
    }
  }

  /** Test hook: total rendered bar height per bin for one spec's histogram. */
  histogramHeights(spec: SpecRef): number[] {
    const card = [...this.matrix.querySelectorAll<HTMLElement>('.chart-card')].find(
      (c) => c.dataset.groupBy === spec.group_by && c.dataset.target === spec.target,
    );
    const svg = card?.querySelector('svg');
    return svg ? binHeights(svg as SVGSVGElement) : [];
  }
}
