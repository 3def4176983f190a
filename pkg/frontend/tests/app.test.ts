import { beforeEach, describe, expect, it } from 'vitest';

import type { ApiClient } from '../src/api.js';
import { App } from '../src/app.js';
import type { ChartKind, ChartPayload, ColorMode } from '../src/types.js';

function fakePayload(kind: ChartKind, mode: ColorMode): ChartPayload {
  return {
    schema_version: 1,
    chart_kind: kind,
    mode,
    version: 0,
    spec: { group_by: 'k', target: 'v', min_support: 1 },
    groups: [{ key: 'a', label: 'a', color_class: 0, size: 3 }],
    anomaly_marks: [],
    bin_edges: [0, 1],
    bins: [{ lo: 0, hi: 1, segments: [{ group_key: 'a', label: mode === 'group_name' ? 'a' : 'no_error', color_class: 0, count: 3 }] }],
    points: [],
    series: [],
    cells: [],
  };
}

class StubApi {
  chartCalls = 0;

  async uploadDataset() {
    return {
      dataset_id: 'd1',
      schema: [
        { name: 'k', kind: 'categorical' as const },
        { name: 'v', kind: 'numeric' as const },
      ],
      row_count: 3,
    };
  }

  async createSession() {
    return { session_id: 's1', version: 0, row_count: 3, ranked: [], total_records: 0 };
  }

  async anomalies() {
    return { version: 0, ranked: [], records: [] };
  }

  async summary() {
    return { version: 0, columns: [] };
  }

  async chart(_sid: string, _g: string, _t: string, kind: ChartKind, mode: ColorMode) {
    this.chartCalls += 1;
    return fakePayload(kind, mode);
  }
}

describe('App', () => {
  let api: StubApi;
  let app: App;

  beforeEach(async () => {
    document.body.innerHTML = '';
    api = new StubApi();
    app = new App(document.body, api as unknown as ApiClient);
    await app.uploadCsv('k,v\na,1\na,2\na,3\n', 'tiny.csv');
  });

  it('renders one chart card per spec after upload', () => {
    expect(document.querySelectorAll('.chart-card')).toHaveLength(1);
    expect(document.querySelectorAll('.chart-card svg')).toHaveLength(1);
    expect(document.querySelector('#version-label')?.textContent).toBe('version 0');
  });

  it('prefetches both color modes and toggles without refetching', () => {
    const callsAfterLoad = api.chartCalls;
    expect(callsAfterLoad).toBe(2); // group_name + error_type for the one spec
    app.toggleMode();
    expect(app.state.mode).toBe('error_type');
    expect(api.chartCalls).toBe(callsAfterLoad);
    expect(document.querySelector('#mode-toggle')?.textContent).toContain('error type');
  });

  it('keeps bar heights identical across the mode toggle', () => {
    const spec = app.state.specs[0]!;
    const before = app.histogramHeights(spec);
    app.toggleMode();
    const after = app.histogramHeights(spec);
    expect(before.length).toBeGreaterThan(0);
    expect(after).toEqual(before);
  });
});
