import type { ChartPayload } from '../types.js';
import { renderHeatmap } from './heatmap.js';
import { renderHistogram, type HistogramOptions } from './histogram.js';
import { renderLine } from './line.js';
import { renderScatter } from './scatter.js';

export { binHeights, renderHistogram } from './histogram.js';
export { renderHeatmap } from './heatmap.js';
export { renderLine } from './line.js';
export { renderScatter } from './scatter.js';
export type { HistogramOptions, SegmentEvent } from './histogram.js';

export function renderChart(payload: ChartPayload, options: HistogramOptions = {}): SVGSVGElement {
  switch (payload.chart_kind) {
    case 'stacked_histogram':
      return renderHistogram(payload, options);
    case 'scatter':
      return renderScatter(payload);
    case 'line':
      return renderLine(payload);
    case 'heatmap':
      return renderHeatmap(payload);
  }
}
