import { segmentColor } from '../palette.js';
import type { ChartPayload } from '../types.js';
import { DEFAULT_SIZE, chartRoot, linearScale, svgElement } from './svg.js';

/** One polyline per group, points ordered by row index. */
export function renderLine(payload: ChartPayload): SVGSVGElement {
  const size = DEFAULT_SIZE;
  const svg = chartRoot(size);
  svg.dataset.kind = 'line';
  const series = (payload.series ?? []).filter((s) => s.points.length > 0);
  if (series.length === 0) return svg;

  const allRows = series.flatMap((s) => s.points.map((p) => p.row));
  const allValues = series.flatMap((s) => s.points.map((p) => p.value));
  const x = linearScale(Math.min(...allRows), Math.max(...allRows), size.padLeft + 6, size.width - 10);
  const y = linearScale(
    Math.min(...allValues),
    Math.max(...allValues),
    size.height - size.padBottom - 6,
    size.padTop + 6,
  );

  for (const s of series) {
    const path = s.points.map((p) => `${x(p.row).toFixed(1)},${y(p.value).toFixed(1)}`).join(' ');
    const line = svgElement('polyline', {
      points: path,
      fill: 'none',
      stroke: segmentColor(payload.mode, s.color_class),
      'stroke-width': 2,
      class: 'series',
    });
    line.dataset.groupKey = s.group_key ?? '';
    line.dataset.label = s.label;
    const title = svgElement('title');
    title.textContent = `${s.label} (${s.points.length} points)`;
    line.appendChild(title);
    svg.appendChild(line);
  }
  return svg;
}
