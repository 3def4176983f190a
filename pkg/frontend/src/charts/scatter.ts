import { segmentColor } from '../palette.js';
import type { ChartPayload } from '../types.js';
import { DEFAULT_SIZE, chartRoot, formatTick, linearScale, svgElement } from './svg.js';

/** Row-index vs value scatter; anomalous cells get a ring outline. */
export function renderScatter(payload: ChartPayload): SVGSVGElement {
  const size = DEFAULT_SIZE;
  const svg = chartRoot(size);
  svg.dataset.kind = 'scatter';
  const points = payload.points ?? [];
  if (points.length === 0) return svg;

  const rows = points.map((p) => p.row);
  const values = points.map((p) => p.value);
  const x = linearScale(Math.min(...rows), Math.max(...rows), size.padLeft + 6, size.width - 10);
  const y = linearScale(
    Math.min(...values),
    Math.max(...values),
    size.height - size.padBottom - 6,
    size.padTop + 6,
  );

  for (const point of points) {
    const anomalous = point.anomalies.length > 0;
    const circle = svgElement('circle', {
      cx: x(point.row),
      cy: y(point.value),
      r: anomalous ? 5 : 3,
      fill: segmentColor(payload.mode, point.color_class),
      class: anomalous ? 'point anomalous' : 'point',
      ...(anomalous ? { stroke: '#222', 'stroke-width': 1.5 } : {}),
    });
    circle.dataset.row = String(point.row);
    circle.dataset.groupKey = point.group_key ?? '';
    const title = svgElement('title');
    title.textContent = anomalous
      ? `row ${point.row}: ${formatTick(point.value)} (${point.anomalies.join(', ')})`
      : `row ${point.row}: ${formatTick(point.value)}`;
    circle.appendChild(title);
    svg.appendChild(circle);
  }
  return svg;
}
