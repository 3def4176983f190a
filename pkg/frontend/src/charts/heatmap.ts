import type { ChartPayload } from '../types.js';
import { DEFAULT_SIZE, chartRoot, svgElement } from './svg.js';

const BASE = '#0072B2';

/** Group x bin matrix; cell opacity encodes the engine's count level. */
export function renderHeatmap(payload: ChartPayload): SVGSVGElement {
  const size = DEFAULT_SIZE;
  const svg = chartRoot(size);
  svg.dataset.kind = 'heatmap';
  const cells = payload.cells ?? [];
  const groups = payload.groups;
  const nbins = Math.max(1, (payload.bin_edges?.length ?? 2) - 1);
  if (cells.length === 0 || groups.length === 0) return svg;

  const innerW = size.width - size.padLeft - 8;
  const innerH = size.height - size.padTop - size.padBottom;
  const cellW = innerW / nbins;
  const cellH = innerH / groups.length;
  const rowOf = new Map<string | null, number>(groups.map((g, i) => [g.key, i]));

  for (const cell of cells) {
    const rowIndex = rowOf.get(cell.group_key) ?? 0;
    const rect = svgElement('rect', {
      x: size.padLeft + cell.bin * cellW,
      y: size.padTop + rowIndex * cellH,
      width: Math.max(cellW - 1, 0.5),
      height: Math.max(cellH - 1, 0.5),
      fill: BASE,
      'fill-opacity': cell.color_class === 0 ? 0.04 : cell.color_class / 9,
      class: 'cell',
    });
    rect.dataset.groupKey = cell.group_key ?? '';
    rect.dataset.bin = String(cell.bin);
    rect.dataset.count = String(cell.count);
    const title = svgElement('title');
    const label = groups.find((g) => g.key === cell.group_key)?.label ?? '';
    title.textContent = `${label}, bin ${cell.bin}: ${cell.count} rows`;
    rect.appendChild(title);
    svg.appendChild(rect);
  }

  groups.forEach((group, i) => {
    const text = svgElement('text', {
      x: size.padLeft - 4,
      y: size.padTop + i * cellH + cellH / 2 + 3,
      'font-size': 10,
      fill: '#555',
      'text-anchor': 'end',
    });
    text.textContent = group.label.length > 7 ? `${group.label.slice(0, 6)}…` : group.label;
    svg.appendChild(text);
  });
  return svg;
}
