import { segmentColor } from '../palette.js';
import type { ChartPayload, Segment } from '../types.js';
import { DEFAULT_SIZE, chartRoot, formatTick, svgElement } from './svg.js';

export interface SegmentEvent {
  binIndex: number;
  segment: Segment;
  element: SVGRectElement;
}

export interface HistogramOptions {
  onSegmentClick?: (event: SegmentEvent) => void;
  onSegmentHover?: (event: SegmentEvent) => void;
  onSegmentLeave?: () => void;
}

/**
 * Stacked histogram: one column per bin, one rect per (bin, group)
 * segment. Heights are linear in counts, so the per-bin total height is
 * independent of the color mode (mode only changes fills and labels).
 */
export function renderHistogram(payload: ChartPayload, options: HistogramOptions = {}): SVGSVGElement {
  const size = DEFAULT_SIZE;
  const svg = chartRoot(size);
  svg.dataset.kind = 'stacked_histogram';
  svg.dataset.mode = payload.mode;
  const bins = payload.bins ?? [];
  const innerW = size.width - size.padLeft - 4;
  const innerH = size.height - size.padTop - size.padBottom;
  const maxTotal = Math.max(
    1,
    ...bins.map((b) => b.segments.reduce((acc, s) => acc + s.count, 0)),
  );
  const slot = innerW / Math.max(bins.length, 1);
  const barW = Math.max(slot * 0.82, 1);

  bins.forEach((bin, i) => {
    const x = size.padLeft + i * slot + (slot - barW) / 2;
    let yTop = size.height - size.padBottom;
    for (const segment of bin.segments) {
      const h = (segment.count / maxTotal) * innerH;
      yTop -= h;
      const rect = svgElement('rect', {
        x,
        y: yTop,
        width: barW,
        height: h,
        fill: segmentColor(payload.mode, segment.color_class),
        class: 'segment',
      });
      rect.dataset.bin = String(i);
      rect.dataset.groupKey = segment.group_key ?? '';
      rect.dataset.label = segment.label;
      rect.dataset.count = String(segment.count);
      const title = svgElement('title');
      title.textContent = `${segment.label}: ${segment.count} rows in [${formatTick(bin.lo)}, ${formatTick(bin.hi)})`;
      rect.appendChild(title);
      if (options.onSegmentClick) {
        rect.addEventListener('click', () =>
          options.onSegmentClick?.({ binIndex: i, segment, element: rect }),
        );
      }
      if (options.onSegmentHover) {
        rect.addEventListener('mouseenter', () =>
          options.onSegmentHover?.({ binIndex: i, segment, element: rect }),
        );
      }
      if (options.onSegmentLeave) {
        rect.addEventListener('mouseleave', () => options.onSegmentLeave?.());
      }
      svg.appendChild(rect);
    }
  });

  // x-axis: bin edge labels at both ends
  const axis = svgElement('g', { class: 'axis' });
  const edges = payload.bin_edges ?? [];
  if (edges.length >= 2) {
    const lo = svgElement('text', {
      x: size.padLeft,
      y: size.height - 6,
      'font-size': 10,
      fill: '#555',
    });
    lo.textContent = formatTick(edges[0]!);
    const hi = svgElement('text', {
      x: size.width - 8,
      y: size.height - 6,
      'font-size': 10,
      fill: '#555',
      'text-anchor': 'end',
    });
    hi.textContent = formatTick(edges[edges.length - 1]!);
    axis.append(lo, hi);
  }
  const yMax = svgElement('text', {
    x: size.padLeft - 4,
    y: size.padTop + 10,
    'font-size': 10,
    fill: '#555',
    'text-anchor': 'end',
  });
  yMax.textContent = String(maxTotal);
  axis.appendChild(yMax);
  svg.appendChild(axis);
  return svg;
}

/** Total rendered bar height per bin; used by tests for the
 * mode-consistency invariant. */
export function binHeights(svg: SVGSVGElement): number[] {
  const totals = new Map<number, number>();
  svg.querySelectorAll<SVGRectElement>('rect.segment').forEach((rect) => {
    const bin = Number(rect.dataset.bin);
    totals.set(bin, (totals.get(bin) ?? 0) + Number(rect.getAttribute('height')));
  });
  return [...totals.entries()].sort((a, b) => a[0] - b[0]).map(([, h]) => h);
}
