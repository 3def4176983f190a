import { describe, expect, it } from 'vitest';

import { binHeights, renderHistogram } from '../src/charts/index.js';
import type { ChartPayload } from '../src/types.js';

function payload(mode: 'group_name' | 'error_type'): ChartPayload {
  // Same counts in both modes; only labels and color classes differ.
  const label = (group: string) =>
    mode === 'group_name' ? group : group === 'a' ? 'missing_value' : 'no_error';
  const colorClass = (group: string) =>
    mode === 'group_name' ? (group === 'a' ? 0 : 1) : group === 'a' ? 1 : 0;
  const segment = (group: string, count: number) => ({
    group_key: group,
    label: label(group),
    color_class: colorClass(group),
    count,
  });
  return {
    schema_version: 1,
    chart_kind: 'stacked_histogram',
    mode,
    version: 0,
    spec: { group_by: 'k', target: 'v', min_support: 1 },
    groups: [
      { key: 'a', label: 'a', color_class: 0, size: 4 },
      { key: 'b', label: 'b', color_class: 1, size: 5 },
    ],
    anomaly_marks: [],
    bin_edges: [0, 1, 2, 3],
    bins: [
      { lo: 0, hi: 1, segments: [segment('a', 2), segment('b', 1)] },
      { lo: 1, hi: 2, segments: [segment('b', 4)] },
      { lo: 2, hi: 3, segments: [segment('a', 2)] },
    ],
  };
}

describe('renderHistogram', () => {
  it('renders one rect per segment with proportional heights', () => {
    const svg = renderHistogram(payload('group_name'));
    const rects = [...svg.querySelectorAll<SVGRectElement>('rect.segment')];
    expect(rects).toHaveLength(4);
    const heightOf = (group: string, bin: number) =>
      Number(
        rects
          .find((r) => r.dataset.groupKey === group && r.dataset.bin === String(bin))
          ?.getAttribute('height'),
      );
    // counts 2 and 4 -> heights in ratio 1:2
    expect(heightOf('a', 0) * 2).toBeCloseTo(heightOf('b', 1), 6);
    // stacked bin 0 total equals count 3 scaled like bin 1's count 4
    const bin0 = heightOf('a', 0) + heightOf('b', 0);
    expect(bin0 / 3).toBeCloseTo(heightOf('b', 1) / 4, 6);
  });

  it('mode toggle preserves per-bin total heights', () => {
    const byName = renderHistogram(payload('group_name'));
    const byType = renderHistogram(payload('error_type'));
    expect(binHeights(byName)).toEqual(binHeights(byType));
  });

  it('uses different fills across modes', () => {
    const byName = renderHistogram(payload('group_name'));
    const byType = renderHistogram(payload('error_type'));
    const fill = (svg: SVGSVGElement) =>
      svg.querySelector<SVGRectElement>('rect.segment')?.getAttribute('fill');
    expect(fill(byName)).not.toEqual(fill(byType));
  });

  it('reports hover and click events with segment identity', () => {
    const events: string[] = [];
    const svg = renderHistogram(payload('group_name'), {
      onSegmentClick: (e) => events.push(`click:${e.segment.group_key}:${e.binIndex}`),
      onSegmentHover: (e) => events.push(`hover:${e.segment.group_key}`),
      onSegmentLeave: () => events.push('leave'),
    });
    document.body.appendChild(svg as unknown as Node);
    const rect = svg.querySelector<SVGRectElement>('rect.segment')!;
    rect.dispatchEvent(new Event('mouseenter'));
    rect.dispatchEvent(new Event('click'));
    rect.dispatchEvent(new Event('mouseleave'));
    expect(events).toEqual(['hover:a', 'click:a:0', 'leave']);
  });

  it('titles carry label, count and bin range', () => {
    const svg = renderHistogram(payload('group_name'));
    const title = svg.querySelector('rect.segment title')!;
    expect(title.textContent).toContain('a: 2 rows');
  });
});
