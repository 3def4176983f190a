export const SVG_NS = 'http://www.w3.org/2000/svg';

export function svgElement<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number> = {},
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, String(value));
  }
  return el;
}

export interface ChartSize {
  width: number;
  height: number;
  padLeft: number;
  padBottom: number;
  padTop: number;
}

export const DEFAULT_SIZE: ChartSize = {
  width: 420,
  height: 220,
  padLeft: 46,
  padBottom: 24,
  padTop: 8,
};

export function chartRoot(size: ChartSize): SVGSVGElement {
  const svg = svgElement('svg', {
    viewBox: `0 0 ${size.width} ${size.height}`,
    width: size.width,
    height: size.height,
    role: 'img',
  });
  return svg;
}

export function formatTick(value: number): string {
  if (!Number.isFinite(value)) return '';
  const abs = Math.abs(value);
  if (abs >= 1_000_000) return `${(value / 1_000_000).toFixed(1)}M`;
  if (abs >= 10_000) return `${(value / 1000).toFixed(0)}k`;
  if (abs >= 100) return value.toFixed(0);
  return `${Number(value.toPrecision(3))}`;
}

/** Linear scale mapping [d0, d1] onto [r0, r1]; degenerate domains map to
 * the range midpoint. */
export function linearScale(
  d0: number,
  d1: number,
  r0: number,
  r1: number,
): (v: number) => number {
  if (d1 === d0) return () => (r0 + r1) / 2;
  const slope = (r1 - r0) / (d1 - d0);
  return (v: number) => r0 + (v - d0) * slope;
}
