/** Color assignment: engine color-class ids -> CSS colors.
 *
 * Groups use the Okabe-Ito colorblind-safe palette (cycled); anomaly
 * types use fixed hues; class 0 in error mode is the reserved neutral
 * for anomaly-free groups.
 */

const OKABE_ITO = [
  '#0072B2', // blue
  '#E69F00', // orange
  '#009E73', // green
  '#CC79A7', // pink
  '#56B4E9', // sky
  '#D55E00', // vermillion
  '#F0E442', // yellow
  '#999999', // grey
];

const NO_ERROR = '#C9CFD6';

const ERROR_CLASSES: Record<number, string> = {
  0: NO_ERROR, // reserved no-error class
  1: '#D55E00', // missing_value
  2: '#0072B2', // outlier
  3: '#E69F00', // type_mismatch
  4: '#CC79A7', // incomplete_group
};

export function groupColor(colorClass: number): string {
  return OKABE_ITO[colorClass % OKABE_ITO.length]!;
}

export function errorColor(colorClass: number): string {
  if (colorClass in ERROR_CLASSES) return ERROR_CLASSES[colorClass]!;
  // custom anomaly classes start at 5
  return OKABE_ITO[(colorClass - 5 + 2) % OKABE_ITO.length]!;
}

export function segmentColor(mode: 'group_name' | 'error_type', colorClass: number): string {
  return mode === 'group_name' ? groupColor(colorClass) : errorColor(colorClass);
}

export function typeLabel(type: string): string {
  return type.replace('custom:', 'custom ').replace(/_/g, ' ');
}
