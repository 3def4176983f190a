/** Wire types for the wranglekit HTTP API (see wranglekit/schemas.py). */

export interface ColumnSchema {
  name: string;
  kind: 'numeric' | 'categorical';
}

export interface DatasetResponse {
  dataset_id: string;
  schema: ColumnSchema[];
  row_count: number;
}

export interface GroupRef {
  group_by: string;
  target: string;
  min_support?: number;
  key: string | null;
}

export interface SpecRef {
  group_by: string;
  target: string;
  min_support: number;
}

export interface RankedGroup {
  group: GroupRef;
  total_anomalies: number;
  per_type: Record<string, number>;
  dominant_type: string;
}

export interface SessionResponse {
  session_id: string;
  version: number;
  row_count: number;
  ranked: RankedGroup[];
  total_records: number;
}

export interface CellRef {
  row: number;
  column: string;
}

export interface AnomalyRecord {
  type: string;
  group: GroupRef;
  cells: CellRef[];
  detail: Record<string, number>;
  version: number;
}

export interface AnomaliesResponse {
  version: number;
  ranked: RankedGroup[];
  records: AnomalyRecord[];
}

export interface AttributeSummary {
  column: string;
  per_type_counts: Record<string, number>;
  per_type_frequency: Record<string, number>;
  score: number;
}

export interface SummaryResponse {
  version: number;
  columns: AttributeSummary[];
}

export interface Segment {
  group_key: string | null;
  label: string;
  color_class: number;
  count: number;
}

export interface HistogramBin {
  lo: number;
  hi: number;
  segments: Segment[];
}

export interface ChartGroup {
  key: string | null;
  label: string;
  color_class: number;
  size: number;
}

export interface AnomalyMark {
  row: number;
  column: string;
  type: string;
}

export interface ScatterPoint {
  row: number;
  value: number;
  group_key: string | null;
  label: string;
  color_class: number;
  anomalies: string[];
}

export interface LineSeries {
  group_key: string | null;
  label: string;
  color_class: number;
  points: { row: number; value: number }[];
}

export interface HeatmapCell {
  group_key: string | null;
  bin: number;
  count: number;
  color_class: number;
}

export type ChartKind = 'stacked_histogram' | 'scatter' | 'line' | 'heatmap';
export type ColorMode = 'group_name' | 'error_type';

export interface ChartPayload {
  schema_version: number;
  chart_kind: ChartKind;
  mode: ColorMode;
  version: number;
  spec: SpecRef;
  groups: ChartGroup[];
  anomaly_marks: AnomalyMark[];
  bin_edges?: number[];
  bins?: HistogramBin[];
  points?: ScatterPoint[];
  series?: LineSeries[];
  cells?: HeatmapCell[];
}

export type RepairActionJson =
  | { type: 'impute_group_mean'; cells: CellRef[]; group: GroupRef }
  | { type: 'impute_column_mean'; cells: CellRef[] }
  | { type: 'remove_rows'; rows: number[] }
  | { type: 'convert_cells'; cells: CellRef[] }
  | { type: 'merge_groups'; column: string; source_key: string; dest_key: string }
  | { type: 'custom'; id: string; cells: CellRef[]; params?: Record<string, unknown> };

export interface MeanShift {
  group: GroupRef;
  shift: number;
}

export interface PreviewResponse {
  cells_changed: number;
  rows_removed: number;
  affected_groups: GroupRef[];
  mean_shift_per_group: MeanShift[];
  anomalies_before: Record<string, number>;
  anomalies_after: Record<string, number>;
}

export interface ActionResponse {
  version: number;
  anomalies_before: Record<string, number>;
  anomalies_after: Record<string, number>;
}

export interface SuggestionsResponse {
  version: number;
  suggestions: RepairActionJson[];
}

export interface ScriptResponse {
  source_text: string;
  language_tag: string;
  input_ref: string;
  action_count: number;
  verifiable: boolean;
  warnings: string[];
}
