import type { ApiClient } from '../api.js';
import { typeLabel } from '../palette.js';
import type {
  AnomalyRecord,
  PreviewResponse,
  RepairActionJson,
} from '../types.js';

export interface RepairCandidate {
  action: RepairActionJson;
  preview: PreviewResponse;
}

export interface RepairEntry {
  record: AnomalyRecord;
  candidates: RepairCandidate[];
}

const MAX_RECORDS = 6;
const MAX_CANDIDATES = 4;

/** Fetch suggestions plus their preview diffs for a group's records. */
export async function loadRepairEntries(
  api: ApiClient,
  sessionId: string,
  records: AnomalyRecord[],
): Promise<RepairEntry[]> {
  const entries: RepairEntry[] = [];
  for (const record of records.slice(0, MAX_RECORDS)) {
    let actions: RepairActionJson[] = [];
    try {
      actions = (await api.suggestions(sessionId, record)).suggestions;
    } catch {
      continue; // e.g. NoSuggestion: skip this record, keep the rest
    }
    const candidates: RepairCandidate[] = [];
    for (const action of actions.slice(0, MAX_CANDIDATES)) {
      const preview = await api.preview(sessionId, action);
      candidates.push({ action, preview });
    }
    entries.push({ record, candidates });
  }
  return entries;
}

export function actionLabel(action: RepairActionJson): string {
  switch (action.type) {
    case 'impute_group_mean':
      return 'Impute with group mean';
    case 'impute_column_mean':
      return 'Impute with column mean';
    case 'remove_rows':
      return `Remove ${action.rows.length} row${action.rows.length === 1 ? '' : 's'}`;
    case 'convert_cells':
      return `Convert ${action.cells.length} cell${action.cells.length === 1 ? '' : 's'} to numbers`;
    case 'merge_groups':
      return `Merge "${action.source_key}" into "${action.dest_key}"`;
    case 'custom':
      return `Custom wrangler ${action.id}`;
  }
}

function impactLine(preview: PreviewResponse): string {
  const parts = [`${preview.cells_changed} cells changed`, `${preview.rows_removed} rows removed`];
  const shifts = preview.mean_shift_per_group.filter((s) => s.shift !== 0);
  if (shifts.length > 0) {
    const worst = shifts.reduce((a, b) => (Math.abs(a.shift) >= Math.abs(b.shift) ? a : b));
    parts.push(`largest mean shift ${worst.shift.toFixed(2)} (${worst.group.key ?? 'missing'})`);
  }
  const before = Object.values(preview.anomalies_before).reduce((a, b) => a + b, 0);
  const after = Object.values(preview.anomalies_after).reduce((a, b) => a + b, 0);
  parts.push(`anomalies ${before} → ${after}`);
  return parts.join(' · ');
}

/** Render the repair kit: each anomaly with its candidate repairs and the
 * previewed impact of each candidate. */
export function renderRepairKit(
  container: HTMLElement,
  title: string,
  entries: RepairEntry[],
  onApply: (action: RepairActionJson) => void,
): void {
  container.innerHTML = '';
  const heading = document.createElement('h2');
  heading.textContent = title;
  container.appendChild(heading);

  if (entries.length === 0) {
    const empty = document.createElement('p');
    empty.className = 'empty-state';
    empty.textContent = 'No repairable anomalies in this selection.';
    container.appendChild(empty);
    return;
  }

  for (const entry of entries) {
    const block = document.createElement('section');
    block.className = 'repair-record';
    const label = document.createElement('h3');
    const cells = entry.record.cells.map((c) => `row ${c.row}`).join(', ');
    label.textContent = `${typeLabel(entry.record.type)}${cells ? ` (${cells})` : ''}`;
    block.appendChild(label);

    for (const candidate of entry.candidates) {
      const row = document.createElement('div');
      row.className = 'repair-candidate';

      const button = document.createElement('button');
      button.type = 'button';
      button.className = 'apply-button';
      button.textContent = actionLabel(candidate.action);
      button.addEventListener('click', () => onApply(candidate.action));

      const impact = document.createElement('span');
      impact.className = 'impact';
      impact.textContent = impactLine(candidate.preview);

      row.append(button, impact);
      block.appendChild(row);
    }
    container.appendChild(block);
  }
}
