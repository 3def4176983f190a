import { typeLabel } from '../palette.js';
import type { SummaryResponse } from '../types.js';

/** Recommended-attributes list: per-type frequencies as percentages of the
 * column's cell count, ordered by score (the server sorts). */
export function renderAttributePanel(container: HTMLElement, summary: SummaryResponse): void {
  container.innerHTML = '';
  const heading = document.createElement('h2');
  heading.textContent = 'Attributes to examine';
  container.appendChild(heading);

  if (summary.columns.length === 0) {
    const empty = document.createElement('p');
    empty.className = 'empty-state';
    empty.textContent = 'No anomalies detected.';
    container.appendChild(empty);
    return;
  }

  for (const column of summary.columns) {
    const card = document.createElement('div');
    card.className = 'attribute-card';
    const name = document.createElement('strong');
    name.textContent = column.column;
    const score = document.createElement('span');
    score.className = 'score';
    score.textContent = `${column.score}`;
    const header = document.createElement('div');
    header.className = 'attribute-header';
    header.append(name, score);
    card.appendChild(header);

    for (const [type, frequency] of Object.entries(column.per_type_frequency)) {
      const row = document.createElement('div');
      row.className = 'freq-row';
      row.dataset.type = type;
      const pct = (frequency * 100).toFixed(1).replace(/\.0$/, '');
      row.textContent = `${typeLabel(type)}: ${column.per_type_counts[type]} (${pct}%)`;
      card.appendChild(row);
    }
    container.appendChild(card);
  }
}
