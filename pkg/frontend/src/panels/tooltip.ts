import { typeLabel } from '../palette.js';

/** Floating tooltip showing a hovered group's error types. */
export class Tooltip {
  readonly element: HTMLDivElement;

  constructor(parent: HTMLElement) {
    this.element = document.createElement('div');
    this.element.id = 'tooltip';
    this.element.setAttribute('hidden', '');
    parent.appendChild(this.element);
  }

  show(groupLabel: string, perType: Record<string, number> | undefined, anchor?: Element): void {
    const lines = perType && Object.keys(perType).length > 0
      ? Object.entries(perType).map(([type, count]) => `${typeLabel(type)}: ${count}`)
      : ['no anomalies'];
    this.element.innerHTML = '';
    const title = document.createElement('strong');
    title.textContent = groupLabel;
    this.element.appendChild(title);
    for (const line of lines) {
      const row = document.createElement('div');
      row.className = 'tooltip-row';
      row.textContent = line;
      this.element.appendChild(row);
    }
    this.element.removeAttribute('hidden');
    if (anchor && typeof (anchor as HTMLElement).getBoundingClientRect === 'function') {
      const box = anchor.getBoundingClientRect();
      this.element.style.left = `${box.left + box.width / 2}px`;
      this.element.style.top = `${box.top - 8}px`;
    }
  }

  hide(): void {
    this.element.setAttribute('hidden', '');
  }
}
