import type { ScriptResponse } from '../types.js';

/** Script export view: source text plus a download link. */
export function renderExportView(container: HTMLElement, script: ScriptResponse): void {
  container.innerHTML = '';
  const heading = document.createElement('h2');
  heading.textContent = `Pipeline script (${script.action_count} steps)`;
  container.appendChild(heading);

  if (!script.verifiable) {
    const warn = document.createElement('p');
    warn.className = 'warning';
    warn.textContent = `Not verifiable: ${script.warnings.join('; ')}`;
    container.appendChild(warn);
  }

  const link = document.createElement('a');
  link.className = 'download-link';
  link.textContent = 'Download pipeline.py';
  link.download = 'pipeline.py';
  // data: URL keeps this working without URL.createObjectURL (absent in jsdom)
  link.href = `data:text/x-python;charset=utf-8,${encodeURIComponent(script.source_text)}`;
  container.appendChild(link);

  const pre = document.createElement('pre');
  pre.className = 'script-source';
  pre.textContent = script.source_text;
  container.appendChild(pre);
}
