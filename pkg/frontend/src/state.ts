import type { ChartKind, ColorMode, GroupRef, SpecRef } from './types.js';

export interface Selection {
  spec: SpecRef;
  groupKey: string | null;
  /** payload version the selection was made against */
  version: number;
}

/**
 * Client view state. Two invariants enforced here:
 *
 * 1. Version monotonicity: fetches are tagged with an epoch; responses from
 *    an older epoch are discarded, so the UI never mixes payload versions.
 * 2. One in-flight mutation per session: commit/undo/redo are rejected
 *    while another mutation is pending.
 */
export class ViewState {
  sessionId: string | null = null;
  version = 0;
  specs: SpecRef[] = [];
  chartKind: ChartKind = 'stacked_histogram';
  mode: ColorMode = 'group_name';
  selection: Selection | null = null;

  private epoch = 0;
  private mutating = false;

  beginFetch(): number {
    return this.epoch;
  }

  /** True when a response started at `fetchEpoch` is still current. */
  acceptFetch(fetchEpoch: number): boolean {
    return fetchEpoch === this.epoch;
  }

  /** Record a new table version: invalidates in-flight fetches and any
   * selection made against an older payload. */
  advanceVersion(version: number): void {
    if (version !== this.version) {
      this.version = version;
      this.selection = null;
    }
    this.epoch += 1;
  }

  select(spec: SpecRef, groupKey: string | null): void {
    this.selection = { spec, groupKey, version: this.version };
  }

  clearSelection(): void {
    this.selection = null;
  }

  /** Guard for commit/undo/redo; returns false when one is already running. */
  beginMutation(): boolean {
    if (this.mutating) return false;
    this.mutating = true;
    return true;
  }

  endMutation(): void {
    this.mutating = false;
  }

  get mutationInFlight(): boolean {
    return this.mutating;
  }
}
