import { describe, expect, it } from 'vitest';

import { ViewState } from '../src/state.js';

const SPEC = { group_by: 'k', target: 'v', min_support: 1 };

describe('ViewState', () => {
  it('discards fetches that started before a version change', () => {
    const state = new ViewState();
    const epoch = state.beginFetch();
    expect(state.acceptFetch(epoch)).toBe(true);
    state.advanceVersion(1);
    expect(state.acceptFetch(epoch)).toBe(false);
    expect(state.acceptFetch(state.beginFetch())).toBe(true);
  });

  it('clears stale selections on version change', () => {
    const state = new ViewState();
    state.select(SPEC, 'Bhutan');
    expect(state.selection?.groupKey).toBe('Bhutan');
    state.advanceVersion(1);
    expect(state.selection).toBeNull();
  });

  it('keeps the selection when the version is unchanged', () => {
    const state = new ViewState();
    state.advanceVersion(2);
    state.select(SPEC, 'x');
    state.advanceVersion(2); // same version: refresh only
    expect(state.selection?.groupKey).toBe('x');
  });

  it('allows a single in-flight mutation', () => {
    const state = new ViewState();
    expect(state.beginMutation()).toBe(true);
    expect(state.beginMutation()).toBe(false);
    state.endMutation();
    expect(state.beginMutation()).toBe(true);
  });
});
