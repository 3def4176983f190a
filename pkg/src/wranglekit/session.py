"""Mutable wrangling sessions: commit/undo/redo over immutable table versions.

A session owns the current table version, the applied-action stack and the
redo stack, and keeps its anomaly state refreshed after every mutation.
History is linear: a fresh commit clears the redo stack.
"""

from __future__ import annotations

import hashlib
import time
import uuid
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .anomalies import (
    AnomalyIndex,
    AnomalyRecord,
    AnomalyType,
    DetectorConfig,
    run_detectors,
)
from .errors import NothingToRedo, NothingToUndo
from .groups import Group, GroupSpec, enumerate_groups
from .repairs import (
    ActionDiff,
    InverseRecord,
    RepairAction,
    WranglerRegistry,
    apply_action,
    apply_inverse,
)
from .table import LoadOptions, Table, serialize_csv


@dataclass
class ActionEntry:
    action: RepairAction
    inverse: InverseRecord
    diff: ActionDiff
    pre_version: int
    post_version: int
    timestamp: float


@dataclass
class PreviewDiff:
    cells_changed: int
    rows_removed: int
    affected_groups: list
    mean_shift_per_group: dict
    anomalies_before: dict  # AnomalyType -> record count
    anomalies_after: dict


def counts_by_type(records: Sequence[AnomalyRecord]) -> dict[AnomalyType, int]:
    counts: dict[AnomalyType, int] = {}
    for record in records:
        counts[record.type] = counts.get(record.type, 0) + 1
    return counts


class Session:
    """One interactive wrangling run over a single dataset."""

    def __init__(
        self,
        table: Table,
        config: DetectorConfig,
        specs: Sequence[GroupSpec],
        session_id: Optional[str] = None,
        registry: Optional[WranglerRegistry] = None,
        extra_detectors: Optional[Mapping] = None,
        load_options: LoadOptions = LoadOptions(),
    ):
        self.id = session_id or uuid.uuid4().hex
        self.original = table
        self.table = table
        self.config = config
        self.specs = list(specs)
        self.registry = registry or WranglerRegistry()
        self.extra_detectors = dict(extra_detectors or {})
        self.load_options = load_options
        self.undo_stack: list[ActionEntry] = []
        self.redo_stack: list[ActionEntry] = []
        self.groups: list[Group] = []
        self.records: list[AnomalyRecord] = []
        self.index: AnomalyIndex = AnomalyIndex()
        self._refresh()

    @property
    def anomalies(self) -> tuple[list[AnomalyRecord], AnomalyIndex]:
        return self.records, self.index

    def _refresh(self) -> None:
        self.groups = [g for spec in self.specs for g in enumerate_groups(self.table, spec)]
        self.records, self.index = run_detectors(
            self.table, self.specs, self.config, self.extra_detectors
        )

    def commit(self, action: RepairAction) -> "Session":
        result = apply_action(self.table, action, self.groups, self.registry)
        entry = ActionEntry(
            action=action,
            inverse=result.inverse,
            diff=result.diff,
            pre_version=self.table.version,
            post_version=result.new_table.version,
            timestamp=time.time(),
        )
        self.table = result.new_table
        self.undo_stack.append(entry)
        self.redo_stack.clear()
        self._refresh()
        return self

    def undo(self) -> "Session":
        if not self.undo_stack:
            raise NothingToUndo("no committed actions to undo")
        entry = self.undo_stack.pop()
        self.table = apply_inverse(self.table, entry.inverse, entry.pre_version)
        self.redo_stack.append(entry)
        self._refresh()
        return self

    def redo(self) -> "Session":
        if not self.redo_stack:
            raise NothingToRedo("nothing to redo")
        entry = self.redo_stack.pop()
        result = apply_action(self.table, entry.action, self.groups, self.registry)
        self.table = result.new_table
        self.undo_stack.append(entry)
        self._refresh()
        return self

    def preview(self, action: RepairAction) -> PreviewDiff:
        result = apply_action(self.table, action, self.groups, self.registry)
        records_after, _ = run_detectors(
            result.new_table, self.specs, self.config, self.extra_detectors
        )
        return PreviewDiff(
            cells_changed=result.diff.cells_changed,
            rows_removed=result.diff.rows_removed,
            affected_groups=result.diff.affected_groups,
            mean_shift_per_group=result.diff.mean_shift_per_group,
            anomalies_before=counts_by_type(self.records),
            anomalies_after=counts_by_type(records_after),
        )

    def fingerprint(self) -> str:
        return hashlib.sha256(serialize_csv(self.original, self.load_options).encode()).hexdigest()

    def export(self) -> dict:
        """Replayable session state: dataset hash, config, specs, actions."""
        from .schemas import action_to_json, spec_to_json

        return {
            "schema_version": 1,
            "dataset_name": self.original.name,
            "dataset_sha256": self.fingerprint(),
            "config": self.config.to_json(),
            "specs": [spec_to_json(s) for s in self.specs],
            "actions": [action_to_json(e.action) for e in self.undo_stack],
        }


def create_session(
    table: Table,
    config: DetectorConfig = DetectorConfig(),
    specs: Sequence[GroupSpec] = (),
    **kwargs,
) -> Session:
    return Session(table, config, specs, **kwargs)


def commit(session: Session, action: RepairAction) -> Session:
    return session.commit(action)


def undo(session: Session) -> Session:
    return session.undo()


def redo(session: Session) -> Session:
    return session.redo()


def preview(session: Session, action: RepairAction) -> PreviewDiff:
    return session.preview(action)


def replay_session(table: Table, export: dict, **kwargs) -> Session:
    """Rebuild a session from an export produced by :meth:`Session.export`."""
    from .schemas import action_from_json, spec_from_json

    config = DetectorConfig.from_json(export.get("config", {}))
    specs = [spec_from_json(s) for s in export.get("specs", [])]
    session = Session(table, config, specs, **kwargs)
    expected = export.get("dataset_sha256")
    if expected and expected != session.fingerprint():
        raise ValueError("dataset fingerprint does not match the export")
    for payload in export.get("actions", []):
        session.commit(action_from_json(payload))
    return session
