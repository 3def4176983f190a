"""wranglekit: subgroup-aware data wrangling engine.

Load a CSV, enumerate categorical-by-numeric subgroups, detect anomalies
(missing values, sigma-band outliers, type mismatches, under-populated
groups, custom rules), suggest and apply repairs with exact undo/redo, and
export a standalone script reproducing the applied pipeline.
"""

__version__ = "0.1.0"

from .anomalies import (
    INCOMPLETE_GROUP,
    MISSING_VALUE,
    OUTLIER,
    TYPE_MISMATCH,
    AnomalyIndex,
    AnomalyRecord,
    AnomalyType,
    DetectorConfig,
    custom_type,
    detect_incomplete,
    detect_missing,
    detect_outliers,
    detect_type_mismatch,
    pooled_column_stats,
    run_detectors,
)
from .codegen import ScriptArtifact, generate_script
from .groups import (
    Group,
    GroupSpec,
    GroupStats,
    enumerate_all_specs,
    enumerate_groups,
    enumerate_groups_full,
    group_stats,
)
from .insight import (
    AttributeSummary,
    RankedGroup,
    attribute_summary,
    chart_payload,
    rank_groups,
)
from .repairs import (
    ActionDiff,
    ActionResult,
    CellRestores,
    ConvertCells,
    CustomAction,
    ImputeColumnMean,
    ImputeGroupMean,
    MergeGroups,
    RemoveRows,
    RepairAction,
    RowReinserts,
    WranglerRegistry,
    apply_action,
    apply_inverse,
    convert_numeric_string,
    key_similarity,
    suggest_merge_target,
    suggest_repairs,
)
from .rules import eval_rule, format_rule, parse_rule
from .session import (
    ActionEntry,
    PreviewDiff,
    Session,
    commit,
    counts_by_type,
    create_session,
    preview,
    redo,
    replay_session,
    undo,
)
from .table import (
    DEFAULT_NULL_TOKENS,
    CellRef,
    CellValue,
    Column,
    ColumnKind,
    LoadOptions,
    Table,
    format_number,
    infer_kinds,
    load_csv,
    parse_numeric_cell,
    serialize_csv,
    table_equals,
)

__all__ = [name for name in dir() if not name.startswith("_")]
