"""Exception hierarchy shared by the engine, the service, and the CLI.

Every error carries a stable machine ``code`` so the HTTP layer can map
engine failures to API error payloads without string matching.
"""

from __future__ import annotations


class WrangleError(Exception):
    """Base class for all engine errors."""

    code = "ENGINE_ERROR"


class MalformedCsv(WrangleError):
    code = "MALFORMED_CSV"

    def __init__(self, row: int, reason: str):
        super().__init__(f"row {row}: {reason}")
        self.row = row
        self.reason = reason


class EmptyInput(WrangleError):
    code = "EMPTY_INPUT"


class ColumnNotFound(WrangleError):
    code = "COLUMN_NOT_FOUND"

    def __init__(self, column: str):
        super().__init__(f"no such column: {column!r}")
        self.column = column


class KindMismatch(WrangleError):
    code = "KIND_MISMATCH"


class NoCategoricalColumns(WrangleError):
    code = "NO_CATEGORICAL_COLUMNS"


class NoNumericColumns(WrangleError):
    code = "NO_NUMERIC_COLUMNS"


class StaleGroup(WrangleError):
    code = "STALE_GROUP"


class StaleAction(WrangleError):
    code = "STALE_ACTION"


class StaleRecord(WrangleError):
    code = "STALE_RECORD"


class NothingToUndo(WrangleError):
    code = "NOTHING_TO_UNDO"


class NothingToRedo(WrangleError):
    code = "NOTHING_TO_REDO"


class EmptyMeanBasis(WrangleError):
    code = "EMPTY_MEAN_BASIS"


class NotConvertible(WrangleError):
    code = "NOT_CONVERTIBLE"

    def __init__(self, row: int, column: str, text: str):
        super().__init__(f"cell ({row}, {column!r}): {text!r} is not convertible")
        self.row = row
        self.column = column
        self.text = text


class NoSuggestion(WrangleError):
    code = "NO_SUGGESTION"


class UnsupportedKind(WrangleError):
    code = "UNSUPPORTED_KIND"


class UnsupportedAction(WrangleError):
    code = "UNSUPPORTED_ACTION"


class RuleSyntaxError(WrangleError):
    """Raised when rule source text does not match the rule grammar."""

    code = "RULE_SYNTAX"

    def __init__(self, position: int, expected: set[str], found: str = ""):
        shown = ", ".join(sorted(expected))
        super().__init__(f"at offset {position}: expected {shown}" + (f", found {found!r}" if found else ""))
        self.position = position
        self.expected = frozenset(expected)
        self.found = found


class RuleTypeError(WrangleError):
    code = "RULE_TYPE"


class RecipeSchemaError(WrangleError):
    code = "RECIPE_SCHEMA"
