import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wranglekit import eval_rule, format_rule, parse_rule
from wranglekit.errors import RuleSyntaxError, RuleTypeError
from wranglekit.groups import GroupStats
from wranglekit.rules import And, Cmp, GroupMean, IsMissing, Not, Number, Or, Value


def stats(mean=None, std=None, count=0):
    return GroupStats(count=count, mean=mean, std=std, missing_count=0, mismatch_count=0)


class TestParse:
    def test_simple_comparison(self):
        assert parse_rule("value < 0") == Cmp(Value(), "<", Number(0.0))

    def test_missing_or_above_mean(self):
        assert parse_rule("value is missing or value > group_mean") == Or(
            IsMissing(), Cmp(Value(), ">", GroupMean())
        )

    def test_truncated_input_position(self):
        with pytest.raises(RuleSyntaxError) as err:
            parse_rule("value <")
        assert err.value.position == 7

    def test_precedence(self):
        expr = parse_rule("value < 0 or value > 1 and value is missing")
        assert isinstance(expr, Or)
        assert isinstance(expr.right, And)

    def test_parens_override(self):
        expr = parse_rule("(value < 0 or value > 1) and value is missing")
        assert isinstance(expr, And)
        assert isinstance(expr.left, Or)

    def test_not_binds_tighter_than_and(self):
        expr = parse_rule("not value is missing and value < 5")
        assert expr == And(Not(IsMissing()), Cmp(Value(), "<", Number(5.0)))

    def test_negative_literal(self):
        assert parse_rule("value <= -2.5") == Cmp(Value(), "<=", Number(-2.5))

    def test_all_operators(self):
        for op in ("<", "<=", ">", ">=", "==", "!="):
            assert parse_rule(f"value {op} 1") == Cmp(Value(), op, Number(1.0))

    def test_whitespace_insensitive(self):
        assert parse_rule("value<0") == parse_rule("  value  <  0  ")

    def test_keywords_case_sensitive(self):
        with pytest.raises(RuleSyntaxError):
            parse_rule("VALUE < 0")

    def test_unknown_identifier(self):
        with pytest.raises(RuleSyntaxError):
            parse_rule("price < 0")

    def test_trailing_garbage(self):
        with pytest.raises(RuleSyntaxError):
            parse_rule("value < 0 value")

    def test_unclosed_paren(self):
        with pytest.raises(RuleSyntaxError):
            parse_rule("(value < 0")

    def test_is_missing_requires_value(self):
        with pytest.raises(RuleTypeError):
            parse_rule("group_mean is missing")
        with pytest.raises(RuleTypeError):
            parse_rule("5 is missing")

    def test_is_without_missing(self):
        with pytest.raises(RuleSyntaxError):
            parse_rule("value is small")

    def test_bad_character(self):
        with pytest.raises(RuleSyntaxError) as err:
            parse_rule("value < $")
        assert err.value.position == 8


class TestEval:
    def test_negative_flagged(self):
        rule = parse_rule("value < 0")
        assert eval_rule(rule, -1.0, stats()) is True
        assert eval_rule(rule, 1.0, stats()) is False

    def test_missing_semantics(self):
        assert eval_rule(parse_rule("value < 0"), None, stats()) is False
        assert eval_rule(parse_rule("value is missing"), None, stats()) is True
        assert eval_rule(parse_rule("value is missing"), 3.0, stats()) is False

    def test_text_cell_never_compares(self):
        rule = parse_rule("value < 1e9")
        assert eval_rule(rule, "12k", stats()) is False

    def test_group_mean_comparison(self):
        # group [1,2,3]: only 3 exceeds the mean of 2
        rule = parse_rule("value > group_mean")
        s = stats(mean=2.0, count=3)
        flagged = [cell for cell in (1.0, 2.0, 3.0) if eval_rule(rule, cell, s)]
        assert flagged == [3.0]

    def test_undefined_group_mean_is_false(self):
        rule = parse_rule("value > group_mean")
        assert eval_rule(rule, 5.0, stats(mean=None)) is False

    def test_not_flips_totality(self):
        rule = parse_rule("not value < 0")
        assert eval_rule(rule, None, stats()) is True  # inner comparison is false

    def test_connectives(self):
        s = stats(mean=10.0)
        rule = parse_rule("value < 0 or value > group_mean and not value is missing")
        assert eval_rule(rule, 20.0, s) is True
        assert eval_rule(rule, 5.0, s) is False
        assert eval_rule(rule, -5.0, s) is True


_operand = st.one_of(
    st.builds(Value),
    st.builds(GroupMean),
    st.builds(Number, st.floats(allow_nan=False, allow_infinity=False, width=32)),
)
_atom = st.one_of(
    st.builds(IsMissing),
    st.builds(Cmp, _operand, st.sampled_from(["<", "<=", ">", ">=", "==", "!="]), _operand),
)
_expr = st.recursive(
    _atom,
    lambda children: st.one_of(
        st.builds(Not, children),
        st.builds(And, children, children),
        st.builds(Or, children, children),
    ),
    max_leaves=12,
)


@settings(max_examples=250, deadline=None)
@given(_expr)
def test_format_parse_round_trip(expr):
    assert parse_rule(format_rule(expr)) == expr


@settings(max_examples=150, deadline=None)
@given(_expr, st.one_of(st.none(), st.floats(allow_nan=False, allow_infinity=False), st.text(max_size=5)),
       st.one_of(st.none(), st.floats(allow_nan=False, allow_infinity=False)))
def test_eval_is_total(expr, cell, mean):
    assert eval_rule(expr, cell, stats(mean=mean)) in (True, False)


def test_canonical_form_examples():
    assert format_rule(parse_rule("value<0")) == "value < 0"
    assert format_rule(parse_rule("(value < 0) or (value > 1)")) == "value < 0 or value > 1"
    assert format_rule(parse_rule("not (value < 0 or value is missing)")) == (
        "not (value < 0 or value is missing)"
    )
