import pytest
from hypothesis import given, settings, strategies as st

from detectability.core import (Lsts, ParseError, accessible_part, directly_observed,
                                eps_closure, estimate, is_deterministic, parse_lsts,
                                random_lsts, serialize_lsts)
from helpers import lsts

FIG19 = lsts("fig19")


def test_parse_fig19():
    assert FIG19.states == ("s0", "s1", "s2")
    assert FIG19.initial == {"s0"}
    assert FIG19.labels["t2"] is None
    assert ("s0", "t3", "s1") in FIG19.transitions


def test_serialize_round_trip_on_fixtures():
    for name in ("fig1", "fig3", "fig5", "fig8", "fig9", "fig10", "fig19"):
        m = lsts(name)
        assert parse_lsts(serialize_lsts(m)) == m


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10_000))
def test_serialize_round_trip_random(seed):
    m = random_lsts(seed)
    assert parse_lsts(serialize_lsts(m)) == m


@pytest.mark.parametrize("text, line", [
    ("states: a\ninitial: a\nevent: f x\ntrans: a e a\n", 4),
    ("states: a\ninitial: b\nevent: f x\n", 2),
    ("states: a a\ninitial: a\n", 1),
    ("states: a\ninitial: a\nevent: e\n", 3),
    ("states: a\nbogus: a\n", 2),
    ("states: a\n  no colon here\n", 2),
])

def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as exc:
        parse_lsts(text)
    assert exc.value.lineno == line


def test_missing_event_section_is_rejected():
    with pytest.raises(ParseError):
        parse_lsts("states: a\ninitial: a\n")


def test_comments_and_blank_lines_are_ignored():
    m = parse_lsts("# system\nstates: a b\n\ninitial: a   # start\nevent: e x\ntrans: a e b\n")
    assert m.transitions == {("a", "e", "b")}


def test_estimates_follow_epsilon_closure():
    m = parse_lsts("states: a b c\ninitial: a\nevent: u .\nevent: e x\n"
                   "trans: a u b\ntrans: b e c\n")
    assert estimate(m, ()) == {"a", "b"}
    assert estimate(m, ("x",)) == {"c"}
    assert estimate(m, ("x", "x")) == frozenset()
    assert eps_closure(m, ["a"]) == {"a", "b"}


def test_estimates_on_fig19():
    assert estimate(FIG19, ("b",)) == {"s1", "s2"}
    assert estimate(FIG19, ("b", "b")) == {"s1"}
    assert estimate(FIG19, ("a", "a")) == {"s0"}


def test_accessible_part_drops_unreachable_states():
    m = parse_lsts("states: a b c\ninitial: a\nevent: e x\ntrans: a e b\ntrans: c e a\n")
    assert accessible_part(m).states == ("a", "b")


def test_random_lsts_is_reproducible_and_bounded():
    for seed in range(50):
        m = random_lsts(seed)
        assert m == random_lsts(seed)
        assert 1 <= len(m.states) <= 6 and len(m.events) <= 6
        assert len(set(a for a in m.labels.values() if a)) <= 3


def test_random_lsts_modes():
    for seed in range(50):
        m = random_lsts(seed, deterministic=True, direct=True, max_initial=1)
        assert is_deterministic(m) and directly_observed(m) and len(m.initial) == 1
        big = random_lsts(seed, 20, 5, exact=True, max_transitions=30)
        assert len(big.states) == 20 and len(big.events) == 5


def test_lsts_validation():
    with pytest.raises(ValueError):
        Lsts(("a",), ("e",), {"e": "x"}, frozenset())
    with pytest.raises(ValueError):
        Lsts(("a",), ("e",), {"e": "x"}, frozenset(["a"]), frozenset([("a", "e", "b")]))
