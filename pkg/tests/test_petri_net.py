import random

import pytest

from detectability.core import ParseError
from detectability.petri import (BoundExceeded, LabeledPetriNet, SearchBudget, enabled, fire,
                                 marking_name, marking_of, parse_net, reachability_lsts,
                                 serialize_net)
from helpers import net, random_net

NETS = ("fig1", "fig5", "fig6", "fig8", "fig9", "fig10", "fig15", "fig17")


def test_fig6_document():
    g = net("fig6")
    assert g.places == ("p1", "p2") and g.transitions == ("a", "b")
    assert len(g.pre) + len(g.post) == 4
    assert g.labels == {"a": None, "b": "b"}


def test_fig6_token_game():
    g = net("fig6")
    assert enabled(g, (1, 0)) == ["a"]
    assert fire(g, (1, 0), "a") == (0, 1)


def test_fig15_token_game():
    g = net("fig15")
    assert set(enabled(g, (0, 1))) == {"b", "c"}
    assert fire(g, (0, 1), "c") == (0, 0)


def test_firing_a_disabled_transition_fails():
    with pytest.raises(ValueError, match="not enabled"):
        fire(net("fig6"), (1, 0), "b")


def test_transition_without_inputs_is_always_enabled():
    g = parse_net("places: p\ntransition: gen x\narc: gen -> p 2\n")
    assert enabled(g, (0,)) == ["gen"]
    assert fire(g, (5,), "gen") == (7,)


def test_zero_weight_arc_is_absent():
    g = parse_net("places: p\nmarking: p=1\ntransition: t x\narc: p -> t 0\n")
    assert g.pre == {}
    assert "arc" not in serialize_net(g)


@pytest.mark.parametrize("name", NETS)
def test_round_trip(name):
    g = net(name)
    assert parse_net(serialize_net(g)) == g


@pytest.mark.parametrize("text, line", [
    ("places: p\ntransition: t\n", 2),
    ("places: p\nmarking: q=1\n", 2),
    ("places: p\ntransition: t x\narc: p -> q\n", 3),
    ("places: p\ntransition: t x\narc: p => t\n", 3),
    ("places: p\ntransition: t x\narc: p -> t -1\n", 3),
    ("places: p p\n", 1),
    ("places: p\nmarking: p=x\n", 2),
    ("places: p\ntransition: t x\ntransition: t y\n", 3),
    ("places: p\ntransition: t x\narc: p -> t\narc: p -> t 2\n", 4),
    ("places: p\nfoo: bar\n", 2),
])
def test_parse_errors(text, line):
    with pytest.raises(ParseError) as exc:
        parse_net(text)
    assert exc.value.lineno == line


def test_structural_errors():
    with pytest.raises(ParseError):
        parse_net("places: t\ntransition: t x\n")
    with pytest.raises(ParseError):
        parse_net("")
    with pytest.raises(ValueError):
        LabeledPetriNet(("p",), ("t",), {("p", "t"): 1}, {}, {"p": -1}, {"t": "a"})


def test_token_equation_on_random_firings():
    rng = random.Random(7)
    fired = seed = 0
    while fired < 10_000:
        g = random_net(seed, places=4, transitions=5, eps=True)
        seed += 1
        m = g.m0
        for _ in range(100):
            ts = enabled(g, m)
            if not ts:
                break
            t = rng.choice(ts)
            m2 = fire(g, m, t)
            for p, a, b in zip(g.places, m, m2):
                assert b == a + g.post.get((p, t), 0) - g.pre.get((p, t), 0)
                assert b >= 0
            m = m2
            fired += 1


def test_marking_names_round_trip():
    g = net("fig17")
    m = (0, 0, 1, 3, 0)
    assert marking_name(g, m) == "(p1=0,p2=0,p3=1,p4=3,p5=0)"
    assert marking_of(g, marking_name(g, m)) == m
    with pytest.raises(ValueError):
        marking_of(g, "(p2=0,p1=0,p3=1,p4=3,p5=0)")


def test_unfolding_of_fig15():
    m = reachability_lsts(net("fig15"), SearchBudget())
    assert set(m.states) == {"(p1=1,p2=0)", "(p1=0,p2=1)", "(p1=0,p2=0)"}
    assert m.initial == {"(p1=1,p2=0)"}
    assert m.transitions == {("(p1=1,p2=0)", "a", "(p1=0,p2=1)"),
                             ("(p1=0,p2=1)", "b", "(p1=1,p2=0)"),
                             ("(p1=0,p2=1)", "c", "(p1=0,p2=0)")}
    assert m.labels == {"a": "a", "b": "b", "c": "b"}


def test_unfolding_of_fig10_has_five_markings():
    assert len(reachability_lsts(net("fig10")).states) == 5


def test_unbounded_unfolding_raises_with_frontier():
    with pytest.raises(BoundExceeded) as exc:
        reachability_lsts(net("fig17"), SearchBudget(max_markings=50))
    assert exc.value.frontier > 0 and exc.value.explored == 50
    with pytest.raises(BoundExceeded):
        reachability_lsts(net("fig17"), SearchBudget(max_depth=20))


def test_budget_must_be_positive():
    with pytest.raises(ValueError):
        SearchBudget(0, 5)
