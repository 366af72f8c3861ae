from hypothesis import given, settings, strategies as st

from detectability.constructions import (BIFUR, FAIR, bifurcation_automaton,
                                         bifurcation_cycle_states, concurrent_composition,
                                         live_states, observable_cycle_states,
                                         observation_automaton, omega_nonempty, sccs)
from detectability.core import parse_lsts, random_lsts
from detectability.observer_oracle import build_observer
from helpers import lsts, replays

FIG19 = lsts("fig19")


def test_observation_automaton_of_fig19():
    obs = observation_automaton(FIG19)
    assert obs.transitions == {("s0", "obs", "s0"), ("s0", "obs", "s1"),
                               ("s0", "obs", "s2"), ("s1", "obs", "s1")}
    assert obs.labels == {"obs": "o", "eps": None}


def test_bifurcation_automaton_of_fig19():
    b = bifurcation_automaton(FIG19)
    assert b.kinds == {("s0", "s0"): FAIR, ("s0", "s1"): BIFUR,
                       ("s0", "s2"): BIFUR, ("s1", "s1"): FAIR}


def test_concurrent_composition_of_fig19_after_accessible_part():
    cc = concurrent_composition(FIG19, accessible=True)
    assert set(cc.lsts.states) == {"s0__s0", "s1__s1", "s1__s2", "s2__s1", "s2__s2"}
    assert cc.lsts.initial == {"s0__s0"}
    loops = {e for x, e, y in cc.lsts.transitions if x == y == "s0__s0"}
    assert loops == {"t1__t1", "t2__eps", "eps__t2"}
    assert ("s0__s0", "t3__t4", "s1__s2") in cc.lsts.transitions
    assert ("s1__s1", "t5__t5", "s1__s1") in cc.lsts.transitions
    assert len(cc.lsts.transitions) == 8
    assert cc.event_pairs["t2__eps"] == ("t2", None)


def test_full_composition_covers_every_state_pair():
    cc = concurrent_composition(FIG19)
    assert len(cc.lsts.states) == 9
    assert cc.lsts.initial == {"s0__s0"}


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 100_000))
def test_composition_pairs_are_pairs_of_a_common_estimate(seed):
    # x, y are reachable by runs with equal observations iff they share an estimate
    m = random_lsts(seed)
    cc = concurrent_composition(m, accessible=True)
    pairs = {cc.pairs[name] for name in cc.lsts.states}
    expected = {(x, y) for q in build_observer(m).nodes for x in q for y in q}
    assert pairs == expected


def test_composition_runs_project_to_runs():
    for seed in range(100):
        m = random_lsts(seed)
        cc = concurrent_composition(m, accessible=True)
        for s, e, t in cc.lsts.transitions:
            (x, y), (u, v) = cc.pairs[s], cc.pairs[t]
            a, b = cc.event_pairs[e]
            assert (x, a, u) in m.transitions if a else x == u
            assert (y, b, v) in m.transitions if b else y == v
            if a and b:
                assert m.labels[a] == m.labels[b]


def test_sccs_of_fig19():
    comps = sccs(FIG19)
    assert set(comps.components) == {frozenset(["s0"]), frozenset(["s1"]), frozenset(["s2"])}


def test_cycle_and_liveness_sets_of_fig19():
    assert observable_cycle_states(FIG19) == {"s0", "s1"}
    assert live_states(FIG19) == {"s0", "s1"}
    assert bifurcation_cycle_states(bifurcation_automaton(FIG19)) == frozenset()


def test_unobservable_cycles_do_not_count():
    m = parse_lsts("states: a b\ninitial: a\nevent: u .\nevent: e x\n"
                   "trans: a u a\ntrans: a e b\n")
    assert observable_cycle_states(m) == frozenset()
    assert omega_nonempty(m).fails


def test_omega_witness_is_a_lasso():
    for seed in range(200):
        m = random_lsts(seed)
        v = omega_nonempty(m)
        if v.holds:
            w = v.witness
            assert replays(m, w.stem + w.loop)
            assert w.loop[0][0] == w.loop[-1][2]
            assert (w.stem[0][0] if w.stem else w.loop[0][0]) in m.initial
            assert any(m.labels[e] is not None for _, e, _ in w.loop)
