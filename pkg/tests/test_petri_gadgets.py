import pytest

from detectability.fa_detect import check_isd, check_wad
from detectability.petri import (SearchBudget, check_isd_net,
                                 gadget_coverability, gadget_langeq, marking_of,
                                 reachability_lsts)
from detectability.petri.gadgets import SIGMA_G
from detectability.verdict import Result
from helpers import (covers, language_upto, net, random_bounded_net, renamed,
                     subset_product_size, with_dead)


def wad_of(g, desc):
    m = reachability_lsts(g, SearchBudget(50_000))
    r = desc.partition(g, m, {x: marking_of(g, x) for x in m.states})
    return check_wad(m, r).result


# -- coverability ------------------------------------------------------------------

def test_coverability_gadget_shape():
    g = net("fig17")
    h = gadget_coverability(g, {p: 1 for p in g.places})
    assert len(h.places) == len(g.places) + 3
    assert len(h.transitions) == len(g.transitions) + 3
    assert h.labels["gt1"] == h.labels["gt2"] == SIGMA_G
    assert all(h.labels[t] == t for t in g.transitions)
    assert h.as_dict(h.m0)["gp0"] == 1


def test_zero_target_is_always_covered():
    for seed in range(10):
        _, g, _ = random_bounded_net(seed)
        h = gadget_coverability(g, (0,) * len(g.places))
        assert check_isd_net(h).result is Result.FAILS


@pytest.mark.parametrize("seed", range(40))
def test_isd_fails_iff_target_coverable(seed):
    _, g, reach = random_bounded_net(seed, cap=60)
    target = tuple((seed * 7 + i) % 3 for i in range(len(g.places)))
    h = gadget_coverability(g, target)
    expect = Result.FAILS if covers(g, target) else Result.HOLDS
    assert check_isd_net(h).result is expect
    if any(target):  # a zero target lets gt1 fire forever
        assert check_isd(reachability_lsts(h)).result is expect


def test_coverability_errors():
    g = net("fig6")
    with pytest.raises(ValueError):
        gadget_coverability(g, (1,))
    with pytest.raises(ValueError):
        gadget_coverability(g, {"nope": 1})
    h = gadget_coverability(g, (0,) * len(g.places))
    with pytest.raises(ValueError, match="reserved"):
        gadget_coverability(h, (0,) * len(h.places))


# -- language equivalence ------------------------------------------------------------

def _observable(seed):
    _, g, _ = random_bounded_net(seed, cap=40)
    return g


def test_langeq_gadget_shape():
    g1 = _observable(3)
    g2 = renamed(g1, "_b")
    h, desc = gadget_langeq(g1, g2, cells=2)
    assert len(h.places) == len(g1.places) + len(g2.places) + 5
    assert len(h.transitions) == len(g1.transitions) + len(g2.transitions) + 6
    assert [sorted(c) for c in desc.cells] == [["gp0", "gp1_1", "gp2"], ["gp1_2", "gp3"]]
    assert desc.lines()[0] == "cell: gp0 gp1_1 gp2"


@pytest.mark.parametrize("cells,ring", [(2, 2), (3, 2), (4, 2), (5, 3), (6, 4)])
def test_langeq_cell_count(cells, ring):
    g1 = _observable(1)
    h, desc = gadget_langeq(g1, renamed(g1, "_b"), cells=cells)
    assert len(desc.cells) == cells
    assert sum(p.startswith("gp") and "_" not in p and p != "gp0" for p in h.places) == ring


@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("cells", [2, 3, 4])
def test_equal_languages_are_not_wad(seed, cells):
    g1 = _observable(seed)
    h, desc = gadget_langeq(g1, renamed(g1, "_b"), cells=cells)
    assert wad_of(h, desc) is Result.FAILS


def _relabeled_pair(seed):
    g = _observable(seed)
    sigma = set(g.labels.values()) | {"c"}
    g1 = with_dead(renamed(g, "_a"), sigma, "_a")
    g2 = with_dead(renamed(g, "_b", {g.transitions[0]: "c"}), sigma, "_b")
    return g1, g2


def _languages_differ(g1, g2):
    m1, m2 = reachability_lsts(g1), reachability_lsts(g2)
    depth = subset_product_size(m1, m2)
    return language_upto(m1, depth) != language_upto(m2, depth)


def test_relabeled_pairs_cover_both_outcomes():
    outcomes = {_languages_differ(*_relabeled_pair(s)) for s in range(12)}
    assert outcomes == {True, False}


@pytest.mark.parametrize("seed", range(12))
def test_wad_iff_languages_differ(seed):
    g1, g2 = _relabeled_pair(seed)
    h, desc = gadget_langeq(g1, g2)
    expect = Result.HOLDS if _languages_differ(g1, g2) else Result.FAILS
    assert wad_of(h, desc) is expect


def test_langeq_errors():
    g1 = _observable(2)
    with pytest.raises(ValueError, match="disjoint"):
        gadget_langeq(g1, g1)
    eps = renamed(g1, "_e", {g1.transitions[0]: None})
    with pytest.raises(ValueError, match="unobservable"):
        gadget_langeq(g1, eps)
    with pytest.raises(ValueError, match="alphabet"):
        gadget_langeq(g1, renamed(g1, "_b", {t: "zz" for t in g1.transitions}))
    with pytest.raises(ValueError, match="two cells"):
        gadget_langeq(g1, renamed(g1, "_b"), cells=1)
    with pytest.raises(ValueError, match="need l"):
        gadget_langeq(g1, renamed(g1, "_b"), l=7, cells=2)
