"""Reduction gadgets: coverability to instant strong detectability, and
language equivalence to weak approximate detectability."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from ..core import Lsts
from ..fa_detect import Partition
from .net import LabeledPetriNet, Marking

SIGMA_G = "sigmaG"


def _fresh(used, names) -> None:
    clash = set(names) & set(used)
    if clash:
        raise ValueError(f"id {sorted(clash)[0]!r} is reserved by the gadget")


def gadget_coverability(n: LabeledPetriNet, target) -> LabeledPetriNet:
    """Relabel every transition by its own id, add a ``gt0`` self-loop on a
    marked place ``gp0``, and two ``sigmaG`` transitions ``gt1``/``gt2``
    that each consume ``target`` and mark ``gp1``/``gp2``.

    Two runs separate on ``gt1`` versus ``gt2`` exactly when ``target`` is
    coverable, so the result is instantly strongly detectable iff it is not.
    """
    if isinstance(target, Mapping):
        target = n.marking(target)
    if len(target) != len(n.places) or any(k < 0 for k in target):
        raise ValueError("target marking must give a natural number per place")
    places = ("gp0", "gp1", "gp2")
    trans = ("gt0", "gt1", "gt2")
    _fresh(n.places + n.transitions, places + trans)
    _fresh(n.transitions, (SIGMA_G,))
    pre = dict(n.pre)
    post = dict(n.post)
    pre[("gp0", "gt0")] = 1
    post[("gp0", "gt0")] = 1
    post[("gp1", "gt1")] = 1
    post[("gp2", "gt2")] = 1
    for p, k in zip(n.places, target):
        if k:
            pre[(p, "gt1")] = k
            pre[(p, "gt2")] = k
    labels = {t: t for t in n.transitions}
    labels.update(gt0="gt0", gt1=SIGMA_G, gt2=SIGMA_G)
    initial = dict(n.initial)
    initial["gp0"] = 1
    return LabeledPetriNet(n.places + places, n.transitions + trans, pre, post, initial, labels)


@dataclass(frozen=True)
class PartitionDescriptor:
    """Cells given by which gadget place holds the single gadget token."""

    cells: tuple  # tuple of frozensets of place ids

    def cell_index(self, net: LabeledPetriNet, m: Marking) -> int:
        d = net.as_dict(m)
        hits = [k for k, c in enumerate(self.cells) if any(d.get(p, 0) for p in c)]
        if len(hits) != 1:
            raise ValueError("marking does not determine a unique cell")
        return hits[0]

    def partition(self, net: LabeledPetriNet, unfolding: Lsts, markings: Mapping) -> Partition:
        """Partition of ``unfolding``'s states; ``markings`` maps state id to marking.
        Empty cells are dropped."""
        groups = [[] for _ in self.cells]
        for x in unfolding.states:
            groups[self.cell_index(net, markings[x])].append(x)
        return Partition(tuple(frozenset(g) for g in groups if g))

    def lines(self) -> list:
        return ["cell: " + " ".join(sorted(c)) for c in self.cells]


def gadget_langeq(g1: LabeledPetriNet, g2: LabeledPetriNet, l: int = 3, cells: int | None = None):
    """Run either ``g1`` or ``g2`` after a common ``sigmaG`` step, then leave
    it by another ``sigmaG`` step into a ring ``gp2 -> ... -> gpl -> gp2``
    (``g1`` enters the ring at ``gp2``, ``g2`` at ``gpl``).

    ``cells`` selects the partition: 2 and 3 use ``l = 3``; more cells use
    ``l = cells - 1``.  The result is weakly approximately detectable with
    respect to the partition iff the two languages differ.
    """
    if cells is None:
        cells = l + 1
    if cells < 2:
        raise ValueError("at least two cells are needed")
    need = 3 if cells in (2, 3) else cells - 1
    if l != need:
        if l != 3:
            raise ValueError(f"{cells} cells need l = {need}")
        l = need
    for g in (g1, g2):
        if any(lab is None for lab in g.labels.values()):
            raise ValueError("gadget inputs must be free of unobservable transitions")
    if set(g1.labels.values()) != set(g2.labels.values()):
        raise ValueError("gadget inputs must share their alphabet")
    if set(g1.places + g1.transitions) & set(g2.places + g2.transitions):
        raise ValueError("gadget inputs must have disjoint ids")
    ring = [f"gp{i}" for i in range(2, l + 1)]
    places = ("gp0", "gp1_1", "gp1_2", *ring)
    trans = ("gt0_1", "gt0_2", "gt1_1", "gt1_2", *(f"gt{i}" for i in range(2, l + 1)))
    _fresh(g1.places + g1.transitions + g2.places + g2.transitions, places + trans)
    _fresh(set(g1.labels.values()), (SIGMA_G,))
    pre = {**g1.pre, **g2.pre}
    post = {**g1.post, **g2.post}

    def arc(a, b):
        if a in places:
            pre[(a, b)] = 1
        else:
            post[(b, a)] = 1
    for a, b in [("gp0", "gt0_1"), ("gt0_1", "gp1_1"), ("gp1_1", "gt1_1"), ("gt1_1", "gp2"),
                 ("gp0", "gt0_2"), ("gt0_2", "gp1_2"), ("gp1_2", "gt1_2"),
                 ("gt1_2", f"gp{l}")]:
        arc(a, b)
    for i in range(2, l + 1):
        arc(f"gp{i}", f"gt{i}")
        arc(f"gt{i}", f"gp{i + 1}" if i < l else "gp2")
    for side, g in (("gp1_1", g1), ("gp1_2", g2)):
        for t in g.transitions:
            pre[(side, t)] = 1
            post[(side, t)] = 1
    labels = {**g1.labels, **g2.labels}
    labels.update({t: SIGMA_G for t in trans})
    initial = {**g1.initial, **g2.initial, "gp0": 1}
    net = LabeledPetriNet(g1.places + g2.places + places, g1.transitions + g2.transitions + trans,
                          pre, post, initial, labels)
    if cells == 2:
        desc = [{"gp0", "gp1_1", "gp2"}, {"gp1_2", "gp3"}]
    elif cells == 3:
        desc = [{"gp0", "gp1_1"}, {"gp2"}, {"gp1_2", "gp3"}]
    else:
        desc = [{"gp0", "gp1_1"}] + [{p} for p in ring] + [{"gp1_2"}]
    return net, PartitionDescriptor(tuple(frozenset(c) for c in desc))
