"""Budgeted searches for repetitive firing sequences and the net-level checks.

A repetitive sequence is ``M0 [s1> M1 [s2> M2`` with ``M1 <= M2``: ``s2``
can then be fired forever from ``M2``.  The search is breadth first.  Every
edge ``u -t-> v`` is tested against all ancestors ``a`` of ``u`` on the BFS
tree, ``v`` included even when it was seen before, which finds every
repetition whose loop closes on the tree path.  Once exploration closes,
the net is bounded and the remaining repetitions are cycles of the explored
graph, found with strongly connected components.  Hence every ``fails``
found by search is sound, and ``holds`` is only reported after closing.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .._graph import Digraph
from ..core import Lsts
from ..fa_detect import check_esd, check_isd
from ..verdict import Witness, fails, holds, unknown
from .compose import Composition, compose
from .net import (BoundExceeded, LabeledPetriNet, Marking, SearchBudget, enabled, fire,
                  marking_name, reachability_lsts, replay)


@dataclass
class Exploration:
    net: LabeledPetriNet
    nodes: list
    index: dict
    parent: list
    via: list
    depth: list
    edges: list = field(default_factory=list)  # (u, t, v) between stored nodes
    closed: bool = True
    frontier: int = 0

    def path(self, k: int) -> list:
        out = [k]
        while self.parent[out[-1]] >= 0:
            out.append(self.parent[out[-1]])
        return out[::-1]

    def transitions_to(self, k: int) -> list:
        return [self.via[j] for j in self.path(k)[1:]]


@dataclass(frozen=True)
class Repetition:
    """``start [stem> M1 [loop> M2`` with ``M1 <= M2``."""

    net: LabeledPetriNet
    start: Marking
    stem: tuple
    loop: tuple

    def markings(self) -> list:
        return replay(self.net, self.start, self.stem + self.loop)

    def witness(self) -> Witness:
        return run_witness(self.net, self.start, self.stem, self.loop)


def run_witness(g: LabeledPetriNet, start: Marking, stem, loop=()) -> Witness:
    ms = replay(g, start, tuple(stem) + tuple(loop))
    steps = [(marking_name(g, a), t, marking_name(g, b))
             for a, t, b in zip(ms, tuple(stem) + tuple(loop), ms[1:])]
    return Witness(stem=tuple(steps[:len(stem)]), loop=tuple(steps[len(stem):]))


def _leq(a: Marking, b: Marking) -> bool:
    return all(x <= y for x, y in zip(a, b))


def explore(g: LabeledPetriNet, start: Marking, budget: SearchBudget, on_edge=None) -> tuple:
    """Breadth-first exploration; ``on_edge(expl, u, t, marking)`` may stop it
    by returning a value, which is then returned alongside the exploration."""
    expl = Exploration(g, [start], {start: 0}, [-1], [None], [0])
    queue = deque([0])
    while queue:
        u = queue.popleft()
        m = expl.nodes[u]
        for t in enabled(g, m):
            m2 = fire(g, m, t)
            if on_edge is not None:
                found = on_edge(expl, u, t, m2)
                if found is not None:
                    expl.closed = False
                    expl.frontier = len(queue)
                    return found, expl
            v = expl.index.get(m2)
            if v is None:
                if len(expl.nodes) >= budget.max_markings or expl.depth[u] + 1 > budget.max_depth:
                    expl.closed = False
                    continue
                v = expl.index[m2] = len(expl.nodes)
                expl.nodes.append(m2)
                expl.parent.append(u)
                expl.via.append(t)
                expl.depth.append(expl.depth[u] + 1)
                queue.append(v)
            expl.edges.append((u, t, v))
    expl.frontier = 0 if expl.closed else 1
    return None, expl


def _ancestor_check(segment_ok):
    def hook(expl, u, t, m2):
        path = expl.path(u)
        trans = [expl.via[k] for k in path[1:]] + [t]
        for i in range(len(path) - 1, -1, -1):
            a = path[i]
            if _leq(expl.nodes[a], m2) and segment_ok(expl.nodes[a], tuple(trans[i:]), m2):
                return tuple(trans[:i]), tuple(trans[i:])
        return None
    return hook


def _graph_cycle(expl: Exploration, edge_ok, flag, node_ok=None):
    """Stem and loop transitions of a cycle in the explored graph made of
    ``edge_ok`` edges, using a ``flag`` edge and passing a ``node_ok`` node."""
    edges = [(u, t, v) for u, t, v in expl.edges if edge_ok(t)]
    if not edges:
        return None
    n = len(expl.nodes)
    g = Digraph(n, [e[0] for e in edges], [e[2] for e in edges], [flag(e[1]) for e in edges])
    lab = g.scc_labels()
    inner = (lab[g.src] == lab[g.dst]) & g.flag
    comps = set(lab[g.src[inner]].tolist())
    ok = np.ones(n, dtype=bool) if node_ok is None else \
        np.asarray([node_ok(m) for m in expl.nodes], dtype=bool)
    cands = [k for k in range(n) if ok[k] and lab[k] in comps]
    if not cands:
        return None
    z = min(cands, key=lambda k: (expl.depth[k], k))
    comp = lab == lab[z]
    inside = comp[g.src] & comp[g.dst]
    k = int(np.flatnonzero(inside & g.flag)[0])
    one = np.zeros(n, dtype=bool)
    one[int(g.src[k])] = True
    to_k = g.path_edges(g.shortest_path([z], one, inside))
    one[:] = False
    one[z] = True
    back = g.path_edges(g.shortest_path([int(g.dst[k])], one, inside))
    loop = tuple(edges[e][1] for e in to_k + [k] + back)
    return tuple(expl.transitions_to(z)), loop


def find_repetition(g: LabeledPetriNet, start: Marking, budget: SearchBudget,
                    segment_ok, edge_ok=None, flag=None, node_ok=None):
    """Search for ``start [stem> M1 [loop> M2`` with ``M1 <= M2`` and
    ``segment_ok(M1, loop, M2)``.

    ``edge_ok``/``flag``/``node_ok`` describe the same condition for cycles
    of the explored graph (loop edges, a required loop edge, a required loop
    marking), used once the exploration has closed.  Returns the repetition
    or ``None`` and the exploration.
    """
    found, expl = explore(g, start, budget, _ancestor_check(segment_ok))
    if found is None and expl.closed and flag is not None:
        found = _graph_cycle(expl, edge_ok or (lambda t: True), flag, node_ok)
    if found is None:
        return None, expl
    return Repetition(g, start, found[0], found[1]), expl


def _budget_note(expl: Exploration) -> str:
    return f"exploration stopped at the budget after {len(expl.nodes)} markings"


# -- promptness and infinite behaviour -------------------------------------------

def is_prompt(g: LabeledPetriNet, budget: SearchBudget | None = None):
    """No repetitive firing sequence made of unobservable transitions only."""
    budget = budget or SearchBudget()
    prop = "prompt"
    eps = {t for t in g.transitions if g.labels[t] is None}
    if not eps:
        return holds(prop, "no unobservable transitions")
    rep, expl = find_repetition(g, g.m0, budget, lambda a, s, b: set(s) <= eps,
                                edge_ok=lambda t: t in eps, flag=lambda t: True)
    if rep is not None:
        return fails(prop, "repetitive firing sequence of unobservable transitions",
                     rep.witness())
    if expl.closed:
        return holds(prop, "bounded; no unobservable cycle in the reachability graph")
    return unknown(prop, _budget_note(expl))


def omega_nonempty_net(g: LabeledPetriNet, budget: SearchBudget | None = None):
    """Some infinite firing sequence produces an infinite label word."""
    budget = budget or SearchBudget()
    prop = "omega-nonempty"
    rep, expl = _observable_repetition(g, g.m0, budget)
    if rep is not None:
        word = [g.labels[t] for t in rep.loop if g.labels[t] is not None]
        return holds(prop, "repetitive firing sequence with label loop " + " ".join(word),
                     rep.witness())
    if expl.closed:
        return fails(prop, "bounded; no observable cycle in the reachability graph")
    return unknown(prop, _budget_note(expl))


def _observable_repetition(g, start, budget):
    obs = g.observable
    return find_repetition(g, start, budget, lambda a, s, b: any(obs(t) for t in s), flag=obs)


# -- bifurcations -----------------------------------------------------------------

def has_bifurcation(g: LabeledPetriNet, start: Marking, psi, budget: SearchBudget | None = None,
                    comp: Composition | None = None) -> bool:
    """Whether ``start [psi>`` has a bifurcation.

    A companion run of the concurrent composition starts from the pair
    ``(start, start)``, its left component follows a nonempty prefix of
    ``psi``, and its two halves differ at some point.  The right half may
    interleave unobservable moves freely, so the search is budgeted.

    :raises ValueError: when ``psi`` does not fire from ``start``
    :raises BoundExceeded: when the budget runs out before an answer
    """
    budget = budget or SearchBudget()
    psi = tuple(psi)
    replay(g, start, psi)
    if not psi:
        return False
    comp = comp or compose(g)
    cc = comp.net
    first = (comp.join(start, start), 0, False)
    seen = {first}
    queue = deque([first])
    while queue:
        m, i, div = queue.popleft()
        for t in enabled(cc, m):
            left = comp.moves[t][0]
            if left is None:
                i2 = i
            elif i < len(psi) and left == psi[i]:
                i2 = i + 1
            else:
                continue
            m2 = fire(cc, m, t)
            l2, r2 = comp.split(m2)
            div2 = div or l2 != r2
            if div2 and i2 >= 1:
                return True
            node = (m2, i2, div2)
            if node not in seen:
                if len(seen) >= budget.max_markings:
                    raise BoundExceeded("bifurcation search does not close within budget",
                                        len(queue), len(seen))
                seen.add(node)
                queue.append(node)
    return False


# -- instant strong detectability ----------------------------------------------------

def _unfold(g: LabeledPetriNet, budget: SearchBudget) -> Lsts | None:
    try:
        return reachability_lsts(g, budget)
    except BoundExceeded:
        return None


def _isd_pattern(g: LabeledPetriNet, budget: SearchBudget, max_candidates: int = 64):
    """A run of the composition to a pair of distinct markings whose left
    half starts a repetitive observable sequence."""
    comp = compose(g)
    cc = comp.net
    tried: dict = {}
    hit = {}

    def on_edge(expl, u, t, m2):
        left, right = comp.split(m2)
        if left == right or left in tried or len(tried) >= max_candidates:
            return None
        rep, _ = _observable_repetition(g, left, budget)
        tried[left] = rep
        if rep is not None:
            hit["rep"] = rep
            return tuple(expl.transitions_to(u)) + (t,)
        return None

    found, expl = explore(cc, cc.m0, budget, on_edge)
    if found is None:
        return None, expl
    return (found, hit["rep"]), expl


def _isd_witness(g, comp_run, rep) -> Witness:
    cc = compose(g).net
    pair = run_witness(cc, cc.m0, comp_run)
    return Witness(stem=pair.stem, continuation=rep.witness())


def check_isd_net(g: LabeledPetriNet, budget: SearchBudget | None = None):
    """Instant strong detectability of a net.

    Bounded nets are decided on their reachability graph; a failure is
    backed by a composition run to a pair of distinct markings whose left
    half continues by a repetitive observable sequence.  Unbounded nets can
    only be refuted this way.
    """
    budget = budget or SearchBudget()
    prop = "isd"
    om = omega_nonempty_net(g, budget)
    if om.fails:
        return holds(prop, "no infinite observable behaviour")
    m = _unfold(g, budget)
    found, expl = _isd_pattern(g, budget)
    if m is not None:
        v = check_isd(m)
        if v.holds:
            return holds(prop, "bounded; decided on the reachability graph")
        w = _isd_witness(g, *found) if found is not None else v.witness
        return fails(prop, "bounded; ambiguous estimate that can continue forever", w,
                     confirmed=found is not None)
    if found is not None:
        return fails(prop, "two runs with equal labels reach distinct markings and one "
                           "continues by a repetitive observable sequence",
                     _isd_witness(g, *found), confirmed=True)
    return unknown(prop, _budget_note(expl))


# -- eventual strong detectability ------------------------------------------------

def esd_item1(g: LabeledPetriNet, budget: SearchBudget):
    """Repetitive composition sequence with a synchronised observable move
    ending at distinct halves."""
    comp = compose(g)
    cc = comp.net
    obs = lambda t: comp.kind(t) == "obs"  # noqa: E731
    diverged = lambda m: (lambda h: h[0] != h[1])(comp.split(m))  # noqa: E731
    return find_repetition(cc, cc.m0, budget,
                           lambda a, s, b: diverged(b) and any(obs(t) for t in s),
                           flag=obs, node_ok=diverged)


def esd_item2(g: LabeledPetriNet, budget: SearchBudget):
    """Repetitive observable sequence of ``g`` whose loop has a bifurcation."""
    comp = compose(g)

    def segment_ok(a, s, b):
        if not any(g.observable(t) for t in s):
            return False
        try:
            return has_bifurcation(g, a, s, budget, comp)
        except BoundExceeded:
            return False
    return find_repetition(g, g.m0, budget, segment_ok)


def check_esd_net(g: LabeledPetriNet, budget: SearchBudget | None = None):
    """Eventual strong detectability of a net.

    Bounded nets are decided on their reachability graph (the report names
    the failing item).  Otherwise both failure patterns are searched and
    ``unknown`` is returned when neither is found.
    """
    budget = budget or SearchBudget()
    prop = "esd"
    om = omega_nonempty_net(g, budget)
    if om.fails:
        return holds(prop, "no infinite observable behaviour")
    m = _unfold(g, budget)
    if m is not None:
        v = check_esd(m)
        if v.holds:
            return holds(prop, "bounded; decided on the reachability graph")
        return fails(prop, f"bounded; item {v.extra['item']} on the reachability graph",
                     v.witness, item=v.extra["item"])
    rep, _ = esd_item1(g, budget)
    if rep is not None:
        return fails(prop, "item 1: repetitive composition sequence ends at distinct halves",
                     rep.witness(), item=1)
    rep, _ = esd_item2(g, budget)
    if rep is not None:
        return fails(prop, "item 2: repetitive observable sequence with a bifurcation",
                     rep.witness(), item=2)
    return unknown(prop, "neither failure pattern found within budget")


__all__ = ["Exploration", "Repetition", "explore", "find_repetition", "run_witness",
           "is_prompt", "omega_nonempty_net", "has_bifurcation", "check_isd_net",
           "check_esd_net", "esd_item1", "esd_item2"]
