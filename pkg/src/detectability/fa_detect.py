"""Detectability checkers for finite automata.

All checkers treat a system without infinite observable behaviour as
detectable.  Failures carry witnesses that replay in the input system.

Instant strong, strong and eventual strong detectability use the
polynomial characterisations through the bifurcation automaton and the
self-composition.  Weak and weak approximate detectability are decided
exactly on the reachable part of the powerset observer.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

import numpy as np

from ._graph import Digraph
from .constructions import (BIFUR, _digraph, _Product, _step, bifurcation_automaton,
                            lasso, omega_nonempty)
from .core import (Lsts, ParseError, _tokens, accessible_part, initial_estimate_idx,
                   step_idx)
from .verdict import Verdict, Witness, fails, holds

__all__ = [
    "Partition", "Verdict", "parse_partition", "serialize_partition", "singleton_partition",
    "check_isd", "check_sd", "check_esd", "check_wd", "check_wad", "check_determinism",
    "quotient_automaton", "detector", "detector_sd", "check_assumption1",
    "AssumptionError", "PROPERTIES", "check",
]

PROPERTIES = ("determinism", "isd", "sd", "esd", "wd", "wad")


class AssumptionError(ValueError):
    """Input violates the precondition of a construction."""


# -- partitions ---------------------------------------------------------------

@dataclass(frozen=True)
class Partition:
    cells: tuple  # of frozensets

    def cell_of(self) -> dict:
        return {x: k for k, c in enumerate(self.cells) for x in c}

    def validate(self, m: Lsts) -> None:
        seen: set = set()
        declared = set(m.states)
        for c in self.cells:
            if not c:
                raise ValueError("empty cell")
            unknown = sorted(set(c) - declared)
            if unknown:
                raise ValueError(f"unknown state {unknown[0]!r} in partition")
            overlap = sorted(seen & set(c))
            if overlap:
                raise ValueError(f"state {overlap[0]!r} occurs in two cells")
            seen |= set(c)
        missing = sorted(set(accessible_part(m).states) - seen)
        if missing:
            raise ValueError(f"reachable state {missing[0]!r} is not covered")


def parse_partition(text: str) -> Partition:
    cells = []
    for lineno, key, args in _tokens(text):
        if key != "cell":
            raise ParseError(f"unknown keyword {key!r}", lineno)
        if not args:
            raise ParseError("empty cell", lineno)
        cells.append(frozenset(args))
    if not cells:
        raise ParseError("a partition needs at least one cell")
    return Partition(tuple(cells))


def serialize_partition(r: Partition) -> str:
    return "".join("cell: " + " ".join(sorted(c)) + "\n" for c in r.cells)


def singleton_partition(m: Lsts) -> Partition:
    return Partition(tuple(frozenset([x]) for x in m.states))


# -- shared helpers -----------------------------------------------------------

def _obs_graph(m: Lsts) -> Digraph:
    return _digraph(m, lambda t: m.labels[t] is not None)


def _steps(m: Lsts, g: Digraph, edges) -> tuple:
    return tuple(_step(m, g, k) for k in edges)


def _bifurcating_transition(m: Lsts, j: str, i: str):
    """A transition j -> i responsible for the bifurcation of the pair.

    Returns ``(event, after)``.  ``after`` is False when the estimate already
    splits before the transition fires (an ε-move out of ``j``), True when
    it splits right after the observable transition.
    """
    lab = m.labels
    outs = [(t, y) for t, y in ((t, m.states[k]) for t, k in m.out[m.index[j]])]
    direct = sorted(t for t, y in outs if y == i)
    if any(lab[t] is None and y != j for t, y in outs):
        return direct[0], False
    for t in direct:
        if lab[t] is not None and any(lab[u] == lab[t] and y != i for u, y in outs):
            return t, True
    raise AssertionError("pair is not a bifurcation")


# -- instant strong detectability ---------------------------------------------

def check_isd(m: Lsts) -> Verdict:
    """Instant strong detectability: every prefix of every infinite
    observation determines the current state."""
    prop = "isd"
    om = omega_nonempty(m)
    if om.fails:
        return holds(prop, "no infinite observable behaviour")
    if len(m.initial) > 1:
        return fails(prop, "several initial states; the empty observation is ambiguous",
                     om.witness, prefix=())
    acc = accessible_part(m)
    g = _obs_graph(acc)
    live = g.reach(g.cyclic_nodes(g.flag), reverse=True)
    bif = bifurcation_automaton(acc).lsts
    idx = acc.index
    init = [idx[x] for x in acc.initial]
    dist = _bfs_depth(g, init)
    cands = sorted((dist[idx[j]], j, i) for j, t, i in bif.transitions
                   if t == BIFUR and live[idx[i]])
    if not cands:
        return holds(prop, "no bifurcation transition leads to an observable cycle")
    _, j, i = cands[0]
    stem_nodes = g.shortest_path(init, _mask(acc, [j]))
    stem = _steps(acc, g, g.path_edges(stem_nodes))
    t, after = _bifurcating_transition(acc, j, i)
    word = [acc.labels[e] for _, e, _ in stem] + ([acc.labels[t]] if after else [])
    rest, loop = lasso(acc, [i], g)
    w = Witness(stem=stem + ((j, t, i),) + tuple(rest), loop=tuple(loop))
    return fails(prop, f"bifurcation {j} -> {i} precedes an observable cycle", w,
                 prefix=tuple(a for a in word if a is not None))


def _bfs_depth(g: Digraph, sources) -> dict:
    adj: dict = {}
    for u, v in zip(g.src.tolist(), g.dst.tolist()):
        adj.setdefault(u, []).append(v)
    dist = {s: 0 for s in sources}
    queue = deque(sources)
    while queue:
        u = queue.popleft()
        for v in adj.get(u, ()):
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def _mask(m: Lsts, names) -> np.ndarray:
    out = np.zeros(len(m.states), dtype=bool)
    for x in names:
        out[m.index[x]] = True
    return out


# -- strong detectability -----------------------------------------------------

def check_sd(m: Lsts) -> Verdict:
    """Strong detectability: after a uniform delay every infinite
    observation determines the current state."""
    prop = "sd"
    acc = accessible_part(m)
    g = _obs_graph(acc)
    live = g.reach(g.cyclic_nodes(g.flag), reverse=True)
    if not live[[acc.index[x] for x in acc.initial]].any():
        return holds(prop, "no infinite observable behaviour")
    p = _Product(acc)
    pg = p.graph
    after_cycle = pg.reach(pg.cyclic_nodes(pg.flag)) & p.distinct
    left = live[np.asarray(p.nodes, dtype=np.int64) // p.n]
    bad = np.flatnonzero(after_cycle & left)
    if len(bad) == 0:
        return holds(prop, "no diverging pair after an observable cycle can continue forever")
    v = int(bad[0])
    toward = pg.reach([v], reverse=True)
    stem, loop = pg.lasso_to(p.initial, pg.flag, node_ok=toward)
    u = int(pg.src[loop[0]])
    tail = pg.path_edges(pg.shortest_path([u], _one_hot(v, pg.n)))
    x = acc.states[p.split(v)[0]]
    cstem, cloop = lasso(acc, [x], g)
    cont = Witness(stem=tuple(cstem), loop=tuple(cloop))
    w = Witness(stem=tuple(p.step(k) for k in stem), loop=tuple(p.step(k) for k in loop),
                tail=tuple(p.step(k) for k in tail), continuation=cont)
    return fails(prop, f"pair {p.state_name(v)} diverges after a repeatable observation "
                       "and its left state can continue forever", w)


def _one_hot(i: int, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=bool)
    out[i] = True
    return out


# -- eventual strong detectability -------------------------------------------

def check_esd(m: Lsts) -> Verdict:
    """Eventual strong detectability: every infinite observation
    eventually determines the current state."""
    prop = "esd"
    acc = accessible_part(m)
    p = _Product(acc)
    pg = p.graph
    cyc = pg.cyclic_nodes(pg.flag)
    item1 = np.flatnonzero(cyc & p.distinct)
    if len(item1):
        d = int(item1[0])
        stem = pg.path_edges(pg.shortest_path(p.initial, _one_hot(d, pg.n)))
        loop = _cycle_through(pg, d, pg.flag)
        w = Witness(stem=tuple(p.step(k) for k in stem), loop=tuple(p.step(k) for k in loop))
        return fails(prop, f"item 1: diverging pair {p.state_name(d)} lies on an observable cycle "
                           "of the self-composition", w, item=1)
    g = _obs_graph(acc)
    obs_cyc = g.cyclic_nodes(g.flag)
    bif = _digraph(bifurcation_automaton(acc).lsts, lambda t: t == BIFUR)
    both = np.flatnonzero(obs_cyc & bif.cyclic_nodes(bif.flag))
    if len(both):
        z = int(both[0])
        stem = g.path_edges(g.shortest_path([acc.index[x] for x in acc.initial], _one_hot(z, g.n)))
        loop = list(_steps(acc, g, _cycle_through(g, z, g.flag)))
        # splice a bifurcation pair into the loop
        lab = bif.scc_labels()
        k = int(next(e for e in np.flatnonzero(bif.flag) if lab[bif.src[e]] == lab[z]
                     and lab[bif.dst[e]] == lab[z]))
        j, i = int(bif.src[k]), int(bif.dst[k])
        comp = lab == lab[z]
        inside = comp[g.src] & comp[g.dst]
        to_j = g.path_edges(g.shortest_path([z], _one_hot(j, g.n), inside))
        back = g.path_edges(g.shortest_path([i], _one_hot(z, g.n), inside))
        t, _ = _bifurcating_transition(acc, acc.states[j], acc.states[i])
        loop += list(_steps(acc, g, to_j)) + [(acc.states[j], t, acc.states[i])] + \
            list(_steps(acc, g, back))
        w = Witness(stem=_steps(acc, g, stem), loop=tuple(loop))
        return fails(prop, f"item 2: state {acc.states[z]} lies on an observable cycle "
                           "and on a cycle through a bifurcation", w, item=2)
    return holds(prop, "no diverging observable cycle and no observable bifurcation cycle")


def _cycle_through(g: Digraph, node: int, edge_mask) -> list:
    """Edges of a cycle through ``node`` that uses an edge of ``edge_mask``
    inside the node's SCC."""
    lab = g.scc_labels()
    comp = lab == lab[node]
    inside = comp[g.src] & comp[g.dst]
    k = int(np.flatnonzero(inside & edge_mask)[0])
    to_k = g.path_edges(g.shortest_path([node], _one_hot(int(g.src[k]), g.n), inside))
    back = g.path_edges(g.shortest_path([int(g.dst[k])], _one_hot(node, g.n), inside))
    return to_k + [k] + back


# -- observer-based checks ----------------------------------------------------

class _Estimates:
    """Reachable nonempty estimates, as sorted index tuples, with labelled edges."""

    def __init__(self, m: Lsts, budget: int = 1_000_000, stop=None):
        self.m = m
        first = initial_estimate_idx(m)
        self.nodes = [first]
        self.code = {first: 0}
        self.edges = []  # (u, label, v)
        self.stopped = None
        k = 0
        while k < len(self.nodes):
            q = self.nodes[k]
            if stop is not None and stop(q):
                self.stopped = k
                return
            for a in m.alphabet:
                r = step_idx(m, q, a)
                if not r:
                    continue
                v = self.code.get(r)
                if v is None:
                    if len(self.nodes) >= budget:
                        raise RuntimeError(f"observer exceeds {budget} nodes")
                    v = self.code[r] = len(self.nodes)
                    self.nodes.append(r)
                self.edges.append((k, a, v))
            k += 1

    def word_to(self, target: int) -> tuple:
        pred = {0: None}
        queue = deque([0])
        adj: dict = {}
        for u, a, v in self.edges:
            adj.setdefault(u, []).append((a, v))
        while queue:
            u = queue.popleft()
            if u == target:
                break
            for a, v in adj.get(u, ()):
                if v not in pred:
                    pred[v] = (u, a)
                    queue.append(v)
        word = []
        while pred[target] is not None:
            target, a = pred[target]
            word.append(a)
        return tuple(reversed(word))


def _good_cycle(est: _Estimates, good) -> Witness | None:
    """Label lasso reaching a cycle made of ``good`` nodes only."""
    n = len(est.nodes)
    inner = [(u, a, v) for u, a, v in est.edges if good[u] and good[v]]
    if not inner:
        return None
    g = Digraph(n, [u for u, _, _ in inner], [v for _, _, v in inner], [True] * len(inner))
    cyc = g.cyclic_nodes()
    full = Digraph(n, [u for u, _, _ in est.edges], [v for _, _, v in est.edges])
    path = full.shortest_path([0], cyc)
    if path is None:
        return None
    u = path[-1]
    loop = _cycle_through(g, u, g.flag)
    labels = {}
    for u2, a, v2 in est.edges:
        labels.setdefault((u2, v2), a)
    word = tuple(labels[(a, b)] for a, b in zip(path, path[1:]))
    loop_word = tuple(labels[(int(g.src[k]), int(g.dst[k]))] for k in loop)
    return Witness(word=word, word_loop=loop_word)


def check_wd(m: Lsts) -> Verdict:
    """Weak detectability: some infinite observation eventually
    determines the current state."""
    if omega_nonempty(m).fails:
        return holds("wd", "no infinite observable behaviour")
    est = _Estimates(m)
    w = _good_cycle(est, [len(q) == 1 for q in est.nodes])
    if w is None:
        return fails("wd", "no reachable observer cycle of singleton estimates")
    return holds("wd", "reachable observer cycle of singleton estimates", w)


def check_wad(m: Lsts, r: Partition) -> Verdict:
    """Weak approximate detectability with respect to ``r``.

    Decided on the observer: some reachable cycle of estimates each lying
    inside one cell.  A partition with a single cell is accepted.
    """
    r.validate(m)
    if omega_nonempty(m).fails:
        return holds("wad", "no infinite observable behaviour")
    cell = r.cell_of()
    est = _Estimates(m)
    st = m.states
    good = [len({cell.get(st[i]) for i in q}) == 1 for q in est.nodes]
    w = _good_cycle(est, good)
    if w is None:
        return fails("wad", "no reachable observer cycle of estimates inside single cells")
    return holds("wad", "reachable observer cycle of estimates inside single cells", w)


def quotient_automaton(m: Lsts, r: Partition) -> Lsts:
    """Merge the states of each cell.  Cells are named ``R1``, ``R2``, ...
    in partition order; unreachable states outside every cell are dropped."""
    r.validate(m)
    names = {x: f"R{k + 1}" for k, c in enumerate(r.cells) for x in c}
    trans = frozenset((names[x], t, names[y]) for x, t, y in m.transitions
                      if x in names and y in names)
    initial = frozenset(names[x] for x in m.initial)
    return Lsts(tuple(f"R{k + 1}" for k in range(len(r.cells))), m.events, m.labels,
                initial, trans)


def check_determinism(m: Lsts) -> Verdict:
    """Every finite observation (including the empty one) yields at most
    one state."""
    est = _Estimates(m, stop=lambda q: len(q) > 1)
    if est.stopped is None:
        return holds("determinism", "every reachable estimate is a singleton")
    word = est.word_to(est.stopped)
    return fails("determinism", "an observation yields several states", Witness(word=word))


# -- the 2-subset detector ------------------------------------------------------

def check_assumption1(m: Lsts) -> bool:
    """Deadlock-free, and no reachable cycle made of unobservable transitions."""
    if any(not row for row in m.out):
        return False
    acc = accessible_part(m)
    g = _digraph(acc)
    eps = np.asarray([acc.labels[t] is None for t in g.events], dtype=bool)
    sub = Digraph(g.n, g.src[eps], g.dst[eps])
    return not sub.cyclic_nodes().any()


def _detector(m: Lsts):
    if not check_assumption1(m):
        raise AssumptionError("the detector requires a deadlock-free system without "
                              "reachable unobservable cycles")
    first = initial_estimate_idx(m)
    seen = {first}
    queue = deque([first])
    trans = set()
    while queue:
        q = queue.popleft()
        for a in m.alphabet:
            r = step_idx(m, q, a)
            if not r:
                continue
            if len(r) == 1:
                succ = [r]
            else:
                succ = [frozenset(c) for c in itertools.combinations(sorted(r), 2)]
            for s in succ:
                trans.add((q, a, s))
                if s not in seen:
                    seen.add(s)
                    queue.append(s)
    st = m.states
    names = {q: "d_" + "_".join(st[i] for i in sorted(q)) for q in seen}
    if len(set(names.values())) != len(names):
        raise ValueError("state ids make detector state names ambiguous")
    events = {a: a for a in m.alphabet}
    d = Lsts(tuple(names.values()), tuple(events), events, frozenset([names[first]]),
             frozenset((names[q], a, names[s]) for q, a, s in trans))
    return d, {names[q]: len(q) for q in seen}


def detector(m: Lsts) -> Lsts:
    """Detector automaton over estimate subsets of size at most two.

    The initial state is the initial estimate.  Each successor estimate is
    kept when it is a singleton and otherwise replaced by all of its
    2-subsets.  A state is named ``d_`` followed by its members.
    """
    return _detector(m)[0]


def detector_sd(m: Lsts) -> bool:
    """Strong detectability read off the detector: every state reachable
    from a cycle is a singleton.  Valid only under the detector's assumption."""
    d, size = _detector(m)
    g = _digraph(d)
    after = g.reach(g.cyclic_nodes())
    return not any(after[d.index[x]] and size[x] > 1 for x in d.states)


def check(m: Lsts, prop: str, partition: Partition | None = None) -> Verdict:
    """Dispatch by property tag; ``wad`` defaults to the singleton partition."""
    if prop == "wad":
        return check_wad(m, partition or singleton_partition(m))
    fn = {"determinism": check_determinism, "isd": check_isd, "sd": check_sd,
          "esd": check_esd, "wd": check_wd}.get(prop)
    if fn is None:
        raise ValueError(f"unknown property {prop!r}")
    return fn(m)
