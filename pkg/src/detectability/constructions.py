"""Derived automata and the cycle/liveness sets the checkers are built on.

* :func:`observation_automaton` keeps, per state pair, only whether some
  connecting transition is observable.
* :func:`bifurcation_automaton` classifies each state pair as *fair* or
  *bifurcation* according to whether observation can split the estimate.
* :func:`concurrent_composition` synchronises two copies of a system on
  equal observable labels and interleaves unobservable moves.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ._graph import Digraph
from .core import Lsts, accessible_part
from .verdict import Witness, fails, holds

OBS_EVENT = "obs"
OBS_LABEL = "o"
EPS_EVENT = "eps"
FAIR = "fair"
BIFUR = "bifur"
SEP = "__"


def observation_automaton(m: Lsts) -> Lsts:
    kinds: dict = {}
    for x, t, y in m.transitions:
        obs = m.labels[t] is not None
        kinds[(x, y)] = kinds.get((x, y), False) or obs
    trans = frozenset((x, OBS_EVENT if o else EPS_EVENT, y) for (x, y), o in kinds.items())
    return Lsts(m.states, (OBS_EVENT, EPS_EVENT), {OBS_EVENT: OBS_LABEL, EPS_EVENT: None},
                m.initial, trans)


@dataclass(frozen=True)
class BifurAutomaton:
    """Bifurcation automaton; ``lsts`` uses the events ``fair`` and ``bifur``."""

    lsts: Lsts

    @property
    def kinds(self) -> dict:
        return {(x, y): t for x, t, y in self.lsts.transitions}

    def kind(self, x: str, y: str) -> str | None:
        return self.kinds.get((x, y))


def bifurcation_automaton(m: Lsts) -> BifurAutomaton:
    lab = m.labels
    by_src: dict = {}
    for x, t, y in m.transitions:
        by_src.setdefault(x, []).append((t, y))
    trans = set()
    for j, outs in by_src.items():
        a2 = not any(lab[t] is None and y != j for t, y in outs)
        targets_by_label: dict = {}
        for t, y in outs:
            if lab[t] is not None:
                targets_by_label.setdefault(lab[t], set()).add(y)
        for i in {y for _, y in outs}:
            a3 = all(targets_by_label[lab[t]] <= {i}
                     for t, y in outs if y == i and lab[t] is not None)
            trans.add((j, FAIR if a2 and a3 else BIFUR, i))
    lsts = Lsts(m.states, (FAIR, BIFUR), {FAIR: FAIR, BIFUR: BIFUR}, m.initial, frozenset(trans))
    return BifurAutomaton(lsts)


# -- concurrent composition --------------------------------------------------

def pair_name(x: str, y: str) -> str:
    return f"{x}{SEP}{y}"


def event_pair_name(t: str | None, u: str | None) -> str:
    return f"{t or EPS_EVENT}{SEP}{u or EPS_EVENT}"


@dataclass(frozen=True)
class PairLsts:
    """Self-composition of a system with projections back onto it.

    ``pairs`` maps each state to ``(left, right)``; ``event_pairs`` maps each
    event to ``(left, right)`` where ``None`` stands for "no move".
    """

    lsts: Lsts
    pairs: dict
    event_pairs: dict

    def left(self, state: str) -> str:
        return self.pairs[state][0]

    def right(self, state: str) -> str:
        return self.pairs[state][1]

    def left_events(self, events) -> list:
        return [self.event_pairs[e][0] for e in events if self.event_pairs[e][0] is not None]

    def right_events(self, events) -> list:
        return [self.event_pairs[e][1] for e in events if self.event_pairs[e][1] is not None]


class _Product:
    """Integer-level product used by the checkers and by the public builder.

    Pair ``(i, j)`` of state indices is coded ``i * n + j``.  Edges of the
    full product are generated per label with numpy, then restricted to
    the part reachable from ``X0 x X0`` when ``accessible`` is set.
    """

    def __init__(self, m: Lsts, accessible: bool = True):
        self.m = m
        n = self.n = len(m.states)
        trans = sorted(m.transitions)
        idx = m.index
        ev_names = m.events
        ev_index = {e: k for k, e in enumerate(ev_names)}
        tsrc = np.asarray([idx[x] for x, _, _ in trans], dtype=np.int64)
        tdst = np.asarray([idx[y] for _, _, y in trans], dtype=np.int64)
        tev = np.asarray([ev_index[t] for _, t, _ in trans], dtype=np.int64)
        labs = [m.labels[t] for _, t, _ in trans]
        eps = np.asarray([a is None for a in labs], dtype=bool)
        parts = []
        for a in sorted({a for a in labs if a is not None}):
            sel = np.asarray([x == a for x in labs], dtype=bool)
            s_, d_, e_ = tsrc[sel], tdst[sel], tev[sel]
            k = len(s_)
            parts.append(((s_[:, None] * n + s_[None, :]).ravel(),
                          (d_[:, None] * n + d_[None, :]).ravel(),
                          np.repeat(e_, k), np.tile(e_, k), np.ones(k * k, dtype=bool)))
        s_, d_, e_ = tsrc[eps], tdst[eps], tev[eps]
        k = len(s_)
        other = np.arange(n, dtype=np.int64)
        none = np.full(k * n, -1, dtype=np.int64)
        parts.append(((s_[:, None] * n + other[None, :]).ravel(),
                      (d_[:, None] * n + other[None, :]).ravel(),
                      np.repeat(e_, n), none, np.zeros(k * n, dtype=bool)))
        parts.append(((other[None, :] * n + s_[:, None]).ravel(),
                      (other[None, :] * n + d_[:, None]).ravel(),
                      none, np.repeat(e_, n), np.zeros(k * n, dtype=bool)))
        src, dst, left, right, flag = (np.concatenate([p[c] for p in parts]) for c in range(5))
        init = sorted(idx[x] * n + idx[y] for x in m.initial for y in m.initial)
        if accessible:
            full = Digraph(n * n, src, dst)
            keep = full.reach(init)
            sel = keep[src]
            src, dst, left, right, flag = src[sel], dst[sel], left[sel], right[sel], flag[sel]
            nodes = np.flatnonzero(keep)
        else:
            nodes = np.arange(n * n, dtype=np.int64)
        remap = np.full(n * n, -1, dtype=np.int64)
        remap[nodes] = np.arange(len(nodes))
        self.nodes = nodes.tolist()
        self.code = {c: v for v, c in enumerate(self.nodes)}
        self._left, self._right = left, right
        self._ev_names = ev_names
        self.graph = Digraph(len(nodes), remap[src], remap[dst], flag)
        self.initial = [self.code[c] for c in init]

    @property
    def events(self):
        names = self._ev_names

        class _View:
            def __len__(_):
                return len(self._left)

            def __getitem__(_, k):
                a, b = int(self._left[k]), int(self._right[k])
                return (names[a] if a >= 0 else None, names[b] if b >= 0 else None)
        return _View()

    def split(self, v: int) -> tuple:
        return divmod(self.nodes[v], self.n)

    @cached_property
    def distinct(self) -> np.ndarray:
        cs = np.asarray(self.nodes, dtype=np.int64).reshape(-1)
        return (cs // self.n) != (cs % self.n)

    def state_name(self, v: int) -> str:
        i, j = self.split(v)
        st = self.m.states
        return pair_name(st[i], st[j])

    def step(self, k: int) -> tuple:
        g = self.graph
        t, u = self.events[k]
        return (self.state_name(int(g.src[k])), event_pair_name(t, u), self.state_name(int(g.dst[k])))

    def to_pair_lsts(self) -> PairLsts:
        m = self.m
        st = m.states
        pairs = {}
        for v in range(len(self.nodes)):
            i, j = self.split(v)
            pairs[self.state_name(v)] = (st[i], st[j])
        event_pairs, labels, trans = {}, {}, set()
        for k in range(len(self.events)):
            t, u = self.events[k]
            name = event_pair_name(t, u)
            event_pairs[name] = (t, u)
            labels[name] = m.labels[t] if t is not None else None
            trans.add(self.step(k))
        if len(pairs) != len(self.nodes) or len(event_pairs) != len(set(zip(self._left.tolist(), self._right.tolist()))):
            raise ValueError(f"ids containing {SEP!r} make composed names ambiguous")
        initial = frozenset(self.state_name(v) for v in self.initial)
        lsts = Lsts(tuple(pairs), tuple(event_pairs), labels, initial, frozenset(trans))
        return PairLsts(lsts, pairs, event_pairs)


def concurrent_composition(m: Lsts, accessible: bool = False) -> PairLsts:
    """Self-composition of ``m``.

    The full product over all state pairs by default; with ``accessible``
    only the part reachable from ``X0 x X0``.  Events are the label-compatible
    pairs that occur on some product transition.
    """
    return _Product(m, accessible=accessible).to_pair_lsts()


# -- SCCs and cycle sets -----------------------------------------------------

@dataclass(frozen=True)
class Components:
    components: tuple
    membership: dict


def _digraph(m: Lsts, flagged=lambda t: False) -> Digraph:
    """One edge per transition; ``events`` records the event of each edge."""
    idx = m.index
    trans = sorted(m.transitions)
    g = Digraph(len(m.states), [idx[x] for x, _, _ in trans], [idx[y] for _, _, y in trans],
                [flagged(t) for _, t, _ in trans])
    g.events = [t for _, t, _ in trans]
    return g


def _lsts_of(g) -> Lsts:
    return g.lsts if isinstance(g, (BifurAutomaton, PairLsts)) else g


def sccs(g) -> Components:
    """Strongly connected components, sorted by their sorted member lists."""
    m = _lsts_of(g)
    labels = _digraph(m).scc_labels()
    groups: dict = {}
    for x, c in zip(m.states, labels.tolist()):
        groups.setdefault(c, []).append(x)
    comps = sorted(tuple(sorted(v)) for v in groups.values())
    members = {x: k for k, comp in enumerate(comps) for x in comp}
    return Components(tuple(frozenset(c) for c in comps), members)


def _names(m: Lsts, mask) -> frozenset:
    return frozenset(m.states[i] for i in np.flatnonzero(mask))


def _observable_mask(m: Lsts) -> np.ndarray:
    g = _digraph(m, lambda t: m.labels[t] is not None)
    return g.cyclic_nodes(g.flag)


def observable_cycle_states(m: Lsts) -> frozenset:
    """States of ``Acc(m)`` on a cycle whose label word is non-empty."""
    acc = accessible_part(m)
    return _names(acc, _observable_mask(acc))


def bifurcation_cycle_states(b: BifurAutomaton) -> frozenset:
    m = b.lsts
    g = _digraph(m, lambda t: t == BIFUR)
    return _names(m, g.cyclic_nodes(g.flag))


def live_states(m: Lsts) -> frozenset:
    """States that can reach an observable cycle of the accessible part.

    Unreachable states are considered too: a state is live when an
    observable cycle is reachable from it within ``m``.
    """
    g = _digraph(m, lambda t: m.labels[t] is not None)
    cyc = g.cyclic_nodes(g.flag)
    return _names(m, g.reach(cyc, reverse=True))


def lasso(m: Lsts, sources=None, digraph: Digraph | None = None):
    """Stem and loop (lists of steps) from ``sources`` to an observable cycle."""
    g = digraph or _digraph(m, lambda t: m.labels[t] is not None)
    idx = m.index
    start = [idx[x] for x in (m.initial if sources is None else sources)]
    found = g.lasso_to(start, g.flag)
    if found is None:
        return None
    stem, loop = found
    return [_step(m, g, k) for k in stem], [_step(m, g, k) for k in loop]


def _step(m: Lsts, g: Digraph, k: int) -> tuple:
    return (m.states[int(g.src[k])], g.events[k], m.states[int(g.dst[k])])


def omega_nonempty(m: Lsts):
    found = lasso(m)
    if found is None:
        return fails("omega-nonempty", "no observable cycle is reachable")
    stem, loop = found
    return holds("omega-nonempty", "an observable cycle is reachable",
                 Witness(stem=tuple(stem), loop=tuple(loop)))
