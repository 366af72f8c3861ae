"""Labeled place/transition nets, their token game and bounded unfolding."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

from ..core import EPS_TOKEN, Lsts, ParseError, _check_id, _tokens

Marking = tuple  # token counts in the order of ``net.places``


class BoundExceeded(RuntimeError):
    """Exploration stopped at the budget before closing."""

    def __init__(self, message: str, frontier: int, explored: int):
        super().__init__(f"{message} (explored {explored} markings, frontier {frontier})")
        self.frontier = frontier
        self.explored = explored


@dataclass(frozen=True)
class SearchBudget:
    max_markings: int = 10_000
    max_depth: int = 1_000

    def __post_init__(self):
        if self.max_markings < 1 or self.max_depth < 1:
            raise ValueError("budget limits must be positive")


@dataclass(frozen=True, eq=True)
class LabeledPetriNet:
    """A labeled P/T net.

    :param places: place ids
    :param transitions: transition ids
    :param pre: ``(place, transition) -> weight`` for input arcs
    :param post: ``(place, transition) -> weight`` for output arcs
    :param initial: ``place -> tokens``; missing places hold no token
    :param labels: ``transition -> label`` (``None`` for unobservable)
    """

    places: tuple
    transitions: tuple
    pre: Mapping
    post: Mapping
    initial: Mapping
    labels: Mapping

    __hash__ = None

    def __post_init__(self):
        places = tuple(sorted(set(self.places)))
        transitions = tuple(sorted(set(self.transitions)))
        if len(places) != len(self.places) or len(transitions) != len(self.transitions):
            raise ValueError("duplicate place or transition id")
        if set(places) & set(transitions):
            raise ValueError("places and transitions must have distinct ids")
        if not places and not transitions:
            raise ValueError("a net needs at least one place or transition")
        pset, tset = set(places), set(transitions)
        for arcs in (self.pre, self.post):
            for (p, t), w in arcs.items():
                if p not in pset or t not in tset:
                    raise ValueError(f"arc ({p}, {t}) references an unknown node")
                if w < 0:
                    raise ValueError("arc weights must be non-negative")
        for p, k in self.initial.items():
            if p not in pset:
                raise ValueError(f"marking references unknown place {p!r}")
            if k < 0:
                raise ValueError("token counts must be non-negative")
        if set(self.labels) != tset:
            raise ValueError("every transition needs exactly one label")
        object.__setattr__(self, "places", places)
        object.__setattr__(self, "transitions", transitions)
        object.__setattr__(self, "pre", {k: w for k, w in sorted(self.pre.items()) if w})
        object.__setattr__(self, "post", {k: w for k, w in sorted(self.post.items()) if w})
        object.__setattr__(self, "initial", {p: self.initial.get(p, 0) for p in places})
        object.__setattr__(self, "labels", {t: self.labels[t] for t in transitions})

    @cached_property
    def place_index(self) -> dict:
        return {p: i for i, p in enumerate(self.places)}

    @cached_property
    def pre_vec(self) -> dict:
        """transition -> tuple of ``(place_index, weight)`` input requirements."""
        idx = self.place_index
        out = {t: [] for t in self.transitions}
        for (p, t), w in self.pre.items():
            out[t].append((idx[p], w))
        return {t: tuple(v) for t, v in out.items()}

    @cached_property
    def delta(self) -> dict:
        """transition -> tuple of ``(place_index, change)`` with non-zero change."""
        idx = self.place_index
        out = {t: {} for t in self.transitions}
        for (p, t), w in self.pre.items():
            out[t][idx[p]] = out[t].get(idx[p], 0) - w
        for (p, t), w in self.post.items():
            out[t][idx[p]] = out[t].get(idx[p], 0) + w
        return {t: tuple((i, d) for i, d in sorted(v.items()) if d) for t, v in out.items()}

    @property
    def m0(self) -> Marking:
        return tuple(self.initial[p] for p in self.places)

    def marking(self, tokens: Mapping) -> Marking:
        unknown = set(tokens) - set(self.places)
        if unknown:
            raise ValueError(f"unknown place {sorted(unknown)[0]!r}")
        return tuple(tokens.get(p, 0) for p in self.places)

    def as_dict(self, m: Marking) -> dict:
        return dict(zip(self.places, m))

    def observable(self, t: str) -> bool:
        return self.labels[t] is not None


def marking_name(g: LabeledPetriNet, m: Marking) -> str:
    return "(" + ",".join(f"{p}={k}" for p, k in zip(g.places, m)) + ")"


def enabled(g: LabeledPetriNet, m: Marking) -> list:
    return [t for t in g.transitions if all(m[i] >= w for i, w in g.pre_vec[t])]


def fire(g: LabeledPetriNet, m: Marking, t: str) -> Marking:
    if any(m[i] < w for i, w in g.pre_vec[t]):
        raise ValueError(f"transition {t!r} is not enabled at {marking_name(g, m)}")
    out = list(m)
    for i, d in g.delta[t]:
        out[i] += d
    return tuple(out)


def replay(g: LabeledPetriNet, m: Marking, seq) -> list:
    """Markings visited by firing ``seq`` from ``m`` (including ``m``)."""
    out = [m]
    for t in seq:
        out.append(fire(g, out[-1], t))
    return out


# -- documents ---------------------------------------------------------------

def parse_net(text: str) -> LabeledPetriNet:
    places: list = []
    marking: dict = {}
    labels: dict = {}
    arcs: list = []
    for lineno, key, args in _tokens(text):
        if key == "places":
            for p in args:
                _check_id(p, lineno)
                if p in places:
                    raise ParseError(f"duplicate place {p!r}", lineno)
                places.append(p)
        elif key == "marking":
            for item in args:
                if "=" not in item:
                    raise ParseError(f"expected <place>=<tokens>, got {item!r}", lineno)
                p, k = item.split("=", 1)
                if not k.isdigit():
                    raise ParseError(f"invalid token count {k!r}", lineno)
                if p in marking:
                    raise ParseError(f"place {p!r} marked twice", lineno)
                marking[p] = (int(k), lineno)
        elif key == "transition":
            if len(args) != 2:
                raise ParseError("expected 'transition: <id> <label-or-.>'", lineno)
            t, lab = args
            _check_id(t, lineno)
            if t in labels:
                raise ParseError(f"duplicate transition {t!r}", lineno)
            labels[t] = None if lab == EPS_TOKEN else _check_id(lab, lineno)
        elif key == "arc":
            if len(args) not in (3, 4) or args[1] != "->":
                raise ParseError("expected 'arc: <from> -> <to> [weight]'", lineno)
            w = args[3] if len(args) == 4 else "1"
            if not w.isdigit():
                raise ParseError(f"invalid weight {w!r}", lineno)
            arcs.append((args[0], args[2], int(w), lineno))
        else:
            raise ParseError(f"unknown keyword {key!r}", lineno)
    pset = set(places)
    if pset & set(labels):
        raise ParseError("places and transitions must have distinct ids")
    for p, (_, lineno) in marking.items():
        if p not in pset:
            raise ParseError(f"undeclared place {p!r}", lineno)
    pre: dict = {}
    post: dict = {}
    for a, b, w, lineno in arcs:
        if a in pset and b in labels:
            key, table = (a, b), pre
        elif a in labels and b in pset:
            key, table = (b, a), post
        else:
            bad = a if a not in pset and a not in labels else b
            raise ParseError(f"arc must join a place and a transition; {bad!r} is not valid here",
                             lineno)
        if key in table:
            raise ParseError(f"duplicate arc {a} -> {b}", lineno)
        table[key] = w
    try:
        return LabeledPetriNet(tuple(places), tuple(labels), pre, post,
                               {p: k for p, (k, _) in marking.items()}, labels)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def serialize_net(g: LabeledPetriNet) -> str:
    lines = ["places: " + " ".join(g.places),
             "marking: " + " ".join(f"{p}={k}" for p, k in g.initial.items() if k)]
    lines[-1] = lines[-1].rstrip()
    for t in g.transitions:
        lab = g.labels[t]
        lines.append(f"transition: {t} {EPS_TOKEN if lab is None else lab}")
    for t in g.transitions:
        for p in g.places:
            if (p, t) in g.pre:
                lines.append(f"arc: {p} -> {t} {g.pre[(p, t)]}")
        for p in g.places:
            if (p, t) in g.post:
                lines.append(f"arc: {t} -> {p} {g.post[(p, t)]}")
    return "\n".join(lines) + "\n"


# -- unfolding -----------------------------------------------------------------

def reachability_lsts(g: LabeledPetriNet, budget: SearchBudget | None = None) -> Lsts:
    """The reachability graph as an automaton with marking-named states.

    :raises BoundExceeded: when more than ``budget.max_markings`` markings or
        firing sequences longer than ``budget.max_depth`` would be needed
    """
    budget = budget or SearchBudget()
    start = g.m0
    depth = {start: 0}
    queue = deque([start])
    trans = set()
    while queue:
        m = queue.popleft()
        for t in enabled(g, m):
            m2 = fire(g, m, t)
            trans.add((m, t, m2))
            if m2 not in depth:
                if len(depth) >= budget.max_markings or depth[m] + 1 > budget.max_depth:
                    raise BoundExceeded("reachability graph does not close within budget",
                                        len(queue) + 1, len(depth))
                depth[m2] = depth[m] + 1
                queue.append(m2)
    names = {m: marking_name(g, m) for m in depth}
    return Lsts(tuple(names.values()), g.transitions, g.labels,
                frozenset([names[start]]),
                frozenset((names[a], t, names[b]) for a, t, b in trans))


def marking_of(g: LabeledPetriNet, name: str) -> Marking:
    """Inverse of :func:`marking_name`."""
    if not (name.startswith("(") and name.endswith(")")):
        raise ValueError(f"not a marking name: {name!r}")
    body = name[1:-1]
    d = {}
    for item in body.split(",") if body else ():
        p, _, k = item.partition("=")
        d[p] = int(k)
    m = g.marking(d)
    if marking_name(g, m) != name:
        raise ValueError(f"not a canonical marking name: {name!r}")
    return m
