"""Labeled state-transition systems and their observation semantics.

An :class:`Lsts` is a finite automaton whose events carry labels from an
alphabet or the empty word.  Unobservable events are labeled ``None``
in memory and written as ``.`` in documents.
"""
from __future__ import annotations

import random
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

EPS_TOKEN = "."

Label = Optional[str]
StateEstimate = frozenset
Transition = tuple  # (source, event, target)

_ID = re.compile(r"[A-Za-z0-9_]+\Z")
# state ids may also be canonical marking names such as (p1=1,p2=0)
_STATE_ID = re.compile(r"[A-Za-z0-9_(),=]+\Z")


class ParseError(ValueError):
    """Malformed document.  ``lineno`` is 1-based, or ``None``."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


def is_observable(label: Label) -> bool:
    return label is not None


@dataclass(frozen=True, eq=True)
class Lsts:
    """A finite labeled state-transition system.

    States and events are kept sorted; duplicate transitions collapse.

    :param states: state ids
    :param events: event ids
    :param labels: event id to label (``None`` for the empty word)
    :param initial: non-empty subset of ``states``
    :param transitions: ``(source, event, target)`` triples
    """

    states: tuple
    events: tuple
    labels: Mapping[str, Label]
    initial: frozenset
    transitions: frozenset = field(default_factory=frozenset)

    __hash__ = None  # labels is a dict

    def __post_init__(self):
        states = tuple(sorted(set(self.states)))
        events = tuple(sorted(set(self.events)))
        if len(states) != len(self.states):
            raise ValueError("duplicate state id")
        if len(events) != len(self.events):
            raise ValueError("duplicate event id")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "events", events)
        object.__setattr__(self, "labels", {e: self.labels[e] for e in events})
        object.__setattr__(self, "initial", frozenset(self.initial))
        object.__setattr__(self, "transitions", frozenset(self.transitions))
        self._validate()

    def _validate(self):
        sset = set(self.states)
        if not self.initial:
            raise ValueError("initial set must be non-empty")
        for x in self.initial:
            if x not in sset:
                raise ValueError(f"initial state {x!r} is not declared")
        for label in self.labels.values():
            if label == EPS_TOKEN or (label is not None and not label):
                raise ValueError(f"invalid label {label!r}")
        for x, t, y in self.transitions:
            if x not in sset:
                raise ValueError(f"undeclared state {x!r}")
            if y not in sset:
                raise ValueError(f"undeclared state {y!r}")
            if t not in self.labels:
                raise ValueError(f"undeclared event {t!r}")

    # -- integer-indexed views, computed once -----------------------------

    @cached_property
    def index(self) -> dict:
        return {x: i for i, x in enumerate(self.states)}

    @cached_property
    def out(self) -> tuple:
        """Per state index, a tuple of ``(event, target_index)``."""
        idx = self.index
        buckets = [[] for _ in self.states]
        for x, t, y in sorted(self.transitions):
            buckets[idx[x]].append((t, idx[y]))
        return tuple(tuple(b) for b in buckets)

    @cached_property
    def eps_succ(self) -> tuple:
        lab = self.labels
        return tuple(tuple(sorted({j for t, j in row if lab[t] is None})) for row in self.out)

    @cached_property
    def obs_succ(self) -> tuple:
        """Per state index, a dict label -> sorted tuple of target indices."""
        lab = self.labels
        rows = []
        for row in self.out:
            d: dict = {}
            for t, j in row:
                a = lab[t]
                if a is not None:
                    d.setdefault(a, set()).add(j)
            rows.append({a: tuple(sorted(js)) for a, js in d.items()})
        return tuple(rows)

    @cached_property
    def alphabet(self) -> tuple:
        return tuple(sorted({a for a in self.labels.values() if a is not None}))

    def label(self, event: str) -> Label:
        return self.labels[event]


# -- documents --------------------------------------------------------------

def _tokens(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ParseError(f"expected '<keyword>: ...', got {line!r}", lineno)
        key, rest = line.split(":", 1)
        yield lineno, key.strip(), rest.split()


def _check_id(tok: str, lineno: int, pattern=_ID) -> str:
    if tok == EPS_TOKEN or not pattern.match(tok):
        raise ParseError(f"invalid id {tok!r}", lineno)
    return tok


def parse_lsts(text: str) -> Lsts:
    """Parse an automaton document into an :class:`Lsts`."""
    states: list = []
    initial: list = []
    labels: dict = {}
    trans: list = []
    seen_states = seen_initial = False
    for lineno, key, args in _tokens(text):
        if key == "states":
            seen_states = True
            for s in args:
                _check_id(s, lineno, _STATE_ID)
                if s in states:
                    raise ParseError(f"duplicate state {s!r}", lineno)
                states.append(s)
        elif key == "initial":
            seen_initial = True
            initial.extend((s, lineno) for s in args)
        elif key == "event":
            if len(args) != 2:
                raise ParseError("expected 'event: <id> <label-or-.>'", lineno)
            e, lab = args
            _check_id(e, lineno)
            if e in labels:
                raise ParseError(f"duplicate event {e!r}", lineno)
            labels[e] = None if lab == EPS_TOKEN else _check_id(lab, lineno)
        elif key == "trans":
            if len(args) != 3:
                raise ParseError("expected 'trans: <state> <event> <state>'", lineno)
            trans.append((tuple(args), lineno))
        else:
            raise ParseError(f"unknown keyword {key!r}", lineno)
    if not seen_states:
        raise ParseError("missing 'states:' line")
    if not seen_initial or not initial:
        raise ParseError("missing 'initial:' line")
    if not labels:
        raise ParseError("at least one 'event:' line is required")
    sset = set(states)
    for s, lineno in initial:
        if s not in sset:
            raise ParseError(f"undeclared state {s!r}", lineno)
    for (x, t, y), lineno in trans:
        for s in (x, y):
            if s not in sset:
                raise ParseError(f"undeclared state {s!r}", lineno)
        if t not in labels:
            raise ParseError(f"undeclared event {t!r}", lineno)
    return Lsts(tuple(states), tuple(labels), labels,
                frozenset(s for s, _ in initial), frozenset(t for t, _ in trans))


def serialize_lsts(m: Lsts) -> str:
    lines = ["states: " + " ".join(m.states),
             "initial: " + " ".join(sorted(m.initial))]
    for e in m.events:
        lab = m.labels[e]
        lines.append(f"event: {e} {EPS_TOKEN if lab is None else lab}")
    for x, t, y in sorted(m.transitions):
        lines.append(f"trans: {x} {t} {y}")
    return "\n".join(lines) + "\n"


# -- observation semantics ----------------------------------------------------

def _closure_idx(m: Lsts, q: Iterable[int]) -> set:
    seen = set(q)
    stack = list(seen)
    eps = m.eps_succ
    while stack:
        i = stack.pop()
        for j in eps[i]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return seen


def _to_names(m: Lsts, idx: Iterable[int]) -> frozenset:
    st = m.states
    return frozenset(st[i] for i in idx)


def eps_closure(m: Lsts, q: Iterable[str]) -> frozenset:
    """Smallest superset of ``q`` closed under ε-labeled transitions."""
    return _to_names(m, _closure_idx(m, (m.index[x] for x in q)))


def initial_estimate_idx(m: Lsts) -> frozenset:
    return frozenset(_closure_idx(m, (m.index[x] for x in m.initial)))


def step_idx(m: Lsts, q: Iterable[int], a: str) -> frozenset:
    """Estimate update on index sets: observable ``a`` then ε-closure."""
    succ = set()
    obs = m.obs_succ
    for i in q:
        succ.update(obs[i].get(a, ()))
    return frozenset(_closure_idx(m, succ))


def estimate(m: Lsts, word: Sequence[str]) -> frozenset:
    """The set of states consistent with observing ``word``."""
    q = initial_estimate_idx(m)
    for a in word:
        if a is None or a == EPS_TOKEN:
            raise ValueError("label words contain observable labels only")
        q = step_idx(m, q, a)
        if not q:
            break
    return _to_names(m, q)


def canonical(q: Iterable[str]) -> tuple:
    return tuple(sorted(q))


def reachable_idx(m: Lsts, start: Iterable[int]) -> set:
    seen = set(start)
    queue = deque(seen)
    out = m.out
    while queue:
        i = queue.popleft()
        for _, j in out[i]:
            if j not in seen:
                seen.add(j)
                queue.append(j)
    return seen


def accessible_part(m: Lsts) -> Lsts:
    """Restrict ``m`` to the states reachable from its initial set."""
    keep = reachable_idx(m, (m.index[x] for x in m.initial))
    if len(keep) == len(m.states):
        return m
    names = _to_names(m, keep)
    trans = frozenset(tr for tr in m.transitions if tr[0] in names)
    return Lsts(tuple(names), m.events, m.labels, m.initial, trans)


def restrict_initial(m: Lsts, initial: Iterable[str]) -> Lsts:
    """Same system with a different initial set."""
    return Lsts(m.states, m.events, m.labels, frozenset(initial), m.transitions)


def is_deterministic(m: Lsts) -> bool:
    seen = {}
    for x, t, y in m.transitions:
        if seen.setdefault((x, t), y) != y:
            return False
    return True


def directly_observed(m: Lsts) -> bool:
    labs = list(m.labels.values())
    return None not in labs and len(set(labs)) == len(labs)


def random_lsts(seed: int, max_states: int = 6, max_events: int = 6,
                max_labels: int = 3, *, epsilon: bool = True,
                max_transitions: int | None = None, max_initial: int = 2,
                deterministic: bool = False, direct: bool = False,
                exact: bool = False) -> Lsts:
    """Reproducible random system within the given limits.

    With ``exact`` the state and event counts equal the maxima instead of
    being drawn.  ``direct`` gives every event its own observable label
    (``max_labels`` is then ignored).
    """
    if max_states < 1 or max_events < 1 or max_labels < 1:
        raise ValueError("limits must be positive")
    rng = random.Random(seed)
    n = max_states if exact else rng.randint(1, max_states)
    k = max_events if exact else rng.randint(1, max_events)
    states = [f"x{i}" for i in range(n)]
    events = [f"e{i}" for i in range(k)]
    if direct:
        labels = {e: f"a{i}" for i, e in enumerate(events)}
    else:
        alphabet = [f"a{i}" for i in range(rng.randint(1, max_labels))]
        pool = alphabet + ([None] if epsilon else [])
        labels = {e: rng.choice(pool) for e in events}
    if max_transitions is None:
        max_transitions = 2 * n + 2
    ntrans = max_transitions if exact else rng.randint(0, max_transitions)
    trans = set()
    taken = set()
    for _ in range(ntrans):
        x, t, y = rng.choice(states), rng.choice(events), rng.choice(states)
        if deterministic:
            if (x, t) in taken:
                continue
            taken.add((x, t))
        trans.add((x, t, y))
    ninit = rng.randint(1, min(max_initial, n))
    initial = frozenset(rng.sample(states, ninit))
    return Lsts(tuple(states), tuple(events), labels, initial, frozenset(trans))
