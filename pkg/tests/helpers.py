"""Independent oracles and generators shared by the test modules."""
from __future__ import annotations

import random
from collections import deque
from pathlib import Path

from detectability.core import Lsts, estimate, parse_lsts
from detectability.petri import LabeledPetriNet, enabled, fire, parse_net

FIXTURES = Path(__file__).parent / "fixtures"


def lsts(name: str) -> Lsts:
    return parse_lsts((FIXTURES / f"{name}.lsts").read_text())


def net(name: str) -> LabeledPetriNet:
    return parse_net((FIXTURES / f"{name}.net").read_text())


def replays(m: Lsts, steps) -> bool:
    """Consecutive steps that are all transitions of ``m``."""
    steps = list(steps)
    if any(s not in m.transitions for s in steps):
        return False
    return all(a[2] == b[0] for a, b in zip(steps, steps[1:]))


def reachable_markings(g: LabeledPetriNet, cap: int = 100_000) -> set | None:
    """Plain BFS over markings; None when more than ``cap`` are found."""
    seen = {g.m0}
    queue = deque([g.m0])
    while queue:
        m = queue.popleft()
        for t in enabled(g, m):
            m2 = fire(g, m, t)
            if m2 not in seen:
                if len(seen) >= cap:
                    return None
                seen.add(m2)
                queue.append(m2)
    return seen


def covers(g: LabeledPetriNet, target) -> bool:
    return any(all(a >= b for a, b in zip(m, target)) for m in reachable_markings(g))


def random_net(seed: int, places: int = 3, transitions: int = 4, labels=("a", "b"),
               eps: bool = False, max_weight: int = 2, tokens: int = 2) -> LabeledPetriNet:
    rng = random.Random(seed)
    ps = [f"q{i}" for i in range(rng.randint(1, places))]
    ts = [f"u{i}" for i in range(rng.randint(1, transitions))]
    pre, post = {}, {}
    for t in ts:
        for p in rng.sample(ps, rng.randint(1, len(ps))):
            pre[(p, t)] = rng.randint(1, max_weight)
        for p in rng.sample(ps, rng.randint(0, len(ps))):
            post[(p, t)] = rng.randint(1, max_weight)
    pool = list(labels) + ([None] if eps else [])
    lab = {t: rng.choice(pool) for t in ts}
    init = {p: rng.randint(0, tokens) for p in ps}
    init[ps[0]] = max(init[ps[0]], 1)
    return LabeledPetriNet(tuple(ps), tuple(ts), pre, post, init, lab)


def random_bounded_net(seed: int, cap: int = 200, **kw) -> tuple:
    """First net from ``seed`` upward whose reachability set has at most ``cap`` markings."""
    s = seed
    while True:
        g = random_net(s, **kw)
        r = reachable_markings(g, cap)
        if r is not None:
            return s, g, r
        s += 10_000


def language_upto(m: Lsts, depth: int) -> set:
    """All label words of length at most ``depth`` with a nonempty estimate."""
    out = {()}
    frontier = [()]
    for _ in range(depth):
        nxt = []
        for w in frontier:
            for a in m.alphabet:
                w2 = w + (a,)
                if estimate(m, w2):
                    out.add(w2)
                    nxt.append(w2)
        frontier = nxt
    return out


def subset_product_size(m1: Lsts, m2: Lsts) -> int:
    """Number of reachable pairs of estimates; a shortest word in one
    language but not the other is shorter than this."""
    first = (estimate(m1, ()), estimate(m2, ()))
    seen = {first: ()}
    queue = deque([first])
    alphabet = sorted(set(m1.alphabet) | set(m2.alphabet))
    while queue:
        q = queue.popleft()
        w = seen[q]
        if not q[0] or not q[1]:
            continue
        for a in alphabet:
            r = (estimate(m1, w + (a,)), estimate(m2, w + (a,)))
            if r not in seen:
                seen[r] = w + (a,)
                queue.append(r)
    return len(seen)


def renamed(g: LabeledPetriNet, suffix: str, relabel=None) -> LabeledPetriNet:
    rp = {p: p + suffix for p in g.places}
    rt = {t: t + suffix for t in g.transitions}
    relabel = relabel or {}
    return LabeledPetriNet(
        tuple(rp.values()), tuple(rt.values()),
        {(rp[p], rt[t]): w for (p, t), w in g.pre.items()},
        {(rp[p], rt[t]): w for (p, t), w in g.post.items()},
        {rp[p]: k for p, k in g.initial.items()},
        {rt[t]: relabel.get(t, lab) for t, lab in g.labels.items()})


def with_dead(g, labels, suffix):
    """Add an unmarked place feeding one dead transition per label."""
    p = "dead" + suffix
    ts = {f"dx{i}{suffix}": lab for i, lab in enumerate(sorted(labels))}
    return LabeledPetriNet(g.places + (p,), g.transitions + tuple(ts),
                           {**g.pre, **{(p, t): 1 for t in ts}}, g.post, g.initial,
                           {**g.labels, **ts})
