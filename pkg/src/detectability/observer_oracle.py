"""Definition-level cross-check of the automaton checkers.

The observer is the subset construction over estimates.  Each node is the
estimate reached by some observation word, and only nonempty estimates are
stored.

A finite observer path can be extended to an infinite observation exactly
when its last node contains a live state.  A live state is one from which
an observable cycle is reachable.  The reason is that the observer is
finitely branching: when every prefix of an infinite word has a nonempty
estimate, a König argument yields one infinite run producing that word.
So every infinite observer path, and in particular every reachable
observer cycle, corresponds to an infinite observation of the system.

The oracle is exponential in the number of states and is meant for small
inputs only.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .constructions import live_states
from .core import Lsts, estimate
from .fa_detect import PROPERTIES, Partition, singleton_partition
from .verdict import Verdict, Witness, fails, holds, unknown

DEFAULT_BUDGET = 1_000_000


class ObserverBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Observer:
    nodes: tuple        # StateEstimate per node; node 0 is the initial estimate
    delta: dict         # (node, label) -> node
    words: tuple        # a shortest word reaching each node
    live: tuple
    homogeneous: tuple  # per node, inside one cell (singletons when no partition)
    adj: dict           # node -> sorted successor list

    def singleton(self, k: int) -> bool:
        return len(self.nodes[k]) == 1

    def successors(self, k: int):
        return sorted({v for (u, _), v in self.delta.items() if u == k})

    def reach_from(self, k: int, allowed=None) -> set:
        """Nodes reachable from ``k`` by at least one edge, moving only
        through ``allowed`` nodes when given."""
        adj = self.adj
        seen: set = set()
        stack = [v for v in adj[k] if allowed is None or allowed(v)]
        while stack:
            u = stack.pop()
            if u in seen:
                continue
            seen.add(u)
            stack.extend(v for v in adj[u] if allowed is None or allowed(v))
        return seen



def build_observer(m: Lsts, r: Partition | None = None, budget: int = DEFAULT_BUDGET) -> Observer:
    live = live_states(m)
    first = estimate(m, ())
    nodes = [first]
    words = [()]
    code = {first: 0}
    delta = {}
    alphabet = sorted({a for a in m.labels.values() if a is not None})
    k = 0
    while k < len(nodes):
        for a in alphabet:
            w = words[k] + (a,)
            q = estimate(m, w)
            if not q:
                continue
            v = code.get(q)
            if v is None:
                if len(nodes) >= budget:
                    raise ObserverBudgetExceeded(f"observer exceeds {budget} nodes")
                v = code[q] = len(nodes)
                nodes.append(q)
                words.append(w)
            delta[(k, a)] = v
        k += 1
    if r is None:
        homog = tuple(len(q) == 1 for q in nodes)
    else:
        cell = r.cell_of()
        homog = tuple(len({cell.get(x) for x in q}) == 1 for q in nodes)
    adj = {k: [] for k in range(len(nodes))}
    for (u, _), v in sorted(delta.items()):
        if v not in adj[u]:
            adj[u].append(v)
    return Observer(tuple(nodes), delta, tuple(words),
                    tuple(bool(q & live) for q in nodes), homog, adj)


def oracle_check(m: Lsts, prop: str, r: Partition | None = None,
                 budget: int = DEFAULT_BUDGET) -> Verdict:
    """Exact verdict from the observer; ``wad`` defaults to singleton cells."""
    if prop not in PROPERTIES:
        raise ValueError(f"unknown property {prop!r}")
    if prop == "wad" and r is None:
        r = singleton_partition(m)
    obs = build_observer(m, r if prop == "wad" else None, budget)
    n = len(obs.nodes)
    on_cycle = [k in obs.reach_from(k) for k in range(n)]
    omega = any(on_cycle)
    tag = f"oracle-{prop}"

    def word_fail(k, note):
        return fails(prop, note, Witness(word=obs.words[k]), oracle=tag)

    if prop == "determinism":
        for k in range(n):
            if not obs.singleton(k):
                return word_fail(k, "non-singleton estimate")
        return holds(prop, "all estimates singletons")
    if not omega:
        return holds(prop, "no infinite observation")
    if prop == "isd":
        for k in range(n):
            if obs.live[k] and not obs.singleton(k):
                return word_fail(k, "live non-singleton estimate")
        return holds(prop, "every live estimate is a singleton")
    if prop == "sd":
        after = set()
        for k in range(n):
            if on_cycle[k]:
                after |= {k} | obs.reach_from(k)
        for k in sorted(after):
            if obs.live[k] and not obs.singleton(k):
                return word_fail(k, "live non-singleton estimate after an observer cycle")
        return holds(prop, "estimates after observer cycles are singletons or dead")
    if prop == "esd":
        for k in range(n):
            if on_cycle[k] and not obs.singleton(k):
                return word_fail(k, "non-singleton estimate on an observer cycle")
        return holds(prop, "every observer cycle consists of singletons")
    good = obs.singleton if prop == "wd" else (lambda k: obs.homogeneous[k])
    for k in range(n):
        if good(k) and k in obs.reach_from(k, good):
            return holds(prop, "observer cycle of good estimates", Witness(word=obs.words[k]))
    return fails(prop, "no observer cycle of good estimates")


def bounded_refute(m: Lsts, prop: str, depth: int, r: Partition | None = None) -> Verdict:
    """Refute by enumerating every observation word of length at most ``depth``.

    Estimates are recomputed from scratch for each word.  A pumpable
    pattern (an estimate repeated along the word) certifies infinite
    behaviour.  For ``wd`` and ``wad`` a refutation needs the full set of
    estimates, available once a whole length adds no new estimate.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if prop not in PROPERTIES:
        raise ValueError(f"unknown property {prop!r}")
    live = live_states(m)
    alphabet = sorted({a for a in m.labels.values() if a is not None})
    first = estimate(m, ())
    if prop == "determinism" and len(first) > 1:
        return fails(prop, "empty observation is ambiguous", Witness(word=()))
    if prop == "isd" and len(first) > 1 and first & live:
        return fails(prop, "empty observation is ambiguous", Witness(word=()))
    seen_by_len = [{first}]
    edges = set()
    for n in range(1, depth + 1):
        level = set()
        for w in itertools.product(alphabet, repeat=n):
            q = estimate(m, w)
            if not q:
                continue
            level.add(q)
            edges.add((estimate(m, w[:-1]), w[-1], q))
            v = _pattern(m, prop, w, q, live)
            if v is not None:
                return v
        if not level:
            break
        if prop in ("wd", "wad") and level <= set().union(*seen_by_len):
            return _closed_verdict(m, prop, r, first, edges, live)
        seen_by_len.append(level)
    return unknown(prop, f"no refutation up to length {depth}")


def _pattern(m, prop, w, q, live):
    if prop == "determinism":
        if len(q) > 1:
            return fails(prop, "ambiguous observation", Witness(word=w))
    elif prop == "isd":
        if len(q) > 1 and q & live:
            return fails(prop, "ambiguous observation that can continue forever",
                         Witness(word=w))
    elif prop in ("sd", "esd"):
        ests = [estimate(m, w[:k]) for k in range(len(w) + 1)]
        for i, j in itertools.combinations(range(len(w) + 1), 2):
            if ests[i] != ests[j]:
                continue
            if prop == "esd" and any(len(ests[k]) > 1 for k in range(i, j)):
                return fails(prop, "repeatable observation keeps an ambiguous estimate",
                             Witness(word=w[:i], word_loop=w[i:j]))
            if prop == "sd" and len(q) > 1 and q & live:
                return fails(prop, "ambiguous live estimate after a repeatable observation",
                             Witness(word=w[:i], word_loop=w[i:j]), tail=w[j:])
    return None


def _closed_verdict(m, prop, r, first, edges, live):
    if not first & live:
        return unknown(prop, "no infinite observation")
    if prop == "wd" or r is None:
        good = {q for _, _, q in edges if len(q) == 1} | ({first} if len(first) == 1 else set())
    else:
        cell = r.cell_of()
        allq = {first} | {q for _, _, q in edges} | {p for p, _, _ in edges}
        good = {q for q in allq if len({cell.get(x) for x in q}) == 1}
    adj: dict = {}
    for p, _, q in edges:
        if p in good and q in good:
            adj.setdefault(p, set()).add(q)
    for s in good:
        stack, seen = list(adj.get(s, ())), set()
        while stack:
            u = stack.pop()
            if u == s:
                return unknown(prop, "a good observer cycle exists")
            if u not in seen:
                seen.add(u)
                stack.extend(adj.get(u, ()))
    return fails(prop, "all estimates enumerated; no cycle of good estimates")


def crosscheck(m: Lsts, r: Partition | None = None, props=PROPERTIES) -> dict:
    """Map property -> (checker verdict, oracle verdict)."""
    from .fa_detect import check
    return {p: (check(m, p, r).result, oracle_check(m, p, r).result) for p in props}


__all__ = ["Observer", "ObserverBudgetExceeded", "build_observer", "oracle_check",
           "bounded_refute", "crosscheck"]
