"""Path-formula instances for external solvers.

A gated copy of a composition is built first: a place ``run__gate__p0``
holding one token, an empty place ``run__gate__p1``, a transition
``run__gate__r1`` moving the token across, and a self-loop on
``run__gate__p1`` for every other transition.  Nothing fires before the
gate transition, so pinning ``s1`` to it makes ``M1`` equal the initial
marking of the composition.  Both halves of that marking agree, which is
what lets "the halves of ``Mk`` differ" be written as the
difference-of-markings clause ``(Mk - M1)|P1 != (Mk - M1)|P2``.

The formula is a tree of tuples ``(op, arg, ...)`` with operators
``and``, ``=`` (sequence pinned to one transition), ``in-set`` (sequence
over a transition set), ``contains-label`` (sequence contains a transition
of a set), ``>=`` (componentwise on listed places) and ``!=diff``.  Sets
and place lists are ``("set", id, ...)`` nodes.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .compose import Composition, compose, compose_extended, place_copy
from .net import LabeledPetriNet, serialize_net

GATE_P0 = "run__gate__p0"
GATE_P1 = "run__gate__p1"
GATE_R1 = "run__gate__r1"
_VAR = re.compile(r"[Ms]\d+\Z")
_OPS = {"and", "=", "in-set", "contains-label", ">=", "!=diff"}


@dataclass(frozen=True)
class YenInstance:
    net: LabeledPetriNet
    marking_vars: tuple
    sequence_vars: tuple
    formula: tuple

    def references(self) -> tuple:
        """Variables and node ids used by the formula."""
        vars_, ids = set(), set()

        def walk(node):
            if isinstance(node, tuple):
                if node[0] == "set":
                    ids.update(node[1:])
                    return
                for x in node[1:]:
                    walk(x)
            elif _VAR.match(node):
                vars_.add(node)
            else:
                ids.add(node)
        walk(self.formula)
        return vars_, ids

    def validate(self) -> None:
        vars_, ids = self.references()
        declared = set(self.marking_vars) | set(self.sequence_vars)
        if vars_ - declared:
            raise ValueError(f"undeclared variable {sorted(vars_ - declared)[0]}")
        known = set(self.net.places) | set(self.net.transitions)
        if ids - known:
            raise ValueError(f"unknown id {sorted(ids - known)[0]}")

        def ops(node):
            if isinstance(node, tuple) and node[0] != "set":
                if node[0] not in _OPS:
                    raise ValueError(f"unknown operator {node[0]!r}")
                for x in node[1:]:
                    ops(x)
        ops(self.formula)

    def pinned(self) -> dict:
        """Sequence variables pinned to a single transition."""
        return {c[1]: c[2] for c in self.formula[1:] if c[0] == "="}


def serialize_yen(y: YenInstance) -> str:
    lines = [serialize_net(y.net).rstrip("\n"),
             "variables: " + " ".join(y.marking_vars + y.sequence_vars),
             "formula:", "(and"]
    lines += ["  " + _sexpr(c) for c in y.formula[1:]]
    lines[-1] += ")"
    return "\n".join(lines) + "\n"


def _sexpr(node) -> str:
    if isinstance(node, tuple):
        if node[0] == "set":
            return "(" + " ".join(node[1:]) + ")"
        return "(" + " ".join(_sexpr(x) for x in node) + ")"
    return node


def _gated(comp: Composition) -> LabeledPetriNet:
    g = comp.net
    pre = dict(g.pre)
    post = dict(g.post)
    for t in g.transitions:
        pre[(GATE_P1, t)] = 1
        post[(GATE_P1, t)] = 1
    pre[(GATE_P0, GATE_R1)] = 1
    post[(GATE_P1, GATE_R1)] = 1
    initial = dict(g.initial)
    initial[GATE_P0] = 1
    labels = dict(g.labels)
    labels[GATE_R1] = None
    return LabeledPetriNet(g.places + (GATE_P0, GATE_P1), g.transitions + (GATE_R1,),
                           pre, post, initial, labels)


def _halves(comp: Composition):
    ps = comp.base.places
    return ("set",) + tuple(place_copy(p, 1) for p in ps), \
        ("set",) + tuple(place_copy(p, 2) for p in ps)


def _tset(comp: Composition, kinds) -> tuple:
    return ("set",) + tuple(t for t in comp.net.transitions if comp.kind(t) in kinds)


def _left_observable(comp: Composition, kinds) -> tuple:
    lab = comp.base.labels
    return ("set",) + tuple(t for t in comp.net.transitions if comp.kind(t) in kinds
                            and comp.left_move(t) is not None
                            and lab[comp.left_move(t)] is not None)


def _instance(net, n: int, clauses) -> YenInstance:
    y = YenInstance(net, tuple(f"M{i}" for i in range(1, n + 1)),
                    tuple(f"s{i}" for i in range(1, n + 1)), ("and",) + tuple(clauses))
    y.validate()
    return y


def emit_yen_isd(g: LabeledPetriNet) -> YenInstance:
    """Two runs with equal labels reach distinct markings and the first
    continues by a repetitive observable sequence (four steps, the first
    being the gate)."""
    comp = compose_extended(g)
    left, right = _halves(comp)
    sync = ("obs", "eps")
    free = ("obs", "eps", "phi1")
    return _instance(_gated(comp), 4, [
        ("=", "s1", GATE_R1),
        ("in-set", "s2", _tset(comp, sync)),
        ("!=diff", "M2", "M1", left, right),
        ("in-set", "s3", _tset(comp, free)),
        ("in-set", "s4", _tset(comp, free)),
        ("contains-label", "s4", _left_observable(comp, free)),
        (">=", "M4", "M3", left),
    ])


def emit_yen_esd_item1(g: LabeledPetriNet) -> YenInstance:
    """A repetitive composition sequence with a synchronised observable
    move that ends at distinct halves."""
    comp = compose(g)
    left, right = _halves(comp)
    return _instance(_gated(comp), 3, [
        ("=", "s1", GATE_R1),
        (">=", "M3", "M2", ("set",) + comp.net.places),
        ("contains-label", "s3", _tset(comp, ("obs",))),
        ("!=diff", "M3", "M1", left, right),
    ])


def emit_yen_esd_item2(g: LabeledPetriNet) -> YenInstance:
    """A repetitive observable sequence with a bifurcation: the composition
    first splits into distinct halves and then the left half repeats an
    observable sequence while the right half stutters or follows."""
    comp = compose_extended(g)
    left, right = _halves(comp)
    sync = ("obs", "eps")
    free = ("obs", "eps", "phi1")
    return _instance(_gated(comp), 4, [
        ("=", "s1", GATE_R1),
        ("in-set", "s2", _tset(comp, sync)),
        ("in-set", "s3", _tset(comp, sync)),
        ("!=diff", "M3", "M1", left, right),
        ("in-set", "s4", _tset(comp, free)),
        ("contains-label", "s4", _left_observable(comp, free)),
        (">=", "M4", "M2", ("set",) + comp.net.places),
    ])
