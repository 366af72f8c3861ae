"""Self-compositions of a labeled net.

Each place ``p`` gets a left copy ``p__1`` and a right copy ``p__2``.
Transitions are named after the pair of original transitions they move:
``t__u`` for synchronised observable moves, ``t__eps``/``eps__t`` for
unobservable moves of one side, and in the extended composition
``t__phi``/``phi__t`` for a move of one side while the other stutters.
"""
from __future__ import annotations

from dataclasses import dataclass

from .net import LabeledPetriNet, Marking

SEP = "__"
EPS = "eps"
PHI = "phi"
RESERVED = (EPS, PHI)


def _check_ids(g: LabeledPetriNet) -> None:
    for x in g.places + g.transitions:
        if x in RESERVED or SEP in x:
            raise ValueError(f"id {x!r} is reserved in compositions (no {SEP!r}, not eps/phi)")


def place_copy(p: str, side: int) -> str:
    return f"{p}{SEP}{side}"


def transition_pair(t: str | None, u: str | None, stutter: bool = False) -> str:
    blank = PHI if stutter else EPS
    return f"{t or blank}{SEP}{u or blank}"


@dataclass(frozen=True)
class Composition:
    """A composed net with bookkeeping back to the original.

    ``moves`` maps each composed transition to ``(left, right, kind)`` where
    ``kind`` is one of ``"obs"``, ``"eps"``, ``"phi1"`` and ``"phi2"`` and
    ``None`` stands for a side that does not move.
    """

    base: LabeledPetriNet
    net: LabeledPetriNet
    moves: dict

    def split(self, m: Marking) -> tuple:
        """Left and right halves of a composed marking as base markings."""
        d = self.net.as_dict(m)
        return (tuple(d[place_copy(p, 1)] for p in self.base.places),
                tuple(d[place_copy(p, 2)] for p in self.base.places))

    def join(self, left: Marking, right: Marking) -> Marking:
        d = {}
        for p, a, b in zip(self.base.places, left, right):
            d[place_copy(p, 1)] = a
            d[place_copy(p, 2)] = b
        return self.net.marking(d)

    def kind(self, t: str) -> str:
        return self.moves[t][2]

    def left_move(self, t: str):
        return self.moves[t][0]

    def right_move(self, t: str):
        return self.moves[t][1]


def _build(g: LabeledPetriNet, extended: bool) -> Composition:
    _check_ids(g)
    places = [place_copy(p, k) for p in g.places for k in (1, 2)]
    moves: dict = {}
    lab = g.labels
    for t in g.transitions:
        for u in g.transitions:
            if lab[t] is not None and lab[t] == lab[u]:
                moves[transition_pair(t, u)] = (t, u, "obs")
    for t in g.transitions:
        if lab[t] is None:
            moves[transition_pair(t, None)] = (t, None, "eps")
            moves[transition_pair(None, t)] = (None, t, "eps")
    if extended:
        for t in g.transitions:
            moves[transition_pair(t, None, True)] = (t, None, "phi1")
            moves[transition_pair(None, t, True)] = (None, t, "phi2")
    pre: dict = {}
    post: dict = {}
    labels: dict = {}
    for name, (t, u, _) in moves.items():
        for side, x in ((1, t), (2, u)):
            if x is None:
                continue
            for (p, tt), w in g.pre.items():
                if tt == x:
                    pre[(place_copy(p, side), name)] = w
            for (p, tt), w in g.post.items():
                if tt == x:
                    post[(place_copy(p, side), name)] = w
        labels[name] = lab[t] if t is not None else lab[u]
    initial = {}
    for p, k in g.initial.items():
        initial[place_copy(p, 1)] = k
        initial[place_copy(p, 2)] = k
    net = LabeledPetriNet(tuple(places), tuple(moves), pre, post, initial, labels)
    return Composition(g, net, moves)


def compose(g: LabeledPetriNet) -> Composition:
    return _build(g, extended=False)


def compose_extended(g: LabeledPetriNet) -> Composition:
    return _build(g, extended=True)


def concurrent_composition_net(g: LabeledPetriNet) -> LabeledPetriNet:
    """Observable moves synchronise on equal labels; unobservable ones interleave."""
    return compose(g).net


def extended_concurrent_composition(g: LabeledPetriNet) -> LabeledPetriNet:
    """The concurrent composition plus every one-sided move against a stutter."""
    return compose_extended(g).net
