"""Verdicts and witnesses shared by the automaton and net checkers."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class Result(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    UNKNOWN = "unknown"

    def __str__(self):
        return self.value


Step = tuple  # (state, event, state)


@dataclass(frozen=True)
class Witness:
    """A run or a lasso, optionally followed by a tail and a continuation.

    ``stem`` then ``loop`` (repeatable) then ``tail``.  ``continuation`` is a
    second witness starting where ``tail`` ends; strong-detectability
    failures use it to extend a pair run by an infinite run.  ``word`` and
    ``word_loop`` carry label-level lassos when no single run is meant.
    """

    stem: tuple = ()
    loop: tuple = ()
    tail: tuple = ()
    continuation: "Witness | None" = None
    word: tuple = ()
    word_loop: tuple = ()
    start: tuple = ()

    def lines(self) -> list:
        out = []
        if self.start:
            out.append("start: " + " ".join(self.start))
        if self.word or self.word_loop:
            out.append("word: " + " ".join(self.word))
            out.append("word-loop: " + " ".join(self.word_loop))
        out += [f"step: {x} {t} {y}" for x, t, y in self.stem]
        if self.loop:
            out.append("loop:")
            out += [f"step: {x} {t} {y}" for x, t, y in self.loop]
        if self.tail:
            out.append("tail:")
            out += [f"step: {x} {t} {y}" for x, t, y in self.tail]
        if self.continuation is not None:
            out.append("continuation:")
            out += self.continuation.lines()
        return out


@dataclass(frozen=True)
class Verdict:
    prop: str
    result: Result
    witness: Witness | None = None
    note: str = ""
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def holds(self) -> bool:
        return self.result is Result.HOLDS

    @property
    def fails(self) -> bool:
        return self.result is Result.FAILS

    def report(self, witness: bool = True) -> str:
        out = [f"property: {self.prop}", f"result: {self.result.value}"]
        if self.note:
            out.append(f"note: {self.note}")
        if witness and self.witness is not None:
            out.append("witness:")
            out += self.witness.lines()
        return "\n".join(out) + "\n"


def holds(prop, note="", witness=None, **extra):
    return Verdict(prop, Result.HOLDS, witness, note, extra)


def fails(prop, note="", witness=None, **extra):
    return Verdict(prop, Result.FAILS, witness, note, extra)


def unknown(prop, note="", witness=None, **extra):
    return Verdict(prop, Result.UNKNOWN, witness, note, extra)
