"""Command-line front end.

Exit codes: 0 the property holds (or the command succeeded), 1 it fails,
2 unknown or budget exhausted, 3 input error.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import constructions as cons
from .core import Lsts, ParseError, _tokens, parse_lsts, random_lsts, serialize_lsts
from .fa_detect import (PROPERTIES, AssumptionError, Partition, check, detector,
                        parse_partition, quotient_automaton, serialize_partition)
from .observer_oracle import ObserverBudgetExceeded, crosscheck
from .petri import (BoundExceeded, SearchBudget, check_esd_net, check_isd_net,
                    concurrent_composition_net, emit_yen_esd_item1, emit_yen_esd_item2,
                    emit_yen_isd, extended_concurrent_composition, gadget_coverability,
                    gadget_langeq, has_bifurcation, is_prompt, marking_of, omega_nonempty_net,
                    parse_net, reachability_lsts, serialize_net, serialize_yen)
from .petri.gadgets import PartitionDescriptor
from .verdict import Result

EXIT = {Result.HOLDS: 0, Result.FAILS: 1, Result.UNKNOWN: 2}
NET_PROPERTIES = ("isd", "esd", "prompt", "omega-nonempty", "sd", "wd", "wad", "determinism")
YEN = {"isd": emit_yen_isd, "esd-item1": emit_yen_esd_item1, "esd-item2": emit_yen_esd_item2}


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _write(args, text: str) -> None:
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _load_lsts(path: str) -> Lsts:
    return parse_lsts(_read(path))


def _partition(args) -> Partition | None:
    return parse_partition(_read(args.partition)) if args.partition else None


def _budget(args) -> SearchBudget:
    return SearchBudget(args.max_markings, args.max_depth)


def _emit_verdict(args, v, started) -> int:
    text = v.report(args.witness)
    if not args.no_timing:
        text += f"time: {time.perf_counter() - started:.3f}s\n"
    _write(args, text)
    return EXIT[v.result]


# -- subcommands ------------------------------------------------------------------

def run_check(args) -> int:
    started = time.perf_counter()
    m = _load_lsts(args.model)
    return _emit_verdict(args, check(m, args.property, _partition(args)), started)


def run_construct(args) -> int:
    m = _load_lsts(args.model)
    what = args.what
    if what == "obs":
        out = cons.observation_automaton(m)
    elif what == "bifur":
        out = cons.bifurcation_automaton(m).lsts
    elif what == "cc":
        out = cons.concurrent_composition(m, accessible=True).lsts
    elif what == "detector":
        out = detector(m)
    else:
        r = _partition(args)
        if r is None:
            raise InputError("--what quotient needs --partition")
        out = quotient_automaton(m, r)
    _write(args, serialize_lsts(out))
    return 0


def _descriptor(path: str) -> PartitionDescriptor:
    return PartitionDescriptor(parse_partition(_read(path)).cells)


def _check_unfolded(args, g, budget):
    m = reachability_lsts(g, budget)
    r = None
    if args.property == "wad":
        if args.descriptor:
            r = _descriptor(args.descriptor).partition(
                g, m, {x: marking_of(g, x) for x in m.states})
        else:
            r = _partition(args)
    return check(m, args.property, r)


def run_petri(args) -> int:
    g = parse_net(_read(args.net))
    budget = _budget(args)
    action = args.action
    if action == "unfold":
        _write(args, serialize_lsts(reachability_lsts(g, budget)))
        return 0
    if action == "compose":
        _write(args, serialize_net(concurrent_composition_net(g)))
        return 0
    if action == "compose-extended":
        _write(args, serialize_net(extended_concurrent_composition(g)))
        return 0
    if action == "emit-yen":
        kind = args.property or "isd"
        if kind not in YEN:
            raise InputError(f"emit-yen needs --property in {sorted(YEN)}")
        _write(args, serialize_yen(YEN[kind](g)))
        return 0
    if action == "bifurcation":
        start = marking_of(g, args.start) if args.start else g.m0
        psi = args.sequence.split() if args.sequence else []
        found = has_bifurcation(g, start, psi, budget)
        _write(args, f"bifurcation: {'yes' if found else 'no'}\n")
        return 0 if found else 1
    started = time.perf_counter()
    prop = args.property
    if prop is None:
        raise InputError("petri check needs --property")
    fn = {"isd": check_isd_net, "esd": check_esd_net, "prompt": is_prompt,
          "omega-nonempty": omega_nonempty_net}.get(prop)
    v = fn(g, budget) if fn else _check_unfolded(args, g, budget)
    return _emit_verdict(args, v, started)


def _target(g, text: str):
    tokens = {}
    for lineno, key, vals in _tokens(text):
        if key != "marking":
            raise ParseError(f"unknown keyword {key!r}", lineno)
        for item in vals:
            p, eq, k = item.partition("=")
            if not eq or not k.isdigit():
                raise ParseError(f"expected <place>=<tokens>, got {item!r}", lineno)
            tokens[p] = int(k)
    return g.marking(tokens)


def run_gen(args) -> int:
    if args.kind == "coverability":
        if len(args.inputs) != 2:
            raise InputError("gen coverability needs a net and a target marking")
        g = parse_net(_read(args.inputs[0]))
        _write(args, serialize_net(gadget_coverability(g, _target(g, _read(args.inputs[1])))))
        return 0
    if len(args.inputs) != 2:
        raise InputError("gen langeq needs two nets")
    g1, g2 = (parse_net(_read(p)) for p in args.inputs)
    net, desc = gadget_langeq(g1, g2, cells=args.cells)
    cells = serialize_partition(Partition(desc.cells))
    dest = args.descriptor or (args.output + ".cells" if args.output else None)
    if dest:
        _write(args, serialize_net(net))
        Path(dest).write_text(cells)
    else:
        _write(args, serialize_net(net) + "".join("# " + x + "\n" for x in cells.splitlines()))
    return 0


def _seeds(spec: str) -> range:
    lo, sep, hi = spec.partition("..")
    try:
        return range(int(lo), int(hi if sep else lo) + 1)
    except ValueError:
        raise InputError(f"--seeds expects a..b, got {spec!r}") from None


def run_crosscheck(args) -> int:
    props = PROPERTIES
    if args.model:
        instances = [(args.model, _load_lsts(args.model))]
    elif args.seeds:
        instances = [(f"seed {s}", random_lsts(s, args.max_states)) for s in _seeds(args.seeds)]
    else:
        raise InputError("crosscheck needs a model or --seeds")
    r = _partition(args)
    lines = []
    disagree = skipped = 0
    for name, m in instances:
        try:
            table = crosscheck(m, r, props)
        except ObserverBudgetExceeded as exc:
            skipped += 1
            lines.append(f"{name}: skipped ({exc})")
            continue
        bad = [p for p, (a, b) in table.items() if a != b]
        disagree += bool(bad)
        if len(instances) == 1 or bad:
            lines.append(f"{name}:")
            lines += [f"  {p}: {a}/{b}" + ("  MISMATCH" if a != b else "")
                      for p, (a, b) in table.items()]
    lines.append(f"instances: {len(instances)}  disagreements: {disagree}  skipped: {skipped}")
    _write(args, "\n".join(lines) + "\n")
    return 0 if disagree == 0 else 1


# -- parser -----------------------------------------------------------------------

def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="detectability",
                                 description="Detectability of automata and labeled Petri nets.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, budget=False):
        p.add_argument("-o", "--output", help="write the result here instead of stdout")
        p.add_argument("--witness", action="store_true", help="include the witness in reports")
        p.add_argument("--no-timing", action="store_true", help="omit the timing line")
        p.add_argument("--partition", help="partition document (cell: ... lines)")
        if budget:
            p.add_argument("--max-markings", type=_positive, default=10_000)
            p.add_argument("--max-depth", type=_positive, default=1_000)

    p = sub.add_parser("check", help="decide a property of an automaton")
    p.add_argument("model")
    p.add_argument("--property", required=True, choices=PROPERTIES)
    common(p)
    p.set_defaults(run=run_check)

    p = sub.add_parser("construct", help="derived automata")
    p.add_argument("model")
    p.add_argument("--what", required=True, choices=("obs", "bifur", "cc", "detector", "quotient"))
    common(p)
    p.set_defaults(run=run_construct)

    p = sub.add_parser("petri", help="labeled Petri net actions")
    p.add_argument("net")
    p.add_argument("action", choices=("unfold", "compose", "compose-extended", "check",
                                      "emit-yen", "bifurcation"))
    p.add_argument("--property", choices=NET_PROPERTIES + tuple(k for k in YEN if k != "isd"))
    p.add_argument("--descriptor", help="cells of gadget places (for wad on gadget nets)")
    p.add_argument("--sequence", help="space-separated transitions (bifurcation)")
    p.add_argument("--start", help="start marking name, default the initial marking")
    common(p, budget=True)
    p.set_defaults(run=run_petri)

    p = sub.add_parser("gen", help="reduction gadgets")
    p.add_argument("kind", choices=("coverability", "langeq"))
    p.add_argument("inputs", nargs="+")
    p.add_argument("--cells", type=int, default=2)
    p.add_argument("--descriptor", help="where to write the cell descriptor (langeq)")
    common(p)
    p.set_defaults(run=run_gen)

    p = sub.add_parser("crosscheck", help="compare the checkers with the observer oracle")
    p.add_argument("model", nargs="?")
    p.add_argument("--seeds")
    p.add_argument("--max-states", type=_positive, default=6)
    common(p)
    p.set_defaults(run=run_crosscheck)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 3
    try:
        return args.run(args)
    except BoundExceeded as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        print(f"frontier: {exc.frontier}", file=sys.stderr)
        return 2
    except ParseError as exc:
        where = f" (line {exc.lineno})" if exc.lineno else ""
        print(f"parse error{where}: {exc}", file=sys.stderr)
        return 3
    except (InputError, AssumptionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
