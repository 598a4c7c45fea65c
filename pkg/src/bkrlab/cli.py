"""Command line interface.

Exit codes: 0 success, 1 property violation, 2 usage / input error,
3 resource limit. Failures print one line ``error[<category>]: <reason>``
on stderr.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys
from fractions import Fraction
from pathlib import Path

from . import assoc, fuzz
from .bkr import bkr2, bkr_r, chained_product
from .config import BKRInputError, ResourceLimitError
from .dyadic import ascii_map, dump_dyadic, section4_construction
from .formats import dump_event, load_event, parse_event_text, read_dyadic, read_event
from .measure import check_bkr2, check_bkr_r, event_probability, parse_measure, uniform
from .quantile import (level_set_measure, parse_distribution, pullback, quantile,
                       support_measure)
from .space import Event, SpaceShape
from .trees import left_comb, parse_tree, render

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"error[usage]: {message}\n")


_stdin_cache: bytes | None = None


def _load_event(path: str) -> Event:
    global _stdin_cache
    if path != "-":
        if not Path(path).exists():
            raise BKRInputError(f"no such file: {path}")
        return read_event(path)
    if _stdin_cache is None:
        _stdin_cache = sys.stdin.buffer.read()
    if _stdin_cache[:4] == b"BKR1":
        return load_event(_stdin_cache)
    return parse_event_text(_stdin_cache.decode("utf-8"))


def _emit(args, text: str, binary: bytes | None = None) -> None:
    """Report to stdout; the binary payload (if any) goes to --out."""
    sys.stdout.write(text)
    if binary is not None and args.out:
        Path(args.out).write_bytes(binary)


def _report_out(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, default=str) + "\n"


def _seed(args) -> int:
    if args.seed is None:
        args.seed = secrets.randbelow(2**32)
        print(f"seed: {args.seed}", file=sys.stderr, flush=True)
    return args.seed


def _measure_for(args, shape: SpaceShape):
    if getattr(args, "measure", None):
        p = parse_measure(Path(args.measure).read_text())
        if p.shape != shape:
            raise BKRInputError(f"measure shape {p.shape} does not match event shape {shape}")
        return p, "file"
    return uniform(shape), "uniform"


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise BKRInputError(f"not a rational number: {text!r}") from None


def _check_dict(res) -> dict:
    return {"lhs": str(res.lhs), "rhs": str(res.rhs), "holds": res.holds}


# -- subcommands -------------------------------------------------------------------

def cmd_prod(args) -> int:
    a, b = _load_event(args.a), _load_event(args.b)
    out = bkr2(a, b)
    p, kind = _measure_for(args, a.shape)
    res = check_bkr2(p, a, b)
    _emit(args, _dump({
        "command": "prod", "shape": str(a.shape), "points": a.shape.n_points,
        "card_a": len(a), "card_b": len(b), "card_prod": len(out),
        "sha256_prod": out.digest(), "measure": kind, "check": _check_dict(res),
    }), dump_event(out))
    return EXIT_OK if res.holds else EXIT_VIOLATION


def cmd_rfold(args) -> int:
    events = [_load_event(f) for f in args.files]
    out = bkr_r(events)
    p, kind = _measure_for(args, events[0].shape)
    res = check_bkr_r(p, events)
    _emit(args, _dump({
        "command": "rfold", "r": len(events), "shape": str(events[0].shape),
        "cards": [len(e) for e in events], "card_prod": len(out),
        "sha256_prod": out.digest(), "measure": kind, "check": _check_dict(res),
        "note": "r=1 returns the single input event" if len(events) == 1 else "",
    }), dump_event(out))
    return EXIT_OK if res.holds else EXIT_VIOLATION


def cmd_chain(args) -> int:
    events = [_load_event(f) for f in args.files]
    if len(events) < 2:
        raise BKRInputError("chain needs at least two factors (use rfold for r=1)")
    tree = left_comb(len(events)) if args.tree == "left" else parse_tree(args.tree)
    out = chained_product(tree, events)
    box = bkr_r(events)
    contained = box <= out
    _emit(args, _dump({
        "command": "chain", "tree": render(tree), "shape": str(events[0].shape),
        "card_prod": len(out), "sha256_prod": out.digest(),
        "rfold_contained": contained,
    }), dump_event(out))
    return EXIT_OK if contained else EXIT_VIOLATION


def cmd_fuzz(args) -> int:
    if args.trials <= 0:
        raise _Usage("--trials must be positive")
    if args.kind == "oracle" and args.exhaustive:
        shape = SpaceShape.parse(args.shape or "2,2")
        rep = fuzz.sweep_report(shape, args.workers)
        _report_out(args, _dump(rep))
        return EXIT_OK if rep["status"] == "pass" else EXIT_VIOLATION
    seed = _seed(args)
    params = {}
    if args.shape:
        if args.kind != "oracle":
            raise _Usage("--shape only applies to the oracle suite")
        params["shape"] = list(SpaceShape.parse(args.shape).sizes)
    reports = fuzz.run_suite(args.kind, args.trials, seed, args.workers, **params)
    doc = {"command": "fuzz", "suite": args.kind, "seed": seed,
           "status": "pass" if all(r.passed for r in reports) else "violation",
           "reports": [r.to_dict() for r in reports]}
    _report_out(args, _dump(doc))
    if doc["status"] != "pass":
        first = next(r for r in reports if not r.passed)
        print(f"error[violation]: {first.kind} trial {first.violations[0][0]} seed {first.seed}",
              file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_assoc(args) -> int:
    if args.fixture:
        rep = assoc.example_8_3_fixture()
        _report_out(args, rep.to_text())
        return EXIT_OK if rep.passed else EXIT_VIOLATION
    if args.r is None or not args.shape:
        raise _Usage("assoc needs --r and --shape (or --fixture)")
    shape = SpaceShape.parse(args.shape)
    seed = _seed(args) if args.strategy == "random" else None
    try:
        rep = assoc.distinctness_search(args.r, shape, args.mode, args.strategy,
                                        seed=seed or 0, budget=args.budget,
                                        density=args.density, workers=args.workers)
    except assoc.SearchRefused as exc:
        doc = {"kind": "distinctness_search", "r": args.r, "shape": str(shape),
               "mode": args.mode, "strategy": args.strategy, "budget": args.budget,
               "status": "refused", "instance_count": exc.instance_count}
        _report_out(args, _dump(doc))
        print(f"error[resource]: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    _report_out(args, rep.to_text(dump_events=args.dump_events))
    if rep.status == "witness" and not rep.verified:
        print("error[violation]: witness failed oracle replay", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_section4(args) -> int:
    a, b = read_dyadic(args.a), read_dyadic(args.b)
    if args.n > a.n:
        raise _Usage(f"--n {args.n} exceeds the input resolution {a.n}")
    rep = section4_construction(a, b, args.n)
    doc = {
        "command": "section4", "d": rep.d, "fine": rep.fine, "coarse": rep.coarse,
        "m_a": rep.m_a, "m_b": rep.m_b, "m_a_prime": rep.m_a_prime, "m_b_prime": rep.m_b_prime,
        "m_bkr": rep.m_bkr, "m_bkr_prime": rep.m_bkr_prime,
        "excess_a": rep.excess_a, "excess_b": rep.excess_b, "delta": rep.delta,
        "terms": [{"K": list(t.coords), "err_a": t.err_a, "err_b": t.err_b,
                   "loss_a": t.loss_a, "loss_b": t.loss_b} for t in rep.terms],
        "checks": rep.checks,
        "status": "pass" if rep.holds else "violation",
    }
    text = _dump(doc)
    if args.show and rep.d <= 2:
        for name, s in (("A", a), ("B", b), ("A'", rep.a_prime), ("B'", rep.b_prime)):
            text += f"{name}:\n{ascii_map(s)}"
    _report_out(args, text)
    if args.save_prime:
        stem = Path(args.save_prime)
        stem.with_suffix(".a.bkd").write_bytes(dump_dyadic(rep.a_prime))
        stem.with_suffix(".b.bkd").write_bytes(dump_dyadic(rep.b_prime))
    return EXIT_OK if rep.holds else EXIT_VIOLATION


def cmd_quantile(args) -> int:
    dists = [parse_distribution(Path(f).read_text()) for f in args.dist]
    doc: dict = {"command": "quantile", "distributions": []}
    for d in dists:
        doc["distributions"].append({
            "atoms": [str(x) for x in d.atoms],
            "probs": [str(p) for p in d.probs],
            "breakpoints": [str(b) for b in d.breakpoints],
            "level_sets": [str(level_set_measure(d, x)) for x in d.atoms],
            "quantiles": {u: str(quantile(d, _rational(u))) for u in args.u},
        })
    binary = None
    if args.event:
        a = _load_event(args.event)
        grid, pa = pullback(dists, a)
        p = support_measure(dists)
        doc["pullback"] = {
            "card": len(pa), "sha256": pa.digest(),
            "probability_support": str(event_probability(p, a)),
            "probability_interval_grid": str(event_probability(grid.measure, pa)),
        }
        binary = dump_event(pa)
    _emit(args, _dump(doc), binary)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--shape", help="alphabet sizes, e.g. 2,2,3 or 2^6")
    common.add_argument("--seed", type=int, help="random seed (auto-generated and printed if absent)")
    common.add_argument("--budget", type=int, default=10_000, help="instance budget for searches")
    common.add_argument("--workers", type=int, default=1, help="worker processes")
    common.add_argument("--out", help="output path (event file or report)")

    ap = _Parser(prog="bkrlab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prod", parents=[common], help="A □ B of two event files")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--measure", help="measure file (default: uniform)")
    p.set_defaults(fn=cmd_prod)

    p = sub.add_parser("rfold", parents=[common], help="simultaneous r-fold product")
    p.add_argument("files", nargs="+")
    p.add_argument("--measure")
    p.set_defaults(fn=cmd_rfold)

    p = sub.add_parser("chain", parents=[common], help="bracketed chain of binary products")
    p.add_argument("files", nargs="+")
    p.add_argument("--tree", default="left", help="'left' or a tuple literal like ((0,1),2)")
    p.set_defaults(fn=cmd_chain)

    p = sub.add_parser("fuzz", parents=[common], help="seeded property suites")
    p.add_argument("kind", choices=sorted(fuzz.SUITES))
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--exhaustive", action="store_true",
                   help="oracle only: every pair of events of --shape")
    p.set_defaults(fn=cmd_fuzz)

    p = sub.add_parser("assoc", parents=[common], help="bracketing distinctness search")
    p.add_argument("--r", type=int)
    p.add_argument("--mode", choices=assoc.MODES, default="commutative")
    p.add_argument("--strategy", choices=assoc.STRATEGIES, default="random")
    p.add_argument("--density", type=float)
    p.add_argument("--dump-events", action="store_true", help="include result bits in report")
    p.add_argument("--fixture", choices=["example-8-3"])
    p.set_defaults(fn=cmd_assoc)

    p = sub.add_parser("section4", parents=[common], help="dyadic approximation report")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--n", type=int, required=True, help="coarse resolution")
    p.add_argument("--show", action="store_true", help="ASCII maps for d <= 2")
    p.add_argument("--save-prime", help="write A', B' as <stem>.a.bkd / <stem>.b.bkd")
    p.set_defaults(fn=cmd_section4)

    p = sub.add_parser("quantile", parents=[common], help="quantiles and pullback")
    p.add_argument("--dist", action="append", required=True, help="distribution file, one per coordinate")
    p.add_argument("--u", nargs="*", default=[], help="rationals in (0,1)")
    p.add_argument("--event", help="event over the support grid to pull back")
    p.set_defaults(fn=cmd_quantile)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        if args.workers < 1:
            ap.error("--workers must be >= 1")
    except SystemExit as exc:  # argparse usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.fn(args)
    except _Usage as exc:
        print(f"error[usage]: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BKRInputError as exc:
        print(f"error[input]: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"error[resource]: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
