"""Command-line entry point: ``spinecensus <subcommand> ...``.

Exit status: 0 on success, 1 on usage or domain errors, 2 when an internal
consistency check fails.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path
from typing import Sequence, TextIO

from . import __version__
from .automaton import (
    OPEN_CHAIN_FSA,
    AutomatonError,
    count_accepted,
    derive_fsa,
    format_fsa,
    lower_bound_refined,
    lower_bound_simple_ceil,
    upper_bounds,
)
from .calibration import CalibrationError
from .census import (
    AMPHICHIRAL,
    SCHEMA_VERSION,
    CensusError,
    classify_chirality,
    closed_chain_exact_probability,
    closed_chain_monte_carlo,
    enumerate_canonical,
    enumerate_open_chain,
    gluing_table,
    merge_parts,
    write_part,
    CLOSED_CHAIN_FIRST,
)
from .invariants import InvariantMismatch, QuantumContext, invariant_report
from .ograph import LETTERS, OGraphFormatError, OpenChainParams, canonical_form, make_open_chain, parse_ograph
from .tracer import trace_faces

EXIT_OK, EXIT_DOMAIN, EXIT_INTERNAL = 0, 1, 2
SEED_ENV = "SPINECENSUS_SEED"

_INTERNAL_ERRORS = (CensusError, InvariantMismatch, CalibrationError, AutomatonError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def parse_n_range(text: str) -> tuple[int, ...]:
    """``'9'`` or ``'2..10'`` (inclusive)."""
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split("..", 1))
            if hi < lo:
                raise ValueError
            return tuple(range(lo, hi + 1))
        return (int(text),)
    except ValueError:
        raise UsageError(f"invalid --n value {text!r}; expected K or LO..HI") from None


def parse_word(text: str) -> tuple[tuple[int, int], ...]:
    """Comma-separated two-digit letters, e.g. ``'02,12,20'``."""
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if len(tok) != 2 or not tok.isdigit() or any(ch not in "012" for ch in tok):
            raise UsageError(f"invalid letter {tok!r}; letters are two digits in 0-2")
        out.append((int(tok[0]), int(tok[1])))
    return tuple(out)


def _levels(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"invalid level list {text!r}") from None


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    p.add_argument("--format", dest="fmt", choices=("json", "csv", "text"), default=None)
    p.add_argument("--out", default=None, help="output file (default stdout)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="spinecensus", description="One-face open-chain spine census and invariants.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("enumerate", parents=[common], help="write census records as JSON lines")
    p.add_argument("--n", required=True, help="K or LO..HI")
    p.add_argument("--tv-levels", default="3,5,7")
    p.add_argument("--q0", default="pi-over-r")
    p.add_argument("--count-only", action="store_true", help="print per-n record counts only")

    p = sub.add_parser("count", parents=[common], help="accepted-word counts and bounds")
    p.add_argument("--n", required=True)

    p = sub.add_parser("invariants", parents=[common], help="invariant report for one manifold")
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--tv-levels", default="3,5,7")
    p.add_argument("--q0", default="pi-over-r")
    p.add_argument("--alpha", type=int)
    p.add_argument("--delta", type=int)
    p.add_argument("--word")

    p = sub.add_parser("chirality", parents=[common], help="chirality of one colouring or counts at n")
    p.add_argument("--n")
    p.add_argument("--alpha", type=int)
    p.add_argument("--delta", type=int)
    p.add_argument("--word")

    p = sub.add_parser("trace", parents=[common], help="trace the faces of an o-graph")
    p.add_argument("input", nargs="?", help="o-graph file ('-' for stdin)")
    p.add_argument("--open-chain", nargs=3, metavar=("ALPHA", "DELTA", "WORD"))
    p.add_argument("--faces", action="store_true", help="print every face walk")
    p.add_argument("--gluing", action="store_true", help="print the dual triangulation")

    p = sub.add_parser("fsa", parents=[common], help="print the open-chain automaton")
    p.add_argument("--derive", action="store_true", help="re-derive from the tracer and compare")

    p = sub.add_parser("simulate", parents=[common], help="closed-chain Monte Carlo")
    p.add_argument("--closed-chain", action="store_true", required=True)
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--exact", action="store_true", help="also report the exact probability")
    return parser


def _seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def _q0_multiplier(levels: Sequence[int], text: str) -> int:
    """Validate the q0 choice at every level and return its multiplier m."""
    m = 1
    for r in levels:
        m = QuantumContext.parse(r, text).m
    return m


def _dump(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), sort_keys=True)


def _params_from_args(args, n: int | None) -> OpenChainParams:
    if args.word is None:
        raise UsageError("--word is required")
    word = parse_word(args.word)
    alpha = 0 if args.alpha is None else args.alpha
    delta = 0 if args.delta is None else args.delta
    params = OpenChainParams.of(alpha, delta, word)
    if n is not None and params.n != n:
        raise UsageError(f"word has {len(word)} letters, expected n-1 = {n - 1}")
    return params


def _log(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


# -- subcommands -------------------------------------------------------------------------


def cmd_enumerate(args, out: TextIO) -> int:
    ns = parse_n_range(args.n)
    if min(ns) < 2:
        raise ValueError("n must be >= 2")
    if args.count_only:
        fmt = args.fmt or "csv"
        if fmt == "csv":
            out.write("n,records\n")
        for n in ns:
            k = sum(1 for _ in enumerate_canonical(n))
            out.write(f"{n},{k}\n" if fmt == "csv" else _dump({"n": n, "records": k, "schema": SCHEMA_VERSION}) + "\n")
        return EXIT_OK
    levels = _levels(args.tv_levels)
    m = _q0_multiplier(levels, args.q0)
    if args.out is None:
        for n in ns:
            t0 = time.perf_counter()
            k = 0
            for rec in enumerate_open_chain(n, jobs=args.jobs, tv_levels=levels, q0_multiplier=m):
                out.write(rec.to_json())
                out.write("\n")
                k += 1
            _log(f"n={n}: {k} records in {time.perf_counter() - t0:.1f}s")
        return EXIT_OK
    # resumable: one finished part file per n, merged at the end
    target = Path(args.out)
    parts_dir = target.with_name(target.name + ".parts")
    parts_dir.mkdir(parents=True, exist_ok=True)
    parts = []
    for n in ns:
        part = parts_dir / f"n{n:03d}.jsonl"
        parts.append(part)
        if part.exists():
            _log(f"n={n}: reusing {part}")
            continue
        t0 = time.perf_counter()
        k = write_part(enumerate_open_chain(n, jobs=args.jobs, tv_levels=levels, q0_multiplier=m), part)
        _log(f"n={n}: {k} records in {time.perf_counter() - t0:.1f}s")
    total = merge_parts(parts, target)
    _log(f"wrote {total} records to {target}")
    return EXIT_OK


def cmd_count(args, out: TextIO) -> int:
    ns = parse_n_range(args.n)
    if min(ns) < 2:
        raise ValueError("n must be >= 2")
    fmt = args.fmt or "csv"
    if fmt == "csv":
        out.write("n,exact_accepted,refined_lower,simple_lower,upper_9n\n")
    for n in ns:
        row = {
            "n": n,
            "exact_accepted": 4 * count_accepted(n - 1),
            "refined_lower": lower_bound_refined(n),
            "simple_lower": lower_bound_simple_ceil(n),
            "upper_9n": upper_bounds(n).open_chain,
        }
        if fmt == "csv":
            out.write(",".join(str(row[k]) for k in row) + "\n")
        else:
            out.write(_dump({**row, "schema": SCHEMA_VERSION}) + "\n")
    return EXIT_OK


def cmd_invariants(args, out: TextIO) -> int:
    n = args.n
    if n < 2:
        raise ValueError("n must be >= 2")
    levels = _levels(args.tv_levels)
    m = _q0_multiplier(levels, args.q0)
    if args.word is not None:
        params = canonical_form(_params_from_args(args, n))
    else:
        a, d, w, _ = next(iter(enumerate_canonical(n)))
        params = OpenChainParams(n, a, d, tuple(LETTERS[c] for c in w))
    report = invariant_report(n, params, levels, m)
    body = report.to_dict()
    body.update(
        schema=SCHEMA_VERSION,
        q0=args.q0,
        alpha=params.alpha,
        delta=params.delta,
        word=[list(x) for x in params.word],
        chirality=classify_chirality(params),
    )
    out.write(_dump(body) + "\n")
    return EXIT_OK


def cmd_chirality(args, out: TextIO) -> int:
    if args.word is not None:
        params = _params_from_args(args, None)
        canon = canonical_form(params)
        if trace_faces(make_open_chain(params)).face_count != 1:
            raise ValueError("colouring does not give a one-face spine")
        body = {
            "schema": SCHEMA_VERSION,
            "n": params.n,
            "canonical": {"alpha": canon.alpha, "delta": canon.delta, "word": [list(x) for x in canon.word]},
            "chirality": classify_chirality(params),
        }
        out.write(_dump(body) + "\n")
        return EXIT_OK
    if args.n is None:
        raise UsageError("give --n or --word")
    fmt = args.fmt or "csv"
    if fmt == "csv":
        out.write("n,records,chiral,amphichiral\n")
    for n in parse_n_range(args.n):
        if n < 2:
            raise ValueError("n must be >= 2")
        amph = total = 0
        for a, d, w, _ in enumerate_canonical(n):
            total += 1
            amph += classify_chirality(OpenChainParams(n, a, d, tuple(LETTERS[c] for c in w))) == AMPHICHIRAL
        row = {"n": n, "records": total, "chiral": total - amph, "amphichiral": amph}
        out.write(",".join(map(str, row.values())) + "\n" if fmt == "csv" else _dump({**row, "schema": SCHEMA_VERSION}) + "\n")
    return EXIT_OK


def cmd_trace(args, out: TextIO) -> int:
    if args.open_chain:
        a, d, w = args.open_chain
        try:
            g = make_open_chain(OpenChainParams.of(int(a), int(d), parse_word(w)))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    elif args.input:
        text = sys.stdin.read() if args.input == "-" else Path(args.input).read_text(encoding="utf-8")
        g = parse_ograph(text)
    else:
        raise UsageError("give an o-graph file or --open-chain")
    t = trace_faces(g)
    fmt = args.fmt or "text"
    faces = [[step.token(sign) for step, sign in walk] for walk in t.faces]
    table = gluing_table(g) if args.gluing else None
    if fmt == "json":
        body = {"schema": SCHEMA_VERSION, "vertices": g.vertex_count, "faces": t.face_count,
                "euler_characteristic": t.euler_characteristic}
        if args.faces:
            body["walks"] = faces
        if table is not None:
            body["gluing"] = table.to_text()
        out.write(_dump(body) + "\n")
        return EXIT_OK
    out.write(f"vertices {g.vertex_count}\nfaces {t.face_count}\neuler_characteristic {t.euler_characteristic}\n")
    if args.faces:
        for i, walk in enumerate(faces):
            out.write(f"face {i} " + " ".join(walk) + "\n")
    if table is not None:
        if table.edge_orbits() != t.face_count:
            raise CensusError("dual triangulation edge count differs from the face count")
        out.write(table.to_text())
    return EXIT_OK


def cmd_fsa(args, out: TextIO) -> int:
    if args.derive:
        derived = derive_fsa()
        if derived != OPEN_CHAIN_FSA:
            raise AutomatonError("derived automaton differs from the shipped table")
    out.write(format_fsa(OPEN_CHAIN_FSA))
    return EXIT_OK


def cmd_simulate(args, out: TextIO) -> int:
    seed = _seed(args.seed)
    rep = closed_chain_monte_carlo(args.n, args.samples, seed)
    body = rep.to_dict()
    if args.exact:
        body["exact"] = {
            "".join(map(str, x)): str(closed_chain_exact_probability(args.n, x)) for x in CLOSED_CHAIN_FIRST
        }
    fmt = args.fmt or "json"
    if fmt == "json":
        out.write(_dump(body) + "\n")
    else:
        out.write("n,samples,seed,single_face_count,frequency\n")
        out.write(f"{rep.n},{rep.samples},{rep.seed},{rep.single_face_count},{rep.frequency!r}\n")
    return EXIT_OK


COMMANDS = {
    "enumerate": cmd_enumerate,
    "count": cmd_count,
    "invariants": cmd_invariants,
    "chirality": cmd_chirality,
    "trace": cmd_trace,
    "fsa": cmd_fsa,
    "simulate": cmd_simulate,
}


def run(argv: Sequence[str] | None = None, stdout: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "jobs", 1) < 1:
            raise UsageError("--jobs must be >= 1")
        if args.command == "enumerate" or args.out is None:
            return COMMANDS[args.command](args, stdout)
        with open(args.out, "w", encoding="utf-8") as fh:
            return COMMANDS[args.command](args, fh)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_DOMAIN
    except _INTERNAL_ERRORS as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ValueError, OGraphFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
