"""Command-line front end.

A thin client over the same handler layer the service exposes, invoked
in-process: no network access is involved and identical inputs produce
byte-identical output.  Job input comes from flags or a JSON germ
descriptor file; output formats are json (default), dot (resolution trees)
and table.  Exit status 2 flags bad invocations, 1 domain errors (with a
structured message on stderr), 0 success.

The environment variable TORICFLIP_SEED is reserved and unused: the core
contains no randomness.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import api, render
from .germs import GermError
from .intlinalg import ExactLatticeError
from .schemas import GermModel
from .toric import ConeError, ReducedFiberError

DOMAIN_ERRORS = (GermError, ConeError, ReducedFiberError, ExactLatticeError)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toricflip",
        description=(
            "Classify semistable 3-fold degeneration germs, resolve them by "
            "weighted blow-ups, and run the local semistable-reduction "
            "constructions, all in exact arithmetic."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_germ_flags(p, with_n=True):
        p.add_argument("--family", help="germ family (xyz_t, xy_t, moderate_binomial, smooth)")
        p.add_argument("--r", type=int, help="group order / index r")
        p.add_argument("--a", type=int, help="weight a with gcd(a, r) = 1")
        if with_n:
            p.add_argument("--n", type=int, help="exponent n of the base parameter")
        p.add_argument("--file", type=Path, help="JSON germ descriptor file")
        p.add_argument("--format", choices=["json", "dot", "table"], default="json")
        p.add_argument("--out", type=Path, help="write output to PATH instead of stdout")

    p = sub.add_parser("classify", help="classify a germ into its normal-form case")
    add_germ_flags(p)
    p = sub.add_parser("blowup", help="single weighted blow-up with chart data")
    add_germ_flags(p)
    p.add_argument(
        "--weights",
        nargs=4,
        metavar="W",
        help="four weights as exact fractions, e.g. 2/5 3/5 1/5 1",
    )
    p = sub.add_parser("resolve", help="full resolution tree by repeated blow-up")
    add_germ_flags(p)
    p = sub.add_parser("reduce", help="base change to moderate models plus toric certificates")
    add_germ_flags(p)

    p = sub.add_parser("hj", help="Hirzebruch-Jung continued fraction of r/a")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--format", choices=["json", "table"], default="json")
    p.add_argument("--out", type=Path)

    p = sub.add_parser("scan", help="tabulate resolutions for all coprime (r, a) up to a bound")
    p.add_argument("--max-r", type=int, required=True, dest="max_r")
    p.add_argument("--format", choices=["json", "table"], default="table")
    p.add_argument("--out", type=Path)
    return parser


def load_germ(args) -> GermModel:
    if args.file is not None:
        from pydantic import ValidationError

        try:
            data = json.loads(args.file.read_text())
            return GermModel(**data)
        except (OSError, json.JSONDecodeError, TypeError, ValidationError) as exc:
            raise UsageError(f"cannot read germ descriptor {args.file}: {exc}")
    if not args.family:
        raise UsageError("supply --family or --file")
    germ = api.germ_from_flags(
        args.family, args.r, args.a, getattr(args, "n", None)
    )
    return GermModel.from_germ(germ)


class UsageError(Exception):
    pass


def emit(text: str, out: Path | None) -> None:
    if out is not None:
        out.write_text(text)
    else:
        sys.stdout.write(text)


def to_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def run_command(args) -> str:
    if args.command == "classify":
        resp = api.classify_germ(load_germ(args))
        if args.format == "table":
            return render.classify_table(resp)
        if args.format == "dot":
            raise UsageError("classify has no dot output")
        return to_json(resp.model_dump())
    if args.command == "blowup":
        resp = api.run_blowup(load_germ(args), getattr(args, "weights", None))
        if args.format == "table":
            return render.blowup_table(resp)
        if args.format == "dot":
            raise UsageError("blowup has no dot output; use resolve")
        return to_json(resp.model_dump())
    if args.command == "resolve":
        model = load_germ(args)
        if args.format == "dot":
            return api.resolve_tree_for_dot(model)
        resp = api.run_resolve(model)
        if args.format == "table":
            return render.tree_table(resp)
        return to_json(resp.model_dump())
    if args.command == "reduce":
        resp = api.run_reduce(load_germ(args))
        if args.format == "table":
            return render.plan_table(resp)
        if args.format == "dot":
            raise UsageError("reduce has no dot output")
        return to_json(resp.model_dump())
    if args.command == "hj":
        resp = api.run_hj(args.r, args.a)
        if args.format == "table":
            return render.hj_table(resp)
        return json.dumps(resp.expansion) + "\n"
    if args.command == "scan":
        resp = api.run_scan(args.max_r)
        if args.format == "table":
            return render.scan_table(resp)
        return to_json(resp.model_dump())
    raise UsageError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = run_command(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DOMAIN_ERRORS as exc:
        print(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
        )
        return 1
    emit(text, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
