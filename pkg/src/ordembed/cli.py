"""Command-line front end: realize, verify, induce, gallery, falsify.

JSON is the interchange format throughout; coordinates can additionally be
exported as CSV. Errors are reported as single-line JSON on stderr. Exit
codes: realize 0 ok / 2 invalid spec / 3 construction failure / 4 failed
self-verification; verify 0 match / 1 mismatch / 2 bad input; induce and
gallery 0 ok / 2 bad input; falsify 0 feasible / 1 infeasible / 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import constructions, counterexamples, orders, schoenberg, verifier
from .constructions import EpsilonSearch, RealizationReport
from .counterexamples import FalsifierConfig
from .errors import EpsilonExhausted, OrdembedError, SpecError
from .orders import OrderSpec
from .schoenberg import PointConfig


def _diagnose(exc: Exception) -> None:
    line = json.dumps({"error": type(exc).__name__, "message": str(exc)})
    print(line, file=sys.stderr)


def _load_spec(path: str) -> OrderSpec:
    try:
        return orders.load(path)
    except OSError as exc:
        raise SpecError(f"cannot read spec {path}: {exc}") from exc


def _load_config(path: str) -> PointConfig:
    try:
        return schoenberg.load_config(path)
    except OSError as exc:
        raise SpecError(f"cannot read points {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON in {path}: {exc}") from exc


def _write_csv(config: PointConfig, path: str) -> None:
    rows = config.P if config.Q is None else np.vstack([config.P, config.Q])
    lines = [",".join(f"x{k + 1}" for k in range(config.dim))]
    for row in rows:
        lines.append(",".join(format(float(v), ".17g") for v in row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


def _realization_report_json(report: RealizationReport) -> str:
    out = {
        "dim": report.config.dim,
        "epsilon": report.epsilon,
        "margin": report.margin,
        "min_eigenvalues": list(report.min_eigenvalues),
    }
    return json.dumps(out)


def _search_from_flags(spec: OrderSpec, args) -> EpsilonSearch | None:
    if args.epsilon is None and args.shrink is None and args.max_steps is None:
        return None
    base = constructions.default_search(spec)
    return EpsilonSearch(
        initial=base.initial if args.epsilon is None else args.epsilon,
        shrink_factor=0.5 if args.shrink is None else args.shrink,
        max_steps=60 if args.max_steps is None else args.max_steps)


def cmd_realize(args) -> int:
    try:
        spec = _load_spec(args.spec)
        search = _search_from_flags(spec, args)
    except (SpecError, ValueError) as exc:
        _diagnose(exc)
        return 2
    try:
        report = constructions.realize(spec, eta=args.eta, search=search)
    except EpsilonExhausted as exc:
        _diagnose(exc)
        return 3
    except OrdembedError as exc:
        _diagnose(exc)
        return 2
    schoenberg.save_config(report.config, args.out)
    if args.csv:
        _write_csv(report.config, args.csv)
    check = verifier.verify(report.config, spec, tol_abs=args.tol_abs,
                            tol_rel=args.tol_rel)
    print(_realization_report_json(report))
    if not check.matched:
        _diagnose(OrdembedError(
            f"self-verification failed: {verifier.report_to_json(check)}"))
        return 4
    return 0


def cmd_verify(args) -> int:
    try:
        spec = _load_spec(args.spec)
        config = _load_config(args.points)
        report = verifier.verify(config, spec, tol_abs=args.tol_abs,
                                 tol_rel=args.tol_rel)
    except OrdembedError as exc:
        _diagnose(exc)
        return 2
    print(verifier.report_to_json(report))
    return 0 if report.matched else 1


def cmd_induce(args) -> int:
    try:
        config = _load_config(args.points)
    except OrdembedError as exc:
        _diagnose(exc)
        return 2
    induced = verifier.induced_preorder(config, tol_abs=args.tol_abs,
                                        tol_rel=args.tol_rel)
    if config.Q is None:
        spec = OrderSpec("complete", len(config.P), induced.classes)
    else:
        spec = OrderSpec("bipartite", len(config.P), induced.classes,
                         m=len(config.Q))
    print(orders.to_json(orders.canonical(spec)))
    return 0


def cmd_gallery(args) -> int:
    try:
        spec = counterexamples.gallery(args.name, args.n)
    except OrdembedError as exc:
        _diagnose(exc)
        return 2
    orders.save(spec, args.out)
    return 0


def cmd_falsify(args) -> int:
    try:
        spec = _load_spec(args.spec)
        cfg = FalsifierConfig(dim=args.dim, restarts=args.restarts,
                              iters=args.iters, margin=args.margin,
                              floor=args.floor, seed=args.seed)
    except OrdembedError as exc:
        _diagnose(exc)
        return 2
    report = counterexamples.falsify(spec, cfg)
    line = counterexamples.report_to_json(report)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(line)
        fh.write("\n")
    print(line)
    return 0 if report.feasible else 1


def _add_tolerances(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol-abs", type=float, default=verifier.TOL_ABS)
    p.add_argument("--tol-rel", type=float, default=verifier.TOL_REL)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ordembed",
        description="Realize, verify, and probe distance orders.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("realize", help="spec file -> point configuration")
    p.add_argument("spec")
    p.add_argument("out")
    p.add_argument("--csv", default=None, metavar="PATH")
    p.add_argument("--eta", type=float, default=constructions.ETA)
    p.add_argument("--epsilon", type=float, default=None,
                   help="initial perturbation (default 1/(2K))")
    p.add_argument("--shrink", type=float, default=None)
    p.add_argument("--max-steps", type=int, default=None)
    _add_tolerances(p)
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("verify", help="check points against a spec")
    p.add_argument("spec")
    p.add_argument("points")
    _add_tolerances(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("induce", help="print the order a configuration induces")
    p.add_argument("points")
    _add_tolerances(p)
    p.set_defaults(func=cmd_induce)

    p = sub.add_parser("gallery", help="emit a lower-bound order family")
    p.add_argument("name")
    p.add_argument("n", type=int)
    p.add_argument("out")
    p.set_defaults(func=cmd_gallery)

    p = sub.add_parser("falsify", help="stress-test realizability in R^dim")
    p.add_argument("spec")
    p.add_argument("out")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--restarts", type=int, default=100)
    p.add_argument("--iters", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--margin", type=float, default=counterexamples.MARGIN)
    p.add_argument("--floor", type=float, default=counterexamples.FLOOR)
    p.set_defaults(func=cmd_falsify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
