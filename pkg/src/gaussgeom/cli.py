"""Command-line front end: ``gaussgeom {groebner,ident,constraints,simulate}``.

Exit codes: 0 success, 2 user error, 3 Groebner resource cap.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import groebner as gb
from .gaussmodel import (
    GaussianDagModel,
    ModelError,
    ci_constraints,
    identifiability_ideal,
    parse_ci_query,
    random_theta,
    sign_flip,
    verify_fiber,
)
from .polyring import LEX, MonomialOrder, PolySyntaxError, UnknownVariableError
from .simulate import SCENARIOS, SimulationConfig, run_scenario, summarize, write_results

EXIT_OK, EXIT_USAGE, EXIT_RESOURCE = 0, 2, 3


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


# ------------------------------------------------------------- groebner


def run_groebner(args) -> int:
    try:
        ideal = gb.parse_ideal_file(_read(args.ideal_file))
        order = MonomialOrder.from_name(args.order)
    except (PolySyntaxError, UnknownVariableError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    G = gb.buchberger(ideal, order, pair_cap=args.pair_cap)
    dim = gb.ideal_dimension(G)
    mult = gb.multiplicity(G) if dim == 0 else None
    report = {
        "vars": list(ideal.ring.names),
        "order": str(order),
        "basis": [g.format(order) for g in G.elements],
        "unit_ideal": G.is_unit(),
        "dim": dim,
        "mult": mult,
    }
    if args.out == "json":
        print(json.dumps(report, indent=2))
    else:
        if G.is_unit():
            print("unit ideal")
        for k, g in enumerate(report["basis"], 1):
            print(f"J[{k}]={g}")
        print(f"dim = {dim}")
        if mult is not None:
            print(f"mult = {mult}")
    return EXIT_OK


# ---------------------------------------------------------------- ident


def _read_theta(model: GaussianDagModel, text: str):
    vals = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"expected 'name = value', got {raw.strip()!r}")
        k, v = (s.strip() for s in line.split("=", 1))
        try:
            vals[k] = Fraction(v)
        except ValueError:
            raise UsageError(f"bad number {v!r} for {k}") from None
    unknown = set(vals) - set(model.params)
    if unknown:
        raise UsageError(f"unknown parameters: {sorted(unknown)}")
    try:
        return model.theta(vals)
    except ModelError as exc:
        raise UsageError(str(exc)) from None


def run_ident(args) -> int:
    try:
        model = GaussianDagModel.from_text(_read(args.model_file))
    except ModelError as exc:
        raise UsageError(f"invalid model: {exc}") from None

    spec = args.theta0
    if spec.startswith("random:"):
        try:
            rng = random.Random(int(spec.split(":", 1)[1]))
        except ValueError:
            raise UsageError(f"bad seed in {spec!r}") from None
        thetas = [random_theta(model, rng) for _ in range(args.trials)]
        generic = True
    else:
        thetas = [_read_theta(model, _read(spec))]
        generic = False

    trials = []
    for k, th in enumerate(thetas):
        ideal = identifiability_ideal(model, th)
        if k == 0 and args.emit_ideal:
            Path(args.emit_ideal).write_text(gb.format_ideal_file(ideal.generators, model.ring))
        G = gb.buchberger(ideal, pair_cap=args.pair_cap)
        dim = gb.ideal_dimension(G)
        trials.append(
            {
                "theta0": {nm: str(v) for nm, v in th.as_dict().items()},
                "dim": dim,
                "mult": gb.multiplicity(G) if dim == 0 else None,
                "sign_flip_in_fiber": verify_fiber(model, th, sign_flip(th)),
            }
        )

    all_zero = all(t["dim"] == 0 for t in trials)
    where = "generic θ0" if generic else "this point"
    if not model.params:
        verdict = "trivially identifiable (no parameters)"
    elif all_zero and all(t["mult"] == 1 for t in trials):
        verdict = f"globally identifiable at {where}"
    elif all_zero:
        verdict = f"locally identifiable at {where}"
    else:
        verdict = f"not locally identifiable at {where}" if not generic else "not locally identifiable at some sampled θ0"
    report = {"params": list(model.params), "trials": trials, "verdict": verdict}

    if args.out == "json":
        print(json.dumps(report, indent=2, ensure_ascii=False))
    else:
        for k, t in enumerate(trials, 1):
            th = ", ".join(f"{a}={b}" for a, b in t["theta0"].items())
            mult = "-" if t["mult"] is None else t["mult"]
            print(f"trial {k}: dim={t['dim']} mult={mult} sign_flip={t['sign_flip_in_fiber']}  [{th}]")
        print(f"verdict: {verdict}")
    return EXIT_OK


# ---------------------------------------------------------- constraints


def _index_list(text):
    if text is None or text.strip() in ("", "{}"):
        return []
    try:
        return [int(x) for x in text.strip("{} ").replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"bad index list {text!r}") from None


def run_constraints(args) -> int:
    queries = []
    for q in args.query or []:
        queries.append(q)
    if args.query_file:
        queries += [ln for ln in _read(args.query_file).splitlines() if ln.strip() and not ln.startswith("#")]
    try:
        jobs = [parse_ci_query(q) for q in queries]
        if args.A is not None or args.B is not None:
            if args.A is None or args.B is None or args.p is None:
                raise UsageError("--A, --B and --p are required together")
            jobs.append((_index_list(args.A), _index_list(args.B), _index_list(args.C), args.p))
        if not jobs:
            raise UsageError("give --A/--B/--p or at least one --query")
        for A, B, C, p in jobs:
            for f in ci_constraints(A, B, C, p):
                print(f.format(LEX))
    except ModelError as exc:
        raise UsageError(str(exc)) from None
    return EXIT_OK


# ------------------------------------------------------------- simulate


def run_simulate(args) -> int:
    true_params = None
    if args.sigma23 is not None:
        if args.scenario != "ci-regular":
            raise UsageError("--sigma23 applies to ci-regular only")
        import numpy as np

        true_params = np.eye(3)
        true_params[1, 2] = true_params[2, 1] = args.sigma23
    try:
        config = SimulationConfig(args.scenario, args.n, args.reps, args.seed, true_params)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    dist = run_scenario(config)
    if args.out:
        out = Path(args.out)
        summary = write_results(config, dist, out.with_suffix(".csv"), out.with_suffix(".json"))
    else:
        summary = summarize(config, dist)
    print(json.dumps(summary, indent=2))
    return EXIT_OK


# ----------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gaussgeom", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("groebner", help="reduced Groebner basis, dimension and multiplicity of an ideal file")
    p.add_argument("ideal_file", help="'vars: x, y' line then one polynomial per line; '-' for stdin")
    p.add_argument("--order", default="dp", help="lex, dp (degrevlex) or block(k); default dp")
    p.add_argument("--out", choices=["text", "json"], default="text")
    p.add_argument("--pair-cap", type=int, default=gb.DEFAULT_PAIR_CAP, help="abort after this many critical pairs")
    p.set_defaults(func=run_groebner)

    p = sub.add_parser("ident", help="identifiability analysis of a Gaussian DAG model")
    p.add_argument("model_file", help="'node <name> observed|hidden [fixvar]' and 'edge <u> <v> [param]' lines")
    p.add_argument("--theta0", default="random:0", help="'random:<seed>' or a file of 'name = value' lines")
    p.add_argument("--trials", type=int, default=20, help="number of random parameter points")
    p.add_argument("--emit-ideal", metavar="PATH", help="write the first trial's ideal in ideal-file format")
    p.add_argument("--out", choices=["text", "json"], default="text")
    p.add_argument("--pair-cap", type=int, default=gb.DEFAULT_PAIR_CAP)
    p.set_defaults(func=run_ident)

    p = sub.add_parser("constraints", help="conditional independence determinants")
    p.add_argument("--A", help="comma-separated 1-based indices")
    p.add_argument("--B", help="comma-separated 1-based indices")
    p.add_argument("--C", default="", help="conditioning set; may be empty")
    p.add_argument("--p", type=int, help="number of variables")
    p.add_argument("--query", action="append", help="'ci A={1} B={2} C={3} p=3'; repeatable")
    p.add_argument("--query-file", help="file with one query per line")
    p.set_defaults(func=run_constraints)

    p = sub.add_parser("simulate", help="Monte Carlo of likelihood ratio statistics")
    p.add_argument("--scenario", required=True, choices=SCENARIOS)
    p.add_argument("--n", type=int, default=1000, help="sample size per replicate")
    p.add_argument("--reps", type=int, default=20000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sigma23", type=float, help="true s23 for ci-regular (default 0.5)")
    p.add_argument("--out", help="output prefix; writes PREFIX.csv and PREFIX.json")
    p.set_defaults(func=run_simulate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except gb.ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
