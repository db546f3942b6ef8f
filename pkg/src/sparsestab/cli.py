"""Command-line front end.

Exit codes: 0 success, 2 configuration or input error, 3 solver budget
exhausted (partial results are still written).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import constants, densities, exposure, extremal, patterns, probbounds
from .encodings import Encoding, PartitionDefined
from .experiment import ConfigError, ExperimentConfig, build_encoding, family_for, run_experiment
from .hypercore import VertexSubset
from .plot import PlotError, emit_plot

EXIT_OK, EXIT_CONFIG, EXIT_BUDGET = 0, 2, 3


class UsageError(ValueError):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text}") from exc


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text}") from exc


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _add_encoding_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kind", required=True, choices=["graph_copies", "hypergraph_copies", "schur", "aps"])
    p.add_argument("--pattern", choices=sorted(patterns.NAMED), help="pattern for copy encodings")
    p.add_argument("--n", type=int, required=True, help="points, group order or interval length")
    p.add_argument("--length", type=int, default=3, help="progression length for aps")


def _encoding(args) -> Encoding:
    desc = {"kind": args.kind}
    if args.kind in ("graph_copies", "hypergraph_copies"):
        if args.pattern is None:
            raise UsageError("--pattern is required for copy encodings")
        desc["pattern"] = args.pattern
    if args.kind == "aps":
        desc["length"] = args.length
    return build_encoding(desc, args.n)


def _add_family_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", required=True, choices=["partite", "book3", "book4", "fano", "sumfree_max"])
    p.add_argument("--parts", type=int, default=2, help="classes for the partite family")


def _family(args, enc):
    return family_for({"kind": args.family, "parts": args.parts}, enc)


def _emit(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# --- handlers -----------------------------------------------------------------


def cmd_encode(args) -> int:
    enc = _encoding(args)
    text, side = enc.dump()
    if args.out:
        Path(args.out + ".txt").write_text(text)
        Path(args.out + ".json").write_text(side + "\n")
    else:
        sys.stdout.write(text)
        sys.stdout.write(side + "\n")
    return EXIT_OK


def cmd_density(args) -> int:
    pat = patterns.by_name(args.pattern)
    ell = args.ell if args.ell is not None else pat.k
    out = {
        "pattern": args.pattern,
        "k": pat.k,
        "ell": ell,
        "ell_density": str(densities.ell_density(pat, ell)),
        "strictly_balanced": densities.is_strictly_balanced(pat, ell),
    }
    if pat.k == 2:
        chi = densities.chromatic_number(pat)
        out["two_density"] = str(densities.two_density(pat))
        out["chromatic_number"] = chi
        out["turan_lower_bound"] = str(densities.turan_lower_bound(len(pat.edges), chi))
    if args.pattern in patterns.TURAN_DENSITY:
        a, b = patterns.TURAN_DENSITY[args.pattern]
        out["turan_density"] = f"{a}/{b}"
    _emit(out, args.out)
    return EXIT_OK


def _write_csv(rows: list[dict], columns: list[str], out: str | None) -> None:
    fh = open(out, "w", newline="") if out else sys.stdout
    try:
        w = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({c: ("" if row.get(c) is None else row[c]) for c in columns})
    finally:
        if out:
            fh.close()


MU_COLUMNS = ["n", "i", "q", "mu", "rhs_unit", "ratio"]


def cmd_mu(args) -> int:
    enc = _encoding(args)
    H = enc.hypergraph
    rows = []
    m, nv = len(H.edges), H.n_vertices
    for q in args.q:
        if args.trials:
            if args.seed is None:
                raise UsageError("--seed is required with --trials")
            mu, se = probbounds.mu_i_mc(H, q, args.i, args.trials, args.seed)
        else:
            mu, se = probbounds.mu_i_exact(H, q, args.i), None
        rhs = q ** (2 * args.i) * m * m / nv
        row = {"n": args.n, "i": args.i, "q": q, "mu": mu, "rhs_unit": rhs, "ratio": mu / rhs if rhs else None}
        if se is not None:
            row["se"] = se
        rows.append(row)
    _write_csv(rows, MU_COLUMNS + (["se"] if args.trials else []), args.out)
    return EXIT_OK


def cmd_boundedness(args) -> int:
    enc = _encoding(args)
    rep = probbounds.boundedness_report(enc.hypergraph, args.p, args.i, args.q)
    rows = [dict(r, n=args.n) for r in rep.rows()]
    _write_csv(rows, MU_COLUMNS, args.out)
    msg = "degenerate (|H| = 0)" if rep.degenerate else f"K_min = {rep.K_min!r}"
    print(msg, file=sys.stderr)
    return EXIT_OK


def cmd_exposure(args) -> int:
    sched = exposure.solve_schedule(args.q, args.R, args.L)
    out = {"schedule": sched.to_dict(), "residual": sched.residual()}
    if args.action == "verify":
        out["conditional"] = exposure.verify_conditional(sched)
        out["measure"] = exposure.verify_measure(sched)
    _emit(out, args.out)
    return EXIT_OK


def cmd_extremal(args) -> int:
    enc = _encoding(args)
    if args.p is not None:
        if args.seed is None:
            raise UsageError("--seed is required when sampling with --p")
        rec, res = extremal.sample_and_solve(enc, args.p, args.seed, strict=args.strict,
                                             budget=args.budget, keep_witness=True)
        out = {k: v for k, v in vars(rec).items() if k != "extra"}
        out["nodes"] = res.nodes_explored
    else:
        res = extremal.max_free_subset(enc, strict=args.strict, budget=args.budget)
        out = {"encoding": enc.label, "size": res.size, "exact": res.exact, "nodes": res.nodes_explored,
               "witness": extremal.run_length_encode(res.witness.sorted_members())}
    _emit(out, args.out)
    return EXIT_OK if res.exact else EXIT_BUDGET


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    res = run_experiment(cfg, threads=args.threads, out=args.out)
    print(f"{res.n_records} records -> {res.records_path}; summary -> {res.summary_path}", file=sys.stderr)
    return EXIT_BUDGET if res.any_inexact else EXIT_OK


def cmd_stability(args) -> int:
    enc = _encoding(args)
    fam = _family(args, enc)
    if args.action == "distance":
        nv = enc.hypergraph.n_vertices
        exact_solve = True
        if args.members is not None:
            W = VertexSubset.from_members(nv, args.members)
        else:
            if args.p is None or args.seed is None:
                raise UsageError("give --members, or --p with --seed to sample and solve")
            _, res = extremal.sample_and_solve(enc, args.p, args.seed, strict=args.strict, budget=args.budget)
            W, exact_solve = res.witness, res.exact
        if isinstance(fam, PartitionDefined):
            d = extremal.partition_distance(W, enc, fam, seed=args.seed or 0)
        else:
            d = extremal.family_distance(W, fam)
        _emit({"size": len(W), "distance": d.distance, "exact": d.exact,
               "nearest": list(d.nearest) if isinstance(d.nearest, tuple) else d.nearest}, args.out)
        return EXIT_OK if exact_solve else EXIT_BUDGET
    if args.mode == "anneal" and args.seed is None:
        raise UsageError("--seed is required for the anneal probe")
    res = extremal.stability_probe(enc, fam, args.alpha, args.eps, args.delta, mode=args.mode,
                                   budget=args.budget or 20_000, seed=args.seed or 0)
    _emit({
        "violator": None if res.violator is None else res.violator.sorted_members(),
        "induced_edges": res.induced_edges,
        "distance": res.distance,
        "exact": res.exact,
        "examined": res.examined,
    }, args.out)
    return EXIT_OK


def _table(path, const, name):
    if path is not None:
        return constants.StepTable.load(path)
    if const is not None:
        return constants.StepTable.constant(const)
    raise UsageError(f"give --{name}-table or --{name}")


def cmd_constants(args) -> int:
    eps = _table(args.eps_stab_table, args.eps_stab, "eps-stab")
    bhat = _table(args.bhat_table, args.bhat, "bhat")
    led = constants.ledger(args.k, args.K, args.alpha, args.delta, eps, bhat, args.beta_floor, r_cap=args.r_cap)
    rep = constants.check_constraints(led, b_hat_fn=bhat)
    out = led.to_dict()
    out["check"] = {"relations_checked": rep.checked, "binding": rep.binding}
    _emit(out, args.out)
    return EXIT_OK


def cmd_plot(args) -> int:
    emit_plot(args.csv, args.x, args.y, args.out)
    return EXIT_OK


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sparsestab", description="Sparse random extremal combinatorics lab")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="build an encoding and write hypergraph text plus JSON sidecar")
    _add_encoding_args(p)
    p.add_argument("--out", help="output prefix (writes PREFIX.txt and PREFIX.json)")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("density", help="densities and balance of a named pattern")
    p.add_argument("--pattern", required=True, choices=sorted(patterns.NAMED))
    p.add_argument("--ell", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("mu", help="mu_i(H, q) exactly or by Monte Carlo")
    _add_encoding_args(p)
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--q", type=_floats, required=True, help="comma-separated q values")
    p.add_argument("--trials", type=int, default=0, help="Monte Carlo trials (0 = exact)")
    p.add_argument("--seed", type=_seed)
    p.add_argument("--out")
    p.set_defaults(func=cmd_mu)

    p = sub.add_parser("boundedness", help="pointwise (K, p)-boundedness ratios over a q grid")
    _add_encoding_args(p)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--q", type=_floats, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_boundedness)

    p = sub.add_parser("exposure", help="multiple-exposure schedules")
    p.add_argument("action", choices=["solve", "verify"])
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--R", type=int, required=True)
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_exposure)

    p = sub.add_parser("extremal", help="largest free subset")
    p.add_argument("action", choices=["solve"])
    _add_encoding_args(p)
    p.add_argument("--p", type=float, help="solve on a p-random subset instead of the full vertex set")
    p.add_argument("--seed", type=_seed)
    p.add_argument("--strict", action="store_true", help="also forbid degenerate constraints")
    p.add_argument("--budget", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_extremal)

    p = sub.add_parser("experiment", help="batch experiments")
    p.add_argument("action", choices=["run"])
    p.add_argument("--config", required=True)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", help="output directory (overrides the config)")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("stability", help="distance to the target family, or a stability probe")
    p.add_argument("action", choices=["distance", "probe"])
    _add_encoding_args(p)
    _add_family_args(p)
    p.add_argument("--members", type=_ints, help="vertex ids of the set to measure")
    p.add_argument("--p", type=float)
    p.add_argument("--seed", type=_seed)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--budget", type=int)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--mode", choices=["exhaustive", "anneal"], default="exhaustive")
    p.add_argument("--out")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("constants", help="explicit constant ledger as JSON")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--K", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--beta-floor", type=float, required=True)
    p.add_argument("--eps-stab-table", help="JSON list of [x, y] breakpoints")
    p.add_argument("--bhat-table", help="JSON list of [x, y] breakpoints")
    p.add_argument("--eps-stab", type=float, help="constant value instead of a table")
    p.add_argument("--bhat", type=float, help="constant value instead of a table")
    p.add_argument("--r-cap", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("plot", help="SVG plot of two summary columns")
    p.add_argument("--csv", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, UsageError, PlotError, constants.LedgerInconsistency) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, TypeError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
