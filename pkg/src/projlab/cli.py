"""Command-line front door: experiments, sweeps, verification, reports.

Subcommands: simulate, verify, sweep, localize, rank-select, slln.
Exit codes: 0 = pass, 1 = violations or numerical failure (with a reproducer
manifest), 2 = usage error (bad flags or invalid parameter values).
"""

from __future__ import annotations

import argparse
import sys

from . import __version__, bounds, localization, montecarlo, suites
from .errors import InvalidInputError, NumericalFailureError
from .linalg import load_matrix, singular_values
from .randgen import NORMALIZATIONS, Seed, parse_distribution
from .report import RunManifest, emit_csv, emit_json


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x != ""]


class _SubParser(argparse.ArgumentParser):
    """Subcommand parser that documents defaults in --help."""

    def __init__(self, *args, **kwargs):
        kwargs.setdefault("formatter_class", argparse.ArgumentDefaultsHelpFormatter)
        super().__init__(*args, **kwargs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="projlab",
        description="Projection-excess laboratory for signal-plus-noise matrices.",
    )
    parser.add_argument("--version", action="version", version=f"projlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_SubParser)

    def common(p, workers=False):
        p.add_argument("--seed", type=int, default=0, help="seed root (default 0)")
        p.add_argument("--out", default=None, help="report file (default: stdout)")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        if workers:
            p.add_argument("--workers", type=int, default=1,
                           help="replication workers; results are worker-count independent")

    p = sub.add_parser("simulate", help="Monte Carlo estimates plus the bound report")
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--C", default="zero", help='signal spec: zero | diag:... | rank1:lambda=x | file:path')
    p.add_argument("--dist", default="gaussian:1.0")
    p.add_argument("--reps", type=int, default=200,
                   help="replications; ~20 is plenty for spectral statistics at M >= 512")
    p.add_argument("--normalization", choices=NORMALIZATIONS, default="none")
    common(p, workers=True)

    p = sub.add_parser("verify", help="pathwise inequality suites; exit 0 iff no violations")
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--dist", default="gaussian:1.0")
    p.add_argument("--trials", type=int, default=100)
    common(p)

    p = sub.add_parser("sweep", help="ratio table: estimated sup Z vs bound value per config")
    p.add_argument("--M", type=_int_list, required=True, help="comma list, e.g. 16,32,64")
    p.add_argument("--r", type=_int_list, required=True, help="comma list")
    p.add_argument("--C", action="append", default=None,
                   help="signal spec; repeat the flag for several (default zero)")
    p.add_argument("--dist", action="append", default=None,
                   help="distribution spec; repeatable (default gaussian:1.0)")
    p.add_argument("--reps", type=int, default=200)
    common(p, workers=True)

    p = sub.add_parser("localize", help="top-singular-value interval containment runs")
    p.add_argument("--lambda1", type=float, default=3.0)
    p.add_argument("--M", type=int, default=512)
    p.add_argument("--dist", default="gaussian:1.0")
    p.add_argument("--seeds", type=int, default=50)
    p.add_argument("--slack", type=float, default=0.2)
    common(p)

    p = sub.add_parser("rank-select", help="accuracy-based rank selection on a matrix file")
    p.add_argument("--in", dest="infile", required=True, help="matrix file (.csv or raw)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--sigma", type=float, default=0.0,
                   help="entry std of the noise present in the input (0 = noiseless)")
    common(p)

    p = sub.add_parser("slln", help="covariance quadratic form trajectories")
    p.add_argument("--u-rule", default="ones", help='"ones" | "finite:k" | "file:path"')
    p.add_argument("--dist", default="gaussian:1.0")
    p.add_argument("--M-grid", type=_int_list, default=[256, 1024, 4096])
    p.add_argument("--seeds", type=int, default=1)
    common(p)

    return parser


def _emit(args, payload: dict, rows: list[dict]) -> None:
    if args.format == "csv":
        emit_csv(rows, args.out)
    else:
        emit_json(payload, args.out)


def _cmd_simulate(args) -> tuple[int, dict, list[dict]]:
    dist = parse_distribution(args.dist)
    config = montecarlo.ExperimentConfig(
        M=args.M, r=args.r, c_spec=args.C, dist=dist, reps=args.reps,
        seed=args.seed, normalization=args.normalization,
    )
    estimates = montecarlo.estimate_many(config, montecarlo.STATISTICS, workers=args.workers)
    spectrum = singular_values(montecarlo.build_c(config.c_spec, config.M))
    report = bounds.full_report(
        spectrum, config.M, config.r,
        config.entry_variance(), config.entry_fourth_moment(),
        sigma1=estimates["sigma1"].mean,
        gaussian=dist.kind == "gaussian",
    )
    payload = {
        "config": config,
        "estimates": estimates,
        "bounds": report.to_json_dict(),
    }
    base = {"M": args.M, "r": args.r, "C": args.C, "dist": dist.spec_string(),
            "seed": args.seed}
    rows = [
        {**base, "statistic": name, "mean": est.mean, "stderr": est.stderr,
         "n": est.n, "min": est.min, "max": est.max}
        for name, est in estimates.items()
    ]
    rows += [
        {**base, "statistic": f"bound:{name}", "value": value}
        for name, value in report.to_json_dict().items()
    ]
    return 0, payload, rows


def _cmd_verify(args) -> tuple[int, dict, list[dict]]:
    dist = parse_distribution(args.dist)
    results = suites.run_all(args.M, args.r, dist, args.trials, Seed(args.seed))
    total = sum(len(s.violations) for s in results)
    payload = {
        "suites": results,
        "violations": total,
    }
    rows = [
        {"suite": s.name, "checked": s.checked, "violations": len(s.violations)}
        for s in results
    ]
    return (0 if total == 0 else 1), payload, rows


def _cmd_sweep(args) -> tuple[int, dict, list[dict]]:
    c_specs = args.C or ["zero"]
    dist_specs = args.dist or ["gaussian:1.0"]
    configs = []
    for m in args.M:
        for r in args.r:
            if not 1 <= r < m:
                raise InvalidInputError(f"sweep grid entry r={r} invalid for M={m}")
            for c_spec in c_specs:
                for dist_spec in dist_specs:
                    configs.append(montecarlo.ExperimentConfig(
                        M=m, r=r, c_spec=c_spec, dist=parse_distribution(dist_spec),
                        reps=args.reps, seed=args.seed,
                        experiment=len(configs),
                    ))
    report = montecarlo.ratio_report(configs, workers=args.workers)
    rows = [
        {
            "M": row.config.M, "r": row.config.r, "C": row.config.c_spec,
            "dist": row.config.dist.spec_string(), "reps": row.config.reps,
            "seed": row.config.seed, "mean_z_sup": row.estimate.mean,
            "stderr": row.estimate.stderr, "thm3_value": row.thm3_value,
            "ratio": row.ratio,
        }
        for row in report.rows
    ]
    payload = {"rows": report.rows, "max_ratio": report.max_ratio}
    return 0, payload, rows


def _cmd_localize(args) -> tuple[int, dict, list[dict]]:
    dist = parse_distribution(args.dist)
    interval, records = localization.interval_containment_run(
        args.lambda1, args.M, dist, args.seeds, Seed(args.seed), slack=args.slack,
    )
    misses = [rec for rec in records if not rec.contained]
    payload = {
        "interval": interval,
        "slack": args.slack,
        "records": records,
        "violations": len(misses),
    }
    rows = [
        {"seed": rec.seed_label, "M": args.M, "statistic": "lambda1_observed",
         "value": rec.observed, "contained": rec.contained}
        for rec in records
    ]
    return (0 if not misses else 1), payload, rows


def _cmd_rank_select(args) -> tuple[int, dict, list[dict]]:
    x = load_matrix(args.infile)
    cfg = localization.RankSelectionConfig(args.alpha, args.sigma ** 2)
    if args.sigma == 0.0:
        selected: int | None = localization.rank_select(singular_values(x), cfg)
    else:
        selected = localization.empirical_rank_select(x, cfg)
    outcome = "ok" if selected is not None else "no-detectable-signal"
    payload = {"selected_rank": selected, "outcome": outcome,
               "alpha": args.alpha, "sigma": args.sigma, "file": args.infile}
    rows = [{"file": args.infile, "alpha": args.alpha, "sigma": args.sigma,
             "statistic": "selected_rank",
             "value": selected if selected is not None else "none"}]
    print(selected if selected is not None else "no detectable signal")
    return 0, payload, rows


def _cmd_slln(args) -> tuple[int, dict, list[dict]]:
    dist = parse_distribution(args.dist)
    sigma_sq = dist.variance()
    trajectories = {}
    rows = []
    for k in range(args.seeds):
        traj = localization.slln_trajectory(
            args.u_rule, dist, args.M_grid, Seed(args.seed, (k,))
        )
        trajectories[k] = traj
        rows += [
            {"seed": k, "M": m, "statistic": "Z_M", "value": value}
            for m, value in traj
        ]
    payload = {"u_rule": args.u_rule, "limit_sigma_sq": sigma_sq,
               "trajectories": trajectories}
    return 0, payload, rows


_HANDLERS = {
    "simulate": _cmd_simulate,
    "verify": _cmd_verify,
    "sweep": _cmd_sweep,
    "localize": _cmd_localize,
    "rank-select": _cmd_rank_select,
    "slln": _cmd_slln,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    manifest = RunManifest(
        command=args.command,
        params={k: v for k, v in vars(args).items() if k != "command"},
        version=__version__,
        seed_root=getattr(args, "seed", 0),
    )
    try:
        code, payload, rows = _HANDLERS[args.command](args)
    except InvalidInputError as exc:
        print(f"projlab {args.command}: invalid input: {exc}", file=sys.stderr)
        return 2
    except NumericalFailureError as exc:
        manifest.finish("error", reproducers=[_failure_reproducer(exc)])
        emit_json({"manifest": manifest}, args.out)
        print(f"projlab {args.command}: numerical failure: {exc}", file=sys.stderr)
        return 1
    manifest.finish("pass" if code == 0 else "fail",
                    reproducers=_payload_reproducers(payload))
    _emit(args, {"manifest": manifest, "results": payload}, rows)
    return code


def _failure_reproducer(exc: NumericalFailureError) -> dict:
    out = {"error": str(exc)}
    for attr in ("index", "seed_root", "labels"):
        if hasattr(exc, attr):
            out[attr] = getattr(exc, attr)
    return out


def _payload_reproducers(payload: dict) -> list[dict]:
    reproducers = []
    for suite in payload.get("suites", ()):  # verification violations
        reproducers += [v.reproducer for v in suite.violations]
    for rec in payload.get("records", ()):  # localization misses
        if not rec.contained:
            reproducers.append({"seed_label": rec.seed_label, "observed": rec.observed})
    return reproducers


if __name__ == "__main__":
    sys.exit(main())
