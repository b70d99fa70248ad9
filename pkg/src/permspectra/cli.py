"""Command-line driver with reproducible, machine-readable output.

Every command prints a JSON envelope on stdout:

    {"schema_version": "1", "command": ..., "config_echo": {...},
     "results": {...}, "timing_ms": ...}

or, with ``--format csv``, the tabular part of the results as RFC-4180
style CSV with a header row.  Stochastic commands require an explicit
``--seed``; identical argv (up to --jobs) reproduces identical results
bit for bit, only ``timing_ms`` may differ.

Arc endpoints accept plain decimals, exact rationals ``rat:p/q``, named
irrationals ``irr:golden`` / ``irr:sqrt2`` / ``irr:sqrt3`` / ``irr:e`` /
``irr:pi`` (their fractional parts), and ``affine:p/q+r/s*alpha`` for the
constants command.  Exact tokens are what unlock the closed-form constant
machinery; a decimal is treated as just a number, never as evidence of
rationality or irrationality.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import asdict, is_dataclass
from fractions import Fraction

import numpy as np

from .ewens import EwensParams, sample_cycle_counts
from .experiments import (
    ExperimentConfig,
    run_clt_fixed,
    run_coupling_check,
    run_mesoscopic,
    run_spacings,
)
from .limits import (
    AffineRelated,
    BothIrrationalIndependent,
    BothRational,
    DeclaredIrrational,
    NAMED_IRRATIONALS,
    RationalAlpha,
    RationalBeta,
    c2_closed,
    c2_meso,
    ell_closed,
    s3_closed,
)
from .cesaro import (
    verify_harmonic_identity,
    verify_mean_identity,
    verify_quadratic_identity,
    verify_telescoping,
)
from .rng import trial_rng
from .spectral import Arc, attach_phases, exact_moments_mod, exact_moments_perm

SCHEMA_VERSION = "1"

__all__ = ["main"]


# ---------------------------------------------------------------------------
# endpoint and arc parsing
# ---------------------------------------------------------------------------


def parse_endpoint(token: str):
    """Decimal, rat:p/q (-> Fraction) or irr:name (-> DeclaredIrrational)."""
    token = token.strip()
    if token.startswith("rat:"):
        num, _, den = token[4:].partition("/")
        return Fraction(int(num), int(den) if den else 1)
    if token.startswith("irr:"):
        name = token[4:]
        if name not in NAMED_IRRATIONALS:
            raise ValueError(
                f"unknown irrational {name!r}; choose from {sorted(NAMED_IRRATIONALS)}"
            )
        return NAMED_IRRATIONALS[name]
    return float(token)


def _endpoint_for_arc(value):
    return value.value if isinstance(value, DeclaredIrrational) else value


def parse_arc(alpha_token: str, beta_token: str) -> Arc:
    alpha = _endpoint_for_arc(parse_endpoint(alpha_token))
    beta = _endpoint_for_arc(parse_endpoint(beta_token))
    return Arc(alpha=alpha, beta=beta)


def parse_arcs(spec: str) -> tuple[Arc, ...]:
    """Semicolon-separated comma pairs: "a1,b1;a2,b2"."""
    arcs = []
    for chunk in spec.split(";"):
        parts = chunk.split(",")
        if len(parts) != 2:
            raise ValueError(f"arc {chunk!r} must be 'alpha,beta'")
        arcs.append(parse_arc(parts[0], parts[1]))
    return tuple(arcs)


# ---------------------------------------------------------------------------
# serialisation
# ---------------------------------------------------------------------------


def _jsonable(obj):
    if is_dataclass(obj) and not isinstance(obj, type):
        return _jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, Fraction):
        return {"rational": f"{obj.numerator}/{obj.denominator}", "value": float(obj)}
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def _emit(envelope: dict, fmt: str, csv_rows) -> None:
    if fmt == "json":
        json.dump(_jsonable(envelope), sys.stdout, sort_keys=True)
        sys.stdout.write("\n")
        return
    header, rows = csv_rows
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    # CSV has no envelope, so the schema version rides along as a column
    writer.writerow([*header, "schema_version"])
    for row in rows:
        writer.writerow([*(_csv_cell(c) for c in row), SCHEMA_VERSION])
    sys.stdout.write(buf.getvalue())


def _csv_cell(value):
    if isinstance(value, float):
        return format(value, ".17g")
    return value


# ---------------------------------------------------------------------------
# subcommand implementations: each returns (results_dict, csv_rows)
# ---------------------------------------------------------------------------


def _cmd_sample(args):
    params = EwensParams(args.theta)
    trials = []
    for t in range(args.trials):
        rng = trial_rng(args.seed, t)
        counts = sample_cycle_counts(args.n, params, rng)
        entry = {"cycle_counts": {str(j): a for j, a in sorted(counts.counts.items())}}
        if args.model == "mod":
            spectrum = attach_phases(counts, rng)
            entry["phases"] = spectrum.phases.tolist()
            entry["lengths"] = spectrum.lengths.tolist()
        trials.append(entry)
    header = ["trial", "cycle_length", "multiplicity"]
    rows = [
        (t, j, a)
        for t, entry in enumerate(trials)
        for j, a in entry["cycle_counts"].items()
    ]
    return {"trials": trials}, (header, rows)


def _cmd_exact_moments(args):
    arc = parse_arc(args.alpha, args.beta)
    if args.model == "mod":
        m = exact_moments_mod(args.n, args.theta, arc)
    else:
        m = exact_moments_perm(args.n, args.theta, arc)
    results = {"mean": m.mean, "variance": m.variance, "model": args.model}
    return results, (["mean", "variance"], [(m.mean, m.variance)])


def _parse_constants_class(args):
    case = args.case
    if case == "both-irrational-independent":
        a = parse_endpoint(args.alpha or "irr:sqrt2")
        b = parse_endpoint(args.beta or "irr:golden")
        return BothIrrationalIndependent(float(a), float(b))
    if case == "rational-alpha":
        b = parse_endpoint(args.beta or "irr:golden")
        return RationalAlpha(p=args.p, q=args.q, beta_value=float(b))
    if case == "rational-beta":
        a = parse_endpoint(args.alpha or "irr:golden")
        return RationalBeta(alpha_value=float(a), r=args.r, s=args.s)
    if case == "both-rational":
        return BothRational(p=args.p, q=args.q, r=args.r, s=args.s)
    if case == "affine":
        a = parse_endpoint(args.alpha or "irr:golden")
        return AffineRelated(
            p=args.p, q=args.q, r=args.r, s=args.s, alpha_value=float(a)
        )
    raise ValueError(f"unhandled case {case!r}")


def _cmd_constants(args):
    if args.case in ("ell-rational", "ell-irrational", "meso-rational", "meso-irrational"):
        if args.case.endswith("rational") and not args.case.endswith("irrational"):
            x = Fraction(args.p, args.q)
        else:
            x = parse_endpoint(args.alpha or "irr:golden")
            if not isinstance(x, DeclaredIrrational):
                raise ValueError("irrational cases need an irr: endpoint")
        value = ell_closed(x) if args.case.startswith("ell") else c2_meso(x)
        name = "ell" if args.case.startswith("ell") else "c2_meso"
        results = {"case": args.case, name: value}
        return results, ([name], [(value,)])
    cls = _parse_constants_class(args)
    results = {
        "case": args.case,
        "c2": c2_closed(cls),
        "s3": s3_closed(cls),
        "class": repr(cls),
    }
    return results, (["c2", "s3"], [(results["c2"], results["s3"])])


def _cmd_identities(args):
    checks = {}
    lhs, rhs = verify_mean_identity(args.n, args.theta)
    checks["mean"] = (lhs, rhs)
    lhs, rhs = verify_harmonic_identity(args.n, args.theta)
    checks["harmonic"] = (lhs, rhs)
    lhs, rhs = verify_quadratic_identity(args.n, args.theta)
    checks["quadratic"] = (lhs, rhs)
    j_probe = max(1, args.n // 3)
    lhs, rhs = verify_telescoping(args.n, j_probe, args.theta)
    checks["telescoping"] = (lhs, rhs)

    rows = []
    results = {}
    worst = 0.0
    for name, (left, right) in checks.items():
        gap = abs(left - right) / max(abs(right), 1e-300)
        tol = 1e-8 if name == "quadratic" else 1e-10
        ok = gap < tol
        worst = max(worst, gap)
        results[name] = {"lhs": left, "rhs": right, "relative_gap": gap, "pass": ok}
        rows.append((name, left, right, gap, ok))
    results["max_relative_gap"] = worst
    results["all_pass"] = all(v["pass"] for v in results.values() if isinstance(v, dict))
    header = ["identity", "lhs", "rhs", "relative_gap", "pass"]
    return results, (header, rows)


def _cmd_clt(args):
    config = ExperimentConfig(
        theta=args.theta,
        trials=args.trials,
        master_seed=args.seed,
        model=args.model,
        n=args.n,
        arcs=parse_arcs(args.arcs),
    )
    res = run_clt_fixed(config, jobs=args.jobs)
    results = {
        "reports": [_jsonable(r) for r in res.reports],
        "empirical_correlation": res.empirical_correlation.tolist(),
        "reference_correlation": res.reference_correlation.tolist(),
        "moments": [{"mean": m, "variance": v} for m, v in res.moments],
    }
    header = ["arc", "ks_statistic", "ks_p_value", "empirical_mean", "empirical_variance",
              "reference_mean", "reference_variance"]
    rows = [
        (k, r.ks_statistic, r.ks_p_value, r.empirical_mean, r.empirical_variance,
         r.reference_mean, r.reference_variance)
        for k, r in enumerate(res.reports)
    ]
    return results, (header, rows)


def _cmd_mesoscopic(args):
    alpha = parse_endpoint(args.alpha) if args.alpha else Fraction(0)
    if isinstance(alpha, float):
        raise ValueError(
            "mesoscopic anchor must be rat:p/q or irr:name; rationality cannot "
            "be inferred from a decimal"
        )
    config = ExperimentConfig(
        theta=args.theta,
        trials=args.trials,
        master_seed=args.seed,
        model=args.model,
        n_schedule=tuple(args.n_list),
        gamma=args.gamma,
        meso_alpha=alpha,
    )
    res = run_mesoscopic(config, jobs=args.jobs)
    results = {
        "constant": res.constant,
        "rows": [_jsonable(r) for r in res.rows],
        "report": _jsonable(res.report) if res.report else None,
    }
    header = ["n", "delta", "log_n_delta", "variance", "variance_is_exact", "target", "ratio"]
    rows = [
        (r.n, r.delta, r.log_n_delta, r.variance, r.variance_is_exact, r.target, r.ratio)
        for r in res.rows
    ]
    return results, (header, rows)


def _cmd_spacings(args):
    res = run_spacings(args.n_list, args.theta, args.trials, args.seed, jobs=args.jobs)
    results = {"rows": [_jsonable(r) for r in res.rows]}
    header = ["n", "statistic"] + [f"q{int(100 * q)}" for q in res.rows[0].quantile_levels]
    rows = []
    for r in res.rows:
        for name, qs in (
            ("nD", r.nD),
            ("n2d", r.n2d),
            ("nD_mod", r.nD_mod),
            ("n2d_mod", r.n2d_mod),
        ):
            rows.append((r.n, name, *qs))
    return results, (header, rows)


def _cmd_coupling_check(args):
    rep = run_coupling_check(
        args.n, args.theta, args.trials, args.seed,
        epsilon_tail=args.epsilon_tail, jobs=args.jobs,
    )
    results = _jsonable(rep)
    header = ["n", "theta", "empirical_mean", "std_error", "tail_bound", "bound", "horizon"]
    rows = [(rep.n, rep.theta, rep.empirical_mean, rep.std_error, rep.tail_bound,
             rep.bound, rep.horizon)]
    return results, (header, rows)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="permspectra",
        description="Eigenvalue counting statistics for random permutation matrices",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, stochastic: bool):
        p.add_argument("--theta", type=float, default=1.0)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        if stochastic:
            p.add_argument("--seed", type=int, required=True,
                           help="master seed (required; no silent time seeding)")
            p.add_argument("--trials", type=int, default=2000)
            p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("sample", help="draw cycle structures (and phases)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--model", choices=("perm", "mod"), default="perm")
    common(p, stochastic=True)

    p = sub.add_parser("exact-moments", help="exact finite-n count moments for one arc")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--beta", required=True)
    p.add_argument("--model", choices=("perm", "mod"), default="perm")
    common(p, stochastic=False)

    p = sub.add_parser("constants", help="closed-form limit constants")
    p.add_argument("--case", required=True, choices=(
        "both-irrational-independent", "rational-alpha", "rational-beta",
        "both-rational", "affine",
        "ell-rational", "ell-irrational", "meso-rational", "meso-irrational",
    ))
    p.add_argument("--p", type=int, default=0)
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--alpha")
    p.add_argument("--beta")
    common(p, stochastic=False)

    p = sub.add_parser("identities", help="Cesàro-weight identity suite")
    p.add_argument("--n", type=int, default=500)
    common(p, stochastic=False)

    p = sub.add_parser("clt", help="fixed-arc normality experiment")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--arcs", required=True, help="'a1,b1;a2,b2' endpoint tokens")
    p.add_argument("--model", choices=("perm", "mod"), default="mod")
    common(p, stochastic=True)

    p = sub.add_parser("mesoscopic", help="shrinking-arc variance and normality")
    p.add_argument("--n-list", type=_int_list, required=True)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--alpha", help="rat:p/q or irr:name anchor (default rat:0/1)")
    p.add_argument("--model", choices=("perm", "mod"), default="mod")
    common(p, stochastic=True)

    p = sub.add_parser("spacings", help="extremal spacing quantiles across sizes")
    p.add_argument("--n-list", type=_int_list, required=True)
    common(p, stochastic=True)

    p = sub.add_parser("coupling-check", help="Feller coupling distance vs bound")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--epsilon-tail", type=float, default=1e-3)
    common(p, stochastic=True)

    return parser


_HANDLERS = {
    "sample": _cmd_sample,
    "exact-moments": _cmd_exact_moments,
    "constants": _cmd_constants,
    "identities": _cmd_identities,
    "clt": _cmd_clt,
    "mesoscopic": _cmd_mesoscopic,
    "spacings": _cmd_spacings,
    "coupling-check": _cmd_coupling_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config_echo = dict(sorted(vars(args).items()))
    start = time.monotonic()
    try:
        results, csv_rows = _HANDLERS[args.command](args)
    except (ValueError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    envelope = {
        "schema_version": SCHEMA_VERSION,
        "command": args.command,
        "config_echo": config_echo,
        "results": results,
        "timing_ms": int((time.monotonic() - start) * 1000),
    }
    _emit(envelope, args.format, csv_rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
