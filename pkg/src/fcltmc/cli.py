"""Command-line entry point.

Subcommands
-----------
sample          dump one sampled path as CSV (t,value)
verify-oracles  closed-form constants vs Monte Carlo, one pass/fail per row
sweep           rate-bracket sweeps: ct | dt0 | ar1
constants       upper | lower | scaled-max | unit-max   (aliases CX, cx, zeta, eta)
asymptotic      dt-sup: iid bridge-max growth, exact-law sampling
sde             weak-approximation sweeps for examples 1 | 2 | 3

Every run is a pure function of its full argument vector: identical
invocations produce byte-identical output files at any --threads value.
Exit codes: 0 all assertions pass, 1 an assertion failed, 2 bad
configuration.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import experiments, metrics, oracles, sde
from .couplings import build_ct_pair, build_dt0_pair
from .errors import AssertionFailure, ConfigurationError
from .gaussian_paths import Ar1Params, TimeGrid, sample_ar1, sample_bm, sample_bridge, \
    sample_ou_stationary, ou_via_time_change
from .metrics import MCEstimate, l1_diff, mc_mean_vec
from .rng import RngStreamSpec

_SQRT2 = math.sqrt(2.0)


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_csv(path: str, metadata: list[str], header: list[str], rows: list[list]):
    lines = [f"# {m}" for m in metadata]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _jsonable(obj):
    if isinstance(obj, MCEstimate):
        return {"mean": obj.mean, "stderr": obj.stderr, "n": obj.n}
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def _write_json(path: str, payload: dict):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(payload), fh, sort_keys=True, indent=1)
        fh.write("\n")


def _write_constants_sidecar(out: str):
    """Reference constants consumed by the plotting frontend."""
    _write_json(
        out + ".constants.json",
        {
            "upper_bracket_constant": 14.0,
            "lower_bracket_constant": 0.2,
            "reference_value": _SQRT2,
            "tail_oracle_limit": 1.0 / _SQRT2,
        },
    )


def _strip_threads(argv: list[str]) -> list[str]:
    # thread count never changes results, so it is not part of the
    # reproducibility-relevant command line
    out, skip = [], False
    for tok in argv:
        if skip:
            skip = False
            continue
        if tok == "--threads":
            skip = True
            continue
        if tok.startswith("--threads="):
            continue
        out.append(tok)
    return out


def _emit(args, payload: dict, header: list[str], rows: list[list], sidecar=False):
    meta = [
        "command: " + " ".join(_strip_threads(payload["params"].get("argv", []))),
        f"seed: {args.seed}",
    ]
    if args.out:
        if args.format == "csv":
            _write_csv(args.out, meta, header, rows)
        else:
            _write_json(args.out, payload)
        if sidecar:
            _write_constants_sidecar(args.out)


class _Checker:
    """Collects named pass/fail assertions and prints one line each."""

    def __init__(self):
        self.records = []

    def check(self, name: str, ok: bool, detail: str = ""):
        self.records.append({"name": name, "passed": bool(ok), "detail": detail})
        status = "PASS" if ok else "FAIL"
        line = f"[{status}] {name}"
        if detail:
            line += f"  ({detail})"
        print(line)
        return ok

    @property
    def all_passed(self) -> bool:
        return all(r["passed"] for r in self.records)


def _stream(args) -> RngStreamSpec:
    return RngStreamSpec(args.seed, 0)


# ---------------------------------------------------------------- sample


def cmd_sample(args) -> int:
    stream = _stream(args)
    if args.process == "ar1":
        seq = sample_ar1(args.n, Ar1Params(args.a), stream)
        rows = [[float(i), float(v)] for i, v in enumerate(seq)]
    else:
        grid = TimeGrid(t_end=args.horizon, step=args.dt)
        sampler = {
            "bm": sample_bm,
            "bridge": sample_bridge,
            "ou": sample_ou_stationary,
            "ou-warp": ou_via_time_change,
        }[args.process]
        path = sampler(grid, stream)
        rows = [[float(t), float(v)] for t, v in zip(path.times(), path.values)]
    payload = {
        "experiment": "sample",
        "params": {"argv": args.argv, "process": args.process, "seed": args.seed},
        "rows": rows,
    }
    _emit(args, payload, ["t", "value"], rows)
    print(f"sampled {len(rows)} points of {args.process}")
    return 0


# ---------------------------------------------------------- verify-oracles


def _estimate_variance(samples: np.ndarray) -> tuple[float, float]:
    n = samples.size
    v = float(samples.var(ddof=1))
    return v, v * math.sqrt(2.0 / (n - 1))


def cmd_verify_oracles(args) -> int:
    stream = _stream(args)
    reps = args.reps
    step = args.dt
    threads = args.threads
    grid = TimeGrid(t_end=1.0, step=step)
    checker = _Checker()

    def bridge_stats(spec):
        b = sample_bridge(grid, spec).values
        return np.array([float(np.max(b)),
                         metrics.continuum_tail(b, step, 0.5),
                         metrics.continuum_tail(b, step, 1.0),
                         float(np.max(np.abs(b)))])

    def bm_stats(spec):
        w = sample_bm(grid, spec).values
        return np.array([float(np.max(w)), metrics.continuum_tail(w, step, 1.0)])

    def ou_stats(spec):
        x = sample_ou_stationary(grid, spec).values
        m = float(np.max(x))
        return np.array([m, 1.0 if m > 4.2 else 0.0])

    b_mean, b_t05, b_t10, b_abs = mc_mean_vec(bridge_stats, 4, reps, stream.block(0), threads)
    w_mean, w_t10 = mc_mean_vec(bm_stats, 2, reps, stream.block(1), threads)
    x_mean, x_t42 = mc_mean_vec(ou_stats, 2, reps, stream.block(2), threads)

    def pair_stats(spec):
        pair = build_dt0_pair(4.0, 1.0, spec, substeps=64)
        return np.array([l1_diff(pair, 1.0)])

    (l1_est,) = mc_mean_vec(pair_stats, 1, reps, stream.block(3), threads)

    def ct_end(spec):
        pair = build_ct_pair(1.0, 1.0, 1.0 / 64.0, spec)
        return np.array([pair.w_kappa.values[-1]])

    ct_vals = np.array(
        [ct_end(stream.block(4).replicate(i))[0] for i in range(min(reps, 20000))]
    )
    var_est, var_sd = _estimate_variance(ct_vals)

    # Tail rows use the crossing-corrected estimator, which is unbiased for
    # the continuum law; the 0.5% discretization allowance is kept as margin.
    disc_allow = 0.005
    rows = []

    def add(name, closed, est, stderr, tol, ok):
        rows.append([name, closed, est, stderr, tol, "pass" if ok else "FAIL"])
        checker.check(f"oracle {name}", ok, f"closed={closed:.6g} mc={est:.6g}")

    t = oracles.max_tail("bridge", 0.5)
    add("bridge_tail_0.5", t, b_t05.mean, b_t05.stderr,
        3 * b_t05.stderr + disc_allow, abs(b_t05.mean - t) <= 3 * b_t05.stderr + disc_allow)
    t = oracles.max_tail("bridge", 1.0)
    add("bridge_tail_1.0", t, b_t10.mean, b_t10.stderr,
        3 * b_t10.stderr + disc_allow, abs(b_t10.mean - t) <= 3 * b_t10.stderr + disc_allow)
    t = oracles.max_tail("bm", 1.0)
    add("bm_tail_1.0", t, w_t10.mean, w_t10.stderr,
        3 * w_t10.stderr + disc_allow, abs(w_t10.mean - t) <= 3 * w_t10.stderr + disc_allow)
    t = oracles.closed_moment("E_max_bridge")
    add("E_max_bridge", t, b_mean.mean, b_mean.stderr, 0.02 * t,
        abs(b_mean.mean - t) <= 0.02 * t)
    t = oracles.closed_moment("E_max_bm")
    add("E_max_bm", t, w_mean.mean, w_mean.stderr, 0.02 * t,
        abs(w_mean.mean - t) <= 0.02 * t)
    t = oracles.closed_moment("E_abs_max_bridge")
    add("E_abs_max_bridge", t, b_abs.mean, b_abs.stderr, 0.02 * t,
        abs(b_abs.mean - t) <= 0.02 * t)
    lo, hi = 1.2, 3.2
    add("unit_max_bracket", (lo + hi) / 2, x_mean.mean, x_mean.stderr, 0.0,
        lo - 3 * x_mean.stderr < x_mean.mean < hi + 3 * x_mean.stderr)
    t = oracles.borell_tis_tail(4.2, 3.2, 1.0)
    add("concentration_4.2", t, x_t42.mean, x_t42.stderr, 0.0,
        x_t42.mean <= t + 3 * x_t42.stderr)
    ok = (2 * b_mean.mean - 3 * (2 * b_mean.stderr + x_mean.stderr) <= x_mean.mean
          <= 4 * w_mean.mean + 3 * (4 * w_mean.stderr + x_mean.stderr))
    add("comparison_sandwich", 0.0, x_mean.mean, x_mean.stderr, 0.0, ok)
    t = oracles.l1_rate(4.0)
    add("l1_rate_k4", t, l1_est.mean, l1_est.stderr, 0.02 * t,
        abs(l1_est.mean - t) <= 0.02 * t)
    t = oracles.var_wkappa_ct(1.0, 1.0)
    add("var_wkappa_1_1", t, var_est, var_sd, 3 * var_sd,
        abs(var_est - t) <= 3 * var_sd)

    payload = {
        "experiment": "verify-oracles",
        "params": {"argv": args.argv, "reps": reps, "dt": step, "seed": args.seed},
        "rows": rows,
        "assertions": checker.records,
    }
    _emit(args, payload, ["name", "closed_form", "estimate", "stderr", "tolerance", "status"], rows)
    return 0 if checker.all_passed else 1


# ----------------------------------------------------------------- sweep


def _sweep_assertions(table, checker: _Checker):
    mode = table.mode
    horizon = table.params["norm_horizon"]
    for row in table.rows:
        combined = 3.0 * (row.upper.stderr + row.lower.stderr)
        checker.check(
            f"{mode} k={row.kappa:g} bracket order",
            row.lower.mean <= row.upper.mean + combined,
            f"lower={row.lower.mean:.4g} upper={row.upper.mean:.4g}",
        )
        if mode == "ct":
            band = 14.0
        elif mode == "dt0":
            band = 8.0 * math.sqrt(math.log1p(row.kappa * horizon)) / math.sqrt(
                math.log1p(row.kappa)
            )
        else:
            # no closed constant for the AR(1) memory term; the wide
            # continuous-time band is recorded as a non-binding reference
            band = 14.0
        checker.check(
            f"{mode} k={row.kappa:g} ratio_upper <= {band:.3g}",
            row.ratio_upper <= band,
            f"ratio_upper={row.ratio_upper:.4g}",
        )
        checker.check(
            f"{mode} k={row.kappa:g} ratio_lower >= 0.2",
            row.ratio_lower >= 0.2,
            f"ratio_lower={row.ratio_lower:.4g}",
        )
    if len(table.rows) >= 2:
        for which in ("ratio_upper", "ratio_lower"):
            spread = table.ratio_spread(which)
            checker.check(
                f"{mode} {which} trend factor <= 2",
                spread <= 2.0,
                f"max/min={spread:.4g}",
            )


def cmd_sweep(args) -> int:
    kappas = args.kappas or (
        experiments.DEFAULT_AR1_KAPPAS if args.mode == "ar1" else experiments.DEFAULT_CT_KAPPAS
    )
    for k in kappas:
        if k < 1.0:
            raise ConfigurationError(f"kappa must be >= 1, got {k:g}")
    cfg = experiments.SweepConfig(
        norm_horizon=args.norm_horizon,
        ct_step=args.dt,
        substeps=args.substeps,
        bounded_horizon=args.bounded_horizon,
        a=args.a,
        threads=args.threads,
    )
    table = experiments.sweep_rate(args.mode, kappas, args.reps, cfg, _stream(args))
    checker = _Checker()
    _sweep_assertions(table, checker)
    rows = [
        [r.kappa, r.upper.mean, r.upper.stderr, r.lower.mean, r.lower.stderr,
         r.envelope, r.ratio_upper, r.ratio_lower]
        for r in table.rows
    ]
    payload = {
        "experiment": f"sweep-{args.mode}",
        "params": {"argv": args.argv, "seed": args.seed, **table.params},
        "rows": [
            {"kappa": r.kappa, "upper": r.upper, "lower": r.lower,
             "envelope": r.envelope, "ratio_upper": r.ratio_upper,
             "ratio_lower": r.ratio_lower}
            for r in table.rows
        ],
        "assertions": checker.records,
    }
    _emit(
        args, payload,
        ["kappa", "upper_mean", "upper_stderr", "lower_mean", "lower_stderr",
         "envelope", "ratio_upper", "ratio_lower"],
        rows, sidecar=True,
    )
    return 0 if checker.all_passed else 1


# -------------------------------------------------------------- constants


_CONSTANT_ALIASES = {
    "upper": "upper", "CX": "upper",
    "lower": "lower", "cx": "lower",
    "scaled-max": "scaled-max", "zeta": "scaled-max",
    "unit-max": "unit-max", "eta": "unit-max",
}


def cmd_constants(args) -> int:
    which = _CONSTANT_ALIASES[args.which]
    stream = _stream(args)
    checker = _Checker()
    if which == "upper":
        est = experiments.estimate_upper_rate_constant(
            args.reps, stream, horizon=args.horizon, step=args.dt, threads=args.threads
        )
        lo, hi = est.paper_bracket
        checker.check(
            "upper constant in (1.4, 14)",
            lo - 3 * est.value.stderr < est.value.mean < hi + 3 * est.value.stderr,
            f"estimate={est.value.mean:.4g}",
        )
        checker.check(
            "horizon doubling stable < 2%",
            est.extras["doubling_rel_change"] < 0.02,
            f"rel_change={est.extras['doubling_rel_change']:.4g}",
        )
    elif which == "lower":
        kappas = args.kappas or [2**j for j in range(14)] + [10000]
        est = experiments.estimate_lower_rate_constant(
            kappas, args.reps, stream, step=args.dt, threads=args.threads
        )
        lo, hi = est.paper_bracket
        checker.check(
            "lower constant in (0.2, 0.8)",
            lo - 3 * est.value.stderr < est.value.mean < hi + 3 * est.value.stderr,
            f"estimate={est.value.mean:.4g}",
        )
        checker.check(
            "large-kappa sup growth in (0.85, 1.15)",
            0.85 < est.extras["large_kappa_sup_ratio"] < 1.15,
            f"ratio={est.extras['large_kappa_sup_ratio']:.4g}",
        )
    elif which == "scaled-max":
        kappas = args.kappas or [4, 16, 64, 256, 1024, 4096, 10000]
        est = experiments.estimate_scaled_max_limit(
            kappas, args.reps, stream, step=args.dt, threads=args.threads
        )
        target = est.paper_bracket
        checker.check(
            "scaled max within 15% of target at largest kappa",
            abs(est.value.mean - target) <= 0.15 * target,
            f"estimate={est.value.mean:.4g} target={target:.4g}",
        )
        checker.check(
            "trend approaches target",
            est.extras["last_gap"] < est.extras["first_gap"],
            f"first_gap={est.extras['first_gap']:.4g} last_gap={est.extras['last_gap']:.4g}",
        )
    else:
        est = experiments.ou_unit_max_stats(
            args.reps, stream, step=args.dt, threads=args.threads
        )
        lo, hi = est.paper_bracket
        checker.check(
            "unit max mean in (1.2, 3.2)",
            lo < est.value.mean < hi,
            f"estimate={est.value.mean:.4g}",
        )
        p35 = est.extras["tail_p35"]
        checker.check(
            "tail at 3.5 within concentration bound",
            p35.mean <= est.extras["tail_bound_35"] + 3 * p35.stderr,
            f"p35={p35.mean:.4g} bound={est.extras['tail_bound_35']:.4g}",
        )
        checker.check(
            "comparison sandwich",
            est.extras["sandwich_low"] - 3 * est.value.stderr
            <= est.value.mean
            <= est.extras["sandwich_high"] + 3 * est.value.stderr,
            f"2EmaxB={est.extras['sandwich_low']:.4g} "
            f"4EmaxW={est.extras['sandwich_high']:.4g}",
        )

    bracket = est.paper_bracket if isinstance(est.paper_bracket, tuple) else (est.paper_bracket, est.paper_bracket)
    rows = [[est.name, est.value.mean, est.value.stderr, est.value.n, bracket[0], bracket[1]]]
    payload = {
        "experiment": f"constants-{which}",
        "params": {"argv": args.argv, "seed": args.seed, "reps": args.reps, "dt": args.dt},
        "constants": [{"name": est.name, "value": est.value,
                       "paper_bracket": list(bracket), "extras": est.extras}],
        "assertions": checker.records,
    }
    _emit(args, payload,
          ["name", "mean", "stderr", "n", "bracket_low", "bracket_high"], rows,
          sidecar=True)
    return 0 if checker.all_passed else 1


# -------------------------------------------------------------- asymptotic


def cmd_asymptotic(args) -> int:
    ns = args.ns or [100, 1000, 10000, 100000]
    est = experiments.dt_sup_asymptotic(ns, args.reps, _stream(args), threads=args.threads)
    checker = _Checker()
    tail = est.extras["tail_oracle_limit"]
    checker.check(
        "scaled max within 15% of tail oracle at largest N",
        abs(est.value.mean - tail) <= 0.15 * tail,
        f"measured={est.value.mean:.4g} tail_oracle={tail:.4g} "
        f"reference={est.extras['reference_value']:.4g} "
        f"supported={est.extras['supported_candidate']}",
    )
    last = est.extras["rows"][-1]
    rel = abs(last["abs_scaled_max"].mean - last["signed_scaled_max"].mean) / last[
        "signed_scaled_max"
    ].mean
    checker.check(
        "two-sided vs one-sided within 5% at largest N",
        rel < 0.05,
        f"rel_diff={rel:.4g}",
    )
    rows = [
        [r["n"], r["signed_scaled_max"].mean, r["signed_scaled_max"].stderr,
         r["abs_scaled_max"].mean, r["abs_scaled_max"].stderr, r["tail_oracle"]]
        for r in est.extras["rows"]
    ]
    payload = {
        "experiment": "asymptotic-dt-sup",
        "params": {"argv": args.argv, "seed": args.seed, "reps": args.reps},
        "rows": [_jsonable(r) for r in est.extras["rows"]],
        "constants": [{"name": est.name, "value": est.value,
                       "supported": est.extras["supported_candidate"]}],
        "assertions": checker.records,
    }
    _emit(args, payload,
          ["n", "signed_mean", "signed_stderr", "abs_mean", "abs_stderr", "tail_oracle"],
          rows, sidecar=True)
    return 0 if checker.all_passed else 1


# -------------------------------------------------------------------- sde


def cmd_sde(args) -> int:
    kappas = args.kappas or [4, 16, 64, 256]
    rows_data = sde.weak_error_sweep(
        args.example,
        args.input_kind,
        kappas,
        args.reps,
        _stream(args),
        alpha=args.alpha,
        K=args.K,
        b_name=args.drift,
        horizon=args.T,
        ct_step=args.dt,
        substeps=args.substeps,
        a=args.a,
        threads=args.threads,
    )
    checker = _Checker()
    for r in rows_data:
        slack = 3.0 * (r["error"].stderr + r["cpsi"] * r["coupling"].stderr)
        checker.check(
            f"example {args.example} k={r['kappa']:g} Lipschitz transfer",
            r["error"].mean <= r["cpsi"] * r["coupling"].mean + slack,
            f"error={r['error'].mean:.4g} bound={r['cpsi'] * r['coupling'].mean:.4g}",
        )
    rows = [
        [r["kappa"], r["error"].mean, r["error"].stderr, r["envelope"], r["ratio"]]
        for r in rows_data
    ]
    payload = {
        "experiment": f"sde-example-{args.example}",
        "params": {"argv": args.argv, "seed": args.seed, "reps": args.reps,
                   "alpha": args.alpha, "K": args.K, "drift": args.drift, "T": args.T},
        "rows": [_jsonable(r) for r in rows_data],
        "assertions": checker.records,
    }
    _emit(args, payload,
          ["kappa", "error_mean", "error_stderr", "envelope", "ratio"], rows)
    return 0 if checker.all_passed else 1


# ------------------------------------------------------------------ parser


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=42, help="master seed (default 42)")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="replicate-parallel worker threads; results do not depend on this")
    p.add_argument("--out", "-o", default=None, help="output file path")
    p.add_argument("--format", choices=["csv", "json"], default="csv")


def _parse_kappas(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok]
    except ValueError as exc:
        raise ConfigurationError(f"bad kappa list {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fcltmc", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="dump a sampled path as CSV")
    p.add_argument("--process", choices=["bm", "bridge", "ou", "ou-warp", "ar1"],
                   default="bm")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--horizon", type=float, default=1.0)
    p.add_argument("--n", type=int, default=1000, help="terms for ar1")
    p.add_argument("--a", type=float, default=0.5, help="AR(1) coefficient")
    _add_common(p)
    p.set_defaults(handler=cmd_sample)

    p = sub.add_parser("verify-oracles", help="closed forms vs Monte Carlo")
    p.add_argument("--reps", type=int, default=20000)
    p.add_argument("--dt", type=float, default=1e-4)
    _add_common(p)
    p.set_defaults(handler=cmd_verify_oracles)

    p = sub.add_parser("sweep", help="rate-bracket sweep")
    p.add_argument("mode", choices=["ct", "dt0", "ar1"])
    p.add_argument("--kappas", type=_parse_kappas, default=None)
    p.add_argument("--reps", type=int, default=2000)
    p.add_argument("--dt", type=float, default=1.0 / 64.0,
                   help="fine step in dilated time (ct mode)")
    p.add_argument("--substeps", type=int, default=16,
                   help="sub-knot resolution (dt modes)")
    p.add_argument("--norm-horizon", type=float, default=1.5)
    p.add_argument("--bounded-horizon", type=float, default=None,
                   help="use the sup norm on [0, T] instead of the weighted norm")
    p.add_argument("--a", type=float, default=0.5, help="AR(1) coefficient (ar1 mode)")
    _add_common(p)
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("constants", help="constant estimates with reference brackets")
    p.add_argument("which", choices=sorted(_CONSTANT_ALIASES.keys()))
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--horizon", type=float, default=1000.0)
    p.add_argument("--kappas", type=_parse_kappas, default=None)
    _add_common(p)
    p.set_defaults(handler=cmd_constants)

    p = sub.add_parser("asymptotic", help="iid bridge-max growth (exact law)")
    p.add_argument("which", choices=["dt-sup"])
    p.add_argument("--ns", type=lambda s: [int(t) for t in s.split(",")], default=None)
    p.add_argument("--reps", type=int, default=1000)
    _add_common(p)
    p.set_defaults(handler=cmd_asymptotic)

    p = sub.add_parser("sde", help="weak-approximation sweep")
    p.add_argument("example", type=int, choices=[1, 2, 3])
    p.add_argument("--input-kind", choices=["ct", "dt0", "ar1"], default="ct")
    p.add_argument("--kappas", type=_parse_kappas, default=None)
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--K", type=float, default=1.0)
    p.add_argument("--drift", choices=sorted(sde.DRIFT_MENU), default="tanh")
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=1.0 / 64.0)
    p.add_argument("--substeps", type=int, default=16)
    p.add_argument("--a", type=float, default=0.5)
    _add_common(p)
    p.set_defaults(handler=cmd_sde)

    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        args.argv = ["fcltmc"] + argv
        if getattr(args, "dt", None) is None and args.command == "constants":
            args.dt = 1e-4 if _CONSTANT_ALIASES[args.which] == "unit-max" else 0.01
        if getattr(args, "threads", 1) < 1:
            raise ConfigurationError(f"--threads must be >= 1, got {args.threads}")
        return args.handler(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except AssertionFailure as exc:
        print(f"assertion failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
