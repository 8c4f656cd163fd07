"""Acceptance suite: every hard criterion at its stated size and tolerance.

Seeds are fixed at 42.  Each criterion prints one [PASS]/[FAIL] line with
its measured values and wall time (run pytest with -s to see them live).
Monte Carlo tolerances: closed brackets use 3-standard-error slack plus
any stated discretization allowance; logarithmic-rate limits use the
stated +-15 percent bands.
"""

import math
import os
import time

import numpy as np
import pytest

from fcltmc import cli, experiments, oracles
from fcltmc.couplings import build_ct_pair, build_dt0_pair, wkappa_by_quadrature
from fcltmc.experiments import SweepConfig, sweep_rate
from fcltmc.gaussian_paths import Path, TimeGrid, sample_bm, sample_bridge
from fcltmc.metrics import (
    WeightedNormConfig,
    continuum_tail,
    l1_diff,
    mc_mean_vec,
    sup_norm,
    weighted_norm,
)
from fcltmc.rng import RngStreamSpec
from fcltmc.sde import DriftSpec, apply_solution_map, lipschitz_constant

SEED = 42
THREADS = os.cpu_count() or 1
BASE = RngStreamSpec(SEED, 0)

_t0 = {}


def _report(name: str, ok: bool, detail: str, started: float) -> bool:
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] {name}  ({detail})  [{time.time() - started:.1f}s]")
    return ok


# ------------------------------------------------------------------ fixtures


@pytest.fixture(scope="module")
def bridge_ensemble():
    """1e5 bridge paths at step 1e-4: max, crossing-corrected tails."""
    grid = TimeGrid(t_end=1.0, step=1e-4)

    def stats(spec):
        b = sample_bridge(grid, spec).values
        return np.array(
            [
                float(np.max(b)),
                continuum_tail(b, 1e-4, 0.5),
                continuum_tail(b, 1e-4, 1.0),
            ]
        )

    start = time.time()
    ests = mc_mean_vec(stats, 3, 100_000, BASE.block(101), THREADS)
    return {"max": ests[0], "tail05": ests[1], "tail10": ests[2],
            "seconds": time.time() - start}


@pytest.fixture(scope="module")
def bm_ensemble():
    grid = TimeGrid(t_end=1.0, step=1e-4)

    def stats(spec):
        w = sample_bm(grid, spec).values
        return np.array([float(np.max(w))])

    start = time.time()
    (est,) = mc_mean_vec(stats, 1, 100_000, BASE.block(102), THREADS)
    return {"max": est, "seconds": time.time() - start}


# ----------------------------------------------------------------- criteria


def test_criterion_bridge_max_law(bridge_ensemble):
    start = time.time() - bridge_ensemble["seconds"]
    allow = 0.005  # stated discretization allowance, absolute
    oks, details = [], []
    for key, level in (("tail05", 0.5), ("tail10", 1.0)):
        est = bridge_ensemble[key]
        target = oracles.max_tail("bridge", level)
        tol = 3.0 * est.stderr + allow
        oks.append(abs(est.mean - target) <= tol)
        details.append(f"P(>{level})={est.mean:.5f} vs {target:.5f} tol={tol:.5f}")
    elapsed = time.time() - start
    ok = all(oks) and elapsed < 120.0
    assert _report(
        "bridge max law (1e5 paths, step 1e-4)",
        ok,
        "; ".join(details) + f"; runtime {elapsed:.0f}s < 120s",
        start,
    )


def test_criterion_expected_maxima(bridge_ensemble, bm_ensemble):
    start = time.time() - bm_ensemble["seconds"]
    eb, ew = bridge_ensemble["max"], bm_ensemble["max"]
    tb = oracles.closed_moment("E_max_bridge")
    tw = oracles.closed_moment("E_max_bm")
    ok_b = abs(eb.mean - tb) <= 0.02 * tb
    ok_w = abs(ew.mean - tw) <= 0.02 * tw
    elapsed = time.time() - start
    ok = ok_b and ok_w and elapsed < 120.0
    assert _report(
        "expected maxima (1e5 paths, step 1e-4, 2%)",
        ok,
        f"bridge {eb.mean:.4f} vs {tb:.4f}; bm {ew.mean:.4f} vs {tw:.4f}; "
        f"runtime {elapsed:.0f}s < 120s",
        start,
    )


def test_criterion_unit_max_bracket_and_tail():
    start = time.time()
    est = experiments.ou_unit_max_stats(1_000_000, BASE.block(103), threads=THREADS)
    lo, hi = est.paper_bracket
    ok_bracket = lo < est.value.mean < hi
    slack = 3.0 * est.value.stderr
    ok_sandwich = (
        est.extras["sandwich_low"] - slack
        <= est.value.mean
        <= est.extras["sandwich_high"] + slack
    )
    p35 = est.extras["tail_p35"]
    ok_tail = p35.mean <= est.extras["tail_bound_35"] + 3.0 * p35.stderr
    elapsed = time.time() - start
    ok = ok_bracket and ok_sandwich and ok_tail and elapsed < 600.0
    assert _report(
        "unit running-max bracket and tail (1e6 reps)",
        ok,
        f"mean={est.value.mean:.4f} in ({lo},{hi}); sandwich "
        f"[{est.extras['sandwich_low']:.4f}, {est.extras['sandwich_high']:.4f}]; "
        f"P(>3.5)={p35.mean:.2e} <= {est.extras['tail_bound_35']:.4f}; "
        f"runtime {elapsed:.0f}s < 600s",
        start,
    )


def test_criterion_l1_closed_form():
    start = time.time()
    oks, details = [], []
    for i, k in enumerate((1.0, 4.0, 16.0)):

        def stat(spec, k=k):
            return np.array([l1_diff(build_dt0_pair(k, 1.0, spec, substeps=64), 1.0)])

        (est,) = mc_mean_vec(stat, 1, 100_000, BASE.block(110 + i), THREADS)
        target = oracles.l1_rate(k)
        oks.append(abs(est.mean - target) <= 0.02 * target)
        details.append(f"k={k:g}: {est.mean:.5f} vs {target:.5f}")
    elapsed = time.time() - start
    ok = all(oks) and elapsed < 300.0
    assert _report(
        "L1 closed form (1e5 reps, 2%)",
        ok,
        "; ".join(details) + f"; runtime {elapsed:.0f}s < 300s",
        start,
    )


def test_criterion_ct_coupling_exactness():
    start = time.time()
    # identity per sample
    ident_ok = True
    for i in range(50):
        pair = build_ct_pair(4.0, 1.0, 1.0 / 64.0, BASE.block(120).replicate(i))
        gap = np.max(np.abs(pair.w_kappa.values - pair.w.values - pair.residual.values))
        ident_ok &= gap < 1e-13

    # MC variance against the closed form at (t, kappa) = (1, 1)
    reps = 50_000

    def endpoint(spec):
        return np.array([build_ct_pair(1.0, 1.0, 1.0 / 64.0, spec).w_kappa.values[-1]])

    vals = np.array(
        [endpoint(BASE.block(121).replicate(i))[0] for i in range(reps)]
    )
    var = vals.var(ddof=1)
    var_sd = var * math.sqrt(2.0 / (reps - 1))
    target = oracles.var_wkappa_ct(1.0, 1.0)
    var_ok = abs(var - target) <= 3.0 * var_sd

    # quadrature oracle refinement
    rms = []
    for h in (1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0):
        pair = build_ct_pair(4.0, 1.0, h, BASE.block(122))
        x_path = Path(TimeGrid(t_end=4.0, step=h), pair.diagnostics["x_fine"])
        q = wkappa_by_quadrature(x_path, 4.0, pair.w.grid)
        rms.append(math.sqrt(float(np.mean((q.values - pair.w_kappa.values) ** 2))))
    quad_ok = rms[0] / rms[1] >= 1.3 and rms[1] / rms[2] >= 1.3

    elapsed = time.time() - start
    ok = ident_ok and var_ok and quad_ok and elapsed < 300.0
    assert _report(
        "continuous-time coupling exactness",
        ok,
        f"identity<=1e-13: {ident_ok}; Var={var:.5f} vs {target:.5f} (3sd {3*var_sd:.5f}); "
        f"quad ratios {rms[0]/rms[1]:.2f}, {rms[1]/rms[2]:.2f} >= 1.3; "
        f"runtime {elapsed:.0f}s < 300s",
        start,
    )


def _band_checks(table, band_fn):
    ok = True
    for r in table.rows:
        ok &= r.ratio_upper <= band_fn(r.kappa)
        ok &= r.ratio_lower >= 0.2
        ok &= r.lower.mean <= r.upper.mean + 3.0 * (r.upper.stderr + r.lower.stderr)
    ok &= table.ratio_spread("ratio_upper") <= 2.0
    ok &= table.ratio_spread("ratio_lower") <= 2.0
    return ok


def test_criterion_ct_rate_brackets():
    start = time.time()
    cfg = SweepConfig(threads=THREADS)
    table = sweep_rate("ct", experiments.DEFAULT_CT_KAPPAS, 10_000, cfg, BASE.block(130))
    ok_band = _band_checks(table, lambda k: 14.0)
    ru = [r.ratio_upper for r in table.rows]
    rl = [r.ratio_lower for r in table.rows]
    elapsed = time.time() - start
    ok = ok_band and elapsed < 1800.0
    assert _report(
        "continuous-time rate brackets (kappa 4..16384, 1e4 reps)",
        ok,
        f"ratio_upper in [{min(ru):.3f},{max(ru):.3f}] <= 14; "
        f"ratio_lower in [{min(rl):.3f},{max(rl):.3f}] >= 0.2; "
        f"spreads {table.ratio_spread('ratio_upper'):.2f}/"
        f"{table.ratio_spread('ratio_lower'):.2f} <= 2; "
        f"runtime {elapsed:.0f}s < 1800s",
        start,
    )


def test_criterion_dt_rate_brackets():
    start = time.time()
    cfg = SweepConfig(threads=THREADS)
    dt0 = sweep_rate("dt0", experiments.DEFAULT_CT_KAPPAS, 10_000, cfg, BASE.block(131))
    band = lambda k: 8.0 * math.sqrt(math.log1p(k * cfg.norm_horizon)) / math.sqrt(
        math.log1p(k)
    )
    ok_dt0 = _band_checks(dt0, band)

    cfg_a = SweepConfig(a=0.5, threads=THREADS)
    ar1 = sweep_rate("ar1", experiments.DEFAULT_AR1_KAPPAS, 10_000, cfg_a, BASE.block(132))
    # no closed constant for the memory term; the wide continuous-time
    # reference band applies, plus ordering and flatness
    ok_ar1 = _band_checks(ar1, lambda k: 14.0)

    # zero-memory reduction reproduces dt0 exactly under shared seeds
    cfg_0 = SweepConfig(a=0.0, threads=THREADS)
    t_ar0 = sweep_rate("ar1", experiments.DEFAULT_AR1_KAPPAS, 2_000, cfg_0, BASE.block(133))
    t_dt0 = sweep_rate("dt0", experiments.DEFAULT_AR1_KAPPAS, 2_000, cfg_0, BASE.block(133))
    ok_ident = all(
        (ra.upper.mean, ra.upper.stderr, ra.lower.mean, ra.lower.stderr)
        == (rd.upper.mean, rd.upper.stderr, rd.lower.mean, rd.lower.stderr)
        for ra, rd in zip(t_ar0.rows, t_dt0.rows)
    )
    elapsed = time.time() - start
    ok = ok_dt0 and ok_ar1 and ok_ident and elapsed < 1800.0
    assert _report(
        "discrete-time rate brackets (dt0 + ar1)",
        ok,
        f"dt0 band ok: {ok_dt0}; ar1(a=0.5) band ok: {ok_ar1}; "
        f"ar1(a=0) == dt0 exactly: {ok_ident}; runtime {elapsed:.0f}s < 1800s",
        start,
    )


def test_criterion_constants():
    start = time.time()
    cu = experiments.estimate_upper_rate_constant(2000, BASE.block(140), threads=THREADS)
    lo, hi = cu.paper_bracket
    ok_u = lo - 3 * cu.value.stderr < cu.value.mean < hi + 3 * cu.value.stderr
    cl = experiments.estimate_lower_rate_constant(
        [2**j for j in range(14)] + [10_000], 400, BASE.block(141), threads=THREADS
    )
    lo2, hi2 = cl.paper_bracket
    ok_l = lo2 - 3 * cl.value.stderr < cl.value.mean < hi2 + 3 * cl.value.stderr
    elapsed = time.time() - start
    ok = ok_u and ok_l and elapsed < 1200.0
    assert _report(
        "rate constants inside reference brackets",
        ok,
        f"upper={cu.value.mean:.3f} in (1.4,14); lower={cl.value.mean:.3f} in (0.2,0.8); "
        f"runtime {elapsed:.0f}s < 1200s",
        start,
    )


def test_criterion_scaled_max_limit():
    start = time.time()
    est = experiments.estimate_scaled_max_limit(
        [4, 16, 64, 256, 1024, 4096, 10_000], 400, BASE.block(142), threads=THREADS
    )
    target = est.paper_bracket
    ok_val = abs(est.value.mean - target) <= 0.15 * target
    elapsed = time.time() - start
    ok = ok_val and elapsed < 1200.0
    # the limit converges at logarithmic rate; +-15% at kappa=1e4 is the
    # strongest desk-scale statement, tighter accuracy is not reproducible
    assert _report(
        "scaled running-max limit (kappa=1e4, step 1e-2)",
        ok,
        f"estimate={est.value.mean:.4f} vs 1/sqrt(2)={target:.4f} "
        f"(+-15% band; exact limit is asymptotic, not reachable at desk scale); "
        f"runtime {elapsed:.0f}s < 1200s",
        start,
    )


def test_criterion_iid_bridge_max_growth():
    start = time.time()
    est = experiments.dt_sup_asymptotic(
        [100, 1000, 10_000, 100_000], 1000, BASE.block(143), threads=THREADS
    )
    tail = est.extras["tail_oracle_limit"]
    ref = est.extras["reference_value"]
    ok_val = abs(est.value.mean - tail) <= 0.15 * tail
    elapsed = time.time() - start
    ok = ok_val and elapsed < 300.0
    assert _report(
        "iid bridge-max growth (N=1e5, exact law)",
        ok,
        f"measured={est.value.mean:.4f}; tail oracle {tail:.4f} (dist "
        f"{abs(est.value.mean - tail):.4f}); reference {ref:.4f} (dist "
        f"{abs(est.value.mean - ref):.4f}); data supports "
        f"{est.extras['supported_candidate']}; runtime {elapsed:.0f}s < 300s",
        start,
    )


def test_criterion_lipschitz_transfer():
    start = time.time()
    cfg = WeightedNormConfig(horizon=1.5)
    drifts = [
        ("linear damping", DriftSpec("linear", alpha=2.0), False),
        ("Lipschitz drift", DriftSpec("lipschitz", K=1.0, b_name="tanh"), True),
        ("combined", DriftSpec("combined", alpha=2.0, K=1.0, b_name="tanh"), False),
    ]
    oks, details = [], []
    for name, drift, use_sup in drifts:
        cpsi = lipschitz_constant(drift, 1.0)
        slacks = {}
        for h in (1.0 / 64.0, 1.0 / 128.0):
            worst = -math.inf
            for i in range(100):
                pair = build_ct_pair(4.0, 1.5, h, BASE.block(150).replicate(i))
                yk = apply_solution_map(pair.w_kappa, drift, 1.0)
                y0 = apply_solution_map(pair.w, drift, 1.0)
                d = Path(pair.w.grid, yk.values - y0.values)
                c = Path(pair.w.grid, pair.w_kappa.values - pair.w.values)
                if use_sup:
                    gap = sup_norm(d, 1.0) - cpsi * sup_norm(c, 1.0)
                else:
                    gap = weighted_norm(d, cfg) - cpsi * weighted_norm(c, cfg)
                worst = max(worst, gap)
            slacks[h] = max(worst, 0.0)
        floor = 1e-12  # rounding floor once the scheme error vanishes
        ok = slacks[1.0 / 64.0] <= 0.5 / 64.0 and slacks[1.0 / 128.0] <= max(
            0.5 * slacks[1.0 / 64.0], floor
        )
        oks.append(ok)
        details.append(
            f"{name}: C={cpsi:.3f}, slack(h)={slacks[1/64]:.2e}, "
            f"slack(h/2)={slacks[1/128]:.2e}"
        )
    elapsed = time.time() - start
    ok = all(oks) and elapsed < 600.0
    assert _report(
        "pathwise Lipschitz transfer (100 pairs per map)",
        ok,
        "; ".join(details) + f"; runtime {elapsed:.0f}s < 600s",
        start,
    )


def test_verify_oracles_cli_at_scale(tmp_path, capsys):
    # contract example: the oracle table passes at 1e5 replicates, seed 42
    start = time.time()
    out = tmp_path / "oracles.csv"
    code = cli.main(
        ["verify-oracles", "--reps", "100000", "--seed", "42", "-o", str(out)]
    )
    text = capsys.readouterr().out
    lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    ok = code == 0 and any("E_max_bridge" in l for l in lines) and "FAIL" not in text
    elapsed = time.time() - start
    assert _report(
        "verify-oracles table at 1e5 replicates",
        ok,
        f"exit={code}; rows={len(lines) - 1}; runtime {elapsed:.0f}s",
        start,
    )


def test_criterion_cli_determinism(tmp_path):
    start = time.time()
    out = tmp_path / "sweep.csv"
    argv = ["sweep", "dt0", "--kappas", "4,16", "--reps", "300", "-o", str(out)]
    blobs = []
    for threads in ("1", "2", "1"):
        code = cli.main(argv + ["--threads", threads])
        assert code == 0
        blobs.append(out.read_bytes())
    ok = blobs[0] == blobs[1] == blobs[2]
    elapsed = time.time() - start
    assert _report(
        "CLI determinism at any thread count",
        ok and elapsed < 120.0,
        f"3 runs byte-identical: {ok}; runtime {elapsed:.0f}s < 120s",
        start,
    )
