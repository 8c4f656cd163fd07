"""Path-space norms and Monte Carlo Wasserstein-1 bracket estimators.

The Wasserstein-1 distance between the law of a rescaled process and the
Wiener measure is never estimated directly; it is bracketed.  The upper
bound is the mean coupling error E ||w_kappa - w|| over jointly sampled
pairs, the lower bound is the expectation of a specific 1-Lipschitz
functional (half the running maximum of the coupling correction on
[0, 1]).  Both are plain Monte Carlo means with standard errors.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import couplings
from .errors import AssertionFailure, ConfigurationError
from .gaussian_paths import Ar1Params, Path, TimeGrid, sample_ou_stationary
from .rng import RngStreamSpec

__all__ = [
    "WeightedNormConfig",
    "MCEstimate",
    "weighted_norm",
    "sup_norm",
    "l1_diff",
    "mc_mean",
    "mc_mean_vec",
    "w1_upper",
    "w1_lower_ct",
    "marginal_w1",
    "make_coupling_error_functional",
]

# Replicates are dispatched in fixed-size chunks; the chunk layout depends
# only on the replicate count, so results are identical at any thread count.
_CHUNK = 64

# Default fine step (dilated time) and weighted-norm horizon for the
# continuous-time estimators; see the experiments module for rationale.
CT_DEFAULT_STEP = 1.0 / 64.0
DT_DEFAULT_SUBSTEPS = 16


@dataclass(frozen=True)
class WeightedNormConfig:
    """Configuration for the weighted sup norm sup_t |f(t)| / (1+t).

    The sup is truncated to [0, horizon]; callers that evaluate paths
    shorter than the horizon accept truncation at the path's end, which
    is recorded in the emitting run's metadata.  step, when set, is the
    sampling resolution estimators should use when they build the paths
    they take the norm of; None defers to each estimator's default.
    tail_report asks consumers to also run the horizon-doubling
    stability diagnostic.
    """

    horizon: float = 1000.0
    step: float | None = None
    tail_report: bool = False

    def __post_init__(self):
        if not (self.horizon >= 1.0):
            raise ConfigurationError(
                f"weighted-norm horizon must be >= 1, got {self.horizon}"
            )
        if self.step is not None and not (self.step > 0.0):
            raise ConfigurationError(f"evaluation step must be positive, got {self.step}")


@dataclass(frozen=True)
class MCEstimate:
    """Mean, standard error (sample sd / sqrt(n)), and replicate count."""

    mean: float
    stderr: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ConfigurationError(f"need at least 2 replicates, got {self.n}")
        if not (self.stderr >= 0.0):
            raise ConfigurationError(f"standard error must be >= 0, got {self.stderr}")


def weighted_norm(path: Path, cfg: WeightedNormConfig = WeightedNormConfig()) -> float:
    """max over grid points of |f(t)| / (1+t), truncated to [0, cfg.horizon]."""
    if path.grid.n_points == 0:
        raise ConfigurationError("empty path")
    t = path.times()
    k = int(np.searchsorted(t, cfg.horizon, side="right"))
    return float(np.max(np.abs(path.values[:k]) / (1.0 + t[:k])))


def sup_norm(path: Path, horizon: float) -> float:
    """max |f| over the grid points of [0, horizon]."""
    t_end = path.grid.t_end
    if horizon > t_end * (1.0 + 1e-9):
        raise ConfigurationError(
            f"sup-norm horizon {horizon} exceeds the path horizon {t_end}"
        )
    k = int(np.searchsorted(path.times(), horizon, side="right"))
    return float(np.max(np.abs(path.values[:k])))


def l1_diff(pair: couplings.CoupledPair, horizon: float) -> float:
    """Trapezoid integral of |w_kappa - w| over [0, horizon]."""
    if pair.w.grid is not pair.w_kappa.grid and pair.w.grid != pair.w_kappa.grid:
        raise ConfigurationError("coupled paths do not share a grid")
    t = pair.w.times()
    if horizon > pair.w.grid.t_end * (1.0 + 1e-9):
        raise ConfigurationError(
            f"integration horizon {horizon} exceeds the path horizon {pair.w.grid.t_end}"
        )
    k = int(np.searchsorted(t, horizon, side="right"))
    d = np.abs(pair.w_kappa.values[:k] - pair.w.values[:k])
    return float(np.trapezoid(d, dx=pair.w.grid.step))


def continuum_tail(values: np.ndarray, step: float, level: float) -> float:
    """Conditional probability that the continuum path exceeded ``level``,
    given its grid values.

    Valid for processes whose conditional law inside a cell, given the
    endpoints, is a unit-rate Brownian bridge (Brownian motion and the
    standard bridge).  The cell-crossing probability is
    exp(-2 (level-lo)(level-hi) / step), so averaging this functional over
    paths estimates the continuum tail with no discretization bias,
    unlike the naive indicator of the grid maximum.
    """
    if float(np.max(values)) >= level:
        return 1.0
    a = level - values[:-1]
    b = level - values[1:]
    log_no_cross = np.log1p(-np.exp(-2.0 * a * b / step))
    return -math.expm1(float(np.sum(log_no_cross)))


def _fill_chunk(values, functional, stream, start, stop):
    for i in range(start, stop):
        values[i] = functional(stream.replicate(i))


def mc_mean_vec(
    functional: Callable[[RngStreamSpec], np.ndarray],
    n_outputs: int,
    reps: int,
    stream: RngStreamSpec,
    threads: int = 1,
) -> list[MCEstimate]:
    """Monte Carlo means of a vector-valued replicate functional.

    Replicate i draws from stream.replicate(i), so the estimate does not
    depend on evaluation order or thread count.
    """
    if reps < 2:
        raise ConfigurationError(f"need reps >= 2, got {reps}")
    values = np.empty((reps, n_outputs))
    bounds = [(s, min(s + _CHUNK, reps)) for s in range(0, reps, _CHUNK)]
    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(_fill_chunk, values, functional, stream, a, b)
                for a, b in bounds
            ]
            for f in futures:
                f.result()
    else:
        for a, b in bounds:
            _fill_chunk(values, functional, stream, a, b)
    bad = np.nonzero(~np.isfinite(values))[0]
    if bad.size:
        raise AssertionFailure(
            f"replicate {int(bad[0])} produced a non-finite functional value"
        )
    means = values.mean(axis=0)
    sds = values.std(axis=0, ddof=1)
    return [
        MCEstimate(float(means[j]), float(sds[j] / math.sqrt(reps)), reps)
        for j in range(n_outputs)
    ]


def mc_mean(
    functional: Callable[[RngStreamSpec], float],
    reps: int,
    stream: RngStreamSpec,
    threads: int = 1,
) -> MCEstimate:
    """Monte Carlo mean and standard error of a scalar replicate functional."""
    return mc_mean_vec(lambda s: np.array([functional(s)]), 1, reps, stream, threads)[0]


def make_coupling_error_functional(
    kind: str,
    kappa: float,
    cfg: WeightedNormConfig,
    *,
    step: float = CT_DEFAULT_STEP,
    substeps: int = DT_DEFAULT_SUBSTEPS,
    a: float = 0.0,
    bounded_horizon: float | None = None,
) -> Callable[[RngStreamSpec], np.ndarray]:
    """Per-replicate functional returning [upper, lower] bracket statistics.

    upper: the coupling error norm; the weighted norm of w_kappa - w
    truncated at cfg.horizon, or the sup norm on [0, bounded_horizon].
    lower: half the maximum of the coupling correction over [0, 1]
    (or [0, bounded_horizon] in bounded mode), the paper-side Lipschitz
    lower-bound functional.

    For kind 'ct' only the stationary input process is simulated: both
    statistics are explicit functions of it, which halves the draw count
    relative to materializing the coupled pair.
    """
    k = couplings.Kappa(kappa).value
    if cfg.step is not None:
        step = cfg.step
    horizon = bounded_horizon if bounded_horizon is not None else cfg.horizon
    lower_horizon = horizon if bounded_horizon is not None else min(1.0, horizon)

    if kind == "ct":
        n = int(round(k * horizon / step))
        if abs(n * step - k * horizon) > 1e-9 * max(1.0, k * horizon):
            raise ConfigurationError(
                f"dilated horizon {k * horizon} is not a whole number of steps of {step}"
            )
        if n > couplings.MAX_FINE_STEPS:
            raise ConfigurationError(
                f"{n} fine steps exceed the budget of {couplings.MAX_FINE_STEPS}; "
                "lower the norm horizon or coarsen the step"
            )
        grid = TimeGrid(t_end=n * step, step=step)
        s = grid.times()
        sqrt_k = math.sqrt(k)
        if bounded_horizon is None:
            upper_w = 1.0 / (2.0 * sqrt_k * (1.0 + s / k))
        else:
            upper_w = np.full(s.shape, 1.0 / (2.0 * sqrt_k))
        i_low = int(round(k * lower_horizon / step))

        def ct_stats(spec: RngStreamSpec) -> np.ndarray:
            x = sample_ou_stationary(grid, spec).values
            dev = x - x[0]
            upper = float(np.max(np.abs(dev) * upper_w))
            lower = float(np.max(dev[: i_low + 1])) / (4.0 * sqrt_k)
            return np.array([upper, lower])

        return ct_stats

    if kind in ("dt0", "ar1"):
        a_used = a if kind == "ar1" else 0.0
        params = Ar1Params(a_used)
        n_cells = int(math.ceil(k * horizon - 1e-9))
        fine_step = 1.0 / (k * substeps)
        t = np.arange(n_cells * substeps + 1) * fine_step
        if bounded_horizon is None:
            upper_w = 1.0 / (1.0 + t)
        else:
            upper_w = np.ones_like(t)
        k_hi = int(np.searchsorted(t, horizon * (1.0 + 1e-12), side="right"))
        i_low = int(np.searchsorted(t, lower_horizon * (1.0 + 1e-12), side="right"))

        def dt_stats(spec: RngStreamSpec) -> np.ndarray:
            pair = couplings.build_ar1_pair(params, k, horizon, spec, substeps)
            diff = pair.w_kappa.values - pair.w.values
            upper = float(np.max(np.abs(diff[:k_hi]) * upper_w[:k_hi]))
            lower = 0.5 * float(np.max(diff[:i_low]))
            return np.array([upper, lower])

        return dt_stats

    raise ConfigurationError(f"unknown coupling kind {kind!r}")


def w1_upper(
    kind: str,
    kappa: float,
    cfg: WeightedNormConfig,
    reps: int,
    stream: RngStreamSpec,
    *,
    step: float = CT_DEFAULT_STEP,
    substeps: int = DT_DEFAULT_SUBSTEPS,
    a: float = 0.0,
    threads: int = 1,
) -> MCEstimate:
    """Coupling upper bound on the Wasserstein-1 distance: E ||w_kappa - w||."""
    fn = make_coupling_error_functional(
        kind, kappa, cfg, step=step, substeps=substeps, a=a
    )
    return mc_mean_vec(fn, 2, reps, stream, threads)[0]


def w1_lower_ct(
    kappa: float,
    reps: int,
    stream: RngStreamSpec,
    *,
    step: float = CT_DEFAULT_STEP,
    cfg: WeightedNormConfig = WeightedNormConfig(horizon=1.0),
    threads: int = 1,
) -> MCEstimate:
    """Continuous-time lower bound: E max over [0,1] of the rescaled
    centered input, divided by 2 sqrt(kappa)."""
    fn = make_coupling_error_functional("ct", kappa, cfg, step=step)
    return mc_mean_vec(fn, 2, reps, stream, threads)[1]


def marginal_w1(samples_p: Sequence[float], samples_q: Sequence[float]) -> float:
    """Empirical 1-d Wasserstein-1 distance via sorted samples.

    Valid lower bound on the path-space distance when applied to matched
    1-Lipschitz marginal functionals of the two processes.
    """
    p = np.sort(np.asarray(samples_p, dtype=float))
    q = np.sort(np.asarray(samples_q, dtype=float))
    if p.size == 0 or q.size == 0:
        raise ConfigurationError("marginal_w1 needs non-empty samples")
    if p.size != q.size:
        raise ConfigurationError(
            f"marginal_w1 needs equal sample counts, got {p.size} and {q.size}"
        )
    return float(np.mean(np.abs(p - q)))
