"""Joint constructions of (W, W^kappa) on one probability space.

Three couplings, one per input model:

* ``ct``  -- continuous time.  The rescaled running integral of the
  stationary OU process equals kappa^{-1/2} W(kappa t) plus an explicit
  endpoint correction, so both processes are read off one fine simulation
  of the pair (Brownian increment, exponential convolution increment) on
  the dilated interval [0, kappa T].
* ``dt0`` -- discrete time, iid standard Gaussian steps.  The interpolated
  partial-sum process is pinned to W at the knots n/kappa by taking the
  steps from W's own knot increments; between knots the difference is a
  Brownian bridge scaled by 1/sqrt(kappa).
* ``ar1`` -- discrete time, stationary AR(1) steps, built from the same
  knot increments plus one extra Gaussian carrying the infinite past.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.signal import lfilter

from .errors import ConfigurationError
from .gaussian_paths import Ar1Params, Path, TimeGrid
from .rng import RngStreamSpec

__all__ = [
    "Kappa",
    "JointStepLaw",
    "CoupledPair",
    "build_ct_pair",
    "wkappa_by_quadrature",
    "build_dt0_pair",
    "build_ar1_pair",
]

# Hard cap on fine steps per path so a misconfigured kappa/step pair fails
# fast instead of exhausting memory.
MAX_FINE_STEPS = 200_000_000


@dataclass(frozen=True)
class Kappa:
    """Rescaling parameter; the constructions assume kappa >= 1."""

    value: float

    def __post_init__(self):
        if not (self.value >= 1.0):
            raise ConfigurationError(f"kappa must be >= 1, got {self.value}")


@dataclass(frozen=True)
class JointStepLaw:
    """Joint law over one fine step of (dW, I) where I = int e^{-2(t-s)} dW(s).

    Driving the OU recursion X <- e^{-2 step} X + 2 I with the same I that
    accumulates into W is what makes the continuous-time coupling identity
    hold sample by sample.
    """

    step: float

    def __post_init__(self):
        if not (self.step > 0.0):
            raise ConfigurationError(f"step must be positive, got {self.step}")

    @property
    def var_dw(self) -> float:
        return self.step

    @property
    def var_i(self) -> float:
        return -math.expm1(-4.0 * self.step) / 4.0

    @property
    def cov(self) -> float:
        return -math.expm1(-2.0 * self.step) / 2.0

    @property
    def correlation(self) -> float:
        return self.cov / math.sqrt(self.var_dw * self.var_i)

    def cholesky(self) -> tuple[float, float, float]:
        """(l11, l21, l22) with [dW, I] = L [z1, z2] for iid standard z."""
        l11 = math.sqrt(self.var_dw)
        l21 = self.cov / l11
        l22 = math.sqrt(max(self.var_i - l21 * l21, 0.0))
        return l11, l21, l22


@dataclass
class CoupledPair:
    """Jointly sampled (W, W^kappa, residual) on a common output grid.

    kind 'ct':  w_kappa - w == residual pointwise (endpoint correction).
    kind 'dt0': residual = w_kappa - w, a chain of scaled bridges in law.
    kind 'ar1': residual = w_kappa - s_kappa, the AR-memory correction;
                the full coupling difference w_kappa - w additionally
                contains the dt0 bridge chain.
    """

    w: Path
    w_kappa: Path
    residual: Path
    kind: str
    params: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)


def build_ct_pair(
    kappa: Kappa | float, horizon: float, step: float, stream: RngStreamSpec
) -> CoupledPair:
    """Exact continuous-time coupling on the dilated interval [0, kappa*horizon].

    Per fine step of size ``step`` (in dilated time) the correlated pair
    (dW, I) is drawn by a 2x2 Cholesky of :class:`JointStepLaw`; W
    accumulates the dW and the OU path follows X <- e^{-2 step} X + 2 I
    from X(0) ~ N(0,1).  Then on the output grid

        w(t)        = W(kappa t) / sqrt(kappa)        (a standard BM in t)
        residual(t) = (X(0) - X(kappa t)) / (2 sqrt(kappa))
        w_kappa(t)  = w(t) + residual(t)

    and w_kappa equals the rescaled running integral of X exactly.
    """
    k = kappa.value if isinstance(kappa, Kappa) else Kappa(kappa).value
    if not (horizon > 0.0):
        raise ConfigurationError(f"horizon must be positive, got {horizon}")
    n_float = k * horizon / step
    n = int(round(n_float))
    if abs(n_float - n) > 1e-9 * max(1.0, n_float) or n < 1:
        raise ConfigurationError(
            f"dilated horizon {k * horizon} is not a whole number of steps of {step}"
        )
    if n > MAX_FINE_STEPS:
        raise ConfigurationError(
            f"{n} fine steps exceed the budget of {MAX_FINE_STEPS}"
        )

    law = JointStepLaw(step)
    l11, l21, l22 = law.cholesky()
    z = stream.normals(1 + 2 * n)
    x0 = z[0]
    za = z[1::2]
    zb = z[2::2]

    w_fine = np.empty(n + 1)
    w_fine[0] = 0.0
    np.cumsum(za, out=w_fine[1:])
    w_fine[1:] *= l11

    drive = np.empty(n + 1)
    drive[0] = x0
    # 2*I = 2*(l21 za + l22 zb)
    drive[1:] = (2.0 * l21) * za + (2.0 * l22) * zb
    x_fine = lfilter([1.0], [1.0, -math.exp(-2.0 * step)], drive)

    sqrt_k = math.sqrt(k)
    out_grid = TimeGrid(t_end=n * step / k, step=step / k)
    w_vals = w_fine / sqrt_k
    residual_vals = (x0 - x_fine) / (2.0 * sqrt_k)
    pair = CoupledPair(
        w=Path(out_grid, w_vals),
        w_kappa=Path(out_grid, w_vals + residual_vals),
        residual=Path(out_grid, residual_vals),
        kind="ct",
        params={"kappa": k, "horizon": horizon, "step": step},
    )
    pair.diagnostics["x_fine"] = x_fine
    pair.diagnostics["x0"] = x0
    return pair


def wkappa_by_quadrature(x_path: Path, kappa: float, out_grid: TimeGrid) -> Path:
    """Trapezoid quadrature of the rescaled running integral of x_path.

    Independent oracle for build_ct_pair: x_path must be the OU path on
    the dilated grid [0, kappa * t_end(out_grid)] whose points map
    one-to-one onto out_grid.
    """
    k = Kappa(kappa).value
    if x_path.grid.n_points != out_grid.n_points or not math.isclose(
        x_path.grid.step, k * out_grid.step, rel_tol=1e-9
    ):
        raise ConfigurationError(
            "x_path grid does not refine the dilated output grid: "
            f"{x_path.grid.n_points} points at step {x_path.grid.step} vs "
            f"{out_grid.n_points} points at dilated step {k * out_grid.step}"
        )
    integral = cumulative_trapezoid(x_path.values, dx=x_path.grid.step, initial=0.0)
    return Path(out_grid, integral / math.sqrt(k))


def _dt_layout(kappa: float, horizon: float, substeps: int) -> tuple[int, int]:
    k_int = int(round(kappa))
    if abs(kappa - k_int) > 1e-12 or k_int < 1:
        raise ConfigurationError(
            f"discrete-time couplings need integer kappa >= 1, got {kappa}"
        )
    if substeps < 2:
        raise ConfigurationError(f"need at least 2 substeps per cell, got {substeps}")
    if not (horizon > 0.0):
        raise ConfigurationError(f"horizon must be positive, got {horizon}")
    n_cells = int(math.ceil(k_int * horizon - 1e-9))
    if n_cells * substeps > MAX_FINE_STEPS:
        raise ConfigurationError(
            f"{n_cells * substeps} fine steps exceed the budget of {MAX_FINE_STEPS}"
        )
    return k_int, n_cells


def _build_dt_core(
    a: float, kappa: float, horizon: float, stream: RngStreamSpec, substeps: int
):
    """Shared construction for dt0 and ar1.

    Returns (grid, w, s_kappa, w_kappa, xi, x_seq, g).  dt0 is the a=0
    special case; the extra Gaussian g (the collapsed infinite past) is
    always drawn so that a=0 consumes the same stream layout as any other
    a and reproduces dt0 bit for bit.
    """
    k_int, n_cells = _dt_layout(kappa, horizon, substeps)
    r = substeps
    m = n_cells * r
    fine_step = 1.0 / (k_int * r)
    sqrt_k = math.sqrt(float(k_int))

    z = stream.normals(m + 1)
    g = z[m] / math.sqrt(1.0 - a * a)  # sum of the infinite past, one Gaussian
    dw = z[:m] * math.sqrt(fine_step)

    w = np.empty(m + 1)
    w[0] = 0.0
    np.cumsum(dw, out=w[1:])

    # steps embedded in W: xi_n = sqrt(kappa) * (W(n/kappa) - W((n-1)/kappa))
    xi = sqrt_k * (w[r::r] - w[:-r:r])

    # X_0 = (1-a) g;  X_n = a X_{n-1} + (1-a) xi_n
    drive = np.empty(n_cells + 1)
    drive[0] = (1.0 - a) * g
    drive[1:] = (1.0 - a) * xi
    x_seq = lfilter([1.0], [1.0, -a], drive)

    cum_xi = np.empty(n_cells + 1)
    cum_xi[0] = 0.0
    np.cumsum(xi, out=cum_xi[1:])
    cum_x = np.empty(n_cells + 1)
    cum_x[0] = 0.0
    np.cumsum(x_seq[1:], out=cum_x[1:])

    idx = np.arange(m + 1)
    cell = idx // r
    frac = (idx - cell * r) / r
    xi_pad = np.concatenate([xi, [0.0]])
    x_pad = np.concatenate([x_seq[1:], [0.0]])
    s_vals = (cum_xi[cell] + frac * xi_pad[cell]) / sqrt_k
    wk_vals = (cum_x[cell] + frac * x_pad[cell]) / sqrt_k

    grid = TimeGrid(t_end=n_cells / k_int / 1.0, step=fine_step)
    return grid, w, s_vals, wk_vals, xi, x_seq, g


def build_dt0_pair(
    kappa: Kappa | float,
    horizon: float,
    stream: RngStreamSpec,
    substeps: int = 16,
) -> CoupledPair:
    """Donsker coupling with Gaussian steps taken from W's knot increments.

    The interpolated partial-sum process meets W at every knot n/kappa;
    the residual w_kappa - w restricted to one cell is a Brownian bridge
    scaled by 1/sqrt(kappa) in law.
    """
    k = kappa.value if isinstance(kappa, Kappa) else Kappa(kappa).value
    grid, w, s_vals, _wk, xi, _x, _g = _build_dt_core(0.0, k, horizon, stream, substeps)
    w_path = Path(grid, w)
    s_path = Path(grid, s_vals)
    return CoupledPair(
        w=w_path,
        w_kappa=s_path,
        residual=Path(grid, s_vals - w),
        kind="dt0",
        params={"kappa": k, "horizon": horizon, "substeps": substeps},
    )


def build_ar1_pair(
    params: Ar1Params,
    kappa: Kappa | float,
    horizon: float,
    stream: RngStreamSpec,
    substeps: int = 16,
) -> CoupledPair:
    """AR(1) coupling: W^kappa = S_kappa + residual with the residual the
    AR-memory correction, exact by construction.

    Diagnostics carry the per-sample discrepancy between the memory
    correction obtained from the decomposition identity and a closed-form
    coefficient formula for it whose summation convention is off by one
    AR term per knot; the discrepancy (exactly -X_m at knot m) is
    reported, not repaired.
    """
    k = kappa.value if isinstance(kappa, Kappa) else Kappa(kappa).value
    a = params.a
    grid, w, s_vals, wk_vals, xi, x_seq, g = _build_dt_core(
        a, k, horizon, stream, substeps
    )
    residual = wk_vals - s_vals

    # Closed-form coefficient formula for the memory correction at knots
    # m = 1..n_cells: (a - a^m) g - sum_{n<=m} a^{m-n} xi_n.  Compare with
    # the identity value sqrt(kappa) * residual at the same knots.
    n_cells = xi.shape[0]
    powers = a ** np.arange(1, n_cells + 1)
    weighted_tail = lfilter([1.0], [1.0, -a], xi)
    formula = (a - powers) * g - weighted_tail
    r = substeps
    identity_at_knots = math.sqrt(k) * residual[r::r]
    discrepancy = formula - identity_at_knots

    return CoupledPair(
        w=Path(grid, w),
        w_kappa=Path(grid, wk_vals),
        residual=Path(grid, residual),
        kind="ar1",
        params={"kappa": k, "horizon": horizon, "substeps": substeps, "a": a},
        diagnostics={
            "formula_discrepancy_max": float(np.max(np.abs(discrepancy))) if n_cells else 0.0,
            "formula_discrepancy": discrepancy,
            "s_kappa": s_vals,
            "x_seq": x_seq,
        },
    )
