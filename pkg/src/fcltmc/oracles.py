"""Closed-form reference values and bounds used as test oracles.

Everything here is deterministic and pure.  The normal CDF is a rational
approximation (Abramowitz & Stegun 26.2.17, |error| < 7.5e-8) so that the
oracle side of every Monte Carlo comparison is independent of the
special-function library used by the samplers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "OracleValue",
    "norm_cdf",
    "max_tail",
    "closed_moment",
    "rate_envelope",
    "borell_tis_tail",
    "l1_rate",
    "var_wkappa_ct",
]

# A&S 26.2.17 coefficients
_P = 0.2316419
_B = (0.319381530, -0.356563782, 1.781477937, -1.821255978, 1.330274429)


def norm_cdf(x):
    """Standard normal CDF, rational approximation, |error| < 7.5e-8."""
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    t = 1.0 / (1.0 + _P * ax)
    poly = t * (_B[0] + t * (_B[1] + t * (_B[2] + t * (_B[3] + t * _B[4]))))
    pdf = np.exp(-0.5 * ax * ax) / math.sqrt(2.0 * math.pi)
    upper = pdf * poly  # P(Z > |x|)
    out = np.where(x >= 0.0, 1.0 - upper, upper)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class OracleValue:
    name: str
    value: float
    validity: str


def max_tail(process: str, x: float) -> float:
    """P(max over [0,1] > x) for the standard bridge (e^{-2x^2}) or BM (2(1-Phi(x)))."""
    if x < 0.0:
        raise ConfigurationError(f"tail argument must be >= 0, got {x}")
    if process == "bridge":
        return math.exp(-2.0 * x * x)
    if process == "bm":
        return 2.0 * (1.0 - float(norm_cdf(x)))
    raise ConfigurationError(f"unknown process {process!r}; expected 'bridge' or 'bm'")


# Moments and rates with closed forms.  Entries taking an argument are
# exposed through the arg parameter of closed_moment.
_MOMENTS = {
    "E_max_bridge": math.sqrt(2.0 * math.pi) / 4.0,
    "E_max_bm": math.sqrt(2.0 / math.pi),
    "E_abs_max_bridge": math.sqrt(math.pi / 2.0) * math.log(2.0),
    "scaled_max_limit": 1.0 / math.sqrt(2.0),
}


def closed_moment(name: str, arg: float | None = None) -> float:
    """Closed-form constants: expected maxima, the large-horizon running-max
    limit, and extreme-value scaling rates.

    ou_sup_rate(T) = sqrt(2 ln T) is the a.s. growth rate of the running
    maximum of the stationary OU process; iid_max_rate(N) = sqrt(ln(N)/2)
    is the growth of the maximum of N iid variables with tail e^{-2x^2}.
    """
    if name in _MOMENTS:
        return _MOMENTS[name]
    if name == "ou_sup_rate":
        if arg is None or arg <= 1.0:
            raise ConfigurationError("ou_sup_rate needs a horizon T > 1")
        return math.sqrt(2.0 * math.log(arg))
    if name == "iid_max_rate":
        if arg is None or arg <= 1.0:
            raise ConfigurationError("iid_max_rate needs a count N > 1")
        return math.sqrt(math.log(arg) / 2.0)
    raise ConfigurationError(f"unknown closed moment {name!r}")


def rate_envelope(kappa: float) -> float:
    """The sharp Wasserstein-1 rate envelope sqrt(ln(1+kappa)/kappa), kappa >= 1."""
    if kappa < 1.0:
        raise ConfigurationError(f"rate envelope requires kappa >= 1, got {kappa}")
    return math.sqrt(math.log1p(kappa) / kappa)


def borell_tis_tail(x: float, x_star: float, sigma: float) -> float:
    """Gaussian concentration bound e^{-(x-x_star)^2 / (2 sigma^2)} for x > x_star."""
    if sigma <= 0.0:
        raise ConfigurationError(f"sigma must be positive, got {sigma}")
    if x <= x_star:
        raise ConfigurationError(
            f"bound only valid beyond the mean of the sup: need x > {x_star}, got {x}"
        )
    d = x - x_star
    return math.exp(-d * d / (2.0 * sigma * sigma))


def l1_rate(kappa: float) -> float:
    """E integral_0^1 |S_kappa - W| = sqrt(pi / (32 kappa)), kappa >= 1."""
    if kappa < 1.0:
        raise ConfigurationError(f"l1 rate requires kappa >= 1, got {kappa}")
    return math.sqrt(math.pi / (32.0 * kappa))


def var_wkappa_ct(t: float, kappa: float) -> float:
    """Variance of the rescaled running OU integral at time t: t - (1-e^{-2 kappa t})/(2 kappa)."""
    if t < 0.0:
        raise ConfigurationError(f"time must be >= 0, got {t}")
    if kappa < 1.0:
        raise ConfigurationError(f"kappa must be >= 1, got {kappa}")
    return t + math.expm1(-2.0 * kappa * t) / (2.0 * kappa)
