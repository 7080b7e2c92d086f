"""Source/relay power split minimizing the Strategy I high-SNR bound.

With ``a = N_R + N_S N_D`` and ``c = N_S N_D`` the bound reads

    B(beta) = D1 P^-a beta^-a + D2 P^-(c+1) beta^-c (1 - beta)^-1

and its stationarity condition, ``-dB/dP_S = 0``, is

    a D1 P^-(a+1) / beta^(a+1)
      + c D2 P^-(c+2) / (beta^(c+1) (1-beta))
      -   D2 P^-(c+2) / (beta^c (1-beta)^2)  = 0 .
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .analytic import psk_limit
from .bounds import I3_FORMS, log_factorial, sine_power_integral
from .errors import NoRootInInterval
from .model import PowerSplit, SystemConfig

__all__ = [
    "DeltaCoefficients",
    "DELTA_VARIANTS",
    "delta_coefficients",
    "bound_from_deltas",
    "stationarity_terms",
    "stationarity_residual",
    "optimal_split",
]

log = logging.getLogger(__name__)

#: "printed" uses sigma_SD^2 in the last factor of D2, "symmetric" sigma_RD^2
DELTA_VARIANTS = ("printed", "symmetric")

_SCAN = np.linspace(0.01, 0.99, 99)


@dataclass(frozen=True)
class DeltaCoefficients:
    delta1: float
    delta2: float


def delta_coefficients(cfg: SystemConfig, variant: str = "printed",
                       i3_form: str = "derived") -> DeltaCoefficients:
    if variant not in DELTA_VARIANTS:
        raise ValueError(f"variant must be one of {DELTA_VARIANTS}")
    if i3_form not in I3_FORMS:
        raise ValueError(f"i3_form must be one of {I3_FORMS}")
    c, nr = cfg.n_sd, cfg.n_r
    lim = psk_limit(cfg.m)
    i1 = sine_power_integral(2 * nr, lim)
    i2 = sine_power_integral(2 * c, lim)
    i3 = sine_power_integral(2 * c + (2 if i3_form == "derived" else 1), lim)
    g_sr = cfg.b * cfg.var_sr / cfg.n0
    g_sd = cfg.b * cfg.var_sd / cfg.n0
    g_last = g_sd if variant == "printed" else cfg.b * cfg.var_rd / cfg.n0
    log_d1 = (math.log(c * nr) + log_factorial(nr - 1) + log_factorial(c - 1)
              + math.log(i1 * i2) - 2 * math.log(math.pi)
              - nr * math.log(g_sr) - c * math.log(g_sd))
    log_d2 = (math.log(c) + log_factorial(c - 1) + math.log(i3) - math.log(math.pi)
              - c * math.log(g_sd) - math.log(g_last))
    return DeltaCoefficients(math.exp(log_d1), math.exp(log_d2))


def bound_from_deltas(beta1, cfg: SystemConfig, deltas: DeltaCoefficients):
    """Strategy I bound as a function of the source fraction ``beta1``."""
    beta1 = np.asarray(beta1, dtype=float)
    c, a = cfg.n_sd, cfg.n_r + cfg.n_sd
    p = cfg.total_power
    return (deltas.delta1 * p ** -a * beta1 ** -a
            + deltas.delta2 * p ** -(c + 1) * beta1 ** -c / (1.0 - beta1))


def stationarity_terms(beta1, cfg: SystemConfig, deltas: DeltaCoefficients, form: str = "derived"):
    """The three terms of the optimality condition, scaled by ``P^(c+2)``.

    ``form="printed"`` keeps ``P^-(c+1)`` on the two D2 terms instead of
    ``P^-(c+2)``; that version is not the derivative of the bound and is
    provided only for comparison.
    """
    beta1 = np.asarray(beta1, dtype=float)
    c, a = cfg.n_sd, cfg.n_r + cfg.n_sd
    p = cfg.total_power
    d2_scale = p if form == "printed" else 1.0
    t1 = a * deltas.delta1 * p ** (c + 1 - a) / beta1 ** (a + 1)
    t2 = d2_scale * c * deltas.delta2 / (beta1 ** (c + 1) * (1.0 - beta1))
    t3 = -d2_scale * deltas.delta2 / (beta1 ** c * (1.0 - beta1) ** 2)
    return t1, t2, t3


def stationarity_residual(beta1, cfg: SystemConfig, deltas: DeltaCoefficients, form: str = "derived"):
    t1, t2, t3 = stationarity_terms(beta1, cfg, deltas, form)
    return t1 + t2 + t3


def _bisect(f, lo, hi, tol=1e-12):
    flo = f(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def optimal_split(cfg: SystemConfig, variant: str = "printed", i3_form: str = "derived",
                  form: str = "derived", strict: bool = False) -> PowerSplit:
    """Source/relay split that minimizes the Strategy I bound.

    Scans the optimality condition on ``beta1 in [0.01, 0.99]``, bisects every
    sign change to 1e-12 and keeps the root with the smallest bound. Without a
    root the bound is minimized directly, unless ``strict`` is set, in which
    case :class:`NoRootInInterval` is raised.
    """
    deltas = delta_coefficients(cfg, variant, i3_form)

    def f(x):
        return float(stationarity_residual(x, cfg, deltas, form))

    vals = stationarity_residual(_SCAN, cfg, deltas, form)
    roots = []
    for k in range(len(_SCAN) - 1):
        if vals[k] == 0:
            roots.append(float(_SCAN[k]))
        elif vals[k] * vals[k + 1] < 0:
            roots.append(_bisect(f, float(_SCAN[k]), float(_SCAN[k + 1])))
    if roots:
        best = min(roots, key=lambda x: float(bound_from_deltas(x, cfg, deltas)))
        return PowerSplit.from_source_fraction(best)

    msg = f"optimality condition has no root in [0.01, 0.99] for {cfg}"
    if strict:
        raise NoRootInInterval(msg)
    log.warning("%s; minimizing the bound directly", msg)
    res = minimize_scalar(lambda x: float(bound_from_deltas(x, cfg, deltas)),
                          bounds=(1e-6, 1 - 1e-6), method="bounded", options={"xatol": 1e-12})
    return PowerSplit.from_source_fraction(float(res.x))
