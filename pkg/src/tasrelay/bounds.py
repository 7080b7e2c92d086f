"""High-SNR upper bounds on the end-to-end SER and diversity-order fits.

Both bounds are explicit polynomials in ``N0/P``. They are returned as
:class:`BoundTerms` so the exponent structure stays inspectable; the bound
value is ``sum(coef * (N0/P) ** exponent)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .analytic import psk_limit
from .errors import DegenerateCodebook, InsufficientPoints, ZeroSer
from .model import SystemConfig

__all__ = [
    "BoundTerms",
    "DiversityFit",
    "I3_FORMS",
    "XI_FORMS",
    "sine_power_integral",
    "log_factorial",
    "strategy1_terms",
    "strategy2_terms",
    "upper_bound_strategy1",
    "upper_bound_strategy2",
    "fit_diversity",
]

#: "derived": I3 integrates sin^(2 N_S N_D + 2), the power produced by bounding
#: the MRC term; "printed": the odd power sin^(2 N_S N_D + 1)
I3_FORMS = ("derived", "printed")
#: "per_pair": sum of per-competitor bounds; "printed": one lumped xi term
XI_FORMS = ("per_pair", "printed")


def sine_power_integral(exponent: int, limit: float) -> float:
    """``int_0^limit sin(t)**exponent dt`` by the reduction formula."""
    if exponent < 0 or int(exponent) != exponent:
        raise ValueError(f"exponent must be a nonnegative integer, got {exponent}")
    s, c = math.sin(limit), math.cos(limit)
    if exponent % 2 == 0:
        value, start = limit, 2
    else:
        value, start = 1.0 - c, 3
    for n in range(start, int(exponent) + 1, 2):
        value = -(s ** (n - 1)) * c / n + (n - 1) / n * value
    return value


def log_factorial(n: int) -> float:
    if n <= 20:
        return math.log(math.factorial(n))
    return math.lgamma(n + 1)


def _log(x):
    return math.log(x) if x > 0 else -math.inf


@dataclass(frozen=True)
class BoundTerms:
    """``value(snr) = sum_k coef_k * snr ** (-exponent_k)`` with ``snr = P/N0``.

    Coefficients are stored as natural logs so that factorials and tiny
    powers cannot overflow.
    """

    log_coefs: tuple
    exponents: tuple

    @property
    def coefs(self) -> tuple:
        return tuple(math.exp(c) for c in self.log_coefs)

    def value(self, snr: float) -> float:
        if snr <= 0:
            return math.inf
        ls = math.log(snr)
        total = 0.0
        for lc, e in zip(self.log_coefs, self.exponents):
            term = lc - e * ls
            if term > 709.0:    # exp would overflow
                return math.inf
            total += math.exp(term)
        return total

    @property
    def diversity(self) -> int:
        return min(self.exponents)


def _common_first_term(cfg: SystemConfig, limit: float) -> float:
    # log of the relay-failure term's coefficient: P_SD * P_SR at high SNR
    c, nr = cfg.n_sd, cfg.n_r
    b1 = cfg.split.beta1
    i1 = sine_power_integral(2 * nr, limit)
    i2 = sine_power_integral(2 * c, limit)
    return (math.log(c * nr) + log_factorial(nr - 1) + log_factorial(c - 1)
            + math.log(i1) + math.log(i2) - 2 * math.log(math.pi)
            - nr * _log(cfg.b * b1 * cfg.var_sr)
            - c * _log(cfg.b * b1 * cfg.var_sd))


def strategy1_terms(cfg: SystemConfig, i3_form: str = "derived") -> BoundTerms:
    """Two-term Strategy I bound with (N0/P) exponents N_R + N_S N_D and
    N_S N_D + 1."""
    if i3_form not in I3_FORMS:
        raise ValueError(f"i3_form must be one of {I3_FORMS}")
    c, nr = cfg.n_sd, cfg.n_r
    lim = psk_limit(cfg.m)
    b1, b2 = cfg.split.beta1, cfg.split.beta2
    i3 = sine_power_integral(2 * c + (2 if i3_form == "derived" else 1), lim)
    t1 = _common_first_term(cfg, lim)
    t2 = (math.log(c) + log_factorial(c - 1) + math.log(i3) - math.log(math.pi)
          - c * _log(cfg.b * b1 * cfg.var_sd) - _log(cfg.b * b2 * cfg.var_rd))
    return BoundTerms((t1, t2), (nr + c, c + 1))


def upper_bound_strategy1(cfg: SystemConfig, i3_form: str = "derived") -> float:
    """Upper bound on the Strategy I end-to-end SER at ``cfg.total_power``."""
    return strategy1_terms(cfg, i3_form).value(cfg.total_power / cfg.n0)


def strategy2_terms(codebook, cfg: SystemConfig, xi_form: str = "per_pair",
                    relay_limit: str = "G") -> BoundTerms:
    """Two-term Strategy II bound with (N0/P) exponents N_R + N_S N_D and
    N_R N_D + N_S N_D.

    ``xi_form="per_pair"`` bounds every competitor's pairwise term separately
    (reference-averaged); ``"printed"`` lumps the eigenvalue products into the
    single sum ``xi`` inside one power.
    """
    if xi_form not in XI_FORMS:
        raise ValueError(f"xi_form must be one of {XI_FORMS}")
    c, nr, nd = cfg.n_sd, cfg.n_r, cfg.n_d
    lim = psk_limit(cfg.m)
    b1, b2 = cfg.split.beta1, cfg.split.beta2
    spectrum = codebook.spectrum
    i2 = sine_power_integral(2 * c, lim)
    i4 = sine_power_integral(2 * nr * nd, math.pi / 2 if relay_limit.upper() == "G" else lim)
    t1 = _common_first_term(cfg, lim)
    direct = (math.log(c) + log_factorial(c - 1) + math.log(i2) - math.log(math.pi)
              - c * _log(cfg.b * b1 * cfg.var_sd))
    rd_scale = b2 * cfg.var_rd / (4.0 * nr)
    if xi_form == "printed":
        if not spectrum.xi > 0:
            raise DegenerateCodebook("xi = 0: codebook has no distinct codewords")
        relay = math.log(i4) - nr * nd * _log(rd_scale * spectrum.xi)
    else:
        acc = 0.0
        for eigs, weight in spectrum.pair_classes():
            lam = float(np.prod(eigs))
            if not lam > 0:
                raise DegenerateCodebook("a competitor pair has a rank-deficient difference matrix")
            acc += weight * lam ** (-nd)
        relay = (math.log(i4) - math.log(math.pi) + math.log(acc)
                 - nr * nd * _log(rd_scale))
    return BoundTerms((t1, direct + relay), (nr + c, nr * nd + c))


def upper_bound_strategy2(codebook, cfg: SystemConfig, xi_form: str = "per_pair",
                          relay_limit: str = "G") -> float:
    return strategy2_terms(codebook, cfg, xi_form, relay_limit).value(cfg.total_power / cfg.n0)


# ---------------------------------------------------------------------------
# diversity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiversityFit:
    """Least-squares fit of log10(SER) against log10(P/N0).

    ``slope`` is reported positive (the diversity order estimate) and
    ``residual`` is the RMS deviation of the fit in decades.
    """

    slope: float
    intercept: float
    fit_range_db: tuple
    residual: float
    n_points: int = 0


def fit_diversity(curve, window_db: Sequence[float] = (25.0, 40.0),
                  quantity: str = "analytic") -> DiversityFit:
    """Estimate the diversity order from the high-SNR part of a curve.

    ``curve`` is a :class:`~tasrelay.curves.SerCurve` (``quantity`` picks the
    column) or a pair ``(snr_db, ser)`` of sequences.
    """
    lo, hi = float(window_db[0]), float(window_db[1])
    if not lo < hi:
        raise ValueError(f"window {window_db} is empty")
    if hasattr(curve, "points"):
        snr = np.array([p.snr_db for p in curve.points], dtype=float)
        ser = np.array([np.nan if getattr(p, quantity) is None else getattr(p, quantity)
                        for p in curve.points], dtype=float)
    else:
        snr = np.asarray(curve[0], dtype=float)
        ser = np.asarray(curve[1], dtype=float)
    sel = (snr >= lo - 1e-9) & (snr <= hi + 1e-9) & np.isfinite(ser)
    if sel.sum() < 3:
        raise InsufficientPoints(f"need >= 3 points in [{lo}, {hi}] dB, found {int(sel.sum())}")
    if np.any(ser[sel] <= 0):
        raise ZeroSer("SER must be positive inside the fit window")
    x = snr[sel] / 10.0
    y = np.log10(ser[sel])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    rms = float(np.sqrt(np.mean(resid ** 2)))
    return DiversityFit(slope=float(-slope), intercept=float(intercept),
                        fit_range_db=(lo, hi), residual=rms, n_points=int(sel.sum()))
