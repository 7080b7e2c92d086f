"""Closed-form symbol error rates for both relay strategies.

Every expression reduces to an angular integral of the form
``(1/pi) * int_0^L dtheta / x(theta)`` where ``L`` is either ``(M-1)pi/M``
(M-PSK, the ``F`` integral) or ``pi/2`` (Gaussian Q, the ``G`` integral).
The integrals are evaluated with the vectorized adaptive Gauss-Legendre
rule in :func:`integrate`.

Averages over the selected source-destination gain use the moment generating
function of the largest of ``N`` i.i.d. exponential gains,

    N * sum_n C(N-1, n) (-1)^n / (s + n + 1)  ==  N! / prod_{v=1..N} (s + v),

and the product form on the right is the one evaluated: the alternating sum
loses every significant digit at high SNR once N grows beyond a handful.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import NegativeArgument, NegativeSnr, NonConvergence
from .model import SystemConfig

__all__ = [
    "AngularIntegrand",
    "RELAY_LIMITS",
    "integrate",
    "quadrature",
    "psk_limit",
    "psk_psi",
    "gaussian_q",
    "max_gain_mgf",
    "ser_direct",
    "ser_source_relay",
    "ser_joint_strategy1",
    "ser_end_to_end_strategy1",
    "avg_pep",
    "ser_relay_dest_union",
    "ser_joint_strategy2",
    "ser_end_to_end_strategy2",
    "end_to_end",
]

_GL_ORDER = 15
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GL_ORDER)

#: integration limit of the relay-phase union terms in the Strategy II joint
#: probability: "G" uses pi/2 (pairwise error via Q), "F" uses (M-1)pi/M
RELAY_LIMITS = ("G", "F")
DEFAULT_RELAY_LIMIT = "G"


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

def _gauss(func, lo, hi):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    pts = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = np.asarray(func(pts), dtype=float)
    return half * (vals @ _GL_WEIGHTS)


def integrate(func: Callable, a: float, b: float, atol: float = 1e-10,
              rtol: float = 1e-12, max_depth: int = 40) -> float:
    """Adaptive Gauss-Legendre quadrature of ``func`` over ``[a, b]``.

    ``func`` must accept an ndarray of abscissae and return values of the same
    shape. Each panel is accepted once the 15-point estimate on the panel and
    the sum over its two halves agree to within ``max(atol * width/(b-a),
    rtol * |estimate|)``.

    Raises
    ------
    NonConvergence
        if any panel still fails the test after ``max_depth`` halvings.
    """
    a, b = float(a), float(b)
    if a == b:
        return 0.0
    width = b - a
    lo = np.array([a])
    hi = np.array([b])
    coarse = _gauss(func, lo, hi)
    total = 0.0
    for depth in range(max_depth + 1):
        mid = 0.5 * (lo + hi)
        left = _gauss(func, lo, mid)
        right = _gauss(func, mid, hi)
        fine = left + right
        err = np.abs(fine - coarse)
        allowed = np.maximum(atol * (hi - lo) / abs(width), rtol * np.abs(fine))
        done = err <= allowed
        total += float(np.sum(fine[done]))
        if done.all():
            return total
        if depth == max_depth:
            break
        keep = ~done
        lo = np.concatenate([lo[keep], mid[keep]])
        hi = np.concatenate([mid[keep], hi[keep]])
        coarse = np.concatenate([left[keep], right[keep]])
    raise NonConvergence(f"adaptive quadrature exceeded depth {max_depth}")


@dataclass(frozen=True)
class AngularIntegrand:
    """``x(theta) > 0`` on ``[0, upper_limit]``; integrated as ``1/x``."""

    x: Callable
    upper_limit: float


def quadrature(f: AngularIntegrand, atol: float = 1e-10) -> float:
    """Return ``int_0^limit dtheta / x(theta)`` (no 1/pi factor)."""
    return integrate(lambda t: 1.0 / f.x(t), 0.0, f.upper_limit, atol=atol)


def psk_limit(m: int) -> float:
    return (m - 1) * math.pi / m


def _relay_limit(kind: str, m: int) -> float:
    kind = kind.upper()
    if kind == "G":
        return math.pi / 2
    if kind == "F":
        return psk_limit(m)
    raise ValueError(f"relay limit must be one of {RELAY_LIMITS}, got {kind!r}")


def _angular_mean(func, limit: float, edge: Optional[float] = None) -> float:
    # integrands here are positive and may be tiny at high SNR, so the
    # acceptance test is purely relative.
    # ``edge`` is the sin^2 scale where the integrand switches on; at very low
    # SNR that step hugs theta = 0 and is missed unless the range is split there.
    # Cuts go up geometrically so the slow 1 - edge/sin^2 approach is resolved too.
    cuts = [0.0]
    if edge is not None and 1e-32 < edge < 1.0:
        s2 = edge
        while s2 < 1.0:
            t = math.asin(math.sqrt(s2))
            if t >= limit:
                break
            cuts.append(t)
            s2 *= 100.0
    cuts.append(limit)
    total = sum(integrate(func, a, b, atol=0.0, rtol=1e-11) for a, b in zip(cuts, cuts[1:]))
    return total / math.pi


# ---------------------------------------------------------------------------
# single-link error functions
# ---------------------------------------------------------------------------

def psk_psi(snr: float, m: int) -> float:
    """M-PSK symbol error probability at instantaneous SNR ``snr`` (Craig form)."""
    if snr < 0:
        raise NegativeSnr(f"snr must be >= 0, got {snr}")
    b = math.sin(math.pi / m) ** 2
    if snr == 0:
        return (m - 1) / m

    def integrand(t):
        s2 = np.sin(t) ** 2
        return np.exp(-b * snr / s2)

    return _angular_mean(integrand, psk_limit(m), edge=b * snr)


def gaussian_q(x: float) -> float:
    """Gaussian tail probability via Craig's integral; ``x >= 0``."""
    if x < 0:
        raise NegativeArgument(f"Craig's form needs x >= 0, got {x}")
    if x == 0:
        return 0.5
    return _angular_mean(lambda t: np.exp(-x * x / (2.0 * np.sin(t) ** 2)), math.pi / 2, edge=x * x / 2)


def max_gain_mgf(s2, mean_snr: float, n: int):
    """``E[exp(-c g / sin^2)]`` for ``g`` the largest of ``n`` exponential gains.

    ``s2`` is ``sin^2(theta)`` and ``mean_snr`` is ``c * E[g_single]``, so this
    is ``n! s2^n / prod_{v=1..n} (mean_snr + v s2)``.
    """
    s2 = np.asarray(s2, dtype=float)
    out = np.ones_like(s2)
    for v in range(1, n + 1):
        out = out * (v * s2) / (mean_snr + v * s2)
    return out


def _direct_mean_snr(cfg: SystemConfig) -> float:
    return cfg.b * cfg.p_s * cfg.var_sd / cfg.n0


def ser_direct(cfg: SystemConfig) -> float:
    """Source-destination SER after selecting the best of N_S*N_D pairs."""
    c = _direct_mean_snr(cfg)
    n = cfg.n_sd
    return _angular_mean(lambda t: max_gain_mgf(np.sin(t) ** 2, c, n), psk_limit(cfg.m), edge=c)


def ser_source_relay(cfg: SystemConfig) -> float:
    """Source-relay SER with the best of N_R relay antennas (per symbol)."""
    c = cfg.b * cfg.p_s * cfg.var_sr / cfg.n0
    return _angular_mean(lambda t: max_gain_mgf(np.sin(t) ** 2, c, cfg.n_r), psk_limit(cfg.m), edge=c)


def ser_joint_strategy1(cfg: SystemConfig) -> float:
    """Destination SER with MRC of the direct and single-antenna relay branch,
    given the relay decoded correctly."""
    c_sd = _direct_mean_snr(cfg)
    c_rd = cfg.b * cfg.p_r * cfg.var_rd / cfg.n0

    def integrand(t):
        s2 = np.sin(t) ** 2
        return max_gain_mgf(s2, c_sd, cfg.n_sd) * s2 / (c_rd + s2)

    return _angular_mean(integrand, psk_limit(cfg.m), edge=max(c_sd, c_rd))


def end_to_end(p_sd: float, p_sr: float, p_joint: float) -> float:
    """Selective-DF composition: relay silent with probability ``p_sr``."""
    return p_sd * p_sr + p_joint * (1.0 - p_sr)


def ser_end_to_end_strategy1(cfg: SystemConfig) -> float:
    return end_to_end(ser_direct(cfg), ser_source_relay(cfg), ser_joint_strategy1(cfg))


# ---------------------------------------------------------------------------
# Strategy II (STBC relay phase)
# ---------------------------------------------------------------------------

def _pep_factor(s2, eigs, cfg: SystemConfig):
    scale = cfg.p_r * cfg.var_rd / (4.0 * cfg.n0 * cfg.n_r)
    out = np.ones_like(s2)
    for lam in eigs:
        out = out * (s2 / (s2 + scale * lam)) ** cfg.n_d
    return out


def avg_pep(codebook, pair, cfg: SystemConfig, relay_limit: str = "G") -> float:
    """Average pairwise error probability of the relay-destination STBC link.

    ``pair`` is either a competitor index ``l`` (reference codeword 0) or an
    explicit ``(n, l)`` tuple. With ``relay_limit="F"`` the angular integral
    runs to ``(M-1)pi/M`` instead of ``pi/2``.
    """
    n, l = (0, pair) if np.ndim(pair) == 0 else pair
    if n == l:
        raise ValueError("pair must index two different codewords")
    eigs = codebook.spectrum.eigenvalues[n, l]
    limit = _relay_limit(relay_limit, cfg.m)
    return _angular_mean(lambda t: _pep_factor(np.sin(t) ** 2, eigs, cfg), limit)


def _union_integrand(codebook, cfg):
    classes = codebook.spectrum.pair_classes()

    def integrand(t):
        s2 = np.sin(t) ** 2
        acc = np.zeros_like(s2)
        for eigs, weight in classes:
            acc = acc + weight * _pep_factor(s2, eigs, cfg)
        return acc

    return integrand


def ser_relay_dest_union(codebook, cfg: SystemConfig, relay_limit: str = "G") -> float:
    """Union bound on the STBC codeword error probability of the relay link.

    The sum over competitors is averaged over all reference codewords. It is a
    bound and can exceed one at low SNR.
    """
    limit = _relay_limit(relay_limit, cfg.m)
    return _angular_mean(_union_integrand(codebook, cfg), limit)


def ser_joint_strategy2(codebook, cfg: SystemConfig, relay_limit: str = DEFAULT_RELAY_LIMIT) -> float:
    """Destination error probability given a correct relay, in product form:
    the direct-link SER times the relay-link union bound, each under its own
    angular integral."""
    return ser_direct(cfg) * ser_relay_dest_union(codebook, cfg, relay_limit)


def ser_end_to_end_strategy2(codebook, cfg: SystemConfig,
                             relay_limit: str = DEFAULT_RELAY_LIMIT) -> float:
    p_sd = ser_direct(cfg)
    p_sr = ser_source_relay(cfg)
    p_joint = p_sd * ser_relay_dest_union(codebook, cfg, relay_limit)
    return end_to_end(p_sd, p_sr, p_joint)
