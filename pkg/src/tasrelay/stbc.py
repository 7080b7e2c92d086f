"""Orthogonal space-time block codebooks for the relay-destination link.

Codewords are ``N_R x T2`` matrices (rows are relay antennas, columns are
time slots). Supported designs:

========  ====  =======  ==========
``n_r``   T2    symbols  design
========  ====  =======  ==========
2         2     2        Alamouti
3         8     4        rate-1/2 G3
4         8     4        rate-1/2 G4
========  ====  =======  ==========
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import DegenerateCodebook, DimensionMismatch, UnsupportedStbcSize
from .model import STBC_SIZES, ModulationScheme

__all__ = [
    "Codebook",
    "DistanceSpectrum",
    "build_codebook",
    "distance_spectrum",
    "hermitian_eigvalsh",
    "ml_decode",
    "ml_decode_batch",
    "alamouti_decouple",
]

# G4 as a 4x4 real orthogonal design; entries are (symbol index, sign)
_G4_REAL = (
    ((0, 1), (1, 1), (2, 1), (3, 1)),
    ((1, -1), (0, 1), (3, -1), (2, 1)),
    ((2, -1), (3, 1), (0, 1), (1, -1)),
    ((3, -1), (2, -1), (1, 1), (0, 1)),
)


def _alamouti(s):
    s1, s2 = s
    return np.array([[s1, -np.conj(s2)], [s2, np.conj(s1)]])


def _rate_half(s, n_r):
    # time x antenna: four slots of the real design, then four conjugated
    rows = [[sign * s[k] for k, sign in row[:n_r]] for row in _G4_REAL]
    g = np.array(rows, dtype=complex)
    return np.vstack([g, np.conj(g)]).T


@dataclass(frozen=True, eq=False)
class Codebook:
    """Complete set of relay codewords.

    ``codewords[c]`` is the codeword that carries the symbol-index tuple
    ``symbols[c]``.
    """

    n_r: int
    t2: int
    symbols_per_codeword: int
    codewords: np.ndarray
    symbols: np.ndarray
    m: int = 0

    def __len__(self):
        return len(self.codewords)

    @property
    def rate_internal(self) -> float:
        return self.symbols_per_codeword / self.t2

    def index_of(self, symbols) -> np.ndarray:
        """Codeword index for symbol tuples (mixed radix, first symbol most
        significant). Valid only for codebooks from :func:`build_codebook`."""
        symbols = np.asarray(symbols)
        weights = self.m ** np.arange(self.symbols_per_codeword - 1, -1, -1)
        return symbols @ weights

    @cached_property
    def spectrum(self) -> "DistanceSpectrum":
        return distance_spectrum(self)

    def energy(self) -> float:
        """Mean of ``||X||_F^2 / (N_R T2)`` over the codebook."""
        e = np.sum(np.abs(self.codewords) ** 2, axis=(1, 2))
        return float(np.mean(e) / (self.n_r * self.t2))


@lru_cache(maxsize=None)
def build_codebook(n_r: int, m: int) -> Codebook:
    """Enumerate every codeword of the orthogonal design for ``n_r`` antennas
    with unit-energy M-PSK symbols, normalized to unit average energy per
    antenna and slot."""
    if n_r not in STBC_SIZES:
        raise UnsupportedStbcSize(f"no orthogonal design for n_r={n_r}; supported: {STBC_SIZES}")
    psk = ModulationScheme(m)
    k = 2 if n_r == 2 else 4
    tuples = np.array(list(itertools.product(range(m), repeat=k)), dtype=np.int64)
    points = psk.modulate(tuples)
    if n_r == 2:
        words = np.array([_alamouti(p) for p in points])
    else:
        words = np.array([_rate_half(p, n_r) for p in points])
    t2 = words.shape[2]
    energy = np.mean(np.sum(np.abs(words) ** 2, axis=(1, 2))) / (n_r * t2)
    words = words / np.sqrt(energy)
    words.setflags(write=False)
    tuples.setflags(write=False)
    return Codebook(n_r=n_r, t2=t2, symbols_per_codeword=k, codewords=words, symbols=tuples, m=m)


# ---------------------------------------------------------------------------
# eigenvalues
# ---------------------------------------------------------------------------

def hermitian_eigvalsh(a, tol: float = 1e-12, max_sweeps: int = 50) -> np.ndarray:
    """Eigenvalues of a stack of small Hermitian matrices by cyclic Jacobi.

    ``a`` has shape ``(..., n, n)``. Returns ascending eigenvalues of shape
    ``(..., n)``.
    """
    a = np.array(a, dtype=complex)
    shape = a.shape
    n = shape[-1]
    a = a.reshape(-1, n, n)
    a = 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))
    scale = np.maximum(np.linalg.norm(a, axis=(1, 2)), 1e-300)
    idx = np.arange(len(a))
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(a[:, offdiag]) ** 2, axis=1))
        if np.all(off <= tol * scale):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                r = np.abs(apq)
                active = r > tol * scale * 1e-3
                if not active.any():
                    continue
                phase = np.where(active, apq / np.where(active, r, 1.0), 1.0)
                app = a[:, p, p].real
                aqq = a[:, q, q].real
                tau = np.where(active, (aqq - app) / (2.0 * np.where(active, r, 1.0)), 0.0)
                big = np.abs(tau) > 1e150
                tau_c = np.where(big, 0.0, tau)
                t = np.where(tau_c >= 0, 1.0, -1.0) / (np.abs(tau_c) + np.sqrt(1.0 + tau_c * tau_c))
                t = np.where(big, 0.5 / np.where(big, tau, 1.0), t)
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                u = np.zeros_like(a)
                u[:, np.arange(n), np.arange(n)] = 1.0
                # U = D R with D = diag(.., conj(phase) at q, ..)
                u[idx, p, p] = c
                u[idx, p, q] = s
                u[idx, q, p] = -s * np.conj(phase)
                u[idx, q, q] = c * np.conj(phase)
                a = np.conj(np.swapaxes(u, 1, 2)) @ a @ u
    eig = np.sort(np.diagonal(a, axis1=1, axis2=2).real, axis=1)
    return eig.reshape(shape[:-1])


@dataclass(frozen=True, eq=False)
class DistanceSpectrum:
    """Pairwise distance structure of a codebook.

    ``eigenvalues[n, l]`` holds the eigenvalues of
    ``(X_n - X_l)(X_n - X_l)^H`` in ascending order, ``lambda_product[n, l]``
    their product, and ``xi`` the competitor sum of products averaged over
    reference codewords.
    """

    eigenvalues: np.ndarray
    lambda_product: np.ndarray
    xi: float

    def pair_classes(self, decimals: int = 9):
        """Distinct eigenvalue vectors over ordered pairs ``n != l`` with their
        multiplicity divided by ``|C|``; a reference-averaged union sum is
        ``sum(weight * f(eigs))``."""
        size = self.eigenvalues.shape[0]
        off = ~np.eye(size, dtype=bool)
        eigs = np.round(self.eigenvalues[off], decimals)
        uniq, counts = np.unique(eigs, axis=0, return_counts=True)
        return [(tuple(u), c / size) for u, c in zip(uniq, counts)]


def distance_spectrum(cb: Codebook) -> DistanceSpectrum:
    words = np.asarray(cb.codewords)
    if len(words) < 2:
        raise DegenerateCodebook("distance spectrum needs at least two codewords")
    diff = words[:, None, :, :] - words[None, :, :, :]
    gram = diff @ np.conj(np.swapaxes(diff, -1, -2))
    eig = np.clip(hermitian_eigvalsh(gram), 0.0, None)
    prod = np.prod(eig, axis=-1)
    size = len(words)
    xi = float((prod.sum() - np.trace(prod)) / size)
    eig.setflags(write=False)
    prod.setflags(write=False)
    return DistanceSpectrum(eigenvalues=eig, lambda_product=prod, xi=xi)


# ---------------------------------------------------------------------------
# decoding
# ---------------------------------------------------------------------------

def _metrics(y, h, words, gain, chunk=1 << 22):
    # ||Y - gain H X_c||_F^2 for every trial and codeword, shape (B, C)
    b = y.shape[0]
    per_trial = words.shape[0] * y.shape[1] * y.shape[2]
    step = max(1, chunk // max(per_trial, 1))
    out = np.empty((b, words.shape[0]))
    for start in range(0, b, step):
        sl = slice(start, start + step)
        hx = gain * np.einsum("bdr,crt->bcdt", h[sl], words)
        out[sl] = np.sum(np.abs(y[sl, None] - hx) ** 2, axis=(2, 3))
    return out


def ml_decode_batch(y, h, cb: Codebook, p_r: float, n0: float = 1.0, extra_metric=None):
    """Vectorized ML decoding; returns codeword indices of shape ``(B,)``.

    ``extra_metric`` (shape ``(B, |C|)``) is added before the argmin; the
    simulator uses it for the direct-link contribution.
    """
    y = np.asarray(y)
    h = np.asarray(h)
    gain = np.sqrt(p_r / cb.n_r)
    metric = _metrics(y, h, np.asarray(cb.codewords), gain)
    if extra_metric is not None:
        metric = metric + extra_metric
    return np.argmin(metric, axis=1)


def ml_decode(y, h, cb: Codebook, p_r: float, n0: float = 1.0) -> tuple:
    """Symbol tuple of the codeword minimizing ``||Y - sqrt(P_R/N_R) H X||_F^2``.

    Ties go to the lowest codeword index. ``n0`` does not change the decision
    and is accepted for interface symmetry.
    """
    y = np.atleast_2d(np.asarray(y))
    h = np.atleast_2d(np.asarray(h))
    if h.shape[1] != cb.n_r or y.shape[1] != cb.t2 or y.shape[0] != h.shape[0]:
        raise DimensionMismatch(
            f"y {y.shape} and h {h.shape} incompatible with codebook N_R={cb.n_r}, T2={cb.t2}")
    idx = ml_decode_batch(y[None], h[None], cb, p_r, n0)[0]
    return tuple(int(v) for v in cb.symbols[idx])


def alamouti_combine(y, h):
    """Matched-filter statistics of the Alamouti block.

    ``y`` and ``h`` are ``(..., N_D, 2)``. For ``y = g H X + W`` the result is
    ``g ||H||_F^2 (s1, s2)`` plus noise, so with constant-modulus symbols the
    ML metric is separable and each symbol is decided from its own entry.
    """
    y = np.asarray(y)
    h = np.asarray(h)
    h1, h2 = h[..., 0], h[..., 1]
    y1, y2 = y[..., 0], y[..., 1]
    z1 = np.sum(np.conj(h1) * y1 + h2 * np.conj(y2), axis=-1)
    z2 = np.sum(np.conj(h2) * y1 - h1 * np.conj(y2), axis=-1)
    return np.stack([z1, z2], axis=-1)


def alamouti_decouple(y, h, m: int, p_r: float = 1.0):
    """Symbol-by-symbol Alamouti receiver for any number of receive antennas.

    ``y`` is ``(..., N_D, 2)``, ``h`` is ``(..., N_D, 2)``. Returns symbol
    indices ``(..., 2)``. Assumes the unnormalized Alamouti layout of
    :func:`build_codebook` (which has unit scale for PSK).
    """
    return ModulationScheme(m).demodulate(alamouti_combine(y, h))
