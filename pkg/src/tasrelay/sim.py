"""Monte Carlo engine for the selective decode-and-forward link.

Reproducibility
---------------
Trials are cut into fixed blocks of :data:`BLOCK_TRIALS`. Block ``k`` draws
from a Philox (counter-based) stream keyed by ``(seed, k)``, and every
random quantity of a block is drawn in a fixed order that does not depend
on powers or noise level. Consequently

* a run is bit-identical for any worker count, and
* runs that differ only in ``total_power`` see the same channels, symbols
  and unit noise (common random numbers).

Complex Gaussian variates come from the polar Box-Muller map
``sqrt(-ln u1) * exp(2j pi u2)``, which is exactly CN(0, 1).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import ZeroTotal
from .model import ChannelSet, ModulationScheme, Strategy, SystemConfig, validate_config

__all__ = [
    "BLOCK_TRIALS",
    "WORKERS_ENV",
    "TrialBatchResult",
    "SelectionResult",
    "block_rng",
    "complex_normal",
    "draw_channels",
    "select_antennas",
    "mrc_snr",
    "run_strategy1",
    "run_strategy2",
    "estimate_ser",
    "default_workers",
]

BLOCK_TRIALS = 1 << 14
WORKERS_ENV = "TASRELAY_WORKERS"

_STREAM_TAGS = {Strategy.I: 1, Strategy.II: 2}


def default_workers() -> int:
    value = os.environ.get(WORKERS_ENV, "")
    try:
        return max(1, int(value))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# random streams
# ---------------------------------------------------------------------------

def block_rng(seed: int, block: int, tag: int = 0) -> np.random.Generator:
    """Philox generator for one block of trials."""
    seq = np.random.SeedSequence(int(seed) & 0xFFFF_FFFF_FFFF_FFFF, spawn_key=(tag, block))
    return np.random.Generator(np.random.Philox(seq))


def complex_normal(rng: np.random.Generator, shape, var: float = 1.0) -> np.ndarray:
    """Circularly symmetric complex Gaussian samples with ``E|z|^2 = var``."""
    u = rng.random((2,) + tuple(np.atleast_1d(shape)))
    radius = np.sqrt(-np.log1p(-u[0]) * var)
    return radius * np.exp(2j * np.pi * u[1])


# ---------------------------------------------------------------------------
# per-trial building blocks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SelectionResult:
    """Selected antenna indices (arrays over a batch of trials, or scalars).

    ``sd_pair`` is ``(destination i, source j)``, ``sr_antenna`` the relay
    receive antenna, and ``rd_pair`` ``(destination n, relay m)``, which is
    drawn uniformly and only used by Strategy I.
    """

    sd_pair: tuple
    sr_antenna: object
    rd_pair: tuple = None


def draw_channels(cfg: SystemConfig, rng: np.random.Generator, trials: int = None) -> ChannelSet:
    """Rayleigh channel matrices; with ``trials`` a leading batch axis is added."""
    lead = () if trials is None else (trials,)
    return ChannelSet(
        h_sd=complex_normal(rng, lead + (cfg.n_d, cfg.n_s), cfg.var_sd),
        h_sr=complex_normal(rng, lead + (cfg.n_r, cfg.n_s), cfg.var_sr),
        h_rd=complex_normal(rng, lead + (cfg.n_d, cfg.n_r), cfg.var_rd),
    )


def select_antennas(ch: ChannelSet, strategy=Strategy.I, rng: np.random.Generator = None) -> SelectionResult:
    """Pick the strongest source-destination pair, then the strongest relay
    antenna for that source antenna.

    Works on single realizations or on batches (leading axis). Ties resolve to
    the lowest destination index, then the lowest source index.
    """
    h_sd = np.asarray(ch.h_sd)
    single = h_sd.ndim == 2
    h_sd = h_sd[None] if single else h_sd
    h_sr = np.asarray(ch.h_sr)
    h_sr = h_sr[None] if single else h_sr
    batch, n_d, n_s = h_sd.shape
    n_r = h_sr.shape[1]
    flat = np.argmax(np.abs(h_sd.reshape(batch, -1)) ** 2, axis=1)
    i, j = np.divmod(flat, n_s)
    g_col = np.abs(h_sr[np.arange(batch), :, j]) ** 2
    k = np.argmax(g_col, axis=1)
    rd = None
    if Strategy.parse(strategy) is Strategy.I:
        if rng is None:
            rng = np.random.default_rng()
        rd = (rng.integers(0, n_d, batch), rng.integers(0, n_r, batch))
    if single:
        i, j, k = int(i[0]), int(j[0]), int(k[0])
        if rd is not None:
            rd = (int(rd[0][0]), int(rd[1][0]))
    return SelectionResult(sd_pair=(i, j), sr_antenna=k, rd_pair=rd)


def mrc_snr(ch: ChannelSet, sel: SelectionResult, cfg: SystemConfig):
    """Post-combining SNR of the direct and relay branches (Strategy I)."""
    i, j = sel.sd_pair
    n, m = sel.rd_pair
    h_sd = np.asarray(ch.h_sd)
    h_rd = np.asarray(ch.h_rd)
    if h_sd.ndim == 2:
        g_sd = abs(h_sd[i, j]) ** 2
        g_rd = abs(h_rd[n, m]) ** 2
    else:
        idx = np.arange(h_sd.shape[0])
        g_sd = np.abs(h_sd[idx, i, j]) ** 2
        g_rd = np.abs(h_rd[idx, n, m]) ** 2
    return (cfg.p_s * g_sd + cfg.p_r * g_rd) / cfg.n0


# ---------------------------------------------------------------------------
# results
# ---------------------------------------------------------------------------

def estimate_ser(errors: int, total: int):
    """Point estimate and 95% confidence half-width.

    Normal approximation ``1.96 sqrt(p(1-p)/n)``; below 20 errors the
    half-width is the distance from the estimate to the Clopper-Pearson upper
    limit.
    """
    if total <= 0:
        raise ZeroTotal("cannot estimate an error rate from zero symbols")
    p = errors / total
    if errors < 20:
        upper = 1.0 if errors == total else float(stats.beta.ppf(0.975, errors + 1, total - errors))
        return p, upper - p
    return p, 1.96 * math.sqrt(p * (1.0 - p) / total)


@dataclass(frozen=True)
class TrialBatchResult:
    trials: int
    symbol_errors: int
    relay_decode_failures: int
    symbols_per_trial: int = 1
    relay_symbol_errors: int = 0

    @property
    def total_symbols(self) -> int:
        return self.trials * self.symbols_per_trial

    @property
    def ser_estimate(self) -> float:
        return self.symbol_errors / self.total_symbols

    @property
    def ci95_halfwidth(self) -> float:
        return estimate_ser(self.symbol_errors, self.total_symbols)[1]

    @property
    def relay_symbol_error_rate(self) -> float:
        return self.relay_symbol_errors / self.total_symbols

    def __add__(self, other: "TrialBatchResult") -> "TrialBatchResult":
        if self.symbols_per_trial != other.symbols_per_trial:
            raise ValueError("cannot merge batches with different frame sizes")
        return TrialBatchResult(
            trials=self.trials + other.trials,
            symbol_errors=self.symbol_errors + other.symbol_errors,
            relay_decode_failures=self.relay_decode_failures + other.relay_decode_failures,
            symbols_per_trial=self.symbols_per_trial,
            relay_symbol_errors=self.relay_symbol_errors + other.relay_symbol_errors,
        )


# ---------------------------------------------------------------------------
# block kernels
# ---------------------------------------------------------------------------

def _strategy1_block(cfg: SystemConfig, n: int, rng: np.random.Generator):
    psk = ModulationScheme(cfg.m)
    ch = draw_channels(cfg, rng, n)
    sym = rng.integers(0, cfg.m, n)
    w_sd = complex_normal(rng, n)
    w_sr = complex_normal(rng, n)
    w_rd = complex_normal(rng, n)
    sel = select_antennas(ch, Strategy.I, rng)

    idx = np.arange(n)
    i, j = sel.sd_pair
    dn, rm = sel.rd_pair
    h1 = ch.h_sd[idx, i, j]
    hr = ch.h_sr[idx, sel.sr_antenna, j]
    h2 = ch.h_rd[idx, dn, rm]
    noise = math.sqrt(cfg.n0)
    x = psk.modulate(sym)
    a_s = math.sqrt(cfg.p_s)
    a_r = math.sqrt(cfg.p_r)

    y_sr = a_s * hr * x + noise * w_sr
    relay_ok = psk.demodulate(y_sr * np.conj(hr)) == sym
    y_sd = a_s * h1 * x + noise * w_sd
    y_rd = a_r * h2 * x + noise * w_rd
    z = a_s * np.conj(h1) * y_sd + np.where(relay_ok, a_r * np.conj(h2) * y_rd, 0.0)
    errors = int(np.count_nonzero(psk.demodulate(z) != sym))
    fails = int(n - np.count_nonzero(relay_ok))
    return errors, fails, fails


def _strategy2_block(cfg: SystemConfig, codebook, n: int, rng: np.random.Generator):
    from .stbc import alamouti_combine, ml_decode_batch

    psk = ModulationScheme(cfg.m)
    k = codebook.symbols_per_codeword
    ch = draw_channels(cfg, rng, n)
    sym = rng.integers(0, cfg.m, (n, k))
    w_sd = complex_normal(rng, (n, k))
    w_sr = complex_normal(rng, (n, k))
    w_rd = complex_normal(rng, (n, cfg.n_d, codebook.t2))
    sel = select_antennas(ch, Strategy.II)

    idx = np.arange(n)
    i, j = sel.sd_pair
    h1 = ch.h_sd[idx, i, j][:, None]
    hr = ch.h_sr[idx, sel.sr_antenna, j][:, None]
    noise = math.sqrt(cfg.n0)
    a_s = math.sqrt(cfg.p_s)
    x = psk.modulate(sym)

    y_sr = a_s * hr * x + noise * w_sr
    relay_sym = psk.demodulate(y_sr * np.conj(hr))
    relay_wrong = relay_sym != sym
    relay_ok = ~relay_wrong.any(axis=1)

    y_sd = a_s * h1 * x + noise * w_sd
    decided = psk.demodulate(y_sd * np.conj(h1))
    if relay_ok.any():
        ok = np.flatnonzero(relay_ok)
        words = np.asarray(codebook.codewords)
        tx = words[codebook.index_of(sym[ok])]
        h_rd = ch.h_rd[ok]
        gain = math.sqrt(cfg.p_r / cfg.n_r)
        y_rd = gain * (h_rd @ tx) + noise * w_rd[ok]
        if codebook.n_r == 2:
            # orthogonal block and constant-modulus symbols: the joint metric
            # separates into one nearest-phase decision per symbol
            z = a_s * np.conj(h1[ok]) * y_sd[ok] + gain * alamouti_combine(y_rd, h_rd)
            decided[ok] = psk.demodulate(z)
        else:
            cand = psk.modulate(np.asarray(codebook.symbols))
            direct = np.sum(np.abs(y_sd[ok, None, :] - a_s * h1[ok, None, :] * cand[None]) ** 2, axis=2)
            best = ml_decode_batch(y_rd, h_rd, codebook, cfg.p_r, cfg.n0, extra_metric=direct)
            decided[ok] = np.asarray(codebook.symbols)[best]
    errors = int(np.count_nonzero(decided != sym))
    fails = int(n - np.count_nonzero(relay_ok))
    return errors, fails, int(np.count_nonzero(relay_wrong))


def _run_blocks(args):
    cfg, codebook, seed, blocks, trials = args
    tag = _STREAM_TAGS[cfg.strategy]
    errors = fails = relay_sym = 0
    for block in blocks:
        n = min(BLOCK_TRIALS, trials - block * BLOCK_TRIALS)
        rng = block_rng(seed, block, tag)
        if codebook is None:
            e, f, r = _strategy1_block(cfg, n, rng)
        else:
            e, f, r = _strategy2_block(cfg, codebook, n, rng)
        errors += e
        fails += f
        relay_sym += r
    return errors, fails, relay_sym


def _dispatch(cfg, codebook, trials, seed, workers, symbols_per_trial):
    if trials <= 0:
        raise ZeroTotal("trials must be positive")
    workers = default_workers() if workers is None else max(1, int(workers))
    n_blocks = -(-trials // BLOCK_TRIALS)
    # contiguous block ranges; counts add associatively so the split is irrelevant
    parts = [list(r) for r in np.array_split(np.arange(n_blocks), min(workers, n_blocks)) if len(r)]
    jobs = [(cfg, codebook, seed, [int(b) for b in p], trials) for p in parts]
    if len(jobs) == 1:
        results = [_run_blocks(jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=len(jobs)) as pool:
            results = list(pool.map(_run_blocks, jobs))
    errors = sum(r[0] for r in results)
    fails = sum(r[1] for r in results)
    relay_sym = sum(r[2] for r in results)
    return TrialBatchResult(trials=trials, symbol_errors=errors, relay_decode_failures=fails,
                            symbols_per_trial=symbols_per_trial, relay_symbol_errors=relay_sym)


def run_strategy1(cfg: SystemConfig, trials: int, seed: int = 0, workers: int = None) -> TrialBatchResult:
    """Simulate ``trials`` single-symbol frames with a single-antenna relay phase.

    The relay forwards only if it decoded the symbol correctly; the destination
    then MRC-combines both observations, otherwise it uses the direct one.
    """
    validate_config(cfg)
    if cfg.strategy is not Strategy.I:
        cfg = _as_strategy(cfg, Strategy.I)
    return _dispatch(cfg, None, trials, seed, workers, 1)


def run_strategy2(cfg: SystemConfig, codebook, trials: int, seed: int = 0,
                  workers: int = None) -> TrialBatchResult:
    """Simulate ``trials`` STBC frames.

    Each frame carries ``codebook.symbols_per_codeword`` PSK symbols. The relay
    forwards the codeword only when every symbol was decoded correctly, and
    the destination then decodes jointly over the direct observations and the
    STBC block.
    """
    validate_config(_as_strategy(cfg, Strategy.II))
    if codebook.n_r != cfg.n_r or codebook.m != cfg.m:
        raise ValueError(f"codebook (N_R={codebook.n_r}, M={codebook.m}) does not match config")
    cfg = _as_strategy(cfg, Strategy.II)
    return _dispatch(cfg, codebook, trials, seed, workers, codebook.symbols_per_codeword)


def _as_strategy(cfg, strategy):
    from dataclasses import replace

    return cfg if cfg.strategy is strategy else replace(cfg, strategy=strategy)
