"""Acceptance gate. Each test checks one criterion at its stated tolerance
and records a single PASS/FAIL line, repeated in the terminal summary."""

import math
import time

import numpy as np
import pytest
from scipy import integrate as sint
from scipy.special import erfc

from tasrelay.analytic import (gaussian_q, psk_psi, ser_direct, ser_end_to_end_strategy1,
                               ser_end_to_end_strategy2, ser_source_relay)
from tasrelay.bounds import fit_diversity, upper_bound_strategy1, upper_bound_strategy2
from tasrelay.experiment import matched_strategy1, rate
from tasrelay.model import Strategy, SystemConfig
from tasrelay.powers import optimal_split
from tasrelay.sim import BLOCK_TRIALS, run_strategy1, run_strategy2
from tasrelay.stbc import alamouti_decouple, build_codebook, ml_decode_batch

QPSK = 4


def test_criterion_1_table_one(acceptance):
    table = {(1, 1, 1): 0.6270, (2, 2, 2): 0.8086, (3, 3, 3): 0.9026}
    t0 = time.perf_counter()
    got = {ant: optimal_split(SystemConfig(*ant, m=QPSK, total_power=100.0)).beta1 for ant in table}
    elapsed = time.perf_counter() - t0
    sym = {ant: optimal_split(SystemConfig(*ant, total_power=100.0), variant="symmetric").beta1
           for ant in table}
    errs = {ant: abs(got[ant] - table[ant]) for ant in table}
    ok = all(e <= 0.005 for e in errs.values()) and elapsed < 1.0
    detail = "; ".join(f"{ant}: {got[ant]:.4f} vs {table[ant]} (symmetric {sym[ant]:.4f})"
                       for ant in table)
    acceptance(1, ok, f"{detail}; {elapsed:.3f} s")


def test_criterion_2_strategy1_sim_vs_analytic(acceptance):
    t0 = time.perf_counter()
    worst = 0.0
    bad = []
    for ant in [(1, 1, 1), (2, 1, 2), (2, 2, 2)]:
        for snr_db in (5, 10, 15, 20):
            cfg = SystemConfig(*ant, m=QPSK).with_snr_db(snr_db)
            res = run_strategy1(cfg, 10**6, seed=2024)
            z = abs(res.ser_estimate - ser_end_to_end_strategy1(cfg)) / res.ci95_halfwidth
            worst = max(worst, z)
            if z > 3:
                bad.append((ant, snr_db, round(z, 2)))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 300
    acceptance(2, ok, f"12 points, worst |sim-analytic| = {worst:.2f} x ci95, failures {bad}, "
                      f"{elapsed:.0f} s")


def test_criterion_3_bound_dominance_and_tightness(acceptance):
    s1 = SystemConfig(1, 1, 1)
    s2 = SystemConfig(1, 2, 1, strategy=Strategy.II)
    cb = build_codebook(2, QPSK)
    violations = []
    for snr_db in np.arange(25.0, 60.5, 1.0):
        c1, c2 = s1.with_snr_db(snr_db), s2.with_snr_db(snr_db)
        if upper_bound_strategy1(c1) < ser_end_to_end_strategy1(c1):
            violations.append(("I", snr_db))
        if upper_bound_strategy2(cb, c2) < ser_end_to_end_strategy2(cb, c2):
            violations.append(("II", snr_db))
    c1, c2 = s1.with_snr_db(35), s2.with_snr_db(35)
    r1 = upper_bound_strategy1(c1) / ser_end_to_end_strategy1(c1)
    r2 = upper_bound_strategy2(cb, c2) / ser_end_to_end_strategy2(cb, c2)
    ok = not violations and r1 <= 10 and r2 <= 10
    acceptance(3, ok, f"bound >= analytic on 25-60 dB (violations {violations}); "
                      f"ratio at 35 dB: Strategy I {r1:.3f}, Strategy II {r2:.3f}")


def test_criterion_4_diversity_orders(acceptance):
    t0 = time.perf_counter()
    grid = np.arange(25.0, 40.5, 1.0)
    rows = []
    for ant in [(1, 1, 1), (2, 1, 2)]:
        cfg = SystemConfig(*ant)
        ser = [ser_end_to_end_strategy1(cfg.with_snr_db(x)) for x in grid]
        rows.append(("I", ant, fit_diversity((grid, ser)).slope, cfg.n_sd + 1))
    for ant in [(1, 2, 1), (1, 2, 2)]:
        cfg = SystemConfig(*ant, strategy=Strategy.II)
        cb = build_codebook(cfg.n_r, QPSK)
        ser = [upper_bound_strategy2(cb, cfg.with_snr_db(x)) for x in grid]
        expect = min(cfg.n_r + cfg.n_sd, cfg.n_r * cfg.n_d + cfg.n_sd)
        rows.append(("II", ant, fit_diversity((grid, ser)).slope, expect))
    elapsed = time.perf_counter() - t0
    ok = all(abs(s - e) <= 0.3 for _, _, s, e in rows) and elapsed < 60
    detail = "; ".join(f"{st} {ant}: {s:.3f} (expect {e})" for st, ant, s, e in rows)
    acceptance(4, ok, f"{detail}; {elapsed:.1f} s")


def test_criterion_5_strategy_comparison(acceptance):
    s2 = SystemConfig(1, 2, 1, strategy=Strategy.II)
    s1 = matched_strategy1(s2)
    cb = build_codebook(2, QPSK)
    assert rate(s1.n_r, s1.strategy) == rate(s2.n_r, s2.strategy)
    # same nominal diversity order N_S N_D + 1 = N_S N_D + N_R
    assert s1.n_sd + 1 == s2.n_sd + s2.n_r
    rows = []
    for snr_db in (15, 20, 25, 30):
        r2 = run_strategy2(s2.with_snr_db(snr_db), cb, 10**6, seed=7)
        r1 = run_strategy1(s1.with_snr_db(snr_db), 10**6, seed=7)
        rows.append((snr_db, r2.ser_estimate, r1.ser_estimate))
    ok = all(a <= b for _, a, b in rows)
    detail = "; ".join(f"{x} dB: II {a:.3g} vs I {b:.3g}" for x, a, b in rows)
    acceptance(5, ok, f"Strategy II {(s2.n_s, s2.n_r, s2.n_d)} vs Strategy I "
                      f"{(s1.n_s, s1.n_r, s1.n_d)}, rate 1/2 both: {detail}")


def _q(x):
    return 0.5 * erfc(x / math.sqrt(2))


def test_criterion_6_oracle_suites(acceptance):
    notes = []

    # (a) Craig-form functions against erfc
    xs = np.linspace(0, 8, 81)
    e_q = max(abs(gaussian_q(x) / _q(x) - 1) for x in xs)
    gs = np.concatenate([[0.0], np.logspace(-3, 1.7, 60)])
    e_psk = max(max(abs(psk_psi(g, 2) / _q(math.sqrt(2 * g)) - 1),
                    abs(psk_psi(g, 4) / (2 * _q(math.sqrt(g)) - _q(math.sqrt(g)) ** 2) - 1))
                for g in gs)
    ok_a = e_q <= 1e-9 and e_psk <= 1e-9
    notes.append(f"Q/psi rel err {max(e_q, e_psk):.1e}")

    # (b) selected-link SER against density averaging
    e_sel = 0.0
    for n in (1, 2, 4, 9):
        for snr_db in (0, 10, 20, 30):
            cfg = SystemConfig(n_s=n).with_snr_db(snr_db)
            mean = cfg.p_s

            def f(g):
                e = math.exp(-g / mean)
                t = _q(math.sqrt(g))
                return (2 * t - t * t) * n / mean * e * (1 - e) ** (n - 1)

            ref, _ = sint.quad(f, 0, np.inf, epsabs=0, epsrel=1e-12, limit=400,
                               points=None)
            e_sel = max(e_sel, abs(ser_direct(cfg) / ref - 1))
            cfg_r = SystemConfig(n_r=n).with_snr_db(snr_db)
            e_sel = max(e_sel, abs(ser_source_relay(cfg_r) / ref - 1))
    ok_b = e_sel <= 1e-6
    notes.append(f"selected-link rel err {e_sel:.1e}")

    # (c) eigenvalue trace identity for every codeword pair
    e_tr = 0.0
    for n_r in (2, 3, 4):
        cb = build_codebook(n_r, QPSK)
        diff = cb.codewords[:, None] - cb.codewords[None]
        fro = np.sum(np.abs(diff) ** 2, axis=(2, 3))
        e_tr = max(e_tr, float(np.max(np.abs(cb.spectrum.eigenvalues.sum(-1) - fro))))
    ok_c = e_tr <= 1e-9
    notes.append(f"trace identity err {e_tr:.1e}")

    # (d) Alamouti ML against the decoupled receiver
    cb = build_codebook(2, QPSK)
    rng = np.random.default_rng(99)
    n = 10**5
    tx = rng.integers(0, len(cb), n)
    h = (rng.normal(size=(n, 1, 2)) + 1j * rng.normal(size=(n, 1, 2))) / math.sqrt(2)
    w = (rng.normal(size=(n, 1, 2)) + 1j * rng.normal(size=(n, 1, 2))) / math.sqrt(2)
    y = math.sqrt(3.0 / 2) * np.einsum("bdr,brt->bdt", h, cb.codewords[tx]) + w
    mism = int(np.sum(np.any(cb.symbols[ml_decode_batch(y, h, cb, 3.0)]
                             != alamouti_decouple(y, h, QPSK, 3.0), axis=1)))
    ok_d = mism == 0
    notes.append(f"Alamouti ML/decoupled mismatches {mism}/{n}")

    # (e) relay decode-failure fraction against the selected-link SER
    worst = 0.0
    for ant, snr_db in [((1, 1, 1), 5), ((1, 2, 1), 10), ((2, 3, 2), 5)]:
        cfg = SystemConfig(*ant).with_snr_db(snr_db)
        res = run_strategy1(cfg, 500_000, seed=31)
        p = ser_source_relay(cfg)
        worst = max(worst, abs(res.relay_decode_failures / res.trials - p)
                    / math.sqrt(p * (1 - p) / res.trials))
    ok_e = worst <= 3
    notes.append(f"relay failure worst {worst:.2f} sigma")

    acceptance(6, ok_a and ok_b and ok_c and ok_d and ok_e, "; ".join(notes))


def test_criterion_7_strategy2_analytic_vs_joint_ml(acceptance):
    cfg = SystemConfig(1, 2, 1, strategy=Strategy.II)
    cb = build_codebook(2, QPSK)
    rows = []
    for snr_db, trials in ((25, 10**7), (30, 10**8)):
        c = cfg.with_snr_db(snr_db)
        res = run_strategy2(c, cb, trials, seed=5)
        a = ser_end_to_end_strategy2(cb, c)
        rows.append((snr_db, a, res.ser_estimate, res.symbol_errors, a / res.ser_estimate))
    ok = all(0.5 <= r <= 2.0 for *_, r in rows)
    detail = "; ".join(f"{x} dB: analytic {a:.3g}, sim {s:.3g} ({k} errors), ratio {r:.2f}"
                       for x, a, s, k, r in rows)
    acceptance(7, ok, detail)


def test_criterion_8_determinism(acceptance):
    trials = 4 * BLOCK_TRIALS + 1000
    c1 = SystemConfig(2, 2, 1).with_snr_db(8)
    c2 = SystemConfig(1, 3, 1, strategy=Strategy.II).with_snr_db(6)
    cb = build_codebook(3, QPSK)
    s1 = {w: run_strategy1(c1, trials, seed=123, workers=w) for w in (1, 2, 3)}
    s2 = {w: run_strategy2(c2, cb, trials, seed=123, workers=w) for w in (1, 2, 3)}
    rerun1 = run_strategy1(c1, trials, seed=123, workers=1)
    rerun2 = run_strategy2(c2, cb, trials, seed=123, workers=1)
    ok = (len(set(s1.values())) == 1 and len(set(s2.values())) == 1
          and rerun1 == s1[1] and rerun2 == s2[1])
    acceptance(8, ok, f"workers 1/2/3 and rerun: Strategy I errors "
                      f"{[r.symbol_errors for r in s1.values()]}, Strategy II errors "
                      f"{[r.symbol_errors for r in s2.values()]}")
