import numpy as np
import pytest
from hypothesis import given, strategies as st

from tasrelay.errors import DegenerateCodebook, DimensionMismatch, UnsupportedStbcSize
from tasrelay.stbc import (Codebook, alamouti_decouple, build_codebook, distance_spectrum,
                           hermitian_eigvalsh, ml_decode, ml_decode_batch)


@pytest.mark.parametrize("n_r, t2, k", [(2, 2, 2), (3, 8, 4), (4, 8, 4)])
def test_codebook_shape_and_energy(n_r, t2, k):
    cb = build_codebook(n_r, 4)
    assert cb.codewords.shape == (4 ** k, n_r, t2)
    assert cb.symbols_per_codeword == k
    assert cb.energy() == pytest.approx(1.0)
    assert cb.rate_internal == k / t2


@pytest.mark.parametrize("n_r", [2, 3, 4])
def test_orthogonality(n_r):
    # X X^H is a multiple of the identity for every codeword
    cb = build_codebook(n_r, 8)
    gram = cb.codewords @ np.conj(np.swapaxes(cb.codewords, 1, 2))
    diag = np.real(gram[:, 0, 0])
    np.testing.assert_allclose(gram, diag[:, None, None] * np.eye(n_r), atol=1e-12)


def test_index_of_round_trip():
    cb = build_codebook(3, 4)
    np.testing.assert_array_equal(cb.index_of(cb.symbols), np.arange(len(cb)))


def test_unsupported_size():
    with pytest.raises(UnsupportedStbcSize):
        build_codebook(5, 4)
    with pytest.raises(UnsupportedStbcSize):
        build_codebook(1, 4)


# -- eigenvalues --------------------------------------------------------------

hermitian_sizes = st.integers(1, 4)


@given(hermitian_sizes, st.integers(0, 2**32 - 1))
def test_jacobi_matches_lapack(n, seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(8, n, n)) + 1j * rng.normal(size=(8, n, n))
    a = x @ np.conj(np.swapaxes(x, 1, 2))
    got = hermitian_eigvalsh(a)
    np.testing.assert_allclose(got, np.linalg.eigvalsh(a), rtol=1e-9, atol=1e-9 * np.abs(a).max())


@given(hermitian_sizes, st.integers(0, 2**32 - 1))
def test_trace_and_determinant_identities(n, seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, n + 1)) + 1j * rng.normal(size=(n, n + 1))
    a = x @ x.conj().T
    lam = hermitian_eigvalsh(a)
    scale = np.trace(a).real
    assert abs(lam.sum() - np.trace(a).real) <= 1e-9 * scale
    assert abs(np.prod(lam) - np.linalg.det(a).real) <= 1e-9 * scale ** n
    assert np.all(np.diff(lam) >= 0)


def test_jacobi_diagonal_and_degenerate():
    np.testing.assert_allclose(hermitian_eigvalsh(np.diag([3.0, 1.0, 2.0])), [1, 2, 3])
    np.testing.assert_allclose(hermitian_eigvalsh(np.zeros((2, 2))), [0, 0])
    np.testing.assert_allclose(hermitian_eigvalsh(np.ones((4, 4))), [0, 0, 0, 4], atol=1e-12)


# -- distance spectrum -------------------------------------------------------

@pytest.mark.parametrize("n_r", [2, 3, 4])
def test_spectrum_trace_identity(n_r):
    cb = build_codebook(n_r, 4)
    sp = cb.spectrum
    diff = cb.codewords[:, None] - cb.codewords[None]
    fro = np.sum(np.abs(diff) ** 2, axis=(2, 3))
    np.testing.assert_allclose(sp.eigenvalues.sum(axis=-1), fro, rtol=1e-9, atol=1e-9)
    assert np.all(sp.eigenvalues >= 0)


def test_alamouti_spectrum_values():
    sp = build_codebook(2, 4).spectrum
    off = ~np.eye(16, dtype=bool)
    # full rank with equal eigenvalues (orthogonal design)
    lam = sp.eigenvalues[off]
    np.testing.assert_allclose(lam[:, 0], lam[:, 1], rtol=1e-12)
    assert lam.min() == pytest.approx(2.0)
    assert sp.lambda_product[off].min() == pytest.approx(4.0)
    assert sp.xi == pytest.approx(320.0)


@pytest.mark.parametrize("n_r, xi", [(3, 1441792.0), (4, 30081024.0)])
def test_rate_half_xi_frozen_and_lapack(n_r, xi):
    # frozen values cross-checked against numpy.linalg.eigvalsh
    cb = build_codebook(n_r, 4)
    assert cb.spectrum.xi == pytest.approx(xi, rel=1e-9)
    diff = cb.codewords[:8, None] - cb.codewords[None]
    gram = diff @ np.conj(np.swapaxes(diff, -1, -2))
    np.testing.assert_allclose(cb.spectrum.eigenvalues[:8], np.clip(np.linalg.eigvalsh(gram), 0, None),
                               atol=1e-9)


def test_pair_classes_weights():
    sp = build_codebook(2, 4).spectrum
    classes = sp.pair_classes()
    assert sum(w for _, w in classes) == pytest.approx(15.0)   # |C| - 1 competitors
    xi = sum(w * np.prod(e) for e, w in classes)
    assert xi == pytest.approx(sp.xi)


def test_degenerate_codebook():
    words = np.ones((1, 2, 2), dtype=complex)
    cb = Codebook(n_r=2, t2=2, symbols_per_codeword=2, codewords=words, symbols=np.zeros((1, 2)), m=4)
    with pytest.raises(DegenerateCodebook):
        distance_spectrum(cb)


# -- decoding ----------------------------------------------------------------

def test_alamouti_ml_equals_decoupled_decoder():
    cb = build_codebook(2, 4)
    rng = np.random.default_rng(2024)
    n, n_d, p_r = 100_000, 1, 10.0
    tx = rng.integers(0, 16, n)
    h = (rng.normal(size=(n, n_d, 2)) + 1j * rng.normal(size=(n, n_d, 2))) / np.sqrt(2)
    w = (rng.normal(size=(n, n_d, 2)) + 1j * rng.normal(size=(n, n_d, 2))) / np.sqrt(2)
    y = np.sqrt(p_r / 2) * np.einsum("bdr,brt->bdt", h, cb.codewords[tx]) + w
    ml = cb.symbols[ml_decode_batch(y, h, cb, p_r)]
    dec = alamouti_decouple(y, h, 4, p_r)
    assert np.array_equal(ml, dec)
    # the channel is noisy enough that both decoders make errors
    assert 0 < np.mean(np.any(ml != cb.symbols[tx], axis=1)) < 0.5


@pytest.mark.parametrize("n_r, n_d", [(2, 2), (3, 1), (4, 2)])
def test_noiseless_ml_recovers_codeword(n_r, n_d):
    cb = build_codebook(n_r, 4)
    rng = np.random.default_rng(n_r)
    tx = rng.integers(0, len(cb), 20)
    h = rng.normal(size=(20, n_d, n_r)) + 1j * rng.normal(size=(20, n_d, n_r))
    y = np.sqrt(5.0 / n_r) * np.einsum("bdr,brt->bdt", h, cb.codewords[tx])
    np.testing.assert_array_equal(ml_decode_batch(y, h, cb, 5.0), tx)


def test_ml_decode_single_and_dimension_check():
    cb = build_codebook(2, 4)
    h = np.array([[0.3 + 1j, -0.7 + 0.2j]])
    y = np.sqrt(0.5) * h @ cb.codewords[9]
    assert ml_decode(y, h, cb, 1.0) == tuple(cb.symbols[9])
    with pytest.raises(DimensionMismatch):
        ml_decode(np.zeros((1, 3)), h, cb, 1.0)


@pytest.mark.parametrize("n_d", [1, 2])
def test_alamouti_separable_joint_metric(n_d):
    # direct-link metric plus STBC metric, decided per symbol, equals the
    # joint ML search over all 16 codewords
    from tasrelay.model import ModulationScheme
    from tasrelay.stbc import alamouti_combine

    cb = build_codebook(2, 4)
    psk = ModulationScheme(4)
    rng = np.random.default_rng(77 + n_d)
    n, a_s, p_r = 100_000, np.sqrt(3.0), 4.0
    gain = np.sqrt(p_r / 2)
    tx = rng.integers(0, 16, n)
    x = psk.modulate(cb.symbols[tx])
    cn = lambda *s: (rng.normal(size=s) + 1j * rng.normal(size=s)) / np.sqrt(2)
    h1 = cn(n, 1)
    h = cn(n, n_d, 2)
    y_sd = a_s * h1 * x + cn(n, 2)
    y_rd = gain * np.einsum("bdr,brt->bdt", h, cb.codewords[tx]) + cn(n, n_d, 2)
    cand = psk.modulate(cb.symbols)
    direct = np.sum(np.abs(y_sd[:, None, :] - a_s * h1[:, None, :] * cand[None]) ** 2, axis=2)
    joint = cb.symbols[ml_decode_batch(y_rd, h, cb, p_r, extra_metric=direct)]
    fast = psk.demodulate(a_s * np.conj(h1) * y_sd + gain * alamouti_combine(y_rd, h))
    assert np.array_equal(joint, fast)
