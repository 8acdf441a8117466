import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracle import coef, exp_power_series, kernel_bruteforce, toeplitz_loops
from toeplitz_fredholm.families import random_block_factors, factor_first, rational_log
from toeplitz_fredholm.factorization import block_factorizations, make_ratios
from toeplitz_fredholm.identities import prepare_scalar
from toeplitz_fredholm.operators import (delta_vectors, exact_section, hankel_U, hankel_V,
                                         hs_norm, kernel_K, toeplitz_matrix)
from toeplitz_fredholm.symbol import LaurentSeries, SymbolError


@pytest.fixture(scope="module")
def smooth():
    return prepare_scalar(logphi=LaurentSeries.from_dict({1: 0.3, -1: 0.3}), band=64)


def test_toeplitz_identity():
    np.testing.assert_array_equal(toeplitz_matrix(LaurentSeries.identity(), 3), np.eye(3))


def test_toeplitz_shift():
    t = toeplitz_matrix(LaurentSeries.from_dict({1: 1.0}), 2)
    np.testing.assert_array_equal(t, [[0, 0], [1, 0]])


def test_toeplitz_smooth_matches_power_series(smooth):
    ref = exp_power_series({1: 0.3, -1: 0.3}, 8)
    t = toeplitz_matrix(smooth.phi, 4)
    for i in range(4):
        for j in range(4):
            assert abs(t[i, j] - ref[i - j]) <= 1e-15
    np.testing.assert_allclose(t, t.T, atol=1e-16)
    np.testing.assert_array_equal(t, toeplitz_loops(smooth.phi, 4))


def test_toeplitz_block_layout():
    a = np.array([[1, 2], [3, 4]])
    phi = LaurentSeries.from_dict({0: np.eye(2), 1: a}, dim=2)
    t = toeplitz_matrix(phi, 2)
    np.testing.assert_array_equal(t[2:4, 0:2], a)
    np.testing.assert_array_equal(t[0:2, 2:4], np.zeros((2, 2)))


def test_hankel_of_one_is_zero():
    one = LaurentSeries.identity()
    assert not np.any(hankel_U(one, 0, 4)) and not np.any(hankel_V(one, 0, 4))


def test_hankel_U_single_coefficient():
    h = hankel_U(LaurentSeries.from_dict({2: 5.0}), 1, 2)
    np.testing.assert_array_equal(h, [[5, 0], [0, 0]])


def test_hankel_V_single_coefficient():
    h = hankel_V(LaurentSeries.from_dict({-3: 2.0}), 1, 3)
    np.testing.assert_array_equal(h, [[0, 2, 0], [2, 0, 0], [0, 0, 0]])


def test_hankel_U_hs_tail_bound(smooth):
    u = smooth.ratios.u
    n, m = 3, 16
    hs2 = hs_norm(hankel_U(u, n, m)) ** 2
    bound = sum((idx - n) * abs(coef(u, idx)[0, 0]) ** 2 for idx in range(n + 1, u.band + 1))
    assert hs2 <= bound * (1 + 1e-12)
    # the full section is exact, so the bound is attained
    full = hs_norm(hankel_U(u, n, exact_section(u, smooth.ratios.v, n))) ** 2
    assert abs(full - bound) <= 1e-13 * bound


def test_analytic_symbol_has_zero_V():
    sym = prepare_scalar(logphi=LaurentSeries.from_dict({1: 0.4, 2: -0.1, 5: 0.05}), band=32)
    for n in range(0, 6):
        assert not np.any(hankel_V(sym.ratios.v, n, 8))
        assert not np.any(kernel_K(sym.ratios.u, sym.ratios.v, n))


def test_kernel_single_coefficient():
    u = LaurentSeries.from_dict({2: 3.0})
    v = LaurentSeries.from_dict({-2: 0.5})
    # k = 2 feeds entry (0, 0), k = 1 feeds entry (1, 1)
    np.testing.assert_array_equal(kernel_K(u, v, 0, 2), np.diag([1.5, 1.5]))
    np.testing.assert_array_equal(kernel_K(u, v, 1, 2), [[1.5, 0], [0, 0]])


def test_kernel_matches_bruteforce(smooth):
    u, v = smooth.ratios.u, smooth.ratios.v
    k = kernel_K(u, v, 2, 24)
    ref = kernel_bruteforce(u, v, 2, 24)
    assert np.max(np.abs(k - ref)) <= 1e-14


@settings(max_examples=25, deadline=None)
@given(n=st.integers(0, 20), m=st.integers(1, 12), seed=st.integers(0, 2 ** 32 - 1))
def test_kernel_product_equals_sum(n, m, seed):
    rng = np.random.default_rng(seed)
    u = LaurentSeries(rng.normal(size=17) + 1j * rng.normal(size=17))
    v = LaurentSeries(rng.normal(size=21) + 1j * rng.normal(size=21))
    np.testing.assert_allclose(kernel_K(u, v, n, m), kernel_bruteforce(u, v, n, m),
                               atol=1e-12, rtol=0)


def test_kernel_block_matches_bruteforce():
    pm, pp = random_block_factors(np.random.default_rng(3))
    pair = make_ratios(block_factorizations(factor_first(pm, pp), band=32))
    k = kernel_K(pair.u, pair.v, 1, 6)
    assert k.shape == (12, 12)
    assert np.max(np.abs(k - kernel_bruteforce(pair.u, pair.v, 1, 6))) <= 1e-14


def test_kernel_nesting(smooth):
    u, v = smooth.ratios.u, smooth.ratios.v
    for n in range(1, 10):
        outer = kernel_K(u, v, n - 1, 20)
        inner = kernel_K(u, v, n, 19)
        np.testing.assert_array_equal(outer[1:, 1:], inner)


def test_hs_norms_monotone_and_vanishing(smooth):
    u, v = smooth.ratios.u, smooth.ratios.v
    m = exact_section(u, v, 0)
    hu = [hs_norm(hankel_U(u, n, m)) for n in range(0, u.band + 1)]
    hv = [hs_norm(hankel_V(v, n, m)) for n in range(0, v.band + 1)]
    for seq in (hu, hv):
        assert all(b <= a + 1e-14 for a, b in zip(seq, seq[1:]))
        assert seq[-1] < 1e-8


def test_kernel_dimension_mismatch():
    with pytest.raises(SymbolError):
        kernel_K(LaurentSeries.identity(1), LaurentSeries.identity(2), 0, 1)


def test_delta_vectors_trivial():
    one = LaurentSeries.identity()
    dv = delta_vectors(one, one, 2, 4)
    assert not np.any(dv.u_delta) and not np.any(dv.v_delta)


def test_delta_vectors_single_coefficient():
    dv = delta_vectors(LaurentSeries.from_dict({3: 7.0}), LaurentSeries.identity(), 3, 4)
    np.testing.assert_array_equal(dv.u_delta, [7, 0, 0, 0])


def test_delta_vectors_rational():
    # phi = (1 - 0.5 z)^{-1} (1 - 0.3/z): u = (1 - 0.3/z)(1 - 0.5 z), v_{-k} = 0.3^k / 0.85
    logphi = rational_log([("plus", 0.5, -1), ("minus", 0.3, 1)], 64)
    sym = prepare_scalar(logphi=logphi, band=64)
    dv = delta_vectors(sym.ratios.u, sym.ratios.v, 2, 8)
    assert np.max(np.abs(dv.u_delta)) <= 1e-15
    dv1 = delta_vectors(sym.ratios.u, sym.ratios.v, 1, 8)
    assert abs(dv1.u_delta[0] + 0.5) <= 1e-14 and np.max(np.abs(dv1.u_delta[1:])) <= 1e-15
    for i in range(8):
        assert abs(dv.v_delta[i] - 0.3 ** (2 + i) / 0.85) <= 1e-14


def test_delta_vectors_block_rejected():
    with pytest.raises(SymbolError):
        delta_vectors(LaurentSeries.identity(2), LaurentSeries.identity(2), 1)
