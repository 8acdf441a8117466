"""Slow, independent reference implementations used only by the tests.

Nothing here calls into the production numerics; series are read through
their raw ``data`` array and every sum is written out literally.
"""

from functools import lru_cache
from math import factorial

import numpy as np


def coef(series, k):
    """Raw coefficient lookup, zero outside the band."""
    if abs(k) > series.band:
        return np.zeros((series.dim, series.dim), dtype=complex)
    return series.data[k + series.band]


def det_cofactor(a):
    """Determinant by Laplace expansion along the first row (memoized on column sets)."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("square matrix required")
    if n > 9:
        raise ValueError("cofactor oracle is limited to 9 x 9")
    if n == 0:
        return 1 + 0j

    @lru_cache(maxsize=None)
    def minor(row, cols):
        if row == n:
            return 1 + 0j
        total = 0j
        sign = 1
        for c in cols:
            rest = tuple(x for x in cols if x != c)
            total += sign * a[row, c] * minor(row + 1, rest)
            sign = -sign
        return total

    return minor(0, tuple(range(n)))


def kernel_bruteforce(u, v, n, m):
    """``K_n(i, j) = sum_{k>=1} u_{i+k} v_{-k-j}`` summed literally over the bands."""
    d = u.dim
    kmax = max(u.band, v.band) + 1
    out = np.zeros((m * d, m * d), dtype=complex)
    for a in range(m):
        for b in range(m):
            i, j = n + a, n + b
            acc = np.zeros((d, d), dtype=complex)
            for k in range(1, kmax + 1):
                acc += coef(u, i + k) @ coef(v, -k - j)
            out[a * d:(a + 1) * d, b * d:(b + 1) * d] = acc
    return out


def slow_dft(values, band):
    """``c_k = (1/N) sum_j values[j] exp(-2 pi i j k / N)`` by a direct double loop."""
    values = np.asarray(values, dtype=complex)
    n = values.shape[0]
    out = {}
    for k in range(-band, band + 1):
        acc = 0j if values.ndim == 1 else np.zeros(values.shape[1:], dtype=complex)
        for j in range(n):
            acc = acc + values[j] * np.exp(-2j * np.pi * j * k / n)
        out[k] = acc / n
    return out


def exp_power_series(log_coeffs, band, terms=60):
    """Coefficients of ``exp(L)`` as ``sum_m L^{*m} / m!`` with plain numpy convolutions.

    ``log_coeffs`` maps ``k -> c_k`` (scalar).  Returns ``{k: e_k}`` for ``|k| <= band``.
    """
    lb = max(abs(k) for k in log_coeffs) if log_coeffs else 0
    width = 2 * lb + 1
    base = np.zeros(width, dtype=complex)
    for k, c in log_coeffs.items():
        base[k + lb] += c
    total = {0: 1 + 0j}
    power = np.array([1 + 0j])
    pband = 0
    for m in range(1, terms + 1):
        power = np.convolve(power, base)
        pband += lb
        # keep the working band bounded; coefficients beyond it are negligible by then
        if pband > band + 4 * lb + 8:
            cut = pband - (band + 4 * lb + 8)
            power = power[cut:-cut]
            pband -= cut
        for idx, val in enumerate(power):
            k = idx - pband
            if abs(k) <= band:
                total[k] = total.get(k, 0) + val / factorial(m)
    return {k: total.get(k, 0j) for k in range(-band, band + 1)}


def toeplitz_loops(series, n):
    """``T_n`` built entry by entry (scalar series)."""
    out = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            out[i, j] = coef(series, i - j)[0, 0]
    return out
