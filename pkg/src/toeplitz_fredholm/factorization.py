"""Wiener-Hopf factorizations and the ratio symbols built from them.

Scalar symbols are split through their logarithm.  Block symbols are factored
by a finite-section linear solve, since the matrix logarithm does not split
multiplicatively.  In both cases factors are normalized to have the unit
(identity) coefficient at ``k = 0``; whatever constant is left over is kept
as the ``middle`` block, so that ``phi = plus @ middle @ minus``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .symbol import (LaurentSeries, SymbolError, convolve, log_symbol)

DEFAULT_TOL = 1e-10


class FactorizationError(ArithmeticError):
    """Raised when a factorization cannot be computed or fails its residual check."""


def default_band(band):
    return max(4 * band, 64)


@dataclass(frozen=True)
class FactorizationData:
    """``phi = plus @ middle @ minus`` and, optionally, ``phi = psi_minus @ psi_middle @ psi_plus``.

    ``plus``/``minus`` (and ``psi_plus``/``psi_minus``) carry the identity
    coefficient at ``k = 0``.  For scalar symbols ``middle`` is the geometric
    mean, and ``logphi`` holds the normalized logarithm when it was used.
    """

    plus: LaurentSeries
    minus: LaurentSeries
    middle: np.ndarray
    recon_residual: float
    psi_minus: LaurentSeries | None = None
    psi_plus: LaurentSeries | None = None
    psi_middle: np.ndarray | None = None
    second_residual: float | None = None
    logphi: LaurentSeries | None = None

    @property
    def dim(self):
        return self.plus.dim

    @property
    def has_second_pair(self):
        return self.psi_minus is not None

    @property
    def geometric_mean(self):
        """``det(middle)``; the scalar geometric mean when ``d == 1``."""
        return complex(np.linalg.det(self.middle))


@dataclass(frozen=True)
class RatioPair:
    u: LaurentSeries
    v: LaurentSeries
    inverse_residual: float

    @property
    def dim(self):
        return self.u.dim


def exp_series(a, band):
    """Coefficients of ``exp(a(z))`` for a scalar one-sided series with ``a_0 = 0``.

    Uses ``e_n = (1/n) sum_{j=1..n} j a_j e_{n-j}``.  Minus-supported input is
    handled by reflecting to the plus side and back.
    """
    if not a.is_scalar:
        raise SymbolError("exp_series is scalar only")
    if abs(a[0]) != 0:
        raise SymbolError(f"exp_series needs a_0 = 0, got {a[0]}")
    if a.negative_mass() > 0:
        if a.positive_mass() > 0:
            raise SymbolError("exp_series needs a one-sided series")
        return exp_series(a.reflect(), band).reflect()
    m = min(a.band, band)
    ja = np.arange(1, m + 1) * a.scalar_coeffs[a.band + 1:a.band + m + 1]
    e = np.zeros(band + 1, dtype=complex)
    e[0] = 1.0
    for n in range(1, band + 1):
        top = min(n, m)
        # sum_{j=1..top} j a_j e_{n-j}
        e[n] = np.dot(ja[:top], e[n - 1::-1][:top]) / n
    data = np.concatenate([np.zeros(band, dtype=complex), e])
    return LaurentSeries(data, support="plus")


def series_inverse(p, band):
    """Inverse of a one-sided series with identity coefficient at 0.

    Triangular recursion ``q_0 = I``, ``q_n = -sum_{j=1..n} p_j q_{n-j}``;
    exact in exact arithmetic up to the band.
    """
    if p.positive_mass() > 0 and p.negative_mass() > 0:
        raise SymbolError("series_inverse needs a one-sided series")
    if p.negative_mass() > 0:
        return series_inverse(p.reflect(), band).reflect()
    d = p.dim
    if not np.allclose(p.block(0), np.eye(d), rtol=0, atol=1e-12):
        raise SymbolError("series_inverse needs the identity coefficient at k = 0")
    m = min(p.band, band)
    pj = p.data[p.band + 1:p.band + m + 1]
    q = np.zeros((band + 1, d, d), dtype=complex)
    q[0] = np.eye(d)
    for n in range(1, band + 1):
        top = min(n, m)
        q[n] = -np.einsum("jab,jbc->ac", pj[:top], q[n - 1::-1][:top])
    data = np.concatenate([np.zeros((band, d, d), dtype=complex), q])
    return LaurentSeries(data, support="plus")


def _recon(plus, middle, minus, phi):
    prod = convolve(plus.right_mul(middle), minus)
    return (prod - phi).norm()


def wiener_hopf_from_log(logphi, band=None, phi=None, tol=DEFAULT_TOL, geometric_mean=1.0):
    """Scalar factorization from the (normalized) logarithm of the symbol.

    ``phi`` is the symbol the factors are checked against; when omitted it is
    rebuilt as the product of the factors and only truncation is checked.
    """
    if band is None:
        band = default_band(logphi.band)
    if logphi[0] != 0:
        geometric_mean = geometric_mean * np.exp(logphi[0])
        logphi = logphi - LaurentSeries.constant(logphi[0])
    plus = exp_series(logphi.plus_part(), band)
    minus = exp_series(logphi.minus_part(), band)
    middle = np.array([[geometric_mean]], dtype=complex)
    if phi is None:
        phi = symbol_from_factors(plus, minus, middle, band)
    resid = _recon(plus, middle, minus, phi)
    if not resid <= tol:
        raise FactorizationError(
            f"factorization residual {resid:.3e} exceeds {tol:.1e} at band {band}")
    return FactorizationData(plus, minus, middle, resid,
                             psi_minus=minus, psi_plus=plus, psi_middle=middle,
                             second_residual=resid, logphi=logphi)


def wiener_hopf_scalar(phi, band=None, samples=None, tol=DEFAULT_TOL):
    """Normalized factorization ``phi = G * phi_plus * phi_minus`` of a scalar symbol."""
    if not phi.is_scalar:
        raise SymbolError("wiener_hopf_scalar needs a scalar symbol")
    if band is None:
        band = default_band(phi.band)
    logphi, gm = log_symbol(phi, samples=samples, band=band)
    return wiener_hopf_from_log(logphi, band=band, phi=phi, tol=tol, geometric_mean=gm)


def symbol_from_factors(plus, minus, middle=None, band=None):
    """``plus @ middle @ minus`` truncated to ``band``."""
    if middle is not None:
        plus = plus.right_mul(middle)
    return convolve(plus, minus, out_band=band)


def symbol_from_log(logphi, band=None):
    """Scalar symbol ``exp(log phi)`` built as the product of its one-sided factors."""
    if band is None:
        band = default_band(logphi.band)
    plus = exp_series(logphi.plus_part(), band)
    minus = exp_series(logphi.minus_part(), band)
    gm = np.exp(logphi[0])
    return convolve(plus, minus, out_band=band).scaled(gm)


def block_plus_factorization(phi, band=None, tol=DEFAULT_TOL):
    """Factor ``phi = phi_plus @ G @ phi_minus`` by a finite-section solve.

    ``w = phi_plus^{-1}`` (plus-supported, ``w_0 = I``) is determined by
    ``(w phi)_k = 0`` for ``k = 1..band``.  Then ``phi_plus`` is the series
    inverse of ``w`` and ``G phi_minus = w phi`` restricted to ``k <= 0``.
    """
    if band is None:
        band = default_band(phi.band)
    d = phi.dim
    m = band
    # X B = R with X = [w_1 .. w_m], B[j, k] = phi_{k-j}, R = [-phi_1 .. -phi_m]
    jk = np.arange(1, m + 1)
    diff = jk[None, :] - jk[:, None]
    blocks = phi.blocks(diff)                       # (m, m, d, d), [j, k] -> phi_{k-j}
    big = blocks.transpose(0, 2, 1, 3).reshape(m * d, m * d)
    rhs = -phi.blocks(jk).transpose(1, 0, 2).reshape(d, m * d)
    try:
        x = np.linalg.solve(big.T, rhs.T).T
    except np.linalg.LinAlgError as exc:
        raise FactorizationError(
            f"finite-section system is singular at band {band}; "
            "reduce the symbol norm or raise the band") from exc
    if not np.all(np.isfinite(x)):
        raise FactorizationError(f"finite-section solve produced non-finite values at band {band}")
    w = np.zeros((2 * m + 1, d, d), dtype=complex)
    w[m] = np.eye(d)
    w[m + 1:] = x.reshape(d, m, d).transpose(1, 0, 2)
    w = LaurentSeries(w, support="plus")
    wphi = convolve(w, phi)
    leak = wphi.positive_mass()
    g_minus = wphi.minus_part(include_zero=True).with_band(m)
    g = np.array(g_minus.block(0))
    try:
        ginv = np.linalg.inv(g)
    except np.linalg.LinAlgError as exc:
        raise FactorizationError("middle factor is singular") from exc
    minus = np.array(g_minus.left_mul(ginv).data)
    minus[m] = np.eye(d)
    minus = LaurentSeries(minus, support="minus")
    plus = series_inverse(w, m)
    resid = _recon(plus, g, minus, phi)
    if not resid <= tol or not leak <= tol:
        raise FactorizationError(
            f"block factorization residual {resid:.3e} (minus-side leak {leak:.3e}) "
            f"exceeds {tol:.1e} at band {band}")
    return FactorizationData(plus, minus, g, resid)


def block_minus_factorization(phi, band=None, tol=DEFAULT_TOL):
    """Second factorization ``phi = psi_minus @ H @ psi_plus``, by reflection.

    Returns ``(psi_minus, H, psi_plus, residual)``.
    """
    flipped = block_plus_factorization(phi.reflect(), band=band, tol=tol)
    psi_minus = flipped.plus.reflect()
    psi_plus = flipped.minus.reflect()
    return psi_minus, flipped.middle, psi_plus, flipped.recon_residual


def with_second_pair(fact, psi_minus, psi_plus, phi, psi_middle=None, tol=DEFAULT_TOL):
    """Attach a second factorization ``phi = psi_minus @ psi_middle @ psi_plus``."""
    d = fact.dim
    if psi_middle is None:
        psi_middle = np.eye(d, dtype=complex)
    for name, s, flag in (("psi_minus", psi_minus, "minus"), ("psi_plus", psi_plus, "plus")):
        if s.dim != d:
            raise SymbolError(f"{name} has dimension {s.dim}, expected {d}")
        if not np.allclose(s.block(0), np.eye(d), rtol=0, atol=1e-14):
            raise SymbolError(f"{name} must have the identity coefficient at k = 0")
    psi_minus = _force_support(psi_minus, "minus")
    psi_plus = _force_support(psi_plus, "plus")
    resid = (convolve(psi_minus.right_mul(psi_middle), psi_plus) - phi).norm()
    if not resid <= tol:
        raise FactorizationError(f"second factorization residual {resid:.3e} exceeds {tol:.1e}")
    return FactorizationData(fact.plus, fact.minus, fact.middle, fact.recon_residual,
                             psi_minus, psi_plus, np.asarray(psi_middle, dtype=complex),
                             resid, fact.logphi)


def block_factorizations(phi, band=None, tol=DEFAULT_TOL):
    """Both block factorizations of ``phi`` computed numerically."""
    fact = block_plus_factorization(phi, band=band, tol=tol)
    psi_minus, h, psi_plus, resid = block_minus_factorization(phi, band=band, tol=tol)
    return FactorizationData(fact.plus, fact.minus, fact.middle, fact.recon_residual,
                             psi_minus, psi_plus, h, resid)


def _force_support(s, side):
    """Flag ``s`` as one-sided, failing if the other side is not already zero."""
    other = s.positive_mass() if side == "minus" else s.negative_mass()
    if other > 0:
        raise SymbolError(f"series is not {side}-supported (other-side mass {other:.3e})")
    data = np.array(s.data)
    return LaurentSeries(data, support=side)


def make_ratios(fact, band=None, tol=DEFAULT_TOL):
    """Ratio symbols ``u`` and ``v = u^{-1}`` feeding the Hankel matrices.

    Scalar: ``u = phi_minus / phi_plus``, ``v = phi_plus / phi_minus``.  Block:
    ``u = phi_minus psi_plus^{-1}`` and
    ``v = H^{-1} psi_minus^{-1} phi_plus G``, where ``G`` and ``H`` are the
    middle blocks of the two factorizations (both identity in the normalized
    case).
    """
    if band is None:
        band = max(fact.plus.band, fact.minus.band)
    if fact.dim == 1:
        psi_minus, psi_plus, h = fact.minus, fact.plus, fact.middle
    else:
        if not fact.has_second_pair:
            raise FactorizationError("block ratios need the second factorization psi_minus psi_plus")
        psi_minus, psi_plus, h = fact.psi_minus, fact.psi_plus, fact.psi_middle
    u = convolve(fact.minus, series_inverse(psi_plus, band), out_band=band)
    v = convolve(series_inverse(psi_minus, band), fact.plus, out_band=band)
    if fact.dim > 1:
        v = v.right_mul(fact.middle).left_mul(np.linalg.inv(h))
    resid = convolve(u, v, out_band=band).off_zero_mass()
    if not resid <= tol:
        raise FactorizationError(f"ratio pair inverse residual {resid:.3e} exceeds {tol:.1e} "
                                 f"at band {band}")
    return RatioPair(u, v, resid)
