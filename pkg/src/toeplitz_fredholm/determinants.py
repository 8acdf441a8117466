"""Determinants in log-magnitude/phase form, and the two routes to the Szego constant."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .operators import exact_section, hankel_U, hankel_V, hs_norm, kernel_K, toeplitz_matrix, \
    toeplitz_rect
from .symbol import invert_symbol

SECTION_CAP = 4096


class ConvergenceError(ArithmeticError):
    """Adaptive section growth did not settle within the cap."""

    def __init__(self, message, iterates):
        super().__init__(message)
        self.iterates = iterates


def _wrap(phase):
    """Map a phase into (-pi, pi]."""
    w = math.remainder(phase, 2 * math.pi)
    return math.pi if w == -math.pi else w


@dataclass(frozen=True)
class LogDet:
    """A determinant stored as ``exp(log_magnitude) * exp(i * phase)``.

    ``log_magnitude`` is ``-inf`` for an exactly singular matrix.
    ``condition_hint`` is the ratio of the extreme pivot magnitudes.
    """

    log_magnitude: float
    phase: float
    condition_hint: float = 1.0

    @property
    def value(self):
        if self.log_magnitude == -math.inf:
            return 0j
        return complex(math.exp(self.log_magnitude) * np.exp(1j * self.phase))

    @property
    def is_zero(self):
        return self.log_magnitude == -math.inf

    @classmethod
    def from_value(cls, z):
        z = complex(z)
        if z == 0:
            return cls(-math.inf, 0.0, math.inf)
        return cls(math.log(abs(z)), _wrap(math.atan2(z.imag, z.real)))

    def __mul__(self, other):
        if not isinstance(other, LogDet):
            other = LogDet.from_value(other)
        return LogDet(self.log_magnitude + other.log_magnitude, _wrap(self.phase + other.phase),
                      max(self.condition_hint, other.condition_hint))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, LogDet):
            other = LogDet.from_value(other)
        if other.is_zero:
            raise ZeroDivisionError("division by a zero determinant")
        return LogDet(self.log_magnitude - other.log_magnitude, _wrap(self.phase - other.phase),
                      max(self.condition_hint, other.condition_hint))


def _from_diagonal(diag, sign=1.0):
    mags = np.abs(diag)
    if diag.size == 0:
        return LogDet(0.0, 0.0 if sign > 0 else math.pi, 1.0)
    if np.any(mags == 0):
        return LogDet(-math.inf, 0.0, math.inf)
    unit = np.prod(diag / mags) * sign
    return LogDet(float(np.sum(np.log(mags))), _wrap(float(np.angle(unit))),
                  float(mags.max() / mags.min()))


def det_complex(a):
    """Determinant of a square complex matrix via row-pivoted LU.

    Pivot magnitudes are accumulated in log form and their phases as a product
    of unit numbers, so neither overflow nor underflow can occur.  Triangular
    input is detected and handled exactly by its diagonal.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"det_complex needs a square matrix, got shape {a.shape}")
    if a.shape[0] == 0:
        return LogDet(0.0, 0.0, 1.0)
    if not np.any(np.tril(a, -1)) or not np.any(np.triu(a, 1)):
        return _from_diagonal(np.diag(a).copy())
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=True)
    swaps = int(np.count_nonzero(piv != np.arange(piv.size)))
    return _from_diagonal(np.diag(lu).copy(), -1.0 if swaps % 2 else 1.0)


def toeplitz_det(phi, n):
    """``D_n(phi) = det T_n(phi)``; the empty determinant ``D_0`` is 1."""
    return det_complex(toeplitz_matrix(phi, n))


def fredholm_det(u, v, n, m=None):
    """``det(I - K_n)`` on a finite section, with a truncation estimate.

    With the default (banded-exact) section the result is the Fredholm
    determinant itself and the estimate is 0.  For a smaller section ``m`` the
    estimate is ``(|U_tail| |V| + |U| |V_tail|) exp(|U| |V| + 1)`` in
    Hilbert-Schmidt norms, a first-order perturbation bound heuristic.

    Returns
    -------
    logdet : LogDet
    tail_estimate : float
    """
    exact = exact_section(u, v, n)
    if m is None:
        m = exact
    k = kernel_K(u, v, n, m)
    logdet = det_complex(np.eye(k.shape[0]) - k)
    tail = 0.0
    if m < exact:
        uf, vf = hankel_U(u, n, exact), hankel_V(v, n, exact)
        d = u.dim
        nu, nv = hs_norm(uf), hs_norm(vf)
        ut = math.sqrt(max(nu ** 2 - hs_norm(uf[:m * d, :m * d]) ** 2, 0.0))
        vt = math.sqrt(max(nv ** 2 - hs_norm(vf[:m * d, :m * d]) ** 2, 0.0))
        tail = (ut * nv + nu * vt) * math.exp(nu * nv + 1.0)
    return logdet, tail


def szego_Z_series(logphi):
    """``exp(sum_{k>=1} k (log phi)_k (log phi)_{-k})`` over the stored band (scalar)."""
    c = logphi.scalar_coeffs
    band = logphi.band
    if band == 0:
        return 1 + 0j
    k = np.arange(1, band + 1)
    total = np.sum(k * c[band + k] * c[band - k])
    return complex(np.exp(total))


def _product_section(phi, phi_inv, size):
    """``size x size`` (blocks) section of the semi-infinite product ``T(phi) T(phi^{-1})``."""
    inner = size + phi.band
    return toeplitz_rect(phi, size, inner) @ toeplitz_rect(phi_inv, inner, size)


def szego_Z_operator(phi, phi_inv=None, start=None, cap=SECTION_CAP, tol=1e-10, inv_band=None,
                     inv_samples=None):
    """``det T(phi) T(phi^{-1})`` by sections of growing size.

    Works for scalar and block symbols.  The section is doubled until both the
    log-magnitude and the phase change by less than ``tol``.
    """
    if phi_inv is None:
        phi_inv, _ = invert_symbol(phi, samples=inv_samples, band=inv_band)
    size = start if start is not None else max(2 * phi.band, 8)
    size = min(size, cap)
    iterates = [det_complex(_product_section(phi, phi_inv, size))]
    while size < cap:
        size = min(2 * size, cap)
        cur = det_complex(_product_section(phi, phi_inv, size))
        prev = iterates[-1]
        if (abs(cur.log_magnitude - prev.log_magnitude) < tol
                and abs(_wrap(cur.phase - prev.phase)) < tol):
            return cur
        iterates = [prev, cur]
    raise ConvergenceError(f"section growth did not converge within {cap} blocks", iterates)
