"""Named, reproducible symbol families used by the checks, the CLI and the tests."""

from __future__ import annotations

import numpy as np

from .factorization import FactorizationData, exp_series
from .symbol import LaurentSeries, SymbolError, convolve


def exp_trig(coeffs):
    """``log phi`` with the given coefficients ``{k: c_k}``; ``phi = exp(sum c_k z^k)``."""
    return LaurentSeries.from_dict(coeffs)


def rational_log(factors, band):
    """Logarithm of a product of factors ``(1 - a z)^p`` and ``(1 - b/z)^p``.

    Parameters
    ----------
    factors : iterable of (side, root, power)
        ``side`` is ``"plus"`` for ``1 - root*z`` and ``"minus"`` for
        ``1 - root/z``; ``|root| < 1`` keeps the winding number at zero.
    band : int
        Truncation band of the returned series.
    """
    data = np.zeros(2 * band + 1, dtype=complex)
    k = np.arange(1, band + 1)
    for side, root, power in factors:
        root = complex(root)
        if abs(root) >= 1:
            raise SymbolError(f"rational factor root {root} must lie inside the unit disc")
        # log(1 - a x) = -sum_k a^k x^k / k
        terms = -power * root ** k / k
        if side == "plus":
            data[band + k] += terms
        elif side == "minus":
            data[band - k] += terms
        else:
            raise SymbolError(f"factor side must be 'plus' or 'minus', got {side!r}")
    return LaurentSeries(data)


def random_log_symbol(rng, band=16, scale=0.3, decay=0.5, complex_coeffs=True):
    """Random ``log phi`` with ``|(log phi)_k| <= scale * decay**|k|`` and zero mean."""
    k = np.arange(-band, band + 1)
    bound = scale * decay ** np.abs(k)
    mags = bound * rng.uniform(0.0, 1.0, size=k.size)
    if complex_coeffs:
        coef = mags * np.exp(2j * np.pi * rng.uniform(size=k.size))
    else:
        coef = mags * rng.choice([-1.0, 1.0], size=k.size)
    coef[band] = 0
    return LaurentSeries(coef)


def random_block_factors(rng, dim=2, band=4, deviation=0.2, decay=0.5):
    """Random normalized factors ``psi_minus``, ``psi_plus`` with ``sup |psi - I| <= deviation``.

    Each factor is ``I + sum_{k=1..band} B_k z^{+-k}`` with the spectral norms
    of the ``B_k`` summing to ``deviation``, which bounds the deviation from
    the identity on the whole circle.
    """
    def one(sign):
        weights = decay ** np.arange(band)
        weights = deviation * weights / weights.sum()
        data = {0: np.eye(dim)}
        for j in range(1, band + 1):
            b = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            data[sign * j] = b * (weights[j - 1] / np.linalg.norm(b, 2))
        return LaurentSeries.from_dict(data, dim=dim, band=band)

    psi_minus = one(-1)
    psi_plus = one(+1)
    return psi_minus, psi_plus


def factor_first(psi_minus, psi_plus):
    """The block symbol ``phi = psi_minus @ psi_plus``."""
    return convolve(psi_minus, psi_plus)


def commuting_family(logf, b, band):
    """``phi = f(z) (I + b(z) J)`` with ``J = [[0, 1], [0, 0]]`` and ``f = exp(log f)``.

    All values commute, so both factorizations follow from the scalar ones:
    ``phi_pm = f_pm (I + b_pm J)`` and ``psi_pm = phi_pm``.  ``log f`` and ``b``
    must have zero mean so the middle factor is the identity.

    Returns
    -------
    phi : LaurentSeries
    fact : FactorizationData
        Both factor pairs filled in.
    """
    if logf[0] != 0 or b[0] != 0:
        raise SymbolError("commuting_family needs zero-mean log f and b")
    j = np.array([[0, 1], [0, 0]], dtype=complex)
    f_plus = exp_series(logf.plus_part(), band)
    f_minus = exp_series(logf.minus_part(), band)

    def lift(f_side, b_side):
        scalar = f_side.data[:, 0, 0]
        fb = convolve(f_side, b_side.with_band(band), out_band=band).data[:, 0, 0]
        data = scalar[:, None, None] * np.eye(2) + fb[:, None, None] * j
        return LaurentSeries(data)

    plus = lift(f_plus, b.plus_part())
    minus = lift(f_minus, b.minus_part())
    plus = LaurentSeries(plus.data, support="plus")
    minus = LaurentSeries(minus.data, support="minus")
    phi = convolve(plus, minus, out_band=band)
    eye = np.eye(2, dtype=complex)
    resid = (convolve(plus, minus) - phi).norm()
    fact = FactorizationData(plus, minus, eye, resid,
                             psi_minus=minus, psi_plus=plus, psi_middle=eye,
                             second_residual=resid)
    return phi, fact

