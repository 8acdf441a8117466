"""Banded Laurent series on the unit circle and the basic symbol algebra.

A symbol is stored by its Fourier coefficients ``f_k`` for ``|k| <= band``,
each coefficient being a ``d x d`` complex block (``d = 1`` for scalar
symbols).  Everything here is a pure function of immutable inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ZERO_FLOOR = 1e-12
MAX_ARG_JUMP = np.pi / 2


class SymbolError(ValueError):
    """Raised when a symbol violates the preconditions of an operation."""


@dataclass(frozen=True, eq=False)
class LaurentSeries:
    """Banded sequence of ``d x d`` coefficient blocks indexed by ``-band..band``.

    Parameters
    ----------
    data : (2*band + 1, d, d) complex array
        ``data[k + band]`` is the coefficient of ``z**k``.
    support : {None, "plus", "minus"}
        Optional support flag.  ``"plus"`` requires every coefficient at
        ``k < 0`` to be exactly zero, ``"minus"`` the same for ``k > 0``.
    tail_mass : float
        Frobenius mass of coefficients discarded when this series was produced
        by a truncating operation (0 when nothing was dropped).
    """

    data: np.ndarray
    support: str | None = None
    tail_mass: float = 0.0
    band: int = field(init=False)
    dim: int = field(init=False)

    def __post_init__(self):
        data = np.array(self.data, dtype=complex)
        if data.ndim == 1:
            data = data[:, None, None]
        if data.ndim != 3 or data.shape[1] != data.shape[2] or data.shape[0] % 2 != 1:
            raise SymbolError(f"coefficient array must be (2M+1, d, d), got {data.shape}")
        if not np.all(np.isfinite(data)):
            raise SymbolError("coefficients must be finite")
        band = data.shape[0] // 2
        if self.support not in (None, "plus", "minus"):
            raise SymbolError(f"unknown support flag {self.support!r}")
        if self.support == "plus" and np.any(data[:band]):
            raise SymbolError("plus-supported series has nonzero coefficients at k < 0")
        if self.support == "minus" and np.any(data[band + 1:]):
            raise SymbolError("minus-supported series has nonzero coefficients at k > 0")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "band", band)
        object.__setattr__(self, "dim", data.shape[1])

    # -- construction -----------------------------------------------------

    @classmethod
    def from_dict(cls, coeffs, dim=1, band=None, support=None):
        """Build from a mapping ``{k: coefficient}`` (scalars or d x d blocks)."""
        if band is None:
            band = max((abs(int(k)) for k in coeffs), default=0)
        data = np.zeros((2 * band + 1, dim, dim), dtype=complex)
        for k, c in coeffs.items():
            if abs(k) > band:
                raise SymbolError(f"index {k} outside band {band}")
            data[k + band] = np.asarray(c, dtype=complex).reshape(dim, dim)
        return cls(data, support=support)

    @classmethod
    def constant(cls, value, dim=1):
        return cls(np.asarray(value, dtype=complex).reshape(1, dim, dim))

    @classmethod
    def identity(cls, dim=1):
        return cls(np.eye(dim, dtype=complex)[None])

    # -- access -----------------------------------------------------------

    @property
    def is_scalar(self):
        return self.dim == 1

    def block(self, k):
        """Coefficient block at index ``k`` (zero block outside the band)."""
        if abs(k) > self.band:
            return np.zeros((self.dim, self.dim), dtype=complex)
        return self.data[k + self.band]

    def __getitem__(self, k):
        b = self.block(k)
        return complex(b[0, 0]) if self.dim == 1 else b

    def blocks(self, ks):
        """Stack of blocks for an integer array of indices; zeros outside the band."""
        ks = np.asarray(ks, dtype=int)
        out = np.zeros(ks.shape + (self.dim, self.dim), dtype=complex)
        inside = np.abs(ks) <= self.band
        out[inside] = self.data[ks[inside] + self.band]
        return out

    @property
    def scalar_coeffs(self):
        """Coefficients ``f_{-M}..f_M`` as a 1-D array (scalar series only)."""
        if self.dim != 1:
            raise SymbolError("scalar_coeffs requires a scalar series")
        return self.data[:, 0, 0]

    def indices(self):
        return np.arange(-self.band, self.band + 1)

    # -- algebra ----------------------------------------------------------

    def with_band(self, band):
        """Zero-pad or truncate to ``band``; discarded mass goes to ``tail_mass``."""
        if band >= self.band:
            pad = band - self.band
            data = np.pad(self.data, ((pad, pad), (0, 0), (0, 0)))
            return LaurentSeries(data, support=self.support, tail_mass=self.tail_mass)
        cut = self.band - band
        kept = self.data[cut:self.data.shape[0] - cut]
        dropped = np.concatenate([self.data[:cut], self.data[-cut:]])
        return LaurentSeries(kept, support=self.support,
                             tail_mass=float(np.sqrt(np.sum(np.abs(dropped) ** 2))))

    def trimmed(self):
        """Shrink the band to the largest index carrying a nonzero block."""
        nz = np.flatnonzero(np.any(self.data != 0, axis=(1, 2)))
        if nz.size == 0:
            return self.with_band(0)
        return self.with_band(int(max(abs(nz[0] - self.band), abs(nz[-1] - self.band))))

    def reflect(self):
        """The series ``f(1/z)``: coefficient ``k`` moves to ``-k``."""
        flag = {"plus": "minus", "minus": "plus"}.get(self.support)
        return LaurentSeries(self.data[::-1], support=flag)

    def plus_part(self, include_zero=False):
        data = self.data.copy()
        data[:self.band] = 0
        if not include_zero:
            data[self.band] = 0
        return LaurentSeries(data, support="plus")

    def minus_part(self, include_zero=False):
        data = self.data.copy()
        data[self.band + 1:] = 0
        if not include_zero:
            data[self.band] = 0
        return LaurentSeries(data, support="minus")

    def scaled(self, c):
        return LaurentSeries(self.data * c)

    def left_mul(self, block):
        """Multiply every coefficient on the left by a constant block."""
        return LaurentSeries(np.einsum("ij,kjl->kil", np.asarray(block), self.data))

    def right_mul(self, block):
        return LaurentSeries(np.einsum("kij,jl->kil", self.data, np.asarray(block)))

    def __add__(self, other):
        band = max(self.band, other.band)
        return LaurentSeries(self.with_band(band).data + other.with_band(band).data)

    def __sub__(self, other):
        band = max(self.band, other.band)
        return LaurentSeries(self.with_band(band).data - other.with_band(band).data)

    def __neg__(self):
        return LaurentSeries(-self.data)

    def norm(self):
        """Frobenius norm over all stored blocks."""
        return float(np.sqrt(np.sum(np.abs(self.data) ** 2)))

    def off_zero_mass(self):
        """Frobenius distance from the unit series (identity block at ``k = 0``)."""
        return (self - LaurentSeries.identity(self.dim)).norm()

    def positive_mass(self):
        return float(np.sqrt(np.sum(np.abs(self.data[self.band + 1:]) ** 2)))

    def negative_mass(self):
        return float(np.sqrt(np.sum(np.abs(self.data[:self.band]) ** 2)))

    # -- evaluation -------------------------------------------------------

    def samples(self, n_samples):
        """Values at ``exp(2*pi*i*j/N)``, ``j = 0..N-1``; shape ``(N, d, d)``."""
        if n_samples < 2 * self.band + 1:
            # Direct evaluation avoids wrap-around of coefficients when N is small.
            w = np.exp(2j * np.pi * np.arange(n_samples) / n_samples)
            powers = w[:, None] ** self.indices()[None, :]
            return np.einsum("jk,kab->jab", powers, self.data)
        buf = np.zeros((n_samples, self.dim, self.dim), dtype=complex)
        ks = self.indices()
        buf[ks % n_samples] = self.data
        return np.fft.ifft(buf, axis=0) * n_samples

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        powers = z[..., None] ** self.indices()
        out = np.einsum("...k,kab->...ab", powers, self.data)
        return out[..., 0, 0] if self.dim == 1 else out

    def __repr__(self):
        return f"LaurentSeries(dim={self.dim}, band={self.band}, support={self.support})"


def _as_block_samples(values):
    v = np.asarray(values, dtype=complex)
    if v.ndim == 1:
        v = v[:, None, None]
    if v.ndim != 3 or v.shape[1] != v.shape[2]:
        raise SymbolError(f"samples must be (N,) or (N, d, d), got {v.shape}")
    return v


def coeffs_from_samples(values, band):
    """Discrete Fourier coefficients ``c_k = (1/N) sum_j values[j] w_j^{-k}``, ``|k| <= band``.

    ``values[j]`` is the symbol at ``w_j = exp(2*pi*i*j/N)``.  Coefficients
    outside the band alias onto the returned ones; controlling that error (by
    choosing N) is the caller's job.
    """
    v = _as_block_samples(values)
    n = v.shape[0]
    if n < 2 * band + 2:
        raise SymbolError(f"{n} samples cannot resolve band {band}; need at least {2 * band + 2}")
    c = np.fft.fft(v, axis=0) / n
    ks = np.arange(-band, band + 1)
    return LaurentSeries(c[ks % n])


def convolve(a, b, out_band=None):
    """Coefficients of the pointwise product ``a(z) b(z)`` (block order preserved).

    The full product has band ``a.band + b.band``; anything beyond ``out_band``
    is dropped and its Frobenius mass recorded in ``tail_mass``.
    """
    if a.dim != b.dim:
        raise SymbolError(f"dimension mismatch: {a.dim} vs {b.dim}")
    d = a.dim
    full_band = a.band + b.band
    if d == 1:
        full = np.convolve(a.data[:, 0, 0], b.data[:, 0, 0])[:, None, None]
    else:
        full = np.zeros((2 * full_band + 1, d, d), dtype=complex)
        for p in range(d):
            for q in range(d):
                for r in range(d):
                    full[:, p, q] += np.convolve(a.data[:, p, r], b.data[:, r, q])
    support = a.support if a.support == b.support else None
    prod = LaurentSeries(full, support=support)
    if out_band is None:
        return prod
    return prod.with_band(out_band)


def default_samples(band):
    """Power of two comfortably above the Nyquist requirement for ``band``."""
    need = max(4 * (2 * band + 2), 256)
    return 1 << int(np.ceil(np.log2(need)))


def _check_floor(values):
    mags = np.abs(values)
    top = mags.max()
    if top == 0 or mags.min() < ZERO_FLOOR * top:
        j = int(np.argmin(mags))
        raise SymbolError(f"symbol (nearly) vanishes at sample {j}: |phi| = {mags[j]:.3e}")


def _unwrapped_arg(values):
    """Continuous argument along the samples, closing the loop at the end."""
    closed = np.append(values, values[0])
    steps = np.angle(closed[1:] / closed[:-1])
    worst = np.max(np.abs(steps))
    if worst >= MAX_ARG_JUMP:
        raise SymbolError(
            f"argument jumps by {worst:.3f} rad between consecutive samples; use a finer grid")
    arg = np.angle(values[0]) + np.concatenate([[0.0], np.cumsum(steps)])
    return arg


def winding_number(values):
    """Winding number of a scalar sampled loop around the origin."""
    v = np.asarray(values, dtype=complex).ravel()
    _check_floor(v)
    arg = _unwrapped_arg(v)
    return int(np.rint((arg[-1] - arg[0]) / (2 * np.pi)))


def log_symbol(phi, samples=None, band=None):
    """Fourier coefficients of the continuous branch of ``log phi`` (scalar).

    The zeroth coefficient is removed so the returned series has geometric
    mean one; the removed factor ``G = exp((log phi)_0)`` is returned alongside.

    Returns
    -------
    logphi : LaurentSeries
    geometric_mean : complex
    """
    if not phi.is_scalar:
        raise SymbolError("log_symbol is scalar only; block symbols are factored directly")
    if band is None:
        band = max(4 * phi.band, 64)
    if samples is None:
        samples = default_samples(band)
    values = phi.samples(samples)[:, 0, 0]
    _check_floor(values)
    arg = _unwrapped_arg(values)
    wind = int(np.rint((arg[-1] - arg[0]) / (2 * np.pi)))
    if wind != 0:
        raise SymbolError(f"symbol has winding number {wind}; a continuous logarithm needs 0")
    logs = np.log(np.abs(values)) + 1j * arg[:-1]
    series = coeffs_from_samples(logs, band)
    data = series.data.copy()
    c0 = complex(data[band, 0, 0])
    data[band] = 0
    return LaurentSeries(data), complex(np.exp(c0))


@dataclass(frozen=True)
class KreinDiagnostics:
    krein_seminorm: float
    sup_norm_estimate: float
    tail_mass: float


def krein_diagnostics(f, cutoff=None, n_samples=None):
    """Weighted-l2 diagnostics ``sqrt(sum |k| ||f_k||_F^2)`` and friends.

    ``tail_mass`` is the part of the weighted sum carried by ``|k| > cutoff``.
    The sup norm is estimated as the largest spectral norm over circle samples.
    """
    if cutoff is None:
        cutoff = f.band
    k = np.abs(f.indices())
    weights = k * np.sum(np.abs(f.data) ** 2, axis=(1, 2))
    total = float(weights.sum())
    tail = float(weights[k > cutoff].sum())
    if n_samples is None:
        n_samples = max(4 * (2 * f.band + 1), 64)
    vals = f.samples(n_samples)
    sup = float(np.max(np.linalg.norm(vals, ord=2, axis=(1, 2))))
    return KreinDiagnostics(np.sqrt(total), sup, tail)


def invert_symbol(phi, samples=None, band=None):
    """Coefficients of the pointwise (block) inverse, via sampling.

    Returns
    -------
    inverse : LaurentSeries
    residual : float
        ``||phi * inverse - 1||`` over the stored band.
    """
    if band is None:
        band = max(4 * phi.band, 64)
    if samples is None:
        samples = default_samples(band)
    values = phi.samples(samples)
    if phi.is_scalar:
        _check_floor(values[:, 0, 0])
        inv_values = 1.0 / values
    else:
        sv = np.linalg.svd(values, compute_uv=False)
        smallest = sv[:, -1]
        if smallest.min() < ZERO_FLOOR * sv[:, 0].max():
            j = int(np.argmin(smallest))
            raise SymbolError(f"symbol is (nearly) singular at sample {j}: "
                              f"sigma_min = {smallest[j]:.3e}")
        inv_values = np.linalg.inv(values)
    inverse = coeffs_from_samples(inv_values, band)
    check = convolve(phi, inverse, out_band=band)
    residual = check.off_zero_mass()
    return inverse, residual


def symbol_from_samples(func, band, samples=None):
    """Coefficients of a callable symbol ``func(w)`` sampled on the circle."""
    if samples is None:
        samples = default_samples(band)
    w = np.exp(2j * np.pi * np.arange(samples) / samples)
    return coeffs_from_samples(func(w), band)
