"""Finite sections of the Toeplitz, Hankel and kernel matrices.

Block symbols are flattened in row-major block order: block ``(i, j)`` of a
matrix occupies rows ``i*d .. i*d+d-1`` and columns ``j*d .. j*d+d-1``.

``kernel_K`` implements the kernel exactly as

    K_n(i, j) = sum_{k >= 1} u_{i+k} v_{-k-j},    i, j >= n,

with no ``(-1)^(i+j)`` twist; such a twist is a diagonal similarity and
leaves ``det(I - K_n)`` unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .symbol import SymbolError


def _flatten(blocks):
    """(r, c, d, d) block array -> (r*d, c*d) matrix."""
    r, c, d, _ = blocks.shape
    return np.ascontiguousarray(blocks.transpose(0, 2, 1, 3).reshape(r * d, c * d))


def toeplitz_matrix(phi, n):
    """``T_n(phi)``: block ``(i, j)`` is ``phi_{i-j}`` for ``i, j = 0..n-1``."""
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    idx = np.arange(n)
    return _flatten(phi.blocks(idx[:, None] - idx[None, :]))


def toeplitz_rect(phi, rows, cols):
    """Section ``rows x cols`` (in blocks) of the semi-infinite ``T(phi)``."""
    return _flatten(phi.blocks(np.arange(rows)[:, None] - np.arange(cols)[None, :]))


def exact_section(u, v, n):
    """Smallest section size (in blocks) that contains every nonzero entry of ``K_n``."""
    return max(max(u.band, v.band) - n, 1)


def hankel_U(u, n, m):
    """``m x m`` (blocks) section of ``U_n(i, j) = u_{n+i+j+1}``."""
    idx = np.arange(m)
    return _flatten(u.blocks(n + idx[:, None] + idx[None, :] + 1))


def hankel_V(v, n, m):
    """``m x m`` (blocks) section of ``V_n(i, j) = v_{-n-i-j-1}``."""
    idx = np.arange(m)
    return _flatten(v.blocks(-n - idx[:, None] - idx[None, :] - 1))


def kernel_K(u, v, n, m=None):
    """Section of ``K_n`` on rows/columns ``n .. n+m-1``, as the product ``U_n V_n``.

    The inner dimension covers every ``k`` at which both ``u_{i+k}`` and
    ``v_{-k-j}`` can be nonzero, so the product equals the infinite sum.
    """
    if u.dim != v.dim:
        raise SymbolError("u and v must have the same block dimension")
    if m is None:
        m = exact_section(u, v, n)
    inner = max(min(u.band, v.band) - n, 1)
    i = np.arange(m)
    c = np.arange(inner)
    left = _flatten(u.blocks(n + i[:, None] + c[None, :] + 1))
    right = _flatten(v.blocks(-n - c[:, None] - i[None, :] - 1))
    return left @ right


@dataclass(frozen=True)
class DeltaVectors:
    u_delta: np.ndarray
    v_delta: np.ndarray


def delta_vectors(u, v, n, m=None):
    """``u_delta(i) = u_{n+i}`` and ``v_delta(i) = v_{-n-i}`` for ``i = 0..m-1`` (scalar only)."""
    if u.dim != 1 or v.dim != 1:
        raise SymbolError("delta vectors are defined for scalar symbols only")
    if m is None:
        m = exact_section(u, v, n) + 1
    i = np.arange(m)
    return DeltaVectors(u.blocks(n + i)[:, 0, 0], v.blocks(-n - i)[:, 0, 0])


def hs_norm(a):
    """Hilbert-Schmidt (Frobenius) norm of a matrix section."""
    return float(np.linalg.norm(a))
