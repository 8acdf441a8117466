"""Walk through the determinant identity for phi = exp(t (z + 1/z)).

Run with ``python3 demos/smooth_symbol.py``.
"""

import math

import numpy as np

from toeplitz_fredholm import LaurentSeries
from toeplitz_fredholm.determinants import fredholm_det, toeplitz_det
from toeplitz_fredholm.identities import bo_check, prepare_scalar, quotient_check
from toeplitz_fredholm.operators import hankel_U, hankel_V, hs_norm

t = 0.3

# The symbol is given through its logarithm; factors, ratios and Z follow.
sym = prepare_scalar(logphi=LaurentSeries.from_dict({1: t, -1: t}), band=64)
print(f"Z = {sym.z.real:.15f}   exp(t^2) = {math.exp(t * t):.15f}")

# The plus factor of exp(t z) has coefficients t^k / k!.
print("phi_plus[0:5] =", np.round(sym.fact.plus.scalar_coeffs[64:69].real, 12))

# The Hankel blocks shrink quickly, so det(I - K_n) tends to 1.
print("\n n   |U_n|_HS     |V_n|_HS     D_n                  Z det(I-K_n)         rel.res")
for n in (1, 2, 4, 8, 12):
    m = 64 - n
    hu = hs_norm(hankel_U(sym.ratios.u, n, m))
    hv = hs_norm(hankel_V(sym.ratios.v, n, m))
    rep = bo_check(sym, n)
    print(f"{n:2d}   {hu:.3e}    {hv:.3e}    {rep.lhs.real:.15f}    {rep.rhs.real:.15f}    "
          f"{rep.rel_residual:.1e}")

# The quotient formula gives D_{n-1}/D_n from a small linear solve.
rep = quotient_check(sym, 5)
print(f"\nD_4/D_5 = {rep.lhs.real:.15f}, quotient formula = {rep.rhs.real:.15f}")

d5 = toeplitz_det(sym.phi, 5)
f5, _ = fredholm_det(sym.ratios.u, sym.ratios.v, 5)
print(f"log|D_5| = {d5.log_magnitude:.15f}, log|Z det(I-K_5)| = "
      f"{math.log(abs(sym.z)) + f5.log_magnitude:.15f}")
