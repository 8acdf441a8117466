"""Deform phi into phi**lam = exp(lam log phi) and watch both sides move together.

Run with ``python3 demos/lambda_family.py``.
"""

import numpy as np

from toeplitz_fredholm import LaurentSeries
from toeplitz_fredholm.identities import lambda_sweep

logphi = LaurentSeries.from_dict({1: 0.2, -1: 0.2})
lams = [-2, -1, 0.5, 1, 2, 1 + 1j]

rows = lambda_sweep(logphi, lams, [3, 6])
for r in rows:
    z = np.exp(0.04 * r.lam ** 2)
    print(f"lam={r.lam!s:>8} n={r.n}  D_n={r.lhs:.10f}  Z={z:.10f}  rel.res {r.rel_residual:.1e}")
