"""Toeplitz determinants as Szego constant times a Fredholm determinant.

Build a symbol on the unit circle, factor it, assemble the Toeplitz, Hankel
and kernel matrices, and check ``D_n(phi) = Z det(I - K_n)`` together with
its companion formulas, for scalar and block symbols.
"""

from .symbol import (KreinDiagnostics, LaurentSeries, SymbolError, coeffs_from_samples, convolve,
                     invert_symbol, krein_diagnostics, log_symbol, winding_number)
from .factorization import (FactorizationData, FactorizationError, RatioPair,
                            block_factorizations, block_minus_factorization,
                            block_plus_factorization, exp_series, make_ratios, series_inverse,
                            symbol_from_log, wiener_hopf_from_log, wiener_hopf_scalar,
                            with_second_pair)
from .operators import (DeltaVectors, delta_vectors, hankel_U, hankel_V, kernel_K,
                        toeplitz_matrix)
from .determinants import (ConvergenceError, LogDet, det_complex, fredholm_det, szego_Z_operator,
                           szego_Z_series, toeplitz_det)
from .identities import (CheckError, CheckReport, PreparedSymbol, block_bo_check, bo_check,
                         cramer_check, lambda_sweep, prepare_block, prepare_scalar,
                         quotient_check)

__version__ = "0.1.0"
