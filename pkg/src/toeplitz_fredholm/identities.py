"""Evaluate both sides of the determinant identities and report residuals.

Every check returns a :class:`CheckReport`.  A symbol is first turned into a
:class:`PreparedSymbol` (factorization, ratio pair and Szego constant), which
the individual checks share; passing a bare :class:`LaurentSeries` prepares it
on the fly.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .determinants import (det_complex, fredholm_det, szego_Z_operator, szego_Z_series,
                           toeplitz_det, SECTION_CAP)
from .factorization import (DEFAULT_TOL, block_factorizations, block_plus_factorization,
                            default_band, make_ratios, symbol_from_log, wiener_hopf_from_log,
                            wiener_hopf_scalar, with_second_pair)
from .operators import delta_vectors, exact_section, hankel_U, hankel_V, hs_norm, kernel_K
from .symbol import LaurentSeries

log = logging.getLogger(__name__)

RESIDUAL_FLOOR = 1e-300
CHECK_KINDS = ("bo", "quotient", "cramer", "lambda_sweep", "block_bo")


class CheckError(RuntimeError):
    """A check failed at a named stage of the pipeline."""

    def __init__(self, stage, cause):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class CheckReport:
    check_kind: str
    n: int
    lhs: complex
    rhs: complex
    abs_residual: float
    rel_residual: float
    lam: complex | None = None
    diagnostics: dict = field(default_factory=dict)
    error: str | None = None

    @classmethod
    def build(cls, kind, n, lhs, rhs, lam=None, diagnostics=None):
        lhs, rhs = complex(lhs), complex(rhs)
        abs_res = abs(lhs - rhs)
        return cls(kind, n, lhs, rhs, abs_res, abs_res / max(abs(lhs), RESIDUAL_FLOOR),
                   lam, diagnostics or {})

    @classmethod
    def failed(cls, kind, n, error, lam=None):
        nan = complex(math.nan, math.nan)
        return cls(kind, n, nan, nan, math.nan, math.nan, lam, {}, str(error))

    @property
    def ok(self):
        return self.error is None

    def passed(self, tol):
        return self.error is None and self.rel_residual <= tol


@dataclass(frozen=True)
class PreparedSymbol:
    """A symbol together with everything the checks need from it."""

    phi: LaurentSeries
    fact: object
    ratios: object
    z: complex
    logphi: LaurentSeries | None = None
    band: int = 0

    @property
    def is_scalar(self):
        return self.phi.is_scalar


def _stage(name, func, *args, **kwargs):
    try:
        return func(*args, **kwargs)
    except CheckError:
        raise
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        raise CheckError(name, exc) from exc


def prepare_scalar(phi=None, logphi=None, band=None, samples=None, tol=DEFAULT_TOL):
    """Factor a scalar symbol given by its coefficients or by its logarithm.

    When ``logphi`` is given the symbol is rebuilt from it and its constant
    term is treated as the geometric mean.
    """
    if (phi is None) == (logphi is None):
        raise ValueError("give exactly one of phi and logphi")
    if logphi is not None:
        if band is None:
            band = default_band(logphi.band)
        gm = np.exp(logphi[0])
        logphi = logphi - LaurentSeries.constant(logphi[0])
        phi = symbol_from_log(logphi, band).scaled(gm)
        fact = _stage("factorization", wiener_hopf_from_log, logphi, band=band, phi=phi,
                      tol=tol, geometric_mean=gm)
    else:
        if band is None:
            band = default_band(phi.band)
        fact = _stage("factorization", wiener_hopf_scalar, phi, band=band, samples=samples,
                      tol=tol)
        logphi = fact.logphi
    ratios = _stage("ratios", make_ratios, fact, band=band, tol=tol)
    z = szego_Z_series(logphi)
    return PreparedSymbol(phi, fact, ratios, z, logphi, band)


def prepare_block(phi, psi_minus=None, psi_plus=None, band=None, tol=DEFAULT_TOL,
                  section_cap=SECTION_CAP, fact=None, samples=None):
    """Factor a block symbol; the second pair is taken from the caller or computed.

    ``fact`` may carry both factorizations already (e.g. a commuting family).
    """
    if band is None:
        band = default_band(phi.band)
    if fact is None:
        if psi_minus is not None and psi_plus is not None:
            fact = _stage("factorization", block_plus_factorization, phi, band=band, tol=tol)
            fact = _stage("factorization", with_second_pair, fact, psi_minus, psi_plus, phi,
                          tol=tol)
        else:
            fact = _stage("factorization", block_factorizations, phi, band=band, tol=tol)
    ratios = _stage("ratios", make_ratios, fact, band=band, tol=tol)
    z = _stage("szego_operator", szego_Z_operator, phi, cap=section_cap, inv_band=band,
               inv_samples=samples)
    return PreparedSymbol(phi, fact, ratios, z.value, None, band)


def _prepared(sym, **kwargs):
    if isinstance(sym, PreparedSymbol):
        return sym
    if sym.is_scalar:
        return prepare_scalar(phi=sym, **kwargs)
    return prepare_block(sym, **kwargs)


def _diagnostics(sym, n, fd=None):
    u, v = sym.ratios.u, sym.ratios.v
    m = exact_section(u, v, n)
    diag = {
        "band": sym.band,
        "section": m,
        "hs_U": hs_norm(hankel_U(u, n, m)),
        "hs_V": hs_norm(hankel_V(v, n, m)),
        "recon_residual": getattr(sym.fact, "recon_residual", math.nan),
        "inverse_residual": sym.ratios.inverse_residual,
    }
    if fd is not None:
        diag["fredholm_condition"] = fd[0].condition_hint
        diag["tail_estimate"] = fd[1]
    return diag


def bo_check(sym, n, rescale_geometric_mean=False, **kwargs):
    """``D_n(phi)`` against ``Z det(I - K_n)``.

    With ``rescale_geometric_mean`` the right side is multiplied by ``G**n``,
    which extends the check to symbols whose geometric mean ``G`` is not 1.
    """
    sym = _prepared(sym, **kwargs)
    kind = "bo" if sym.is_scalar else "block_bo"
    lhs_det = _stage("toeplitz_det", toeplitz_det, sym.phi, n)
    fd = _stage("fredholm_det", fredholm_det, sym.ratios.u, sym.ratios.v, n)
    rhs = sym.z * fd[0].value
    if rescale_geometric_mean:
        rhs *= sym.fact.geometric_mean ** n
    diag = _diagnostics(sym, n, fd)
    diag["toeplitz_condition"] = lhs_det.condition_hint
    diag["Z"] = sym.z
    diag["fredholm_det"] = fd[0].value
    return CheckReport.build(kind, n, lhs_det.value, rhs, diagnostics=diag)


def block_bo_check(sym, n, rescale_geometric_mean=False, **kwargs):
    """Block version of :func:`bo_check`; ``Z`` comes from ``det T(phi) T(phi^{-1})``."""
    if isinstance(sym, PreparedSymbol):
        if sym.is_scalar:
            raise CheckError("input", "block_bo_check needs a block symbol")
    else:
        sym = prepare_block(sym, **kwargs)
    return bo_check(sym, n, rescale_geometric_mean=rescale_geometric_mean)


def quotient_check(sym, n, **kwargs):
    """``D_{n-1}/D_n`` against ``1 - ((I - U_n V_n)^{-1} U_n delta, V_n delta)``.

    The pairing is bilinear: plain sum of componentwise products, no conjugation.
    """
    if n < 1:
        raise ValueError("quotient_check needs n >= 1")
    sym = _prepared(sym, **kwargs)
    if not sym.is_scalar:
        raise CheckError("input", "the quotient formula is scalar only")
    u, v = sym.ratios.u, sym.ratios.v
    d_prev = _stage("toeplitz_det", toeplitz_det, sym.phi, n - 1)
    d_cur = _stage("toeplitz_det", toeplitz_det, sym.phi, n)
    if d_cur.is_zero:
        raise CheckError("toeplitz_det", f"D_{n} vanishes")
    lhs = (d_prev / d_cur).value
    m = exact_section(u, v, n) + 1
    big_u, big_v = hankel_U(u, n, m), hankel_V(v, n, m)
    dv = delta_vectors(u, v, n, m)
    a = np.eye(m) - big_u @ big_v
    cond = float(np.linalg.cond(a))
    if not np.isfinite(cond) or cond > 1e14:
        raise CheckError("quotient_solve",
                         f"I - U_n V_n is numerically singular at n={n} (condition {cond:.3e})")
    x = np.linalg.solve(a, dv.u_delta)
    rhs = 1.0 - np.sum(x * dv.v_delta)
    diag = _diagnostics(sym, n)
    diag["solve_condition"] = cond
    return CheckReport.build("quotient", n, lhs, rhs, diagnostics=diag)


def cramer_check(sym, n, **kwargs):
    """Upper-left entry of ``(I - K_{n-1})^{-1}`` against ``det(I - K_n) / det(I - K_{n-1})``."""
    if n < 1:
        raise ValueError("cramer_check needs n >= 1")
    sym = _prepared(sym, **kwargs)
    u, v = sym.ratios.u, sym.ratios.v
    d = u.dim
    m = exact_section(u, v, n - 1)
    a = np.eye(m * d) - kernel_K(u, v, n - 1, m)
    cond = float(np.linalg.cond(a))
    if not np.isfinite(cond) or cond > 1e14:
        raise CheckError("cramer_solve",
                         f"I - K_{n - 1} is numerically singular (condition {cond:.3e})")
    e = np.zeros((m * d, d), dtype=complex)
    e[:d] = np.eye(d)
    corner = np.linalg.solve(a, e)[:d]
    lhs = det_complex(corner).value if d > 1 else corner[0, 0]
    f_prev, _ = _stage("fredholm_det", fredholm_det, u, v, n - 1)
    f_cur, _ = _stage("fredholm_det", fredholm_det, u, v, n)
    if f_prev.is_zero:
        raise CheckError("fredholm_det", f"det(I - K_{n - 1}) vanishes")
    rhs = (f_cur / f_prev).value
    diag = _diagnostics(sym, n)
    diag["solve_condition"] = cond
    return CheckReport.build("cramer", n, lhs, rhs, diagnostics=diag)


def lambda_sweep(logphi, lambdas, ns, band=None, tol=DEFAULT_TOL):
    """Run :func:`bo_check` for ``phi**lam = exp(lam log phi)`` over all ``(lam, n)``.

    ``logphi`` is the scalar logarithm series (or a prepared scalar symbol,
    whose logarithm is used).  Failures are recorded per row and the sweep
    continues.  Rows come out ordered by ``lambdas`` then ``ns``.
    """
    if isinstance(logphi, PreparedSymbol):
        band = band or logphi.band
        logphi = logphi.logphi
    reports = []
    for lam in lambdas:
        lam = complex(lam)
        try:
            prepared = prepare_scalar(logphi=logphi.scaled(lam), band=band, tol=tol)
        except CheckError as exc:
            log.info("lambda=%s failed during preparation: %s", lam, exc)
            reports.extend(CheckReport.failed("lambda_sweep", n, exc, lam) for n in ns)
            continue
        for n in ns:
            try:
                rep = bo_check(prepared, n)
                reports.append(CheckReport("lambda_sweep", n, rep.lhs, rep.rhs, rep.abs_residual,
                                           rep.rel_residual, lam, rep.diagnostics))
            except CheckError as exc:
                reports.append(CheckReport.failed("lambda_sweep", n, exc, lam))
    return reports

