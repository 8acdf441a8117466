"""Batch front end: ``toeplitz-fredholm verify <config.json>``.

The config is JSON with top-level keys ``symbol``, ``truncation``, ``check``,
``tolerances`` and ``output``.  One CSV row is written per (kind, lambda, n);
the exit status is 0 when every row passes, 1 when some row fails or errors,
and 2 when the config or the run itself is malformed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .determinants import SECTION_CAP
from .families import factor_first, random_block_factors, rational_log
from .identities import (CHECK_KINDS, CheckError, CheckReport, bo_check, block_bo_check,
                         cramer_check, lambda_sweep, prepare_block, prepare_scalar,
                         quotient_check)
from .symbol import LaurentSeries

SYMBOL_KINDS = ("log_coeffs", "coeffs", "rational", "block_factor_first", "block_explicit")
CSV_COLUMNS = ("kind", "lambda_re", "lambda_im", "n", "lhs_re", "lhs_im", "rhs_re", "rhs_im",
               "abs_residual", "rel_residual", "band", "section", "error")

EXIT_OK, EXIT_TOLERANCE, EXIT_STRUCTURAL = 0, 1, 2


class ConfigError(ValueError):
    """Schema or invariant violation; the message starts with the offending field path."""


@dataclass(frozen=True)
class SymbolSpec:
    kind: str
    dim: int = 1
    coeffs: tuple = ()
    factors: tuple = ()
    psi_minus: tuple | None = None
    psi_plus: tuple | None = None
    factor_band: int = 4
    deviation: float = 0.2
    seed: int = 0


@dataclass(frozen=True)
class RunConfig:
    symbol: SymbolSpec
    check_kind: str
    ns: tuple
    lambdas: tuple = ()
    band: int = 64
    fft_samples: int = 512
    section_cap: int = SECTION_CAP
    factorization_tol: float = 1e-10
    residual_tol: float = 1e-8
    output: str = "report.csv"


# -- parsing -------------------------------------------------------------------

def _get(obj, key, path, kind, default=None, required=False):
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected an object")
    if key not in obj:
        if required:
            raise ConfigError(f"{path}.{key}: missing required field")
        return default
    value = obj[key]
    ok = {
        "int": lambda x: isinstance(x, int) and not isinstance(x, bool),
        "num": lambda x: isinstance(x, (int, float)) and not isinstance(x, bool),
        "str": lambda x: isinstance(x, str),
        "list": lambda x: isinstance(x, list),
        "obj": lambda x: isinstance(x, dict),
    }[kind](value)
    if not ok:
        raise ConfigError(f"{path}.{key}: expected {kind}, got {type(value).__name__}")
    return value


def _number_rows(rows, path, width):
    out = []
    for i, row in enumerate(rows):
        if (not isinstance(row, list) or len(row) != width
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in row)):
            raise ConfigError(f"{path}[{i}]: expected an array of {width} numbers")
        out.append(tuple(row))
    return tuple(out)


def _coeff_rows(rows, path, dim):
    width = 3 if dim == 1 else 5
    parsed = _number_rows(rows, path, width)
    for i, row in enumerate(parsed):
        if row[0] != int(row[0]):
            raise ConfigError(f"{path}[{i}][0]: index must be an integer")
        if dim > 1 and not (0 <= row[1] < dim and 0 <= row[2] < dim):
            raise ConfigError(f"{path}[{i}]: block entry outside a {dim}x{dim} block")
    return tuple(tuple(int(x) if j < width - 2 else float(x) for j, x in enumerate(r))
                 for r in parsed)


def _parse_symbol(sym):
    path = "symbol"
    kind = _get(sym, "kind", path, "str", required=True)
    if kind not in SYMBOL_KINDS:
        raise ConfigError(f"symbol.kind: must be one of {', '.join(SYMBOL_KINDS)}, got {kind!r}")
    if kind in ("log_coeffs", "coeffs"):
        rows = _get(sym, "coeffs", path, "list", required=True)
        return SymbolSpec(kind, coeffs=_coeff_rows(rows, "symbol.coeffs", 1))
    if kind == "rational":
        factors = []
        for i, f in enumerate(_get(sym, "factors", path, "list", required=True)):
            fp = f"symbol.factors[{i}]"
            side = _get(f, "side", fp, "str", required=True)
            if side not in ("plus", "minus"):
                raise ConfigError(f"{fp}.side: must be 'plus' or 'minus'")
            root = _number_rows([_get(f, "root", fp, "list", required=True)], f"{fp}.root", 2)[0]
            power = _get(f, "power", fp, "int", required=True)
            if abs(complex(*root)) >= 1:
                raise ConfigError(f"{fp}.root: must lie strictly inside the unit disc")
            factors.append((side, (float(root[0]), float(root[1])), power))
        return SymbolSpec(kind, factors=tuple(factors))
    dim = _get(sym, "dim", path, "int", default=2)
    if dim < 1:
        raise ConfigError("symbol.dim: must be >= 1")
    if kind == "block_factor_first":
        fb = _get(sym, "factor_band", path, "int", default=4)
        dev = _get(sym, "deviation", path, "num", default=0.2)
        seed = _get(sym, "seed", path, "int", default=0)
        if fb < 1:
            raise ConfigError("symbol.factor_band: must be >= 1")
        if not 0 < dev < 1:
            raise ConfigError("symbol.deviation: must lie in (0, 1)")
        return SymbolSpec(kind, dim=dim, factor_band=fb, deviation=float(dev), seed=seed)
    coeffs = _coeff_rows(_get(sym, "coeffs", path, "list", required=True), "symbol.coeffs", dim)
    pm = _get(sym, "psi_minus", path, "list")
    pp = _get(sym, "psi_plus", path, "list")
    if (pm is None) != (pp is None):
        raise ConfigError("symbol.psi_minus: psi_minus and psi_plus must be given together")
    if pm is not None:
        pm = _coeff_rows(pm, "symbol.psi_minus", dim)
        pp = _coeff_rows(pp, "symbol.psi_plus", dim)
    return SymbolSpec(kind, dim=dim, coeffs=coeffs, psi_minus=pm, psi_plus=pp)


def parse_config(text):
    """Parse and validate a JSON run configuration; defaults are filled in."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"<root>: invalid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ConfigError("<root>: expected an object")
    unknown = set(raw) - {"symbol", "truncation", "check", "tolerances", "output"}
    if unknown:
        raise ConfigError(f"<root>: unknown keys {sorted(unknown)}")
    symbol = _parse_symbol(_get(raw, "symbol", "<root>", "obj", required=True))

    trunc = _get(raw, "truncation", "<root>", "obj", default={})
    band = _get(trunc, "band", "truncation", "int", default=64)
    fft = _get(trunc, "fft_samples", "truncation", "int", default=512)
    cap = _get(trunc, "section_cap", "truncation", "int", default=SECTION_CAP)
    if band < 1:
        raise ConfigError("truncation.band: must be >= 1")
    if fft < 2 * band + 2:
        raise ConfigError(f"truncation.fft_samples: fft_samples < 2*band+2 ({fft} < {2 * band + 2})")
    if cap < 1:
        raise ConfigError("truncation.section_cap: must be >= 1")

    check = _get(raw, "check", "<root>", "obj", required=True)
    kind = _get(check, "kind", "check", "str", required=True)
    if kind not in CHECK_KINDS:
        raise ConfigError(f"check.kind: must be one of {', '.join(CHECK_KINDS)}, got {kind!r}")
    ns = _get(check, "n", "check", "list", required=True)
    if not ns:
        raise ConfigError("check.n: must be a nonempty array")
    for i, n in enumerate(ns):
        if not isinstance(n, int) or isinstance(n, bool) or n < 0:
            raise ConfigError(f"check.n[{i}]: expected a non-negative integer")
        if n < 1 and kind in ("quotient", "cramer"):
            raise ConfigError(f"check.n[{i}]: {kind} checks need n >= 1")
    lambdas = _number_rows(_get(check, "lambda", "check", "list", default=[]), "check.lambda", 2)
    if kind == "lambda_sweep" and not lambdas:
        raise ConfigError("check.lambda: lambda_sweep needs a nonempty lambda array")
    block = symbol.kind.startswith("block")
    if block != (kind == "block_bo"):
        raise ConfigError(f"check.kind: {kind!r} does not apply to a {symbol.kind!r} symbol")

    tols = _get(raw, "tolerances", "<root>", "obj", default={})
    ftol = _get(tols, "factorization_tol", "tolerances", "num", default=1e-10)
    rtol = _get(tols, "residual_tol", "tolerances", "num", default=1e-8)
    for name, t in (("factorization_tol", ftol), ("residual_tol", rtol)):
        if not t > 0:
            raise ConfigError(f"tolerances.{name}: must be > 0")

    out = raw.get("output", {})
    if isinstance(out, str):
        output = out
    else:
        output = _get(out, "path", "output", "str", default="report.csv")

    return RunConfig(symbol, kind, tuple(ns), tuple((float(a), float(b)) for a, b in lambdas),
                     band, fft, cap, float(ftol), float(rtol), output)


def dump_config(cfg):
    """Serialize a :class:`RunConfig` back to JSON text accepted by :func:`parse_config`."""
    s = cfg.symbol
    sym = {"kind": s.kind}
    if s.kind in ("log_coeffs", "coeffs"):
        sym["coeffs"] = [list(r) for r in s.coeffs]
    elif s.kind == "rational":
        sym["factors"] = [{"side": side, "root": list(root), "power": p}
                          for side, root, p in s.factors]
    elif s.kind == "block_factor_first":
        sym.update(dim=s.dim, factor_band=s.factor_band, deviation=s.deviation, seed=s.seed)
    else:
        sym.update(dim=s.dim, coeffs=[list(r) for r in s.coeffs])
        if s.psi_minus is not None:
            sym["psi_minus"] = [list(r) for r in s.psi_minus]
            sym["psi_plus"] = [list(r) for r in s.psi_plus]
    doc = {
        "symbol": sym,
        "truncation": {"band": cfg.band, "fft_samples": cfg.fft_samples,
                       "section_cap": cfg.section_cap},
        "check": {"kind": cfg.check_kind, "n": list(cfg.ns),
                  "lambda": [list(lam) for lam in cfg.lambdas]},
        "tolerances": {"factorization_tol": cfg.factorization_tol,
                       "residual_tol": cfg.residual_tol},
        "output": {"path": cfg.output},
    }
    return json.dumps(doc, indent=2)


# -- symbol construction -------------------------------------------------------

def _series(rows, dim):
    coeffs = {}
    for row in rows:
        if dim == 1:
            k, re, im = row
            coeffs[k] = coeffs.get(k, 0) + complex(re, im)
        else:
            k, r, c, re, im = row
            blk = coeffs.setdefault(k, np.zeros((dim, dim), dtype=complex))
            blk[r, c] += complex(re, im)
    return LaurentSeries.from_dict(coeffs, dim=dim)


def _prepare(cfg):
    s = cfg.symbol
    tol = cfg.factorization_tol
    if s.kind == "log_coeffs":
        return prepare_scalar(logphi=_series(s.coeffs, 1), band=cfg.band, tol=tol)
    if s.kind == "rational":
        factors = [(side, complex(*root), p) for side, root, p in s.factors]
        return prepare_scalar(logphi=rational_log(factors, cfg.band), band=cfg.band, tol=tol)
    if s.kind == "coeffs":
        return prepare_scalar(phi=_series(s.coeffs, 1), band=cfg.band,
                              samples=cfg.fft_samples, tol=tol)
    if s.kind == "block_factor_first":
        rng = np.random.default_rng(s.seed)
        pm, pp = random_block_factors(rng, dim=s.dim, band=s.factor_band, deviation=s.deviation)
        return prepare_block(factor_first(pm, pp), pm, pp, band=cfg.band, tol=tol,
                             section_cap=cfg.section_cap, samples=cfg.fft_samples)
    phi = _series(s.coeffs, s.dim)
    pm = _series(s.psi_minus, s.dim) if s.psi_minus is not None else None
    pp = _series(s.psi_plus, s.dim) if s.psi_plus is not None else None
    return prepare_block(phi, pm, pp, band=cfg.band, tol=tol, section_cap=cfg.section_cap,
                         samples=cfg.fft_samples)


def _log_for_sweep(cfg):
    s = cfg.symbol
    if s.kind == "log_coeffs":
        return _series(s.coeffs, 1)
    if s.kind == "rational":
        return rational_log([(side, complex(*root), p) for side, root, p in s.factors], cfg.band)
    prepared = prepare_scalar(phi=_series(s.coeffs, 1), band=cfg.band, samples=cfg.fft_samples,
                              tol=cfg.factorization_tol)
    return prepared.logphi


_CHECKS = {"bo": bo_check, "quotient": quotient_check, "cramer": cramer_check,
           "block_bo": block_bo_check}


def execute(cfg):
    """Run every requested check; never raises for numerical failures."""
    if cfg.check_kind == "lambda_sweep":
        try:
            logphi = _log_for_sweep(cfg)
        except CheckError as exc:
            return [CheckReport.failed("lambda_sweep", n, exc, complex(*lam))
                    for lam in cfg.lambdas for n in cfg.ns]
        return lambda_sweep(logphi, [complex(*lam) for lam in cfg.lambdas], list(cfg.ns),
                            band=cfg.band, tol=cfg.factorization_tol)
    try:
        prepared = _prepare(cfg)
    except CheckError as exc:
        return [CheckReport.failed(cfg.check_kind, n, exc) for n in cfg.ns]
    check = _CHECKS[cfg.check_kind]
    reports = []
    for n in cfg.ns:
        try:
            reports.append(check(prepared, n))
        except CheckError as exc:
            reports.append(CheckReport.failed(cfg.check_kind, n, exc))
    return reports


# -- output --------------------------------------------------------------------

def _fmt(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    return f"{x:.16e}"


def _sort_key(rep):
    lam = rep.lam if rep.lam is not None else 0j
    return (rep.check_kind, lam.real, lam.imag, rep.n)


def render_csv(reports, cfg):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rep in sorted(reports, key=_sort_key):
        lam = ("", "") if rep.lam is None else (_fmt(rep.lam.real), _fmt(rep.lam.imag))
        section = rep.diagnostics.get("section", "")
        writer.writerow([rep.check_kind, *lam, rep.n,
                         _fmt(rep.lhs.real), _fmt(rep.lhs.imag),
                         _fmt(rep.rhs.real), _fmt(rep.rhs.imag),
                         _fmt(rep.abs_residual), _fmt(rep.rel_residual),
                         cfg.band, section, rep.error or ""])
    return buf.getvalue()


def run(cfg, quiet=False, stream=None):
    """Execute ``cfg``, write the CSV report and return the exit status."""
    stream = stream or sys.stdout
    reports = execute(cfg)
    Path(cfg.output).parent.mkdir(parents=True, exist_ok=True)
    Path(cfg.output).write_text(render_csv(reports, cfg))
    failures = 0
    for rep in sorted(reports, key=_sort_key):
        ok = rep.passed(cfg.residual_tol)
        failures += not ok
        if not quiet:
            lam = "" if rep.lam is None else f" lambda={rep.lam.real:g}{rep.lam.imag:+g}i"
            detail = rep.error if rep.error else f"rel_residual={rep.rel_residual:.3e}"
            print(f"{rep.check_kind}{lam} n={rep.n}: {detail} [{'PASS' if ok else 'FAIL'}]",
                  file=stream)
    if not quiet:
        print(f"{len(reports) - failures}/{len(reports)} rows within tolerance "
              f"{cfg.residual_tol:g}; report written to {cfg.output}", file=stream)
    return EXIT_OK if failures == 0 else EXIT_TOLERANCE


def main(argv=None):
    parser = argparse.ArgumentParser(prog="toeplitz-fredholm",
                                     description="Verify Toeplitz/Fredholm determinant identities.")
    sub = parser.add_subparsers(dest="command", required=True)
    verify = sub.add_parser("verify", help="run the checks described by a JSON config")
    verify.add_argument("config", type=Path)
    verify.add_argument("--output", help="CSV path, overriding output.path")
    verify.add_argument("--seed", type=int, help="seed for random symbol families")
    verify.add_argument("--quiet", action="store_true", help="suppress per-row summaries")
    args = parser.parse_args(argv)

    try:
        cfg = parse_config(args.config.read_text())
    except (OSError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STRUCTURAL
    if args.output:
        cfg = replace(cfg, output=args.output)
    if args.seed is not None:
        if args.seed < 0 or args.seed >= 2 ** 64:
            print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
            return EXIT_STRUCTURAL
        cfg = replace(cfg, symbol=replace(cfg.symbol, seed=args.seed))
    try:
        return run(cfg, quiet=args.quiet)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STRUCTURAL


if __name__ == "__main__":
    sys.exit(main())
