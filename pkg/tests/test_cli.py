import csv
import json
from dataclasses import replace
from pathlib import Path

import pytest

from toeplitz_fredholm.cli import (CSV_COLUMNS, ConfigError, dump_config, execute, main,
                                   parse_config, run)

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

MINIMAL = json.dumps({
    "symbol": {"kind": "log_coeffs", "coeffs": [[1, 0.3, 0], [-1, 0.3, 0]]},
    "check": {"kind": "bo", "n": [1, 2, 3, 4, 5, 6, 7, 8]},
})


def with_output(cfg, tmp_path, name="out.csv"):
    return replace(cfg, output=str(tmp_path / name))


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# -- parse_config --------------------------------------------------------------

def test_minimal_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.band == 64 and cfg.fft_samples == 512
    assert cfg.factorization_tol == 1e-10 and cfg.residual_tol == 1e-8
    assert cfg.ns == tuple(range(1, 9))
    assert cfg.symbol.coeffs == ((1, 0.3, 0.0), (-1, 0.3, 0.0))


def test_fft_samples_rejected():
    doc = json.loads(MINIMAL)
    doc["truncation"] = {"band": 64, "fft_samples": 4}
    with pytest.raises(ConfigError, match=r"fft_samples < 2\*band\+2"):
        parse_config(json.dumps(doc))


def test_block_config_round_trip():
    doc = {
        "symbol": {"kind": "block_explicit", "dim": 2,
                   "coeffs": [[0, 0, 0, 1, 0], [0, 1, 1, 1, 0], [1, 0, 1, 0.1, 0],
                              [-1, 1, 0, 0.2, 0]],
                   "psi_minus": [[0, 0, 0, 1, 0], [0, 1, 1, 1, 0], [-1, 1, 0, 0.2, 0]],
                   "psi_plus": [[0, 0, 0, 1, 0], [0, 1, 1, 1, 0], [1, 0, 1, 0.1, 0]]},
        "check": {"kind": "block_bo", "n": [1, 2]},
    }
    cfg = parse_config(json.dumps(doc))
    assert cfg.symbol.psi_minus is not None and cfg.symbol.psi_plus is not None
    text = dump_config(cfg)
    assert parse_config(text) == cfg
    assert dump_config(parse_config(text)) == text


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.json")), ids=lambda p: p.stem)
def test_shipped_configs_round_trip(path):
    cfg = parse_config(path.read_text())
    assert parse_config(dump_config(cfg)) == cfg


@pytest.mark.parametrize("mutate, fragment", [
    (lambda d: d.pop("symbol"), "<root>.symbol"),
    (lambda d: d["symbol"].update(kind="spline"), "symbol.kind"),
    (lambda d: d["check"].update(n=[]), "check.n"),
    (lambda d: d["check"].update(n=[1, -2]), "check.n[1]"),
    (lambda d: d["check"].update(kind="block_bo"), "check.kind"),
    (lambda d: d["symbol"].update(coeffs=[[1, 0.3]]), "symbol.coeffs[0]"),
    (lambda d: d.update(tolerances={"residual_tol": 0}), "tolerances.residual_tol"),
    (lambda d: d.update(extra=1), "unknown keys"),
    (lambda d: d["check"].update(kind="lambda_sweep"), "check.lambda"),
])
def test_schema_errors_name_the_field(mutate, fragment):
    doc = json.loads(MINIMAL)
    mutate(doc)
    with pytest.raises(ConfigError) as info:
        parse_config(json.dumps(doc))
    assert fragment in str(info.value)


def test_rational_root_outside_disc():
    doc = {"symbol": {"kind": "rational", "factors": [{"side": "plus", "root": [1.2, 0],
                                                       "power": 1}]},
           "check": {"kind": "bo", "n": [1]}}
    with pytest.raises(ConfigError, match=r"symbol.factors\[0\].root"):
        parse_config(json.dumps(doc))


# -- run -----------------------------------------------------------------------

def test_analytic_run_exit_zero(tmp_path):
    cfg = with_output(parse_config((CONFIGS / "analytic_bo.json").read_text()), tmp_path)
    assert run(cfg, quiet=True) == 0
    rows = read_rows(cfg.output)
    assert rows and all(float(r["abs_residual"]) == 0 for r in rows)


def test_starved_run_exit_one(tmp_path, capsys):
    cfg = with_output(parse_config((CONFIGS / "starved.json").read_text()), tmp_path)
    assert run(cfg) == 1
    rows = read_rows(cfg.output)
    assert any(r["error"] == "" and float(r["rel_residual"]) > cfg.residual_tol for r in rows)
    assert "FAIL" in capsys.readouterr().out


def test_csv_columns_and_summary(tmp_path, capsys):
    cfg = with_output(parse_config(MINIMAL), tmp_path)
    assert run(cfg) == 0
    with open(cfg.output) as fh:
        assert fh.readline().strip().split(",") == list(CSV_COLUMNS)
    out = capsys.readouterr().out.splitlines()
    assert len(out) == len(cfg.ns) + 1
    assert all(line.endswith("[PASS]") for line in out[:-1])


def test_lambda_sweep_cardinality(tmp_path):
    cfg = with_output(parse_config((CONFIGS / "lambda_sweep.json").read_text()), tmp_path)
    assert run(cfg, quiet=True) == 0
    rows = read_rows(cfg.output)
    assert len(rows) == len(cfg.lambdas) * len(cfg.ns)
    keys = [(float(r["lambda_re"]), float(r["lambda_im"]), int(r["n"])) for r in rows]
    assert keys == sorted(keys)


def test_error_rows_recorded(tmp_path):
    doc = json.loads(MINIMAL)
    doc["symbol"]["coeffs"] = [[1, 3.0, 0], [-1, 3.0, 0]]
    doc["truncation"] = {"band": 4, "fft_samples": 64}
    cfg = with_output(parse_config(json.dumps(doc)), tmp_path)
    assert run(cfg, quiet=True) == 1
    rows = read_rows(cfg.output)
    assert all(r["error"].startswith("[") and r["rel_residual"] == "nan" for r in rows)


@pytest.mark.parametrize("name", ["smooth_bo", "block_factor_first", "lambda_sweep"])
def test_determinism(tmp_path, name):
    cfg = parse_config((CONFIGS / f"{name}.json").read_text())
    a, b = with_output(cfg, tmp_path, "a.csv"), with_output(cfg, tmp_path, "b.csv")
    run(a, quiet=True)
    run(b, quiet=True)
    assert Path(a.output).read_bytes() == Path(b.output).read_bytes()


def test_execute_never_raises_on_numerical_failure():
    doc = json.loads(MINIMAL)
    doc["symbol"] = {"kind": "coeffs", "coeffs": [[1, 1.0, 0]]}
    reports = execute(parse_config(json.dumps(doc)))
    assert all(not r.ok and "winding" in r.error for r in reports)


# -- main ----------------------------------------------------------------------

def test_main_verify(tmp_path, capsys):
    cfg_path = tmp_path / "c.json"
    cfg_path.write_text(MINIMAL)
    out = tmp_path / "r.csv"
    assert main(["verify", str(cfg_path), "--output", str(out), "--quiet"]) == 0
    assert out.exists() and capsys.readouterr().out == ""


def test_main_structural_errors(tmp_path, capsys):
    assert main(["verify", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["verify", str(bad)]) == 2
    assert "error:" in capsys.readouterr().err


def test_main_seed_override(tmp_path):
    src = CONFIGS / "block_factor_first.json"
    outs = []
    for seed in (3, 3, 4):
        out = tmp_path / f"s{len(outs)}.csv"
        assert main(["verify", str(src), "--seed", str(seed), "--output", str(out),
                     "--quiet"]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] and outs[0] != outs[2]
    assert main(["verify", str(src), "--seed", str(2 ** 64), "--quiet"]) == 2
