"""Config parsing (strict, located errors) and the workbench CLI surface."""

import json
from pathlib import Path

import numpy as np
import pytest

from shiftindex import cli
from shiftindex import config as cfg

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

MINIMAL = """
[group]
kind = "finite-cyclic"
order = 2

[operator]
order = 0
ranks = [1, 1]

[[operator.terms]]
element = 0
plus = { "0" = [1.0, 0.0] }
minus = { "0" = [1.0, 0.0] }
"""


def test_minimal_config_fills_defaults():
    c = cfg.parse_config(MINIMAL)
    assert c.numerics.cutoffs == (64, 128, 256)
    assert c.numerics.grid == (128, 128)
    assert c.run.seed == 0 and c.run.out_dir == "out"
    spec = c.group_spec()
    D = c.shift_operator(spec)
    assert D.support() == [0] and D.shape == (1, 1)


def test_negative_tolerance_names_key():
    text = MINIMAL + "\n[numerics]\nsv_tol = -1e-7\n"
    with pytest.raises(cfg.ConfigParseError) as exc:
        cfg.parse_config(text)
    errs = exc.value.errors
    assert any(e.path == "numerics.sv_tol" and "positive" in e.message for e in errs)
    assert all(e.line is not None for e in errs if e.path == "numerics.sv_tol")


def test_unknown_key_rejected_with_line():
    text = MINIMAL.replace('kind = "finite-cyclic"', 'kind = "finite-cyclic"\nwibble = 3')
    with pytest.raises(cfg.ConfigParseError) as exc:
        cfg.parse_config(text)
    err = next(e for e in exc.value.errors if e.path == "group.wibble")
    assert "unknown key" in err.message
    assert err.line == 4


def test_unknown_section_rejected():
    with pytest.raises(cfg.ConfigParseError) as exc:
        cfg.parse_config(MINIMAL + "\n[plotting]\nstyle = 1\n")
    assert any(e.path == "plotting" for e in exc.value.errors)


def test_decreasing_cutoffs_rejected():
    text = MINIMAL + "\n[numerics]\ncutoffs = [64, 32]\n"
    with pytest.raises(cfg.ConfigParseError) as exc:
        cfg.parse_config(text)
    assert any(e.path == "numerics.cutoffs" for e in exc.value.errors)


def test_rational_theta_is_config_error():
    text = MINIMAL.replace('kind = "finite-cyclic"\norder = 2',
                           'kind = "dense-rotation"\ntheta = 0.25')
    with pytest.raises(cfg.ConfigParseError) as exc:
        cfg.parse_config(text)
    assert any("rational" in e.message for e in exc.value.errors)


def test_theta_cf_accepted():
    text = MINIMAL.replace('kind = "finite-cyclic"\norder = 2',
                           'kind = "dense-rotation"\ntheta_cf = ' + str([0] + [1] * 40))
    c = cfg.parse_config(text)
    spec = c.group_spec()
    assert spec.theta == pytest.approx((np.sqrt(5) - 1) / 2, abs=1e-12)


def test_bad_coefficient_shape():
    text = MINIMAL.replace('plus = { "0" = [1.0, 0.0] }', 'plus = { "0" = [1.0, 0.0, 3.0] }')
    with pytest.raises(cfg.ConfigParseError) as exc:
        cfg.parse_config(text)
    assert any("coefficient" in e.message for e in exc.value.errors)


def test_round_trip():
    for path in sorted(CONFIG_DIR.glob("*.toml")):
        text = path.read_text()
        c1 = cfg.parse_config(text)
        emitted = cfg.emit_config(c1)
        c2 = cfg.parse_config(emitted)
        assert cfg.emit_config(c2) == emitted, path.name


def test_every_shipped_config_parses():
    names = {p.name for p in CONFIG_DIR.glob("*.toml")}
    assert {"identity.toml", "winding_plus1.toml", "order2_mixed.toml",
            "order4_twisted.toml", "order2_matrix.toml", "golden_dense.toml",
            "nonelliptic_double_zero.toml"} <= names
    for p in sorted(CONFIG_DIR.glob("*.toml")):
        cfg.load_config(p)


EXPECTED_BAD = {
    "unknown_key.toml": ("group.wibble", "unknown key"),
    "negative_tolerance.toml": ("numerics.sv_tol", "must be positive"),
    "rational_theta.toml": ("group", "rational at machine precision"),
    "decreasing_cutoffs.toml": ("numerics.cutoffs", "strictly increasing"),
    "missing_terms.toml": ("operator.terms", "at least one"),
}


def test_every_negative_example_fails_as_documented():
    bad_dir = CONFIG_DIR / "bad"
    found = {p.name for p in bad_dir.glob("*.toml")}
    assert found == set(EXPECTED_BAD)
    for name, (path_frag, msg_frag) in EXPECTED_BAD.items():
        with pytest.raises(cfg.ConfigParseError) as exc:
            cfg.load_config(bad_dir / name)
        assert any(
            e.path.startswith(path_frag) and msg_frag in e.message
            for e in exc.value.errors
        ), f"{name}: {exc.value.errors}"


# ---- CLI ----

def test_cli_parse_error_exit(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text(MINIMAL + "\n[numerics]\nsv_tol = -1.0\n")
    assert cli.main(["verify", "--config", str(bad)]) == cli.EXIT_PARSE


def test_cli_missing_file_exit(tmp_path):
    assert cli.main(["verify", "--config", str(tmp_path / "nope.toml")]) == cli.EXIT_PARSE


def test_cli_verify_identity(tmp_path, capsys):
    rc = cli.main(["verify", "--config", str(CONFIG_DIR / "identity.toml"),
                   "--out", str(tmp_path)])
    assert rc == cli.EXIT_OK
    payload = json.loads((tmp_path / "verify.json").read_text())
    assert payload["rounded"] == 0
    assert payload["agreement"] is True
    assert (tmp_path / "verify.txt").exists()
    out = capsys.readouterr().out
    assert "agreement" in out


def test_cli_verify_not_elliptic(tmp_path):
    rc = cli.main(["verify", "--config", str(CONFIG_DIR / "nonelliptic_double_zero.toml"),
                   "--out", str(tmp_path)])
    assert rc == cli.EXIT_NOT_ELLIPTIC
    assert "not Fredholm" in (tmp_path / "index.txt").read_text()


def test_cli_check_group_dense(tmp_path):
    rc = cli.main(["check-group", "--config", str(CONFIG_DIR / "golden_dense.toml"),
                   "--out", str(tmp_path)])
    assert rc == cli.EXIT_OK
    payload = json.loads((tmp_path / "check-group.json").read_text())
    assert payload["diophantine"]["satisfied"] is True
    assert payload["census"]["fitted_degree"] == pytest.approx(1.0, abs=0.15)


def test_cli_ellipticity_command(tmp_path):
    rc = cli.main(["ellipticity", "--config", str(CONFIG_DIR / "identity.toml"),
                   "--out", str(tmp_path)])
    assert rc == cli.EXIT_OK
    rc = cli.main(["ellipticity", "--config", str(CONFIG_DIR / "nonelliptic_double_zero.toml"),
                   "--out", str(tmp_path)])
    assert rc == cli.EXIT_NOT_ELLIPTIC


def test_cli_reports_deterministic(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert cli.main(["verify", "--config", str(CONFIG_DIR / "identity.toml"),
                     "--out", str(out1), "--seed", "3"]) == 0
    assert cli.main(["verify", "--config", str(CONFIG_DIR / "identity.toml"),
                     "--out", str(out2), "--seed", "3"]) == 0
    assert (out1 / "verify.json").read_bytes() == (out2 / "verify.json").read_bytes()
    assert (out1 / "verify.txt").read_bytes() == (out2 / "verify.txt").read_bytes()


def test_golden_report_structure(tmp_path):
    """A fresh run reproduces the committed golden report's discrete content.

    Float bytes may legitimately differ across BLAS builds, so the byte
    comparison lives in the determinism test; here the golden file pins the
    report schema and every integer-valued field.
    """
    golden = json.loads((CONFIG_DIR / "golden" / "verify.json").read_text())
    rc = cli.main(["verify", "--config", str(CONFIG_DIR / "identity.toml"),
                   "--out", str(tmp_path)])
    assert rc == cli.EXIT_OK
    fresh = json.loads((tmp_path / "verify.json").read_text())
    assert set(fresh) == set(golden)
    for key in ("rounded", "agreement", "seed", "config_echo"):
        assert fresh[key] == golden[key], key
    assert fresh["analytic"]["index"] == golden["analytic"]["index"]
    assert fresh["analytic"]["stable"] == golden["analytic"]["stable"]
    assert fresh["certificate"]["verdict"] == golden["certificate"]["verdict"]
    assert fresh["config_snapshot"] == golden["config_snapshot"]


def test_cli_sweep_rows(tmp_path):
    rc = cli.main(["sweep", "--config", str(CONFIG_DIR / "identity.toml"),
                   "--out", str(tmp_path), "--param", "grid", "--values", "64,128"])
    assert rc == cli.EXIT_OK
    rows = (tmp_path / "sweep.tsv").read_text().strip().splitlines()
    assert len(rows) == 3  # header + 2 values
    header = rows[0].split("\t")
    assert {"param", "value", "rounded", "analytic", "residual_integer"} <= set(header)
