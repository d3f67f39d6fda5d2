"""End-to-end checks of the command-line interface.

Most tests drive ``main`` in process for speed; a few go through a real
subprocess to cover the module entry point and file output.
"""

import json
import subprocess
import sys

import numpy as np
import pytest

from harmonic_schwarz.bounds import classical_bound
from harmonic_schwarz.cli import main

HEINZ = ["--n", "2", "--m", "1", "--r", "0.5", "--a", "0", "--b", "0"]
MIXED = ["--n", "3", "--m", "2", "--r", "0.5", "--a", "0.25,-0.1", "--b", "0.35"]


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def lambda_line(text):
    prefix = "# lambda = "
    line = next(l for l in text.splitlines() if l.startswith(prefix))
    return np.array([float(v) for v in line[len(prefix):].split(",")])


def test_module_entry_point_emits_valid_json(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "harmonic_schwarz", "bound", *HEINZ],
        capture_output=True,
        text=True,
        cwd=tmp_path,
    )
    assert proc.returncode == 0
    doc = json.loads(proc.stdout)
    assert doc["value"] == pytest.approx((4.0 / np.pi) * np.arctan(0.5), abs=1e-8)
    assert doc["e"] == [1, 0]
    assert doc["branch"] == "zero_b"


def test_console_help_lists_the_subcommands(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["--help"])
    assert excinfo.value.code == 0
    text = capsys.readouterr().out
    for name in ("bound", "region", "extremal", "classical", "verify"):
        assert name in text


def test_bound_csv_header_is_stable(capsys):
    code, out, _ = run(["bound", *HEINZ, "--format", "csv"], capsys)
    assert code == 0
    header, row, trailer = out.split("\n")
    assert header == "value,mean_residual,mass_residual,iterations,branch"
    assert row.endswith(",zero_b")
    assert trailer == ""


def test_direction_flag_reorients_and_normalizes(capsys):
    code, out, _ = run(
        ["bound", "--n", "3", "--m", "1", "--r", "0.5", "--a", "0.2", "--b", "0.3",
         "--e", "0,2"],
        capsys,
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["e"] == [0, 1]  # normalized before reporting
    assert doc["branch"] == "positive_b"
    assert 0.3 < doc["value"] < 1.0


def test_invalid_geometry_exits_with_code_two(capsys):
    bad = [
        ["bound", "--n", "3", "--m", "1", "--r", "1.5", "--a", "0.2", "--b", "0.3"],
        ["bound", "--n", "3", "--m", "1", "--r", "0.5", "--a", "0.2,0.1", "--b", "0.3"],
        ["bound", "--n", "3", "--m", "1", "--r", "0.5", "--a", "0.2", "--b", "0.3",
         "--e", "1,0,0"],
    ]
    for argv in bad:
        code, _, err = run(argv, capsys)
        assert code == 2, argv
        assert err.startswith("error:")


def test_unreachable_tolerance_exits_with_code_three(capsys):
    code, _, err = run(["bound", *HEINZ, "--tol", "1e-30"], capsys)
    assert code == 3
    assert err.startswith("solver failure:")


def test_origin_region_envelope_is_round(capsys):
    code, out, _ = run(
        ["region", "--n", "3", "--m", "1", "--r", "0.45", "--a", "0", "--b", "0",
         "--directions", "8"],
        capsys,
    )
    assert code == 0
    env = json.loads(out)
    assert env["scheme"] == "grid"
    values = np.array([hs["h"] for hs in env["halfspaces"]])
    assert values.shape == (8,)
    assert np.ptp(values) < 1e-9


def test_region_output_file_is_reproducible(tmp_path):
    argv = [sys.executable, "-m", "harmonic_schwarz", "region",
            "--n", "3", "--m", "1", "--r", "0.4", "--a", "0.2", "--b", "0.1",
            "--directions", "6", "--scheme", "random", "--seed", "7",
            "--out", "env.json"]
    first = subprocess.run(argv, capture_output=True, cwd=tmp_path)
    payload = (tmp_path / "env.json").read_bytes()
    second = subprocess.run(argv, capture_output=True, cwd=tmp_path)
    assert first.returncode == 0 and second.returncode == 0
    assert (tmp_path / "env.json").read_bytes() == payload
    # atomic replacement leaves no scratch files behind
    assert sorted(p.name for p in tmp_path.iterdir()) == ["env.json"]


def test_extremal_table_header_and_jump_endpoints(capsys):
    code, out, _ = run(["extremal", *HEINZ, "--nodes", "5"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert "# branch = zero_b" in lines
    assert "# mu = null" in lines
    header_at = lines.index("t,u1,v")
    rows = [line.split(",") for line in lines[header_at + 1:]]
    assert len(rows) == 5
    assert [float(v) for v in rows[0]] == [-1.0, -1.0, 0.0]
    assert [float(v) for v in rows[-1]] == [1.0, 1.0, 0.0]


def test_extremal_multipliers_are_discretization_stable(capsys):
    def lam_for(extra):
        code, out, _ = run(["extremal", *MIXED, "--nodes", "3", *extra], capsys)
        assert code == 0
        return lambda_line(out)

    baseline = lam_for([])
    assert np.abs(lam_for(["--tol", "1e-6"]) - baseline).max() < 1e-10
    assert np.abs(lam_for(["--order", "256"]) - baseline).max() < 1e-12


def test_extremal_json_samples_are_well_formed(capsys):
    code, out, _ = run(["extremal", *MIXED, "--nodes", "7", "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["branch"] == "positive_b"
    assert doc["columns"] == ["t", "u1", "u2", "v"]
    samples = np.array(doc["samples"])
    assert samples.shape == (7, 4)
    assert samples[0, 0] == -1.0 and samples[-1, 0] == 1.0
    norms = np.linalg.norm(samples[:, 1:], axis=1)
    np.testing.assert_allclose(norms, 1.0, atol=1e-12)


def test_extremal_rejects_tiny_node_count(capsys):
    code, _, err = run(["extremal", *MIXED, "--nodes", "1"], capsys)
    assert code == 2
    assert "at least 2" in err


def test_classical_reports_both_formats(capsys):
    code, out, _ = run(["classical", "--n", "3", "--r", "0.7"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["n"] == 3
    assert doc["value"] == pytest.approx(classical_bound(3, 0.7), abs=1e-15)

    code, out, _ = run(["classical", "--n", "3", "--r", "0.7", "--format", "csv"], capsys)
    assert code == 0
    header, row, _ = out.split("\n")
    assert header == "n,r,value"
    assert row.startswith("3,")


def test_verify_passes_and_is_reproducible(capsys):
    code, first, _ = run(["verify", "--suite", "heinz"], capsys)
    assert code == 0
    assert first.splitlines()[0].startswith("PASS heinz:")
    assert first.splitlines()[-1] == "1/1 criteria passed"
    code, second, _ = run(["verify", "--suite", "heinz"], capsys)
    assert code == 0
    assert second == first


def test_verify_rejects_unknown_suite(capsys):
    code, _, err = run(["verify", "--suite", "bogus"], capsys)
    assert code == 2
    assert "unknown suite" in err


def test_out_file_matches_stdout_exactly(tmp_path, capsys):
    code, out, _ = run(["bound", *MIXED], capsys)
    assert code == 0
    target = tmp_path / "bound.json"
    code, _, _ = run(["bound", *MIXED, "--out", str(target)], capsys)
    assert code == 0
    assert target.read_text() == out
    assert out.endswith("\n")
