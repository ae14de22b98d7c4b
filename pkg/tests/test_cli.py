import json
import subprocess
import sys

import numpy as np
import pytest

from gramkit import formats
from gramkit.cli import main
from gramkit.exceptions import FormatError
from gramkit.frames import FrameSystem

from .conftest import fixture_path


# formats

def test_matrix_json_round_trip_is_bit_exact(rng, tmp_path):
    a = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
    a[0, 0] = np.nextafter(1.0, 2.0) + 1e-300j
    path = tmp_path / "m.json"
    formats.write_matrix(path, a)
    b = formats.read_matrix(path)
    assert np.array_equal(a.view(np.float64), b.view(np.float64))


def test_matrix_csv_round_trip_is_bit_exact(rng, tmp_path):
    a = rng.standard_normal((2, 3)) - 1j * rng.standard_normal((2, 3))
    path = tmp_path / "m.csv"
    formats.write_matrix(path, a)
    assert np.array_equal(formats.read_matrix(path), a)


def test_csv_accepts_i_suffix():
    np.testing.assert_array_equal(formats.matrix_from_csv("1+2i,3\n-1.5-0.5i,0\n"), [[1 + 2j, 3], [-1.5 - 0.5j, 0]])


def test_frame_round_trip(rng, tmp_path):
    f = FrameSystem(rng.standard_normal((3, 5)) + 1j * rng.standard_normal((3, 5)))
    path = tmp_path / "f.json"
    formats.write_frame(path, f)
    assert np.array_equal(formats.read_frame(path).synthesis, f.synthesis)


@pytest.mark.parametrize(
    "obj",
    [
        {"rows": 1, "cols": 2, "data": [[1, 0]]},
        {"rows": 1, "cols": 1, "data": [["a", 0]]},
        {"rows": 1, "cols": 1, "data": [[1e400, 0]]},
        {"cols": 1, "data": []},
        [],
    ],
)
def test_bad_matrix_json(obj):
    with pytest.raises(FormatError):
        formats.matrix_from_json(obj)


def test_bad_frame_json():
    with pytest.raises(FormatError):
        formats.frame_from_json({"dim": 2, "vectors": [[[1, 0]]]})


def test_non_finite_report_values():
    assert json.loads(formats.dumps({"a": np.inf, "b": np.nan, "c": -np.inf})) == {
        "a": "inf",
        "b": "nan",
        "c": "-inf",
    }


# cli

def _run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def _write(tmp_path, name, a):
    path = tmp_path / name
    formats.write_matrix(path, a)
    return str(path)


def _frame(tmp_path, name, t):
    path = tmp_path / name
    formats.write_frame(path, FrameSystem(np.asarray(t, dtype=complex)))
    return str(path)


def test_gram_identity(tmp_path, capsys):
    op = _write(tmp_path, "I2.json", np.eye(2))
    onb = _frame(tmp_path, "onb2.json", np.eye(2))
    out = tmp_path / "G.json"
    code, _, _ = _run(["gram", "--op", op, "--left", onb, "--right", onb, "-o", str(out)], capsys)
    assert code == 0
    g = formats.matrix_from_json(json.loads(out.read_text()))
    np.testing.assert_array_equal(g, np.eye(2))


def test_pinv_example_fixture(capsys):
    code, out, _ = _run(
        [
            "pinv",
            "--op", "fixtures:example5_op.json",
            "--left", "fixtures:example5_phi.json",
            "--right", "fixtures:example5_psi.json",
            "--expect-op-pinv", "fixtures:example5_op_pinv.json",
            "--left-duals", "fixtures:example5_phi_a.json", "fixtures:example5_phi_b.json",
        ],
        capsys,
    )
    assert code == 0
    report = json.loads(out)
    assert report["dual_comparison"]["pinv_images_equal"]
    assert not report["dual_comparison"]["representing_dual_unique"]


def test_pinv_report_file(tmp_path, capsys):
    report = tmp_path / "report.json"
    code, out, _ = _run(
        [
            "pinv",
            "--op", "fixtures:example5_op.json",
            "--left", "fixtures:example5_phi.json",
            "--right", "fixtures:example5_psi.json",
            "--report", str(report),
        ],
        capsys,
    )
    assert code == 0
    assert formats.matrix_from_json(json.loads(out)).shape == (6, 6)
    assert "residuals" in json.loads(report.read_text())


def test_stability_far_is_inconclusive(tmp_path, capsys):
    op = _write(tmp_path, "I2.json", np.eye(2))
    v = _write(tmp_path, "V.json", 5 * np.eye(2))
    onb = _frame(tmp_path, "onb2.json", np.eye(2))
    code, out, _ = _run(["stability", "--theorem", "c1", "--op", op, "--v", v, "--left", onb, "--right", onb], capsys)
    assert code == 1
    assert json.loads(out)["verdict"] is False


def test_stability_near_passes(tmp_path, capsys):
    op = _write(tmp_path, "I2.json", np.eye(2))
    v = _write(tmp_path, "V.json", 1.5 * np.eye(2))
    onb = _frame(tmp_path, "onb2.json", np.eye(2))
    code, _, _ = _run(["stability", "--theorem", "c1", "--op", op, "--v", v, "--left", onb, "--right", onb], capsys)
    assert code == 0


def test_usage_errors(tmp_path, capsys):
    assert _run(["frobnicate"], capsys)[0] == 64
    assert _run(["gram"], capsys)[0] == 64
    assert _run(["--help"], capsys)[0] == 0
    assert _run(["gram", "--left", "missing.json", "--right", "missing.json"], capsys)[0] == 64
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert _run(["classify", str(bad)], capsys)[0] == 64
    assert _run(["classify", "fixtures:example5_phi.json", "--cutoff", "2"], capsys)[0] == 64


def test_precondition_error_maps_to_usage(capsys):
    code, _, err = _run(
        ["corrected-dual", "--left", "fixtures:redundant2.json", "--right", "fixtures:redundant2.json"],
        capsys,
    )
    assert code == 64 and "defect" in err


def test_csv_summary(capsys):
    code, out, _ = _run(["classify", "fixtures:redundant2.json", "--format", "csv-summary"], capsys)
    assert code == 0
    rows = dict(line.split(",", 1) for line in out.strip().splitlines()[1:])
    assert rows["class.kind"] == "Frame"


def test_selftest_passes_and_is_deterministic(capsys):
    code, first, err = _run(["selftest", "--trials", "2"], capsys)
    assert code == 0 and "passed" in err
    _, second, _ = _run(["selftest", "--trials", "2"], capsys)
    assert first == second


def test_selftest_corrupted_cutoff_fails(capsys):
    code, out, _ = _run(["selftest", "--trials", "2", "--cutoff", "0.5"], capsys)
    assert code == 2
    assert not json.loads(out)["ok"]


def test_selftest_seed_changes_draws_not_verdicts(capsys):
    _, a, _ = _run(["selftest", "--trials", "2", "--seed", "1"], capsys)
    _, b, _ = _run(["selftest", "--trials", "2", "--seed", "2"], capsys)
    ra, rb = json.loads(a), json.loads(b)
    assert ra["seed"] != rb["seed"] and ra["ok"] and rb["ok"]


def test_converge_determinism_and_env_seed(monkeypatch, capsys):
    argv = ["converge", "--op", "fixtures:identity2.json", "--left", "fixtures:onb2.json", "--right", "fixtures:onb2.json", "--steps", "10"]
    _, a, _ = _run(argv, capsys)
    _, b, _ = _run(argv, capsys)
    assert a == b
    monkeypatch.setenv("GRAMKIT_SEED", "7")
    _, c, _ = _run(argv, capsys)
    assert c != a


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "gramkit", "classify", str(fixture_path("onb2.json"))],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["class"]["kind"] == "OrthonormalBasis"


@pytest.mark.parametrize(
    "argv",
    [
        ["adjoint", "--op", "fixtures:example5_op.json", "--left", "fixtures:example5_phi.json", "--right", "fixtures:example5_psi.json"],
        ["compose", "--op1", "fixtures:identity2.json", "--left1", "fixtures:onb2.json", "--right1", "fixtures:redundant2.json",
         "--op2", "fixtures:identity2.json", "--left2", "fixtures:redundant2.json", "--right2", "fixtures:onb2.json"],
        ["dual", "fixtures:redundant2.json"],
        ["special-dual", "--op", "fixtures:example5_op.json", "--left", "fixtures:example5_phi.json", "--right", "fixtures:example5_psi.json"],
        ["pinv-tilde", "--op", "fixtures:identity3.json", "--left", "fixtures:scaled_basis.json", "--right", "fixtures:inverse_scaled_basis.json"],
        ["pinv-transported", "--op", "fixtures:example5_op.json", "--left", "fixtures:example5_phi.json", "--right", "fixtures:example5_psi.json"],
        ["schatten", "--op", "fixtures:identity3.json", "--left", "fixtures:scaled_basis.json", "--right", "fixtures:inverse_scaled_basis.json", "--p", "1"],
        ["neumann", "--u1", "fixtures:identity2.json", "--u2", "fixtures:identity2.json"],
    ],
)
def test_commands_succeed(argv, capsys):
    code, out, _ = _run(argv, capsys)
    assert code == 0
    json.loads(out)


def test_reconstruct_command(tmp_path, capsys):
    g = tmp_path / "G.json"
    assert _run(["gram", "--left", "fixtures:redundant2.json", "--right", "fixtures:redundant2.json", "-o", str(g)], capsys)[0] == 0
    d = tmp_path / "D.json"
    assert _run(["dual", "fixtures:redundant2.json", "-o", str(d)], capsys)[0] == 0
    code, out, _ = _run(
        ["reconstruct", "--gram", str(g), "--left-dual", str(d), "--right-dual", str(d),
         "--left", "fixtures:redundant2.json", "--right", "fixtures:redundant2.json"],
        capsys,
    )
    assert code == 0
    np.testing.assert_allclose(formats.matrix_from_json(json.loads(out)), np.eye(2), atol=1e-12)
