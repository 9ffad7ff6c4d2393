"""CLI subcommands, exit codes, and output determinism."""

import json
import os

import pytest

from conekit.cli import main


def _strip_timestamps(text):
    return "\n".join(line for line in text.splitlines()
                     if not line.startswith("#"))


@pytest.fixture(scope="module")
def built(tmp_path_factory):
    out = tmp_path_factory.mktemp("build")
    code = main(["build-profile", "--out", str(out)])
    assert code == 0
    return out


def test_build_profile_writes_artifacts(built):
    assert (built / "profile.json").exists()
    assert (built / "smoothness.csv").exists()
    doc = json.loads((built / "profile.json").read_text())
    assert doc["format"] == "conekit-profile"


def test_build_profile_infeasible_mass(tmp_path, capsys):
    code = main(["build-profile", "--out", str(tmp_path), "--mass", "20"])
    assert code == 1
    assert "mass" in capsys.readouterr().err


def test_build_profile_missing_out_dir(tmp_path):
    code = main(["build-profile", "--out", str(tmp_path / "absent")])
    assert code == 2


def test_verify_default_passes(built, tmp_path, capsys):
    code = main(["verify", "--profile", str(built / "profile.json"),
                 "--out", str(tmp_path), "--grid", "256"])
    out = capsys.readouterr().out
    assert code == 0
    assert out.count("PASS") == 5  # four regions plus the global sweep
    assert (tmp_path / "verification.csv").exists()
    assert (tmp_path / "ricci_curve.csv").exists()


def test_verify_negative_control_fails(built, tmp_path, capsys):
    code = main(["verify", "--profile", str(built / "profile.json"),
                 "--out", str(tmp_path), "--grid", "256",
                 "--negative-control"])
    assert code == 1
    out = capsys.readouterr().out
    assert "FAIL" in out
    assert "r22_min" in out  # the failing check is named


def test_verify_deterministic(built, tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    os.mkdir(out1)
    os.mkdir(out2)
    for out in (out1, out2):
        assert main(["verify", "--profile", str(built / "profile.json"),
                     "--out", str(out), "--grid", "128"]) == 0
    for name in ("verification.csv", "ricci_curve.csv"):
        a = _strip_timestamps((out1 / name).read_text())
        b = _strip_timestamps((out2 / name).read_text())
        assert a == b


def test_verify_bad_profile_path(tmp_path):
    code = main(["verify", "--profile", str(tmp_path / "nope.json"),
                 "--out", str(tmp_path)])
    assert code == 2


def test_verify_json_format(built, tmp_path):
    code = main(["verify", "--profile", str(built / "profile.json"),
                 "--out", str(tmp_path), "--grid", "256", "--format", "json"])
    assert code == 0
    reports = json.loads((tmp_path / "verification.json").read_text())
    assert len(reports) == 5
    assert all(rep["passed"] for rep in reports)


def test_collapse_table(tmp_path, capsys):
    code = main(["collapse", "--out", str(tmp_path), "--eps", "1,0.5",
                 "--n", "150", "--seed", "3"])
    assert code == 0
    out = capsys.readouterr().out
    assert "gh_bound column" in out
    lines = (tmp_path / "collapse.csv").read_text().splitlines()
    assert lines[1] == "eps,gh_bound,diameter"
    assert len(lines) == 4


def test_collapse_single_eps(tmp_path):
    code = main(["collapse", "--out", str(tmp_path), "--eps", "1",
                 "--n", "120"])
    assert code == 0
    assert len((tmp_path / "collapse.csv").read_text().splitlines()) == 3


def test_collapse_empty_eps(tmp_path):
    code = main(["collapse", "--out", str(tmp_path), "--eps", ","])
    assert code == 2


def test_collapse_deterministic(tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    os.mkdir(out1)
    os.mkdir(out2)
    for out in (out1, out2):
        assert main(["collapse", "--out", str(out), "--eps", "1,0.5",
                     "--n", "120", "--seed", "9"]) == 0
    a = _strip_timestamps((out1 / "collapse.csv").read_text())
    b = _strip_timestamps((out2 / "collapse.csv").read_text())
    assert a == b


def test_obstruction_default(capsys):
    assert main(["obstruction"]) == 0
    out = capsys.readouterr().out
    assert "7/4 < 9/4: contradiction reproduced" in out
    assert "BinaryIcosahedral" in out


def test_obstruction_large_chi(capsys):
    assert main(["obstruction", "--chi", "10", "--group", "Q8"]) == 0
    assert "consistent" in capsys.readouterr().out


def test_obstruction_from_betti(capsys):
    assert main(["obstruction", "--b3", "0", "--group", "Q8"]) == 0
    assert "contradiction" in capsys.readouterr().out


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
