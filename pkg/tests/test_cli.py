import subprocess
import sys

import pytest

from cvxhallu.cli import run


def kv(text):
    return dict(line.split("=", 1) for line in text.strip().splitlines())


@pytest.fixture
def workdir(tmp_path, faces_dir, capsys):
    hr = faces_dir / "cameraman_tight.png"
    code = run(["--quiet", "degrade", "--hr", str(hr), "--lr-out", str(tmp_path / "lr.png"),
                "--baseline-out", str(tmp_path / "up.png"), "--candidates-out", str(tmp_path / "c"),
                "--k", "3"])
    assert code == 0
    out = kv(capsys.readouterr().out)
    return tmp_path, hr, out


def test_degrade_outputs(workdir):
    tmp, _, out = workdir
    assert (tmp / "lr.png").exists() and (tmp / "up.png").exists()
    assert out["lr_width"] == "25" and out["lr_height"] == "25"
    assert len(out["candidates"].split(",")) == 3
    assert float(out["baseline_psnr_db"]) > 15


def hallu_args(tmp, cands, out_name, hr=None):
    args = ["--quiet", "hallucinate", "--lr", str(tmp / "lr.png"), "--candidates", cands,
            "--out", str(tmp / out_name), "--iters", "60", "--gamma", "1"]
    if hr:
        args += ["--hr", str(hr)]
    return args


def test_hallucinate_is_deterministic(workdir, capsys):
    tmp, hr, out = workdir
    assert run(hallu_args(tmp, out["candidates"], "a.png", hr)) == 0
    first = capsys.readouterr().out
    assert run(hallu_args(tmp, out["candidates"], "b.png", hr)) == 0
    second = capsys.readouterr().out
    assert first == second
    assert (tmp / "a.png").read_bytes() == (tmp / "b.png").read_bytes()
    keys = kv(first)
    assert keys["ch0.iterations"] == "60"
    assert {"psnr_db", "ssim", "ch0.energy_final"} <= keys.keys()


def test_quiet_stdout_is_only_key_values(workdir, capsys):
    tmp, _, out = workdir
    run(hallu_args(tmp, out["candidates"], "q.png"))
    captured = capsys.readouterr()
    for line in captured.out.strip().splitlines():
        assert "=" in line and " " not in line.split("=")[0]


def test_evaluate_identical(faces_dir, capsys):
    p = str(faces_dir / "chelsea.png")
    assert run(["evaluate", "--a", p, "--b", p]) == 0
    assert kv(capsys.readouterr().out) == {"psnr_db": "inf", "ssim": "1.000000"}


def test_unknown_flag_is_usage_error(faces_dir, capsys):
    p = str(faces_dir / "chelsea.png")
    assert run(["evaluate", "--a", p, "--b", p, "--nope"]) == 1
    assert capsys.readouterr().out == ""


def test_missing_subcommand_is_usage_error(capsys):
    assert run([]) == 1


def test_empty_candidate_list_is_usage_error(workdir):
    tmp, _, _ = workdir
    assert run(hallu_args(tmp, ",", "x.png")) == 1


def test_missing_file_is_runtime_error(tmp_path, capsys):
    code = run(["evaluate", "--a", str(tmp_path / "none.png"), "--b", str(tmp_path / "none.png")])
    assert code == 2
    assert "none.png" in capsys.readouterr().err


def test_shape_mismatch_is_runtime_error(faces_dir, workdir):
    tmp, _, _ = workdir
    assert run(["evaluate", "--a", str(tmp / "lr.png"), "--b", str(faces_dir / "cameraman.png")]) == 2


def test_scale_mismatch_is_runtime_error(workdir):
    tmp, _, out = workdir
    args = hallu_args(tmp, out["candidates"], "x.png") + ["--scale", "3"]
    assert run(args) == 2


def test_oracle_check_passes_and_fails(capsys):
    assert run(["oracle-check", "--seed", "1", "--oracle-iters", "200000"]) == 0
    vals = kv(capsys.readouterr().out)
    assert float(vals["rel_gap"]) <= 0.005
    # a barely-run reference cannot match, which must surface as exit 2
    assert run(["oracle-check", "--seed", "1", "--oracle-iters", "20"]) == 2


def test_module_entry_point(faces_dir):
    p = str(faces_dir / "chelsea.png")
    res = subprocess.run([sys.executable, "-m", "cvxhallu", "evaluate", "--a", p, "--b", p],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.splitlines()[0] == "psnr_db=inf"
