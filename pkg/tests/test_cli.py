import csv
import subprocess
import sys

import numpy as np
import pytest

from fourier_bilateral import gaussian_range_samples, read_pgm, write_pgm
from fourier_bilateral.cli import main
from fourier_bilateral.kernels import save_tabulated_kernel


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_optimize_reference_case(capsys, tmp_path):
    surf = tmp_path / "surface.csv"
    code, out, err = run(capsys, "optimize", "--sigma", "50", "--eps", "0.1",
                         "--dump-surface", str(surf))
    assert code == 0
    assert "K* = 4\n" in out and "T* = 203\n" in out
    assert "[time] fit:" in err
    rows = list(csv.reader(surf.open()))
    assert rows[0] == ["K", "T", "E"]
    assert len(rows) - 1 == 4 * 2550
    best = min((r for r in rows[1:] if r[0] == "4"), key=lambda r: float(r[2]))
    assert best[1] == "203"


def test_optimize_flat_table_kernel(capsys, tmp_path):
    path = tmp_path / "flat.txt"
    save_tabulated_kernel(path, np.ones(511))
    code, out, _ = run(capsys, "optimize", "--kernel", f"table:{path}", "--eps", "1e-6")
    assert code == 0 and "K* = 1\n" in out


def test_optimize_unreachable_exits_nonzero(capsys):
    code, out, err = run(capsys, "optimize", "--sigma", "30", "--eps", "1e-6", "--tmax", "3")
    assert code == 1
    assert "error:" in err
    assert "K* =" in out


def test_optimize_requires_sigma(capsys):
    code, _, err = run(capsys, "optimize", "--eps", "0.1")
    assert code == 1 and "--sigma" in err


def test_lut_round_trip(capsys, tmp_path):
    lut = tmp_path / "t.lut"
    code, _, _ = run(capsys, "build-lut", "--sigmas", "40,60", "--epsilons", "1e-1 1e-2",
                     "--out", str(lut))
    assert code == 0 and lut.exists()
    code, out, _ = run(capsys, "query-lut", "--lut", str(lut), "--sigma", "50", "--eps", "0.03")
    assert code == 0 and out.startswith("K=")
    code, _, err = run(capsys, "query-lut", "--lut", str(lut), "--sigma", "90", "--eps", "0.03")
    assert code == 1 and "outside" in err


def test_missing_lut_file(capsys, tmp_path):
    code, _, err = run(capsys, "query-lut", "--lut", str(tmp_path / "nope"), "--sigma", "50",
                       "--eps", "0.1")
    assert code == 1 and err.startswith("error:")


def test_filter_constant_image(capsys, tmp_path):
    src, dst = tmp_path / "c.pgm", tmp_path / "o.pgm"
    write_pgm(np.full((20, 30), 77.0), src)
    code, _, err = run(capsys, "filter", "--in", str(src), "--out", str(dst), "--theta", "2",
                       "--sigma", "30", "--eps", "0.1")
    assert code == 0
    np.testing.assert_array_equal(read_pgm(dst), 77.0)
    assert "convolutions=" in err


def test_filter_fast_close_to_brute(capsys, tmp_path):
    outs = {}
    for method in ("brute", "fast"):
        dst = tmp_path / f"{method}.pgm"
        extra = [] if method == "brute" else ["--eps", "0.01"]
        code, _, _ = run(capsys, "filter", "--in", "synthetic:48x40", "--seed", "3",
                         "--out", str(dst), "--theta", "2", "--sigma", "30",
                         "--method", method, *extra)
        assert code == 0
        outs[method] = read_pgm(dst)
    mse = np.mean((outs["brute"] - outs["fast"]) ** 2)
    assert mse == 0 or 10 * np.log10(255 ** 2 / mse) >= 40


def test_compare_fbf_is_worse_than_optimized(capsys):
    rows = {}
    for method in ("fast", "fbf"):
        code, out, _ = run(capsys, "compare", "--in", "synthetic:40x40", "--theta", "2",
                           "--sigma", "40", "--K", "4", "--method", method)
        assert code == 0
        header, row = out.strip().splitlines()
        rows[method] = dict(zip(header.split(","), row.split(",")))
    assert float(rows["fast"]["psnr_db"]) > float(rows["fbf"]["psnr_db"])


def test_compare_report(capsys, tmp_path):
    rep = tmp_path / "r.csv"
    code, out, _ = run(capsys, "compare", "--in", "random:24x24", "--theta", "1",
                       "--sigma", "30", "--eps", "0.1", "--report", str(rep))
    assert code == 0
    lines = rep.read_text().splitlines()
    assert lines == out.strip().splitlines()
    assert lines[0] == "mse,psnr_db,max_abs_err,prop1_bound,bound_satisfied"
    assert lines[1].endswith(",true")


def test_threads_give_identical_files(capsys, tmp_path):
    blobs = []
    for n in ("1", "3"):
        dst = tmp_path / f"t{n}.pgm"
        code, _, _ = run(capsys, "filter", "--in", "random:40x32", "--out", str(dst),
                         "--theta", "3", "--sigma", "20", "--eps", "1e-3", "--threads", n)
        assert code == 0
        blobs.append(dst.read_bytes())
    assert blobs[0] == blobs[1]


@pytest.mark.parametrize("argv", [
    ["filter", "--in", "random:8x8", "--out", "x.pgm", "--theta", "1", "--sigma", "30",
     "--T", "100", "--eps", "0.1"],
    ["filter", "--in", "random:8x8", "--out", "x.pgm", "--theta", "1", "--sigma", "30"],
    ["filter", "--in", "random:8x8", "--out", "x.pgm", "--theta", "1", "--sigma", "30",
     "--eps", "0.1", "--K", "3"],
])
def test_argument_errors(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_unsupported_image(capsys, tmp_path):
    src = tmp_path / "a.pgm"
    src.write_bytes(b"P2\n1 1\n255\n0\n")
    code, _, err = run(capsys, "filter", "--in", str(src), "--out", str(tmp_path / "o.pgm"),
                       "--theta", "1", "--sigma", "30", "--eps", "0.1")
    assert code == 1 and "P5" in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "fourier_bilateral", "query-lut", "--help"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and "--sigma" in res.stdout
