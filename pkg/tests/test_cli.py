import subprocess
import sys

import pytest

from acdelay.lab.cli import main


def run(capsys, *argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        import io
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_encode_pathological(capsys, monkeypatch, specs_dir):
    code, out, _ = run(capsys, "encode", "--source", str(specs_dir / "ternary.txt"),
                       stdin="1 " * 40, monkeypatch=monkeypatch)
    assert code == 0 and out == "\n"


def test_encode_decode_round_trip(capsys, monkeypatch, specs_dir, tmp_path):
    spec = str(specs_dir / "half_quarter.txt")
    letters = tmp_path / "x.txt"
    letters.write_text("0 2 1 1 0 2\n")
    code, bits, _ = run(capsys, "encode", "--source", spec, "--input", str(letters), "--flush")
    assert code == 0
    code, out, _ = run(capsys, "decode", "--source", spec, "--count", "6",
                       stdin=bits, monkeypatch=monkeypatch)
    assert code == 0 and out.split() == "0 2 1 1 0 2".split()


def test_decode_rejects_garbage(capsys, monkeypatch, specs_dir):
    code, _, err = run(capsys, "decode", "--source", str(specs_dir / "ternary.txt"),
                       stdin="01x", monkeypatch=monkeypatch)
    assert code == 2 and "error" in err


def test_exact_tail(capsys, specs_dir):
    code, out, _ = run(capsys, "exact-tail", "--source", str(specs_dir / "ternary.txt"),
                       "--prefix", "1", "--dmax", "3")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "d,tail,tail_float,tail_bound"
    assert lines[3].startswith("2,5/9,")


def test_exact_tail_budget_exit_one(capsys, monkeypatch, specs_dir):
    import acdelay.lab.harness as h
    monkeypatch.setattr(h, "DEFAULT_BUDGET", 10)
    monkeypatch.setattr(h.run_exact_tail, "__defaults__", (10,))
    code, _, err = run(capsys, "exact-tail", "--source", str(specs_dir / "ternary.txt"),
                       "--prefix", "1", "--dmax", "12")
    assert code == 1 and "Monte Carlo" in err


def test_simulate_writes_csv(capsys, specs_dir, tmp_path):
    out = tmp_path / "s.csv"
    code, text, _ = run(capsys, "simulate", "--source", str(specs_dir / "ternary.txt"),
                        "--trials", "200", "--dmax", "30", "--seed", "7", "--out", str(out))
    assert code == 0 and "mean delay" in text and "D1 = " in text
    assert out.read_text().splitlines()[0] == "d,tail,tail_float,tail_bound"


def test_simulate_is_reproducible(capsys, specs_dir, tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p, w in zip(paths, ("1", "2")):
        assert run(capsys, "simulate", "--source", str(specs_dir / "ternary.txt"), "--trials", "300",
                   "--seed", "5", "--workers", w, "--out", str(p))[0] == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_bounds_alpha(capsys):
    code, out, _ = run(capsys, "bounds", "--alpha", "1/2", "--dmax", "2")
    rows = dict(line.split(",") for line in out.splitlines()[1:])
    assert code == 0 and float(rows["D2"]) == 6.625 and rows["d1"] == "4"


def test_bounds_source_includes_gallager(capsys, specs_dir):
    code, out, _ = run(capsys, "bounds", "--source", str(specs_dir / "half_quarter.txt"))
    assert code == 0 and "\nDg," in out


@pytest.mark.parametrize("argv", [
    ["bounds"],
    ["bounds", "--alpha", "0.5"],
    ["bounds", "--alpha", "3/2"],
    ["simulate", "--source", "specs/ternary.txt", "--trials", "0"],
    ["figure", "ratios", "--grid", "0:1:1"],
    ["frobnicate"],
])
def test_usage_errors_exit_two(capsys, argv):
    assert main(argv) == 2


def test_bad_spec_exit_two(capsys, tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("memoryless 2\n0.5 0.5\n")
    code, _, err = run(capsys, "encode", "--source", str(p), "--input", str(p))
    assert code == 2 and "line 2" in err


def test_missing_file_exit_one(capsys, tmp_path):
    assert main(["encode", "--source", str(tmp_path / "none.txt")]) == 1


def test_figure_and_markov_check(capsys, specs_dir, tmp_path):
    svg = tmp_path / "f.svg"
    code, out, _ = run(capsys, "figure", "ternary", "--grid", "1/10:9/10:1/10", "--svg", str(svg))
    assert code == 0 and out.startswith("p,alpha,beta,dg,dmg,d1") and svg.exists()
    code, out, _ = run(capsys, "markov-check", "--source", str(specs_dir / "sticky_chain.txt"),
                       "--dmax", "4", "--tol", "1e-10")
    assert code == 0 and "91.72" in out and "d,gamma,envelope" in out
    code, out, _ = run(capsys, "markov-check", "--source", str(specs_dir / "permutation.txt"))
    assert code == 0 and "no bound" in out


def test_module_entry_point(specs_dir):
    r = subprocess.run([sys.executable, "-m", "acdelay", "bounds", "--alpha", "1/3", "--dmax", "0"],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0 and r.stdout.startswith("quantity,value")
