import csv
import io
import subprocess
import sys

import pytest

from hypercurveball import __version__
from hypercurveball.cli import main
from hypercurveball.datagen import read_hypergraph
from hypercurveball.core import degrees


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_banner_and_seed(capsys, monkeypatch):
    monkeypatch.setenv("HCB_SEED", "41")
    code, _, err = run(capsys, "gen", "--artificial", "1")
    assert code == 0
    first = err.splitlines()[0]
    assert first.startswith(f"# hcb {__version__} backend=") and "seed=41" in first
    assert "argv=gen --artificial 1" in first


def test_bad_seed_env(capsys, monkeypatch):
    monkeypatch.setenv("HCB_SEED", "x")
    assert run(capsys, "gen", "--artificial", "1")[0] == 1


@pytest.mark.parametrize("argv", [[], ["frobnicate"], ["sample", "--steps", "x"], ["verify", "--nodes", "1"],
                                  ["fit"], ["verify", "--nodes", "2", "--edges", "2", "--space", "q"]])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1 and "error" in err


def test_missing_file_is_data_error(capsys, tmp_path):
    assert run(capsys, "stats", "--in", str(tmp_path / "nope.txt"))[0] == 2


def test_parse_error_is_data_error(capsys, tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("a -> b -> c\n")
    code, _, err = run(capsys, "stats", "--in", str(p), "--directed")
    assert code == 2 and "line 1" in err


def test_gen_then_stats(capsys, tmp_path):
    path = tmp_path / "a1.txt"
    assert run(capsys, "gen", "--artificial", "1", "--out", str(path))[0] == 0
    code, out, _ = run(capsys, "stats", "--in", str(path))
    assert code == 0
    lines = out.splitlines()
    assert lines[1].startswith("a1,nodes,all,51,16.27,16.00,16.00,")
    assert lines[2].startswith("a1,edges,all,51,16.27,30.00,9.14")


def test_sample_preserves_degrees(capsys, tmp_path):
    src = tmp_path / "h.txt"
    src.write_text("a b\nb c\nc d\nd a\na c\n")
    out = tmp_path / "r.txt"
    assert run(capsys, "sample", "--in", str(src), "--space", "dm", "--steps", "200", "--seed", "7",
               "--out", str(out))[0] == 0
    assert degrees(read_hypergraph(out)) == degrees(read_hypergraph(src))


def test_sample_outside_space(capsys, tmp_path):
    src = tmp_path / "h.txt"
    src.write_text("a a\nb b\n")
    assert run(capsys, "sample", "--in", str(src), "--space", "m", "--steps", "5")[0] == 2


def test_reruns_are_identical(capsys, tmp_path):
    src = tmp_path / "h.txt"
    src.write_text("a b c\nb c\nc d d\na d\n")
    outs = []
    for _ in range(2):
        code, out, _ = run(capsys, "bench", "--in", str(src), "--steps", "50", "--runs", "3", "--seed", "5")
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1] and outs[0].startswith("step,mean,std,method,dataset,runs,seed")


def test_verify_two_state(capsys):
    code, out, _ = run(capsys, "verify", "--nodes", "2,2", "--edges", "2,2", "--space", "dm",
                       "--method", "trade", "--expect-uniform")
    assert code == 0
    row = rows(out)[0]
    assert row["verdict"] == "uniform" and row["n_states"] == "2"


def test_verify_directed_triangle(capsys):
    code, out, _ = run(capsys, "verify", "--directed", "--space", "", "--nodes", "1:1,1:1,1:1",
                       "--edges", "1:1,1:1,1:1", "--method", "both")
    assert code == 0
    assert [r["verdict"] for r in rows(out)] == ["uniform", "disconnected"]


def test_verify_expect_uniform_fails(capsys):
    code, out, _ = run(capsys, "verify", "--nodes", "2,2,2", "--edges", "2,2,2", "--space", "d",
                       "--expect-uniform")
    assert code == 3 and rows(out)[0]["verdict"] == "disconnected"


def test_verify_cap(capsys):
    assert run(capsys, "verify", "--nodes", "9,9", "--edges", "9,9")[0] == 2


def test_search(capsys):
    code, out, err = run(capsys, "search", "--space", "d", "--max-nodes", "3", "--max-edges", "3",
                         "--max-degree", "2", "--limit", "1", "--expect-uniform")
    assert code == 3 and len(out.splitlines()) == 2
    assert "# non-uniform verdicts: 1" in err


def test_search_clean(capsys):
    code, out, _ = run(capsys, "search", "--spaces", "dm", "m", "--max-nodes", "2", "--max-edges", "2",
                       "--max-degree", "2", "--expect-uniform")
    assert code == 0 and out.splitlines() == ["degree_seq,space,method,n_states,scc_count,max_deviation,verdict"]


def test_partitions(capsys):
    code, out, _ = run(capsys, "partitions")
    assert code == 0
    got = rows(out)
    assert len(got) == 8
    assert [r["sequential_probability"] for r in got].count("1/6") == 2


def test_fit_points(capsys, tmp_path):
    p = tmp_path / "pts.csv"
    p.write_text("f_min,mixing_time\n2,{}\n10,{}\n".format(5.46 * 2 ** 1.07, 5.46 * 10 ** 1.07))
    code, out, _ = run(capsys, "fit", "--points", str(p))
    assert code == 0
    slope, intercept, pref = map(float, out.splitlines()[1].split(","))
    assert slope == pytest.approx(1.07) and pref == pytest.approx(5.46)


def test_bench_then_fit(capsys, tmp_path):
    curves = tmp_path / "c.csv"
    assert run(capsys, "bench", "--artificial", "1", "--steps", "400", "--runs", "2", "--record-every", "20",
               "--out", str(curves))[0] == 0
    code, out, _ = run(capsys, "fit", "--curves", str(curves))
    assert code == 0
    assert [ln.split(",")[:2] for ln in out.splitlines()[1:]] == [["artificial_1", "trade"],
                                                                  ["artificial_1", "shuffle"]]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "hypercurveball", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and __version__ in res.stdout
