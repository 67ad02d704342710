from __future__ import annotations

import pytest

from loop2bulk import cli
from loop2bulk.corpus import program_text
from test_analysis import scalar_factorization


def run(capsys, *argv):
    rc = cli.main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def write(tmp_path, text, name="prog.dbl"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_check_accepts_corpus_program(capsys):
    rc, out, _ = run(capsys, "check", "word-count")
    assert rc == 0 and "accepted" in out


def test_check_rejects_scalar_factorization(tmp_path, capsys):
    rc, out, _ = run(capsys, "check", write(tmp_path, scalar_factorization()))
    assert rc == 1
    assert "RULE R1 at" in out and "RULE R2b at" in out


def test_check_fixed_factorization(tmp_path, capsys):
    rc, out, _ = run(capsys, "check", write(tmp_path, program_text("matrix-factorization")))
    assert rc == 0 and "rejected" not in out


def test_check_empty_program_warns(tmp_path, capsys):
    rc, _, err = run(capsys, "check", write(tmp_path, ""))
    assert rc == 0 and "warning: empty program" in err


def test_translate_shows_ir_and_plan(capsys):
    rc, out, _ = run(capsys, "translate", "matrix-multiply", "--show-ir", "--show-plan")
    assert rc == 0
    assert "group by" in out or "<|" in out
    assert "JOIN" in out and "REDUCE_BY_KEY" in out


def test_gen_data_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run(capsys, "gen-data", "pagerank", "--small", "--seed", "4", "--out", str(d))[0] == 0
    files = sorted(p.name for p in a.iterdir())
    assert files and files == sorted(p.name for p in b.iterdir())
    for f in files:
        assert (a / f).read_bytes() == (b / f).read_bytes()


def test_run_from_data_dir_matches_run_seq(tmp_path, capsys):
    d = tmp_path / "data"
    run(capsys, "gen-data", "histogram", "--small", "--out", str(d))
    rc1, par, _ = run(capsys, "run", "histogram", "--data", str(d), "--partitions", "3")
    rc2, seq, _ = run(capsys, "run-seq", "histogram", "--data", str(d))
    assert rc1 == rc2 == 0 and par == seq and par


def test_compare_passes(capsys):
    rc, out, _ = run(capsys, "compare", "word-count", "--seed", "1")
    assert rc == 0 and out.strip().endswith("PASS")


def test_compare_detects_broken_runtime(monkeypatch, capsys):
    real = cli.execute_target

    def broken(code, env, cfg=None):
        state = real(code, env, cfg)
        state["C"] = [(k, v + 1) for k, v in state["C"]]
        return state

    monkeypatch.setattr(cli, "execute_target", broken)
    rc, out, _ = run(capsys, "compare", "word-count", "--seed", "1")
    assert rc == 1 and "FAIL C" in out


def test_bench_csv(capsys):
    rc, out, _ = run(capsys, "bench", "equal", "--small", "--seeds", "2")
    lines = out.strip().splitlines()
    assert rc == 0 and lines[0] == "benchmark,seed,translate_s,seq_s,par_s,result"
    assert len(lines) == 3 and all(l.endswith(",pass") for l in lines[1:])


@pytest.mark.parametrize("argv", [
    ["frobnicate"],
    ["check", "/nonexistent/prog.dbl"],
    ["run", "matrix-add", "--size", "bogus"],
    ["bench"],
])
def test_usage_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_parse_error_exit_2(tmp_path, capsys):
    rc, _, err = run(capsys, "translate", write(tmp_path, "var x: Int = ;"))
    assert rc == 2 and "error" in err


def test_rejected_translation_exit_1(tmp_path, capsys):
    src = "input W: vector[Int]; var V: vector[Int] = vector(); for i = 1, 9 do V[i] := V[i-1];"
    assert run(capsys, "translate", write(tmp_path, src))[0] == 1


def test_external_program_needs_data(tmp_path, capsys):
    src = "input W: vector[Int]; var s: Int = 0; for i = 0, 3 do s += W[i];"
    assert run(capsys, "run", write(tmp_path, src))[0] == 2
