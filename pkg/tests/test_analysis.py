from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loop2bulk.analysis import (AffineExpr, access_sets, affine_form, check_parallelizable,
                                check_program, distribute_loops, is_affine_dest, overlap)
from loop2bulk.corpus import BENCHMARKS, BenchmarkSpec, gen_data, program_text
from loop2bulk.errors import NotAffine
from loop2bulk.frontend import ast as A
from loop2bulk.frontend import parse_expr, parse_program, parse_stmt
from loop2bulk.oracle import compare_states, eval_program


def d(text):
    return parse_expr(text)


def verdict(text):
    return check_parallelizable(parse_stmt(text))


# ---------------------------------------------------------------- access sets

def test_access_sets_incremental_update():
    loop = parse_stmt("for i = 0, 9 do V[W[i]] += n*C[i]*C[i+1];")
    acc = access_sets(loop)
    assert acc.dests("aggregators") == {d("V[W[i]]")}
    assert acc.dests("readers") == {d("W[i]"), d("n"), d("C[i]"), d("C[i+1]")}
    assert acc.dests("writers") == set()


def test_access_sets_constant_assignment():
    acc = access_sets(parse_stmt("x := 1;"))
    assert acc.dests("writers") == {d("x")}
    assert acc.dests("readers") == set() and acc.dests("aggregators") == set()


def test_access_sets_block():
    acc = access_sets(parse_stmt("for i = 0, 9 do { V[i] := W[i]; s += V[i]; };"))
    assert acc.dests("writers") == {d("V[i]")}
    assert acc.dests("readers") == {d("W[i]"), d("V[i]")}
    assert acc.dests("aggregators") == {d("s")}


def test_access_sets_context_is_enclosing_loops():
    acc = access_sets(parse_stmt("for i = 0, 9 do for j = 0, 9 do M[i,j] := 0;"))
    (w,) = acc.writers
    assert w.context == ("i", "j")


def test_access_sets_compositional():
    a = parse_stmt("V[i] := W[i];")
    b = parse_stmt("s += V[i+1];")
    both = access_sets(A.Block((a, b)), bound={"i"})
    sa, sb = access_sets(a, bound={"i"}), access_sets(b, bound={"i"})
    for which in ("readers", "writers", "aggregators"):
        assert both.dests(which) == sa.dests(which) | sb.dests(which)


# ---------------------------------------------------------------- overlap

@pytest.mark.parametrize("a, b, expected", [
    ("V[i]", "V[i-1]", True),
    ("V[i]", "W[i]", False),
    ("r.A", "r.A", True),
    ("r.A", "r.B", False),
    ("x", "x", True),
    ("V[i].K", "V[j]", True),
])
def test_overlap(a, b, expected):
    assert overlap(d(a), d(b)) is expected
    assert overlap(d(b), d(a)) is expected


# ---------------------------------------------------------------- affine forms

def test_affine_form_examples():
    assert affine_form(d("i-1"), {"i"}) == AffineExpr(-1, (("i", 1),))
    assert affine_form(d("42"), set()) == AffineExpr(42)
    assert affine_form(d("i*j"), {"i", "j"}) is None
    assert affine_form(d("2*i+1"), {"i"}) == AffineExpr(1, (("i", 2),))
    assert affine_form(d("n+i"), {"i"}) is None  # n is not a loop index


terms = st.recursive(
    st.one_of(st.integers(-5, 5).map(A.Const), st.sampled_from(["i", "j"]).map(A.Var)),
    lambda c: st.builds(A.BinOp, st.sampled_from(["+", "-", "*"]), c, c),
    max_leaves=8)


@settings(max_examples=300, deadline=None)
@given(terms, st.integers(-100, 100), st.integers(-100, 100))
def test_affine_form_agrees_with_evaluation(e, i, j):
    a = affine_form(e, {"i", "j"})
    if a is None:
        return

    def ev(x):
        if isinstance(x, A.Const):
            return x.value
        if isinstance(x, A.Var):
            return {"i": i, "j": j}[x.name]
        l, r = ev(x.left), ev(x.right)
        return l + r if x.op == "+" else l - r if x.op == "-" else l * r

    assert a.evaluate({"i": i, "j": j}) == ev(e)
    assert all(c != 0 for _, c in a.terms)


def test_is_affine_dest():
    assert is_affine_dest(d("V[i]"), ["i"])
    assert not is_affine_dest(d("pq"), ["i", "j"])
    assert not is_affine_dest(d("M[i,j]"), ["i", "j", "k"])
    assert is_affine_dest(d("n"), [])
    assert is_affine_dest(d("V[i].K"), ["i"])


# ---------------------------------------------------------------- parallelizability verdicts

def test_verdict_shifted_read_rejected():
    v = verdict("for i = 1, 9 do V[i] := V[i-1];")
    assert not v.accepted and "R2" in v.rules


def test_verdict_group_by_increment_accepted():
    assert verdict("for i = 0, 9 do C[V[i].K] += V[i].D;").accepted


def test_verdict_exception_b_pair():
    assert verdict("for i = 0, 9 do { for j = 0, 9 do V[i] += 1; W[i] := V[i]; };").accepted
    v = verdict("for i = 0, 9 do { for j = 0, 9 do { V[i] += 1; M[i,j] := V[i]; }; W[i] := V[i]; };")
    assert not v.accepted and v.rules == {"R2b"}


def test_verdict_scalar_temporary_rejected():
    v = verdict("for i = 0, 9 do { n := V[i]; W[i] := n + 1; };")
    assert not v.accepted and "R1" in v.rules


def scalar_factorization() -> str:
    return (program_text("matrix-factorization")
            .replace("pq[i,j]", "pq").replace("error[i,j]", "error")
            .replace("var pq: matrix[Double] = matrix()", "var pq: Double = 0.0")
            .replace("var error: matrix[Double] = matrix()", "var error: Double = 0.0"))


def test_verdict_factorization_rejected_then_fixed():
    rejected = [dg for _, dg in check_program(parse_program(scalar_factorization()))]
    assert any(not dg.accepted for dg in rejected)
    rules = set().union(*(dg.rules for dg in rejected))
    assert {"R1", "R2b"} <= rules
    fixed = check_program(parse_program(program_text("matrix-factorization")))
    assert fixed and all(dg.accepted for _, dg in fixed)


def test_render_format():
    v = verdict("for i = 1, 9 do V[i] := V[i-1];")
    line = v.render().splitlines()[0]
    assert line.startswith("RULE R2 at ") and ":" in line.split(" at ")[1]


@pytest.mark.parametrize("name", BENCHMARKS)
def test_corpus_accepted(name):
    for _, dg in check_program(parse_program(program_text(name))):
        assert dg.accepted, dg.render()


# ---------------------------------------------------------------- loop distribution

def test_distribute_block():
    out = distribute_loops(parse_stmt("for i = 0, 9 do { V[i] := W[i]; U[i] := W[i]; };"))
    assert isinstance(out, A.Block) and len(out.stmts) == 2
    assert all(isinstance(s, A.ForRange) and s.index == "i" for s in out.stmts)


def test_distribute_singleton_unchanged():
    s = parse_stmt("for i = 0, 9 do V[i] := W[i];")
    assert distribute_loops(s) == s


def test_distribute_nested():
    out = distribute_loops(parse_stmt("for i = 0, 9 do for j = 0, 9 do { M[i,j] := 0; N[i,j] := 1; };"))
    assert len(out.stmts) == 2
    for s in out.stmts:
        assert isinstance(s, A.ForRange) and isinstance(s.body, A.ForRange)
        assert isinstance(s.body.body, A.Assign)


def test_distribute_leaves_while_alone():
    s = parse_stmt("for i = 0, 9 do { while (x < 3) x += 1; V[i] := x; };")
    assert distribute_loops(s) == s


def test_distribute_rejected_raises():
    with pytest.raises(NotAffine):
        distribute_loops(parse_stmt("for i = 1, 9 do V[i] := V[i-1];"))


@pytest.mark.parametrize("name", BENCHMARKS)
def test_distribution_preserves_oracle_state(name):
    p = parse_program(program_text(name))
    q = distribute_loops(p)
    for seed in range(2):
        data = gen_data(BenchmarkSpec.small(name, seed))
        assert compare_states(eval_program(p, data), eval_program(q, data)).ok


def test_reverse_iteration_order_shadow():
    rng = random.Random(3)
    for name in ("word-count", "histogram", "matrix-multiply", "group-by"):
        p = parse_program(program_text(name))
        data = gen_data(BenchmarkSpec.small(name, rng.randint(0, 99)))
        assert compare_states(eval_program(p, data), eval_program(p, data, reverse=True)).ok
