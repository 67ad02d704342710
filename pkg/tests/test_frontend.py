from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import KEYED_SUM_SRC, MATMUL_SRC
from loop2bulk.corpus import BENCHMARKS, program_text
from loop2bulk.errors import LexError, ParseError, ScopeError
from loop2bulk.frontend import ast as A
from loop2bulk.frontend import parse_expr, parse_program, tokenize, unparse, unparse_expr


def kinds(text):
    return [t.kind for t in tokenize(text)]


def test_tokenize_loop_header():
    assert kinds("for i = 0, 9 do") == ["FOR", "IDENT", "EQ", "INT", "COMMA", "INT", "DO"]


def test_tokenize_empty():
    assert tokenize("") == []


def test_tokenize_incremental_update():
    assert "PLUSEQ" in kinds("C[A[i].K] += A[i].V")


def test_tokenize_drops_comments_and_whitespace():
    assert kinds("x # a comment\n  := 1") == ["IDENT", "ASSIGN", "INT"]


def test_lex_error_position():
    with pytest.raises(LexError) as e:
        tokenize("x := 1;\n  y := $")
    assert (e.value.line, e.value.col) == (2, 8)


def test_parse_keyed_sum_loop():
    p = parse_program(KEYED_SUM_SRC)
    loop = p.body[-1]
    assert isinstance(loop, A.ForRange) and loop.index == "i"
    ai = A.Index("A", (A.Var("i"),))
    assert loop.body == A.IncrUpdate(A.Index("C", (A.Proj(ai, "K"),)), "+", A.Proj(ai, "V"))


def test_parse_matmul_nesting():
    loop = parse_program(MATMUL_SRC).body[-1]
    inner = loop.body
    assert isinstance(inner, A.ForRange)
    assert isinstance(inner.body, A.Block)
    first, second = inner.body.stmts
    assert isinstance(first, A.Assign)
    assert isinstance(second, A.ForRange) and isinstance(second.body, A.IncrUpdate)


def test_parse_single_declaration():
    p = parse_program("var x: Double = 0.0;")
    assert len(p.body) == 1 and isinstance(p.body[0], A.VarDecl)
    assert p.types == {"x": A.DOUBLE}


def test_duplicate_loop_indexes_are_renamed():
    p = parse_program("input V: vector[Int]; var s: Int = 0;"
                      "for i = 0, 3 do s += V[i]; for i = 0, 3 do s += V[i];")
    loops = [s for s in A.walk_stmts(p.body) if isinstance(s, A.ForRange)]
    assert len({l.index for l in loops}) == 2


@pytest.mark.parametrize("src, err", [
    ("var x: Int = 0; x := ;", ParseError),
    ("x := 1;", ScopeError),
    ("input n: Int; for i = 0, n do var y: Int = 1;", ScopeError),
    ("input M: matrix[Int]; var x: Int = M[1];", ScopeError),
])
def test_parse_errors(src, err):
    with pytest.raises(err):
        parse_program(src)


def test_unparse_empty_program():
    assert unparse(parse_program("")) == ""


def test_block_prints_with_semicolons():
    p = parse_program("var a: Int = 0; var b: Int = 0; input n: Int;"
                      "for i = 0, n do { a += i; b += i; };")
    text = unparse(p)
    assert "a += i;" in text and "b += i;" in text
    assert parse_program(text) == p


@pytest.mark.parametrize("name", BENCHMARKS)
def test_corpus_round_trip(name):
    p = parse_program(program_text(name))
    assert parse_program(unparse(p)) == p


@pytest.mark.parametrize("name", BENCHMARKS)
def test_corpus_indexes_distinct_and_roots_declared(name):
    p = parse_program(program_text(name))
    indexes = [s.index if isinstance(s, A.ForRange) else s.var
               for s in A.walk_stmts(p.body) if isinstance(s, (A.ForRange, A.ForIn))]
    assert len(indexes) == len(set(indexes))
    for s in A.walk_stmts(p.body):
        if isinstance(s, (A.Assign, A.IncrUpdate)):
            assert A.dest_root(s.dest) in p.types


# random expressions survive printing and re-parsing

names = st.sampled_from(["x", "y", "n"])
leaves = st.one_of(
    names.map(A.Var),
    st.integers(0, 1000).map(A.Const),
    st.sampled_from([True, False]).map(A.Const),
    st.floats(0, 100, allow_nan=False).map(A.Const),
    st.text("abc ", max_size=4).map(A.Const),
)


def _extend(children):
    return st.one_of(
        st.builds(A.BinOp, st.sampled_from(["+", "-", "*", "/", "<", "==", "&&", "||", "%"]),
                  children, children),
        st.builds(lambda a, i: A.Index(a, (i,)), st.sampled_from(["V", "W"]), children),
        st.builds(lambda b: A.Proj(b, "K"), children),
        st.builds(lambda xs: A.TupleExpr(tuple(xs)), st.lists(children, min_size=2, max_size=3)),
        # the parser folds a minus sign into a numeric literal
        st.builds(A.UnOp, st.just("-"), children.filter(
            lambda c: not (isinstance(c, A.Const) and type(c.value) in (int, float)))),
    )


exprs = st.recursive(leaves, _extend, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(exprs)
def test_expression_round_trip(e):
    assert parse_expr(unparse_expr(e)) == e
