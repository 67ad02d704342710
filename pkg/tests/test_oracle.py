from __future__ import annotations

import random

import pytest

from conftest import KEYED_SUM_A, KEYED_SUM_C, KEYED_SUM_SRC, MATMUL_SRC, dense
from loop2bulk.errors import IndexUnset
from loop2bulk.frontend import parse_program
from loop2bulk.oracle import compare_states, eval_program


def test_keyed_sum_example():
    assert sorted(eval_program(parse_program(KEYED_SUM_SRC), {"A": KEYED_SUM_A})["C"]) == KEYED_SUM_C


def test_keyed_sum_strict_mode_reports_unset_index():
    with pytest.raises(IndexUnset):
        eval_program(parse_program(KEYED_SUM_SRC), {"A": KEYED_SUM_A}, strict=True)


def test_empty_range_runs_no_iterations():
    p = parse_program("var s: Int = 5; for i = 0, -1 do s += i;")
    assert eval_program(p, {})["s"] == 5


def test_inputs_are_not_mutated():
    inputs = {"A": list(KEYED_SUM_A)}
    eval_program(parse_program(KEYED_SUM_SRC), inputs)
    assert inputs == {"A": KEYED_SUM_A}


def test_matmul_against_hand_product():
    rng = random.Random(4)
    a = [[rng.uniform(-1, 1) for _ in range(3)] for _ in range(3)]
    b = [[rng.uniform(-1, 1) for _ in range(3)] for _ in range(3)]
    prod = [[sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3)] for i in range(3)]
    out = eval_program(parse_program(MATMUL_SRC), {"M": dense(a), "N": dense(b), "d": 3})
    assert compare_states({"R": out["R"]}, {"R": dense(prod)}).ok


def test_while_loop():
    p = parse_program("var x: Int = 1; while (x < 100) x := x * 3;")
    assert eval_program(p, {})["x"] == 243


# ---------------------------------------------------------------- state comparison

def test_compare_reports_key_difference():
    r = compare_states({"V": [(1, 1.0), (2, 2.0)]}, {"V": [(1, 1.0), (2, 2.5)]})
    assert not r.ok
    assert "key 2: 2.0 vs 2.5" in r.render()


def test_compare_missing_key_and_variable():
    r = compare_states({"V": [(1, 1)], "x": 3}, {"V": [(1, 1), (2, 2)]})
    assert not r.ok
    text = r.render()
    assert "<absent>" in text and "only in first state" in text


def test_compare_bag_order_irrelevant():
    assert compare_states({"V": [(2, "b"), (1, "a")]}, {"V": [(1, "a"), (2, "b")]}).ok


def test_compare_tolerance():
    assert compare_states({"x": 1.0}, {"x": 1.0 + 1e-12}).ok
    assert not compare_states({"x": 1.0}, {"x": 1.001}).ok
    assert compare_states({"x": 1.0}, {"x": 1.001}, rel_tol=1e-2).ok
    assert compare_states({"x": 0.0}, {"x": 1e-13}).ok  # absolute floor


def test_compare_restricted_names():
    assert compare_states({"x": 1, "t": 0}, {"x": 1, "t": 9}, names=["x"]).ok
