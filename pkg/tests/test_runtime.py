from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import MATMUL_SRC, dense
from loop2bulk.comp import ir as C
from loop2bulk.errors import NonSingletonScalar
from loop2bulk.frontend import parse_program
from loop2bulk.runtime import (EngineConfig, execute_target, group_by, join, merge,
                               reduce_by_key)
from loop2bulk.translator import translate

CFGS = [EngineConfig(partitions=p, workers=w) for p in (1, 3, 8) for w in (1, 4)]


@pytest.mark.parametrize("cfg", CFGS)
def test_merge_right_wins(cfg):
    out = merge([(1, "a"), (2, "b")], [(2, "c"), (3, "d")], cfg)
    assert sorted(out) == [(1, "a"), (2, "c"), (3, "d")]


@pytest.mark.parametrize("cfg", CFGS)
def test_group_by(cfg):
    out = group_by([(1, "a"), (2, "b"), (1, "c")], cfg)
    assert sorted((k, sorted(v)) for k, v in out) == [(1, ["a", "c"]), (2, ["b"])]


@pytest.mark.parametrize("cfg", CFGS)
def test_join(cfg):
    out = join([(1, "a"), (2, "b"), (1, "c")], [(1, "x"), (3, "y")], cfg)
    assert sorted(out) == [(1, ("a", "x")), (1, ("c", "x"))]


def test_reduce_by_key_matches_group_fold():
    rng = random.Random(7)
    for trial in range(500):
        op = rng.choice(["+", "*", "min", "max"])
        xs = [(rng.randrange(6), rng.randint(-9, 9)) for _ in range(rng.randrange(30))]
        cfg = EngineConfig(partitions=rng.randint(1, 8))
        fold = {"+": sum, "*": math.prod, "min": min, "max": max}[op]
        groups: dict = {}
        for k, v in xs:
            groups.setdefault(k, []).append(v)
        expected = sorted((k, fold(vs)) for k, vs in groups.items())
        assert sorted(reduce_by_key(op, xs, cfg)) == expected, (trial, op, xs)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 5), st.integers(-50, 50))), st.integers(1, 8))
def test_reduce_by_key_partition_independent(xs, parts):
    assert sorted(reduce_by_key("+", xs, EngineConfig(partitions=parts))) == \
        sorted(reduce_by_key("+", xs, EngineConfig(partitions=1)))


@pytest.mark.parametrize("cfg", CFGS)
def test_matmul_two_by_two(cfg):
    code = translate(parse_program(MATMUL_SRC)).code
    env = {"M": dense([[1.0, 2.0], [3.0, 4.0]]), "N": dense([[5.0, 6.0], [7.0, 8.0]]), "d": 2}
    out = execute_target(code, env, cfg)
    assert sorted(out["R"]) == [((0, 0), 19.0), ((0, 1), 22.0), ((1, 0), 43.0), ((1, 1), 50.0)]


def test_scalar_assignment():
    out = execute_target([C.TAssign("n", C.BagLit((C.CConst(7),)), True)], {})
    assert out["n"] == 7


def test_scalar_assignment_needs_singleton():
    with pytest.raises(NonSingletonScalar):
        execute_target([C.TAssign("n", C.BagLit((C.CConst(1), C.CConst(2))), True)], {})


def test_while_counter():
    code = translate(parse_program("var x: Int = 0; while (x < 5) x += 1;")).code
    assert execute_target(code, {})["x"] == 5


def test_execute_does_not_mutate_input_env():
    env = {"d": 1, "M": [((0, 0), 2.0)], "N": [((0, 0), 3.0)]}
    execute_target(translate(parse_program(MATMUL_SRC)).code, env)
    assert "R" not in env


def test_workers_from_environment(monkeypatch):
    monkeypatch.setenv("LOOP2BULK_WORKERS", "3")
    assert EngineConfig.from_env().workers == 3
    monkeypatch.delenv("LOOP2BULK_WORKERS")
    assert EngineConfig.from_env(workers=2).workers == 2


def test_config_rejects_nonpositive():
    with pytest.raises(ValueError):
        EngineConfig(partitions=0)
