from __future__ import annotations

import pytest

import checks
from loop2bulk.corpus import BENCHMARKS


@pytest.mark.parametrize("name", BENCHMARKS)
def test_runtime_matches_oracle(name):
    assert checks.differential(name, seeds=range(3)) == []


@pytest.mark.parametrize("name", checks.ITERATIVE)
def test_several_while_rounds(name):
    assert checks.while_coverage(name) == []


@pytest.mark.parametrize("name", BENCHMARKS)
def test_result_independent_of_partitioning(name):
    assert checks.determinism(name, seed=1) == []


@pytest.mark.parametrize("name", BENCHMARKS)
def test_loop_distribution_preserves_state(name):
    assert checks.distribution_shadow(name, seeds=range(2)) == []
