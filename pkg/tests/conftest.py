from __future__ import annotations

import logging

import pytest

from loop2bulk.corpus import BENCHMARKS, load_program
from loop2bulk.values import Record

KEYED_SUM_SRC = """
input A: vector[<K: Int, V: Int>];
var C: vector[Int] = vector();
for i = 0, 9 do
    C[A[i].K] += A[i].V;
"""

# sparse A with rows (I, K, V) = (3,3,10), (8,5,25), (5,3,13)
KEYED_SUM_A = [(3, Record({"K": 3, "V": 10})), (8, Record({"K": 5, "V": 25})),
           (5, Record({"K": 3, "V": 13}))]
KEYED_SUM_C = [(3, 23), (5, 25)]

MATMUL_SRC = """
input M: matrix[Double];
input N: matrix[Double];
input d: Int;
var R: matrix[Double] = matrix();
for i = 0, d-1 do
    for j = 0, d-1 do {
        R[i,j] := 0.0;
        for k = 0, d-1 do
            R[i,j] += M[i,k]*N[k,j];
    };
"""


def dense(rows) -> list:
    return [((i, j), v) for i, row in enumerate(rows) for j, v in enumerate(row)]


@pytest.fixture(autouse=True)
def _quiet_planner(caplog):
    caplog.set_level(logging.ERROR, logger="loop2bulk")


@pytest.fixture(scope="session")
def corpus():
    return {name: load_program(name) for name in BENCHMARKS}
