"""Acceptance suite: one PASS/FAIL line per criterion.

Run with `pytest tests/test_acceptance.py -s` to see the summary lines.
"""

from __future__ import annotations

import time

import pytest

import checks
from loop2bulk.corpus import BENCHMARKS

RESULTS: dict[int, tuple[bool, str]] = {}


def report(n: int, title: str, failures: list[str], extra: str = "") -> None:
    ok = not failures
    RESULTS[n] = (ok, title)
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {title}"
    if extra:
        line += f" ({extra})"
    print("\n" + line)
    for f in failures[:5]:
        print("    " + f.replace("\n", "\n    "))
    assert ok, line


def test_criterion_1_differential_soundness():
    t0 = time.perf_counter()
    failures = []
    for name in BENCHMARKS:
        failures += checks.differential(name, seeds=range(10))
    elapsed = time.perf_counter() - t0
    if elapsed >= 300:
        failures.append(f"took {elapsed:.0f}s, budget 300s")
    report(1, "12 programs x 10 seeds, runtime equals oracle", failures, f"{elapsed:.1f}s")


def test_criterion_2_checker_verdicts():
    report(2, "five verdict examples with rule IDs", checks.checker_verdicts())


def test_criterion_3_golden_ir():
    report(3, "matmul, copy loop and keyed-sum golden forms", checks.golden_ir())


def test_criterion_4_optimization_effect():
    report(4, "group-by removal and matmul plan shape", checks.optimization_effect())


def test_criterion_5_rewrite_soundness():
    failures = []
    for kind in checks.REWRITES:
        failures += checks.rewrite_soundness(kind, 500)
    report(5, "500 random instances per rewrite", failures, ", ".join(checks.REWRITES))


def test_criterion_6_determinism():
    failures = []
    for name in BENCHMARKS:
        failures += checks.determinism(name, seed=0)
    report(6, "partitions {1,2,4,8} x workers {1,4} and permuted input", failures)


def test_criterion_7_distribution_shadow():
    failures = []
    for name in BENCHMARKS:
        failures += checks.distribution_shadow(name, seeds=range(10))
    report(7, "loop distribution keeps oracle state, 10 seeds", failures)


def test_criterion_8_translation_speed():
    failures, times = checks.translation_speed(1.0)
    slowest = max(times, key=times.get)
    report(8, "translation under 1s per program", failures,
           f"slowest {slowest} {times[slowest]:.3f}s")


@pytest.fixture(scope="module", autouse=True)
def _summary():
    yield
    if RESULTS:
        print("\nacceptance summary:")
        for n in sorted(RESULTS):
            ok, title = RESULTS[n]
            print(f"  {'PASS' if ok else 'FAIL'} criterion {n}: {title}")
