"""Deterministic input generators for the twelve benchmark programs."""

from __future__ import annotations

import random
import string
from dataclasses import dataclass, field, replace
from importlib import resources

from ..frontend import parse_program
from ..frontend.ast import SourceProgram
from ..values import Record

BENCHMARKS = (
    "conditional-sum", "equal", "string-match", "word-count", "histogram",
    "linear-regression", "group-by", "matrix-add", "matrix-multiply", "pagerank",
    "kmeans", "matrix-factorization",
)

# sizes used by the differential suite
SMALL = {
    "conditional-sum": {"n": 2000},
    "equal": {"n": 2000},
    "string-match": {"n": 2000},
    "word-count": {"n": 2000},
    "histogram": {"n": 2000},
    "linear-regression": {"n": 2000},
    "group-by": {"n": 2000},
    "matrix-add": {"n": 24},
    "matrix-multiply": {"n": 16},
    "pagerank": {"n": 60, "num_steps": 1},
    "kmeans": {"n": 400, "num_steps": 1},
    "matrix-factorization": {"n": 20, "num_steps": 1},
}

# default sizes for bench and gen-data without --small
MEDIUM = {
    "conditional-sum": {"n": 10000},
    "equal": {"n": 10000},
    "string-match": {"n": 10000},
    "word-count": {"n": 10000},
    "histogram": {"n": 10000},
    "linear-regression": {"n": 10000},
    "group-by": {"n": 10000},
    "matrix-add": {"n": 64},
    "matrix-multiply": {"n": 40},
    "pagerank": {"n": 300, "num_steps": 1},
    "kmeans": {"n": 2000, "num_steps": 1},
    "matrix-factorization": {"n": 60, "num_steps": 1},
}


@dataclass(frozen=True)
class BenchmarkSpec:
    name: str
    size: dict = field(default_factory=dict)
    seed: int = 0
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.name not in BENCHMARKS:
            raise ValueError(f"unknown benchmark {self.name!r}; expected one of {', '.join(BENCHMARKS)}")

    @classmethod
    def small(cls, name: str, seed: int = 0, **overrides) -> BenchmarkSpec:
        return cls(name, {**SMALL[name], **overrides}, seed)

    def param(self, key: str, default=None):
        return self.size.get(key, SMALL[self.name].get(key, default))

    def with_seed(self, seed: int) -> BenchmarkSpec:
        return replace(self, seed=seed)


def program_text(name: str) -> str:
    fname = name.replace("-", "_") + ".dbl"
    return resources.files(__package__).joinpath(fname).read_text()


def load_program(name: str) -> SourceProgram:
    return parse_program(program_text(name))


# ---------------------------------------------------------------- generators

def _vector(values) -> list:
    return list(enumerate(values))


def _words(rng: random.Random, n: int, vocab_size: int = 1000) -> list[str]:
    vocab = sorted({"".join(rng.choices(string.ascii_lowercase, k=4)) for _ in range(vocab_size * 2)})
    vocab = vocab[:vocab_size]
    return [rng.choice(vocab) for _ in range(n)]


def _dense(rng: random.Random, rows: int, cols: int, lo=0.0, hi=10.0) -> list:
    cells = [((i, j), rng.uniform(lo, hi)) for i in range(rows) for j in range(cols)]
    rng.shuffle(cells)  # all elements present, in random order
    return cells


def _conditional_sum(rng, spec):
    n = spec.param("n")
    return {"V": _vector(rng.uniform(0.0, 200.0) for _ in range(n))}


def _equal(rng, spec):
    n = spec.param("n")
    words = _words(rng, n)
    if spec.seed % 3 == 0:
        words = [words[0]] * n  # exercise the true outcome too
    return {"V": _vector(words), "x": words[0]}


def _string_match(rng, spec):
    words = _words(rng, spec.param("n"))
    if spec.seed % 2 == 0:
        words[rng.randrange(len(words))] = rng.choice(["key1", "key2", "key3"])
    return {"words": _vector(words), "key1": "key1", "key2": "key2", "key3": "key3"}


def _word_count(rng, spec):
    return {"words": _vector(_words(rng, spec.param("n"), max(1, spec.param("n") // 10)))}


def _histogram(rng, spec):
    px = [Record({"red": rng.randrange(256), "green": rng.randrange(256), "blue": rng.randrange(256)})
          for _ in range(spec.param("n"))]
    return {"P": _vector(px)}


def _linear_regression(rng, spec):
    n = spec.param("n")
    pts = []
    for _ in range(n):
        x, dx = rng.uniform(0.0, 1000.0), rng.uniform(0.0, 10.0)
        pts.append((x + dx, x - dx))
    return {"P": _vector(pts), "n": n}


def _group_by(rng, spec):
    n = spec.param("n")
    keys = max(1, n // 10)  # about ten duplicates per key
    recs = [Record({"K": rng.randrange(keys), "A": rng.uniform(0.0, 10.0)}) for _ in range(n)]
    return {"V": _vector(recs)}


def _matrix_add(rng, spec):
    n = spec.param("n")
    return {"M": _dense(rng, n, n), "N": _dense(rng, n, n), "n": n, "mm": n}


def _matrix_multiply(rng, spec):
    n = spec.param("n")
    return {"M": _dense(rng, n, n), "N": _dense(rng, n, n), "n": n, "mm": n}


def _graph(rng: random.Random, vertices: int, edges: int) -> set:
    """Preferential attachment: targets are drawn in proportion to their in-degree plus one."""
    out: set = set()
    weights = [1] * (vertices + 1)
    weights[0] = 0
    nodes = list(range(vertices + 1))
    attempts = 0
    while len(out) < edges and attempts < edges * 20:
        attempts += 1
        src = rng.randint(1, vertices)
        dst = rng.choices(nodes, weights)[0]
        if src != dst and (src, dst) not in out:
            out.add((src, dst))
            weights[dst] += 1
    return out


def _pagerank(rng, spec):
    v = spec.param("n")
    edges = sorted(_graph(rng, v, 10 * v))
    rng.shuffle(edges)
    return {"E": [(e, True) for e in edges], "vertices": v, "num_steps": spec.param("num_steps", 1)}


def _kmeans(rng, spec):
    n = spec.param("n")
    pts = []
    for _ in range(n):
        i, j = rng.randrange(10), rng.randrange(10)
        pts.append((i * 2 + 1 + rng.random(), j * 2 + 1 + rng.random()))
    cents = [(i * 2 + 1.2, j * 2 + 1.2) for i in range(10) for j in range(10)]
    return {"P": _vector(pts), "C": _vector(cents), "N": n, "K": len(cents),
            "num_steps": spec.param("num_steps", 1)}


def _matrix_factorization(rng, spec):
    n, l = spec.param("n"), spec.param("l", 2)
    cells = [(i, j) for i in range(n) for j in range(n)]
    picked = rng.sample(cells, max(1, len(cells) // 10))
    R = [(c, float(rng.randint(1, 5))) for c in picked]
    P = [((i, k), rng.random()) for i in range(n) for k in range(l)]
    Q = [((k, j), rng.random()) for k in range(l) for j in range(n)]
    return {"R": R, "Pp": P, "Qp": Q, "n": n, "m": n, "l": l, "a": 0.002, "b": 0.02,
            "num_steps": spec.param("num_steps", 1)}


_GENERATORS = {
    "conditional-sum": _conditional_sum, "equal": _equal, "string-match": _string_match,
    "word-count": _word_count, "histogram": _histogram, "linear-regression": _linear_regression,
    "group-by": _group_by, "matrix-add": _matrix_add, "matrix-multiply": _matrix_multiply,
    "pagerank": _pagerank, "kmeans": _kmeans, "matrix-factorization": _matrix_factorization,
}


def gen_data(spec: BenchmarkSpec) -> dict:
    """Program inputs for ``spec``; identical for identical specs."""
    rng = random.Random(f"{spec.name}/{spec.seed}")
    return _GENERATORS[spec.name](rng, spec)
