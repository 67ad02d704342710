"""In-process partitioned bag engine.

A distributed bag is a list of partitions (plain lists). Narrow stages run
partition-parallel on a thread pool; wide stages (group-by, joins, co-groups)
hash-shuffle both inputs on the key first so that equal keys meet in the same
partition. Rows are immutable Python values, so workers share nothing.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable

from .. import planner as P
from ..comp.evaluate import bind_pattern, compile_expr, compile_quals
from ..errors import DuplicateKey, EmptyReduction, TypeMismatch, UnboundVariable
from ..ops import comm_op
from ..values import format_value, stable_hash

Parts = list  # list[list[Any]]


@dataclass(frozen=True)
class EngineConfig:
    workers: int = 1
    partitions: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.workers < 1 or self.partitions < 1:
            raise ValueError("workers and partitions must be positive")

    @classmethod
    def from_env(cls, workers: int | None = None, partitions: int = 4, seed: int = 0) -> EngineConfig:
        env = os.environ.get("LOOP2BULK_WORKERS")
        if env:
            workers = int(env)
        return cls(workers or 1, partitions, seed)


def _key(k):
    if isinstance(k, list):
        raise TypeMismatch(f"a bag cannot be used as a key: {format_value(k)}")
    return k


class Engine:
    def __init__(self, cfg: EngineConfig | None = None):
        self.cfg = cfg or EngineConfig()
        self.pool = ThreadPoolExecutor(self.cfg.workers) if self.cfg.workers > 1 else None

    def close(self) -> None:
        if self.pool is not None:
            self.pool.shutdown()
            self.pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    # ------------------------------------------------------------ primitives

    @property
    def n(self) -> int:
        return self.cfg.partitions

    def parallelize(self, bag) -> Parts:
        """Split a bag into contiguous chunks; the seed rotates chunk placement."""
        bag = list(bag)
        n = self.n
        size, extra = divmod(len(bag), n)
        parts: Parts = [[] for _ in range(n)]
        start = 0
        for i in range(n):
            end = start + size + (1 if i < extra else 0)
            parts[(i + self.cfg.seed) % n] = bag[start:end]
            start = end
        return parts

    @staticmethod
    def collect(parts: Parts) -> list:
        out = []
        for p in parts:
            out.extend(p)
        return out

    def map_partitions(self, fn: Callable[[list], list], *inputs: Parts) -> Parts:
        if self.pool is None or self.n == 1:
            return [fn(*args) for args in zip(*inputs)]
        return list(self.pool.map(fn, *inputs))

    def shuffle(self, parts: Parts, key: Callable[[Any], Any] = lambda r: r[0]) -> Parts:
        """All-to-all exchange: row r goes to partition hash(key(r)) mod n."""
        n, seed = self.n, self.cfg.seed

        def split(rows):
            buckets = [[] for _ in range(n)]
            for r in rows:
                buckets[stable_hash(_key(key(r)), seed) % n].append(r)
            return buckets

        buffers = self.map_partitions(split, parts)
        return [[r for b in buffers for r in b[i]] for i in range(n)]

    # ------------------------------------------------------------ bag operations

    def merge(self, x: Parts, y: Parts) -> Parts:
        def local(xs, ys):
            right: dict = {}
            for k, v in ys:
                if k in right:
                    raise DuplicateKey(f"duplicate key {format_value(k)} in right operand of merge")
                right[k] = v
            seen = set()
            out = []
            for k, v in xs:
                if k in seen:
                    raise DuplicateKey(f"duplicate key {format_value(k)} in left operand of merge")
                seen.add(k)
                if k not in right:
                    out.append((k, v))
            out.extend(ys)
            return out

        return self.map_partitions(local, self.shuffle(x), self.shuffle(y))

    def group_by(self, x: Parts) -> Parts:
        def local(rows):
            groups: dict = {}
            for k, v in rows:
                groups.setdefault(k, []).append(v)
            return list(groups.items())

        return self.map_partitions(local, self.shuffle(x))

    def reduce_by_key(self, ops, x: Parts) -> Parts:
        combine = _combiner(ops)

        def local(rows):
            acc: dict = {}
            for k, v in rows:
                if k in acc:
                    acc[k] = combine(acc[k], v)
                else:
                    acc[_key(k)] = v
            return list(acc.items())

        # partial aggregation before the shuffle, final aggregation after it
        return self.map_partitions(local, self.shuffle(self.map_partitions(local, x)))

    def join(self, x: Parts, y: Parts) -> Parts:
        def local(xs, ys):
            index: dict = {}
            for k, b in ys:
                index.setdefault(k, []).append(b)
            return [(k, (a, b)) for k, a in xs for b in index.get(k, ())]

        return self.map_partitions(local, self.shuffle(x), self.shuffle(y))

    def cross(self, x: Parts, y: Parts) -> Parts:
        right = self.collect(y)  # broadcast
        return self.map_partitions(lambda xs: [(a, b) for a in xs for b in right], x)

    def lookup(self, x: Parts, y: Parts) -> Parts:
        def local(xs, ys):
            index: dict = {}
            for r in ys:
                index.setdefault(r[0], []).append(r)
            return [(payload, list(index.get(k, ()))) for k, payload in xs]

        return self.map_partitions(local, self.shuffle(x), self.shuffle(y))

    def reduce(self, op: str, x: Parts):
        o = comm_op(op)

        def local(rows):
            return [o.reduce(rows)] if rows else []

        partials = self.collect(self.map_partitions(local, x))
        if not partials and not o.has_unit:
            raise EmptyReduction(f"{op}/ over an empty bag (no unit)")
        return o.reduce(partials)

    # ------------------------------------------------------------ plans

    def run(self, plan, env: dict) -> Parts:
        p = plan
        if isinstance(p, P.Source):
            if p.var not in env:
                raise UnboundVariable(f"unbound variable {p.var!r}")
            v = env[p.var]
            if not isinstance(v, list):
                raise TypeMismatch(f"{p.var} is not a bag: {format_value(v)}")
            return self.parallelize(v)
        if isinstance(p, P.RangeSrc):
            lo, hi = compile_expr(p.lo)(env), compile_expr(p.hi)(env)
            return self.parallelize(range(lo, hi + 1))
        if isinstance(p, P.SingletonSrc):
            return self.parallelize([compile_expr(p.expr)(env)])
        if isinstance(p, P.ExprSrc):
            v = compile_expr(p.expr)(env)
            if not isinstance(v, list):
                raise TypeMismatch(f"expected a bag, got {format_value(v)}")
            return self.parallelize(v)
        if isinstance(p, P.FlatMapNode):
            fn = _row_function(p, env)
            return self.map_partitions(lambda rows: [y for r in rows for y in fn(r)],
                                       self.run(p.input, env))
        if isinstance(p, P.JoinNode):
            return self.join(self.run(p.left, env), self.run(p.right, env))
        if isinstance(p, P.CrossNode):
            return self.cross(self.run(p.left, env), self.run(p.right, env))
        if isinstance(p, P.GroupByNode):
            return self.group_by(self.run(p.input, env))
        if isinstance(p, P.ReduceByKeyNode):
            return self.reduce_by_key(p.ops, self.run(p.input, env))
        if isinstance(p, P.CoGroupNode):
            left, right = self.run(p.left, env), self.run(p.right, env)
            if p.mode == "merge":
                return self.merge(left, right)
            return self.lookup(left, right)
        if isinstance(p, P.UnionNode):
            left, right = self.run(p.left, env), self.run(p.right, env)
            return [a + b for a, b in zip(left, right)]
        if isinstance(p, P.ReduceNode):
            return self.parallelize([self.reduce(p.op, self.run(p.input, env))])
        if isinstance(p, P.WithNode):
            local = dict(env)
            for name, sub, scalar in p.bindings:
                if scalar and isinstance(sub, P.ReduceNode):
                    local[name] = self.reduce(sub.op, self.run(sub.input, local))
                else:
                    local[name] = self.collect(self.run(sub, local))
            v = compile_expr(p.expr)(local)
            if not isinstance(v, list):
                raise TypeMismatch(f"expected a bag, got {format_value(v)}")
            return self.parallelize(v)
        raise TypeError(f"not a plan node: {p!r}")


def _combiner(ops):
    ops = tuple(ops)
    if not ops:
        return lambda a, b: a
    if len(ops) == 1:
        return comm_op(ops[0]).impl
    fs = [comm_op(o).impl for o in ops]
    return lambda a, b: tuple(f(x, y) for f, x, y in zip(fs, a, b))


def _row_function(p: P.FlatMapNode, env: dict):
    run = compile_quals(p.quals)
    head = compile_expr(p.head)
    pat = p.pat

    def fn(row):
        e = dict(env)
        bind_pattern(pat, row, e)
        return [head(x) for x in run(e)]

    return fn


# ---------------------------------------------------------------- list-level API

def _with_engine(cfg, fn):
    with Engine(cfg) as eng:
        return fn(eng)


def merge(x: list, y: list, cfg: EngineConfig | None = None) -> list:
    return _with_engine(cfg, lambda e: e.collect(e.merge(e.parallelize(x), e.parallelize(y))))


def group_by(x: list, cfg: EngineConfig | None = None) -> list:
    return _with_engine(cfg, lambda e: e.collect(e.group_by(e.parallelize(x))))


def reduce_by_key(op, x: list, cfg: EngineConfig | None = None) -> list:
    ops = (op,) if isinstance(op, str) else tuple(op)
    return _with_engine(cfg, lambda e: e.collect(e.reduce_by_key(ops, e.parallelize(x))))


def join(x: list, y: list, cfg: EngineConfig | None = None) -> list:
    return _with_engine(cfg, lambda e: e.collect(e.join(e.parallelize(x), e.parallelize(y))))


def execute_plan(plan, env: dict, cfg: EngineConfig | None = None) -> list:
    return _with_engine(cfg, lambda e: e.collect(e.run(plan, env)))


__all__ = ["Engine", "EngineConfig", "merge", "group_by", "reduce_by_key", "join",
           "execute_plan"]
