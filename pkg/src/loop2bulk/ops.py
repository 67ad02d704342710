"""Operator table: binary operators, commutative reducers and builtin functions."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Any, Callable

from .errors import DivisionByZero, EmptyReduction, RegistrationError, TypeMismatch
from .values import Record, values_close


def _div(a, b):
    if b == 0:
        raise DivisionByZero(f"division by zero: {a}/{b}")
    if isinstance(a, int) and isinstance(b, int):
        q = abs(a) // abs(b)
        return q if (a >= 0) == (b >= 0) else -q
    return a / b


def _mod(a, b):
    if b == 0:
        raise DivisionByZero(f"modulo by zero: {a}%{b}")
    if isinstance(a, int) and isinstance(b, int):
        return int(math.fmod(a, b))
    return math.fmod(a, b)


def _and(a, b):
    if not isinstance(a, bool) or not isinstance(b, bool):
        raise TypeMismatch(f"&& expects booleans, got {a!r}, {b!r}")
    return a and b


def _or(a, b):
    if not isinstance(a, bool) or not isinstance(b, bool):
        raise TypeMismatch(f"|| expects booleans, got {a!r}, {b!r}")
    return a or b


def _argmin(a, b):
    ka = (a.get("distance"), a.get("index"))
    kb = (b.get("distance"), b.get("index"))
    return a if ka <= kb else b


def _vec_add(a, b):
    if isinstance(a, tuple):
        return tuple(x + y for x, y in zip(a, b))
    return a + b


def _avg(a, b):
    return Record({"sum": _vec_add(a.get("sum"), b.get("sum")),
                   "count": a.get("count") + b.get("count")})


def _arith(fn, sym):
    def op(a, b):
        try:
            return fn(a, b)
        except TypeError as exc:
            raise TypeMismatch(f"bad operands for {sym}: {a!r}, {b!r}") from exc
    return op


BINOPS: dict[str, Callable[[Any, Any], Any]] = {
    "+": _arith(lambda a, b: a + b, "+"),
    "-": _arith(lambda a, b: a - b, "-"),
    "*": _arith(lambda a, b: a * b, "*"),
    "/": _div,
    "%": _mod,
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": _arith(lambda a, b: a < b, "<"),
    "<=": _arith(lambda a, b: a <= b, "<="),
    ">": _arith(lambda a, b: a > b, ">"),
    ">=": _arith(lambda a, b: a >= b, ">="),
    "&&": _and,
    "||": _or,
    "^": _argmin,
    "^^": _avg,
}


def _neg(a):
    if isinstance(a, bool) or not isinstance(a, (int, float)):
        raise TypeMismatch(f"unary - expects a number, got {a!r}")
    return -a


def _not(a):
    if not isinstance(a, bool):
        raise TypeMismatch(f"! expects a boolean, got {a!r}")
    return not a


UNOPS: dict[str, Callable[[Any], Any]] = {"-": _neg, "!": _not}


# ---------------------------------------------------------------- reducers

@dataclass(frozen=True)
class CommOp:
    """A commutative, associative reducer usable in `d op= e` and `op/bag`."""

    symbol: str
    name: str
    impl: Callable[[Any, Any], Any] = field(compare=False)
    unit: Any = None
    has_unit: bool = False
    # produces random carrier values for the law check
    sample: Callable[[random.Random], Any] | None = field(default=None, compare=False)

    def reduce(self, values) -> Any:
        it = iter(values)
        try:
            acc = next(it)
        except StopIteration:
            if self.has_unit:
                return self.unit
            raise EmptyReduction(f"{self.symbol}/ over an empty bag (no unit)") from None
        f = self.impl
        for v in it:
            acc = f(acc, v)
        return acc


_REGISTRY: dict[str, CommOp] = {}


def check_laws(op: CommOp, trials: int = 200, seed: int = 0) -> None:
    """Randomized commutativity/associativity (and unit) check."""
    if op.sample is None:
        raise RegistrationError(f"operator {op.symbol!r} has no sample generator")
    rng = random.Random(seed)
    f = op.impl
    for _ in range(trials):
        a, b, c = op.sample(rng), op.sample(rng), op.sample(rng)
        if not values_close(f(a, b), f(b, a)):
            raise RegistrationError(f"{op.symbol!r} is not commutative: {a!r}, {b!r}")
        if not values_close(f(f(a, b), c), f(a, f(b, c))):
            raise RegistrationError(f"{op.symbol!r} is not associative: {a!r}, {b!r}, {c!r}")
        if op.has_unit and not values_close(f(op.unit, a), a):
            raise RegistrationError(f"{op.unit!r} is not a unit of {op.symbol!r}")


def register_comm_op(op: CommOp, check: bool = True) -> CommOp:
    if check:
        check_laws(op)
    _REGISTRY[op.symbol] = op
    return op


def unregister_comm_op(symbol: str) -> None:
    _REGISTRY.pop(symbol, None)


def comm_op(symbol: str) -> CommOp:
    try:
        return _REGISTRY[symbol]
    except KeyError:
        raise TypeMismatch(f"no commutative operator registered as {symbol!r}") from None


def is_comm_op(symbol: str) -> bool:
    return symbol in _REGISTRY


def comm_ops() -> dict[str, CommOp]:
    return dict(_REGISTRY)


def _small_int(rng):
    return rng.randint(-50, 50)


def _argmin_sample(rng):
    return Record({"index": rng.randint(0, 5), "distance": float(rng.randint(0, 5))})


def _avg_sample(rng):
    return Record({"sum": (float(rng.randint(-9, 9)), float(rng.randint(-9, 9))),
                   "count": rng.randint(0, 5)})


register_comm_op(CommOp("+", "sum", BINOPS["+"], 0, True, _small_int))
register_comm_op(CommOp("*", "product", BINOPS["*"], 1, True, _small_int))
register_comm_op(CommOp("min", "min", min, None, False, _small_int))
register_comm_op(CommOp("max", "max", max, None, False, _small_int))
register_comm_op(CommOp("&&", "and", _and, True, True, lambda r: r.random() < 0.5))
register_comm_op(CommOp("||", "or", _or, False, True, lambda r: r.random() < 0.5))
register_comm_op(CommOp("^", "argmin", _argmin, None, False, _argmin_sample))
register_comm_op(CommOp("^^", "avg", _avg,
                        Record({"sum": (0.0, 0.0), "count": 0}), True, _avg_sample))


# ---------------------------------------------------------------- builtin functions

def _distance(p, q):
    if isinstance(p, tuple):
        return math.sqrt(sum((a - b) * (a - b) for a, b in zip(p, q)))
    return abs(p - q)


def _sqrt(x):
    if x < 0:
        raise TypeMismatch(f"sqrt of negative number {x!r}")
    return math.sqrt(x)


def _value(avg):
    s, c = avg.get("sum"), avg.get("count")
    if c == 0:
        raise DivisionByZero("value() of an empty average")
    if isinstance(s, tuple):
        return tuple(x / c for x in s)
    return s / c


def _argmin_ctor(index, distance):
    return Record({"index": index, "distance": distance})


def _avg_ctor(s, count):
    return Record({"sum": s, "count": count})


FUNCTIONS: dict[str, tuple[int, Callable[..., Any]]] = {
    "distance": (2, _distance),
    "sqrt": (1, _sqrt),
    "abs": (1, abs),
    "min": (2, min),
    "max": (2, max),
    "ArgMin": (2, _argmin_ctor),
    "Avg": (2, _avg_ctor),
    "value": (1, _value),
    "toDouble": (1, float),
}

# `vector()` / `matrix()` / `map()`: empty sparse collections
EMPTY_CONSTRUCTORS = frozenset({"vector", "matrix", "map"})


def call_function(name: str, args: list) -> Any:
    try:
        arity, fn = FUNCTIONS[name]
    except KeyError:
        raise TypeMismatch(f"unknown function {name!r}") from None
    if len(args) != arity:
        raise TypeMismatch(f"{name} expects {arity} arguments, got {len(args)}")
    try:
        return fn(*args)
    except (TypeError, KeyError, AttributeError) as exc:
        raise TypeMismatch(f"bad arguments to {name}: {args!r}") from exc


def in_range(x, lo, hi) -> bool:
    """Integral membership test used by range elimination."""
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        return False
    if isinstance(x, float) and not x.is_integer():
        return False
    return lo <= x <= hi
