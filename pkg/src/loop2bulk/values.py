"""Runtime values shared by the oracle, the IR evaluator and the engine.

Scalars are plain Python ``int``/``float``/``bool``/``str``; tuples are Python
tuples; records are :class:`Record`; bags are Python lists (order carries no
meaning). Sparse arrays are bags of ``(key, value)`` pairs.
"""

from __future__ import annotations

import math
import zlib
from collections import Counter
from typing import Any, Iterable


class Record:
    """Immutable record with named fields; equality ignores field order."""

    __slots__ = ("_items", "_hash")

    def __init__(self, fields: dict[str, Any] | Iterable[tuple[str, Any]]):
        items = dict(fields)
        object.__setattr__(self, "_items", tuple(sorted(items.items())))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Record is immutable")

    @property
    def fields(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self._items)

    def get(self, name: str) -> Any:
        for k, v in self._items:
            if k == name:
                return v
        raise KeyError(name)

    def has(self, name: str) -> bool:
        return any(k == name for k, _ in self._items)

    def replace(self, name: str, value: Any) -> Record:
        d = dict(self._items)
        d[name] = value
        return Record(d)

    def items(self) -> tuple[tuple[str, Any], ...]:
        return self._items

    def __eq__(self, other):
        return isinstance(other, Record) and self._items == other._items

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(("Record", self._items))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        inner = ", ".join(f"{k}={format_value(v)}" for k, v in self._items)
        return f"<{inner}>"


class _Missing:
    """Result of reading an absent array element (the empty bag)."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "MISSING"

    def __bool__(self):
        return False


MISSING = _Missing()


def project(value: Any, name: str) -> Any:
    """Field access: ``_1``.. on tuples (1-based), named fields on records."""
    if isinstance(value, Record):
        return value.get(name)
    if isinstance(value, tuple) and name.startswith("_") and name[1:].isdigit():
        return value[int(name[1:]) - 1]
    raise TypeError(f"cannot project field {name!r} from {format_value(value)}")


def format_value(v: Any) -> str:
    """Deterministic text form used by state dumps and IR printing."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, tuple):
        return "(" + ",".join(format_value(x) for x in v) + ")"
    if isinstance(v, list):
        return "{" + ",".join(sorted(format_value(x) for x in v)) + "}"
    return repr(v)


def stable_hash(v: Any, seed: int = 0) -> int:
    """Process-independent structural hash (Python's str hash is salted)."""
    return zlib.crc32(f"{seed}|{_hash_text(v)}".encode())


def _hash_text(v: Any) -> str:
    # ints and integral floats must collide because 1 == 1.0 as keys
    if isinstance(v, bool):
        return "b1" if v else "b0"
    if isinstance(v, float) and v.is_integer():
        return f"i{int(v)}"
    if isinstance(v, int):
        return f"i{v}"
    if isinstance(v, tuple):
        return "(" + ",".join(_hash_text(x) for x in v) + ")"
    return format_value(v)


def values_close(a: Any, b: Any, rel_tol: float = 1e-9, abs_tol: float = 1e-12) -> bool:
    """Structural equality with a relative tolerance on floats."""
    if isinstance(a, bool) or isinstance(b, bool):
        return a == b
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        if isinstance(a, float) or isinstance(b, float):
            if math.isnan(a) or math.isnan(b):
                return math.isnan(a) and math.isnan(b)
            return math.isclose(a, b, rel_tol=rel_tol, abs_tol=abs_tol)
        return a == b
    if isinstance(a, tuple) and isinstance(b, tuple):
        return len(a) == len(b) and all(values_close(x, y, rel_tol, abs_tol) for x, y in zip(a, b))
    if isinstance(a, Record) and isinstance(b, Record):
        return a.fields == b.fields and all(
            values_close(x, y, rel_tol, abs_tol) for (_, x), (_, y) in zip(a.items(), b.items())
        )
    if isinstance(a, list) and isinstance(b, list):
        return bags_equal(a, b, rel_tol, abs_tol)
    return a == b


def bags_equal(a: list, b: list, rel_tol: float = 0.0, abs_tol: float = 0.0) -> bool:
    """Multiset equality; with a tolerance, elements are matched greedily after sorting."""
    if len(a) != len(b):
        return False
    if rel_tol == 0.0 and abs_tol == 0.0:
        try:
            return Counter(a) == Counter(b)
        except TypeError:
            pass
    remaining = sorted(b, key=format_value)
    for x in sorted(a, key=format_value):
        for idx, y in enumerate(remaining):
            if values_close(x, y, rel_tol, abs_tol):
                del remaining[idx]
                break
        else:
            return False
    return True
