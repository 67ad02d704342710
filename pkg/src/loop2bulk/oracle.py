"""Sequential reference interpreter for loop programs, and state comparison.

Arrays live in the state as dicts from key to value. A read of an absent key
yields MISSING, which poisons the enclosing expression; a statement whose
destination or value is MISSING does nothing. This mirrors the empty-bag
behaviour of translated code. With ``strict=True`` such reads raise instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .analysis import contains_while
from .errors import DuplicateKey, EvalError, IndexUnset, TypeMismatch, UnboundVariable
from .frontend import ast as A
from .ops import BINOPS, EMPTY_CONSTRUCTORS, UNOPS, call_function, comm_op
from .values import MISSING, Record, format_value, project, values_close


def to_dict(bag) -> dict:
    if isinstance(bag, dict):
        return dict(bag)
    out = {}
    for k, v in bag:
        if k in out:
            raise DuplicateKey(f"duplicate key {format_value(k)} in array input")
        out[k] = v
    return out


class Interpreter:
    def __init__(self, types: dict, strict: bool = False, reverse: bool = False):
        self.types = types
        self.strict = strict
        self.reverse = reverse

    # ------------------------------------------------------------ expressions

    def expr(self, e, st: dict, loc: dict):
        if isinstance(e, A.Const):
            return e.value
        if isinstance(e, A.Var):
            if e.name in loc:
                return loc[e.name]
            if e.name not in st:
                raise UnboundVariable(f"variable {e.name} has no value")
            return st[e.name]
        if isinstance(e, A.Index):
            arr = st.get(e.array)
            if arr is None:
                raise UnboundVariable(f"array {e.array} has no value")
            key = self.key(e.indexes, st, loc)
            if key is MISSING:
                return MISSING
            if key not in arr:
                if self.strict:
                    raise IndexUnset(f"{e.array}[{format_value(key)}] is not set")
                return MISSING
            return arr[key]
        if isinstance(e, A.Proj):
            b = self.expr(e.base, st, loc)
            if b is MISSING:
                return MISSING
            try:
                return project(b, e.field)
            except (TypeError, KeyError, IndexError) as exc:
                raise TypeMismatch(str(exc)) from exc
        if isinstance(e, A.BinOp):
            a = self.expr(e.left, st, loc)
            b = self.expr(e.right, st, loc)
            if a is MISSING or b is MISSING:
                return MISSING
            return BINOPS[e.op](a, b)
        if isinstance(e, A.UnOp):
            a = self.expr(e.operand, st, loc)
            return MISSING if a is MISSING else UNOPS[e.op](a)
        if isinstance(e, A.TupleExpr):
            items = [self.expr(x, st, loc) for x in e.items]
            return MISSING if any(x is MISSING for x in items) else tuple(items)
        if isinstance(e, A.RecordExpr):
            vals = [self.expr(x, st, loc) for _, x in e.fields]
            if any(x is MISSING for x in vals):
                return MISSING
            return Record(zip([n for n, _ in e.fields], vals))
        if isinstance(e, A.Call):
            if e.func in EMPTY_CONSTRUCTORS:
                return {}
            args = [self.expr(x, st, loc) for x in e.args]
            return MISSING if any(x is MISSING for x in args) else call_function(e.func, args)
        raise EvalError(f"cannot evaluate {e!r}")

    def key(self, indexes, st, loc):
        ks = [self.expr(x, st, loc) for x in indexes]
        if any(k is MISSING for k in ks):
            return MISSING
        return ks[0] if len(ks) == 1 else tuple(ks)

    # ------------------------------------------------------------ destinations

    def read_dest(self, d, st, loc):
        """Current value of a destination, or MISSING when unset."""
        if isinstance(d, A.Var):
            return st.get(d.name, MISSING)
        if isinstance(d, A.Proj):
            b = self.read_dest(d.base, st, loc)
            return MISSING if b is MISSING else project(b, d.field)
        key = self.key(d.indexes, st, loc)
        if key is MISSING:
            return MISSING
        return st[d.array].get(key, MISSING)

    def write_dest(self, d, value, st, loc) -> None:
        if isinstance(d, A.Var):
            st[d.name] = value
            return
        if isinstance(d, A.Proj):
            base = self.read_dest(d.base, st, loc)
            if base is MISSING:
                return
            if not isinstance(base, Record):
                raise TypeMismatch(f"cannot set field {d.field} of {format_value(base)}")
            self.write_dest(d.base, base.replace(d.field, value), st, loc)
            return
        key = self.key(d.indexes, st, loc)
        if key is not MISSING:
            st[d.array][key] = value

    def dest_defined(self, d, st, loc) -> bool:
        if isinstance(d, A.Var):
            return True
        if isinstance(d, A.Proj):
            return self.read_dest(d.base, st, loc) is not MISSING
        return self.key(d.indexes, st, loc) is not MISSING

    # ------------------------------------------------------------ statements

    def stmt(self, s, st: dict, loc: dict) -> None:
        if isinstance(s, A.Block):
            for x in s.stmts:
                self.stmt(x, st, loc)
        elif isinstance(s, A.InputDecl):
            if s.name not in st:
                raise UnboundVariable(f"input {s.name} was not provided")
        elif isinstance(s, A.VarDecl):
            v = self.expr(s.init, st, loc)
            if v is MISSING:
                raise IndexUnset(f"initial value of {s.name} reads an unset element")
            st[s.name] = dict(v) if isinstance(v, dict) else v
        elif isinstance(s, A.Assign):
            if isinstance(s.dest, A.Var) and A.is_collection(self.types.get(s.dest.name)):
                v = self.expr(s.rhs, st, loc)
                st[s.dest.name] = dict(v)
                return
            v = self.expr(s.rhs, st, loc)
            if v is MISSING:
                self._skip("assignment value")
                return
            if self.dest_defined(s.dest, st, loc):
                self.write_dest(s.dest, v, st, loc)
        elif isinstance(s, A.IncrUpdate):
            v = self.expr(s.rhs, st, loc)
            if v is MISSING or not self.dest_defined(s.dest, st, loc):
                self._skip("incremental update")
                return
            old = self.read_dest(s.dest, st, loc)
            # an unset element starts from the operator's unit
            new = v if old is MISSING else comm_op(s.op).impl(old, v)
            self.write_dest(s.dest, new, st, loc)
        elif isinstance(s, A.ForRange):
            lo, hi = self.expr(s.lo, st, loc), self.expr(s.hi, st, loc)
            if lo is MISSING or hi is MISSING:
                self._skip("loop bound")
                return
            idx = range(lo, hi + 1)
            if self.reverse and not contains_while(s):
                idx = reversed(idx)
            for i in idx:
                self.stmt(s.body, st, {**loc, s.index: i})
        elif isinstance(s, A.ForIn):
            coll = self.expr(s.coll, st, loc)
            if coll is MISSING:
                self._skip("traversed collection")
                return
            if not isinstance(coll, dict):
                raise TypeMismatch(f"cannot traverse {format_value(coll)}")
            vals = list(coll.values())
            if self.reverse and not contains_while(s):
                vals.reverse()
            for v in vals:
                self.stmt(s.body, st, {**loc, s.var: v})
        elif isinstance(s, A.While):
            while True:
                c = self.expr(s.cond, st, loc)
                if c is MISSING:
                    raise IndexUnset("while condition reads an unset element")
                if not isinstance(c, bool):
                    raise TypeMismatch(f"while condition is not boolean: {format_value(c)}")
                if not c:
                    break
                self.stmt(s.body, st, loc)
        elif isinstance(s, A.If):
            c = self.expr(s.cond, st, loc)
            if c is MISSING:
                if self.strict:
                    raise IndexUnset("if condition reads an unset element")
                return
            if not isinstance(c, bool):
                raise TypeMismatch(f"if condition is not boolean: {format_value(c)}")
            if c:
                self.stmt(s.then, st, loc)
            elif s.else_ is not None:
                self.stmt(s.else_, st, loc)
        else:
            raise EvalError(f"cannot execute {s!r}")

    def _skip(self, what: str) -> None:
        if self.strict:
            raise IndexUnset(f"{what} reads an unset element")


def eval_program(p: A.SourceProgram, inputs: dict, strict: bool = False,
                 reverse: bool = False) -> dict:
    """Run ``p`` sequentially; arrays in the input and the result are bags of (key, value)."""
    types = p.types
    st: dict[str, Any] = {}
    for name, v in inputs.items():
        st[name] = to_dict(v) if A.is_collection(types.get(name)) else v
    Interpreter(types, strict, reverse).stmt(A.Block(p.body), st, {})
    return {k: (list(v.items()) if isinstance(v, dict) else v) for k, v in st.items()}


# ---------------------------------------------------------------- comparison

@dataclass
class VarVerdict:
    name: str
    ok: bool
    detail: list[str] = field(default_factory=list)


@dataclass
class CompareReport:
    verdicts: list[VarVerdict]

    @property
    def ok(self) -> bool:
        return all(v.ok for v in self.verdicts)

    @property
    def failures(self) -> list[VarVerdict]:
        return [v for v in self.verdicts if not v.ok]

    def render(self, limit: int = 10) -> str:
        lines = []
        for v in self.verdicts:
            lines.append(f"{'PASS' if v.ok else 'FAIL'} {v.name}")
            lines += ["  " + d for d in v.detail[:limit]]
            if len(v.detail) > limit:
                lines.append(f"  ... {len(v.detail) - limit} more")
        return "\n".join(lines)


def _is_pair_bag(x) -> bool:
    return isinstance(x, list) and all(isinstance(e, tuple) and len(e) == 2 for e in x)


def _keyed(x: list) -> dict | None:
    out = {}
    for k, v in x:
        if k in out:
            return None
        out[k] = v
    return out


def _compare_value(a, b, rel_tol: float) -> list[str]:
    if _is_pair_bag(a) and _is_pair_bag(b):
        ka, kb = _keyed(a), _keyed(b)
        if ka is not None and kb is not None:
            diff = []
            for k in sorted(set(ka) | set(kb), key=format_value):
                if k not in kb:
                    diff.append(f"key {format_value(k)}: {format_value(ka[k])} vs <absent>")
                elif k not in ka:
                    diff.append(f"key {format_value(k)}: <absent> vs {format_value(kb[k])}")
                elif not values_close(ka[k], kb[k], rel_tol):
                    diff.append(f"key {format_value(k)}: {format_value(ka[k])} vs {format_value(kb[k])}")
            return diff
    if values_close(a, b, rel_tol):
        return []
    return [f"{format_value(a)} vs {format_value(b)}"]


def compare_states(a: dict, b: dict, rel_tol: float = 1e-9,
                   names: list[str] | None = None) -> CompareReport:
    """Per-variable comparison; bags as multisets, floats within ``rel_tol`` (floor 1e-12)."""
    if names is None:
        names = sorted(set(a) | set(b))
    verdicts = []
    for n in names:
        if n not in a or n not in b:
            verdicts.append(VarVerdict(n, False, [f"only in {'first' if n in a else 'second'} state"]))
            continue
        diff = _compare_value(a[n], b[n], rel_tol)
        verdicts.append(VarVerdict(n, not diff, diff))
    return CompareReport(verdicts)
