"""Monoid-comprehension IR.

Every node is an immutable dataclass. Bag-typed terms are `Comp`, `BagLit`,
`Range`, `Merge`, `Union` and variables bound to bags; everything else is a
plain value. Qualifiers bind patterns left to right; a `GroupBy` lifts every
variable bound earlier in the same comprehension (except its own pattern
variables) to the bag of its values within the group.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Union


# ---------------------------------------------------------------- patterns

@dataclass(frozen=True)
class PVar:
    name: str


@dataclass(frozen=True)
class PTuple:
    items: tuple


Pattern = Union[PVar, PTuple]


def pat_vars(p) -> list[str]:
    if isinstance(p, PVar):
        return [p.name]
    out = []
    for x in p.items:
        out += pat_vars(x)
    return out


def pat_to_expr(p):
    if isinstance(p, PVar):
        return CVar(p.name)
    return CTuple(tuple(pat_to_expr(x) for x in p.items))


def expr_to_pat(e):
    """Inverse of pat_to_expr for tuples of distinct variables, else None."""
    if isinstance(e, CVar):
        return PVar(e.name)
    if isinstance(e, CTuple):
        items = [expr_to_pat(x) for x in e.items]
        if any(x is None for x in items):
            return None
        p = PTuple(tuple(items))
        names = pat_vars(p)
        return p if len(names) == len(set(names)) else None
    return None


def rename_pat(p, m: dict[str, str]):
    if isinstance(p, PVar):
        return PVar(m.get(p.name, p.name))
    return PTuple(tuple(rename_pat(x, m) for x in p.items))


# ---------------------------------------------------------------- expressions

@dataclass(frozen=True)
class CVar:
    name: str


@dataclass(frozen=True)
class CConst:
    value: Any

    def __eq__(self, other):
        return (isinstance(other, CConst) and type(self.value) is type(other.value)
                and self.value == other.value)

    def __hash__(self):
        return hash((type(self.value).__name__, self.value))


@dataclass(frozen=True)
class CTuple:
    items: tuple


@dataclass(frozen=True)
class CRecord:
    fields: tuple  # ((name, expr), ...)


@dataclass(frozen=True)
class CProj:
    expr: Any
    field: str


@dataclass(frozen=True)
class CBin:
    op: str
    left: Any
    right: Any


@dataclass(frozen=True)
class CUn:
    op: str
    operand: Any


@dataclass(frozen=True)
class CCall:
    func: str
    args: tuple


@dataclass(frozen=True)
class Comp:
    head: Any
    quals: tuple


@dataclass(frozen=True)
class Reduce:
    op: str
    arg: Any


@dataclass(frozen=True)
class Merge:
    left: Any
    right: Any


@dataclass(frozen=True)
class Union_:
    left: Any
    right: Any


@dataclass(frozen=True)
class Range:
    lo: Any
    hi: Any


@dataclass(frozen=True)
class InRange:
    x: Any
    lo: Any
    hi: Any


@dataclass(frozen=True)
class BagLit:
    items: tuple


@dataclass(frozen=True)
class NonEmpty:
    arg: Any


@dataclass(frozen=True)
class SetField:
    """`<..w.., field = v>`: the record (or tuple) w with one field replaced."""
    base: Any
    field: str
    value: Any


@dataclass(frozen=True)
class GroupByOp:
    """groupBy(X): pairs of X grouped by their first component into (k, bag of values)."""
    arg: Any


CExpr = Union[CVar, CConst, CTuple, CRecord, CProj, CBin, CUn, CCall, Comp, Reduce,
              Merge, Union_, Range, InRange, BagLit, NonEmpty, SetField, GroupByOp]

UNIT = CTuple(())  # the empty tuple ()


# ---------------------------------------------------------------- qualifiers

@dataclass(frozen=True)
class Gen:
    pat: Any
    domain: Any


@dataclass(frozen=True)
class Let:
    pat: Any
    value: Any


@dataclass(frozen=True)
class Cond:
    pred: Any


@dataclass(frozen=True)
class GroupBy:
    pat: Any
    key: Any = None  # None: the key is the pattern itself

    @property
    def key_expr(self):
        return pat_to_expr(self.pat) if self.key is None else self.key


Qualifier = Union[Gen, Let, Cond, GroupBy]


def qual_binds(q) -> list[str]:
    if isinstance(q, (Gen, Let, GroupBy)):
        return pat_vars(q.pat)
    return []


def qual_exprs(q) -> list:
    if isinstance(q, Gen):
        return [q.domain]
    if isinstance(q, Let):
        return [q.value]
    if isinstance(q, Cond):
        return [q.pred]
    # an implicit key reads the earlier bindings of the pattern variables
    return [q.key_expr]


# ---------------------------------------------------------------- target code

@dataclass(frozen=True)
class TAssign:
    var: str
    value: Any
    scalar: bool = False  # the bag value must be a singleton; its element is stored


@dataclass(frozen=True)
class TWhile:
    cond: Any
    body: tuple


@dataclass(frozen=True)
class TBlock:
    items: tuple


# ---------------------------------------------------------------- traversal helpers

def children(e) -> list:
    if isinstance(e, (CVar, CConst)):
        return []
    if isinstance(e, CTuple):
        return list(e.items)
    if isinstance(e, CRecord):
        return [x for _, x in e.fields]
    if isinstance(e, CProj):
        return [e.expr]
    if isinstance(e, CBin):
        return [e.left, e.right]
    if isinstance(e, CUn):
        return [e.operand]
    if isinstance(e, CCall):
        return list(e.args)
    if isinstance(e, Reduce):
        return [e.arg]
    if isinstance(e, (Merge, Union_)):
        return [e.left, e.right]
    if isinstance(e, Range):
        return [e.lo, e.hi]
    if isinstance(e, InRange):
        return [e.x, e.lo, e.hi]
    if isinstance(e, BagLit):
        return list(e.items)
    if isinstance(e, (NonEmpty, GroupByOp)):
        return [e.arg]
    if isinstance(e, SetField):
        return [e.base, e.value]
    if isinstance(e, Comp):
        out = []
        for q in e.quals:
            out += qual_exprs(q)
        return out + [e.head]
    raise TypeError(f"not a comprehension term: {e!r}")


def rebuild(e, kids: list):
    """Inverse of `children` for non-binding nodes."""
    if isinstance(e, (CVar, CConst)):
        return e
    if isinstance(e, CTuple):
        return CTuple(tuple(kids))
    if isinstance(e, CRecord):
        return CRecord(tuple((n, k) for (n, _), k in zip(e.fields, kids)))
    if isinstance(e, CProj):
        return CProj(kids[0], e.field)
    if isinstance(e, CBin):
        return CBin(e.op, kids[0], kids[1])
    if isinstance(e, CUn):
        return CUn(e.op, kids[0])
    if isinstance(e, CCall):
        return CCall(e.func, tuple(kids))
    if isinstance(e, Reduce):
        return Reduce(e.op, kids[0])
    if isinstance(e, Merge):
        return Merge(kids[0], kids[1])
    if isinstance(e, Union_):
        return Union_(kids[0], kids[1])
    if isinstance(e, Range):
        return Range(kids[0], kids[1])
    if isinstance(e, InRange):
        return InRange(kids[0], kids[1], kids[2])
    if isinstance(e, BagLit):
        return BagLit(tuple(kids))
    if isinstance(e, NonEmpty):
        return NonEmpty(kids[0])
    if isinstance(e, GroupByOp):
        return GroupByOp(kids[0])
    if isinstance(e, SetField):
        return SetField(kids[0], e.field, kids[1])
    raise TypeError(f"rebuild does not handle {type(e).__name__}")


def free_vars(e) -> set[str]:
    if isinstance(e, CVar):
        return {e.name}
    if isinstance(e, Comp):
        return free_vars_quals(e.quals, [e.head])
    out = set()
    for c in children(e):
        out |= free_vars(c)
    return out


def free_vars_quals(quals, tail: list) -> set[str]:
    out: set[str] = set()
    bound: set[str] = set()
    for q in quals:
        for x in qual_exprs(q):
            out |= free_vars(x) - bound
        bound |= set(qual_binds(q))
    for t in tail:
        out |= free_vars(t) - bound
    return out


def all_names(e) -> set[str]:
    """Every variable name occurring in a term, bound or free."""
    out = set()
    if isinstance(e, CVar):
        out.add(e.name)
    if isinstance(e, Comp):
        for q in e.quals:
            out |= set(qual_binds(q))
    for c in children(e):
        out |= all_names(c)
    return out


def count_uses(e, name: str) -> int:
    """Free occurrences of `name` in e."""
    if isinstance(e, CVar):
        return int(e.name == name)
    if isinstance(e, Comp):
        return count_uses_quals(e.quals, [e.head], name)
    return sum(count_uses(c, name) for c in children(e))


def count_uses_quals(quals, tail: list, name: str) -> int:
    n = 0
    for q in quals:
        n += sum(count_uses(x, name) for x in qual_exprs(q))
        if name in qual_binds(q):
            return n
    return n + sum(count_uses(t, name) for t in tail)


class Fresh:
    """Fresh-name supply; generated names contain `$` so they never clash with source names."""

    def __init__(self, taken: set[str] | None = None):
        self.taken = set(taken or ())
        self.counter = itertools.count(1)

    def __call__(self, base: str = "x") -> str:
        base = base.split("$", 1)[0] or "x"
        while True:
            name = f"{base}${next(self.counter)}"
            if name not in self.taken:
                self.taken.add(name)
                return name


# ---------------------------------------------------------------- substitution

def subst(e, m: dict[str, Any], fresh: Fresh | None = None):
    """Capture-avoiding substitution of free variables."""
    if not m:
        return e
    if isinstance(e, CVar):
        return m.get(e.name, e)
    if isinstance(e, Comp):
        quals, tail = subst_quals(e.quals, [e.head], m, fresh)
        return Comp(tail[0], tuple(quals))
    return rebuild(e, [subst(c, m, fresh) for c in children(e)])


def subst_quals(quals, tail: list, m: dict[str, Any], fresh: Fresh | None = None):
    if fresh is None:
        taken = set(m) | all_names(Comp(UNIT, tuple(quals)))
        for x in list(m.values()) + list(tail):
            taken |= all_names(x)
        fresh = Fresh(taken)
    m = dict(m)
    repl_free = set()
    for v in m.values():
        repl_free |= free_vars(v)
    out = []
    quals = list(quals)
    tail = list(tail)
    i = 0
    while i < len(quals):
        q = quals[i]
        q = _subst_qual_exprs(q, m, fresh)
        binds = qual_binds(q)
        clash = []
        remaining = {k: v for k, v in m.items() if k not in binds}
        if remaining and set(binds) & repl_free:
            live = free_vars_quals(quals[i + 1:], tail) & set(remaining)
            live_free = set()
            for k in live:
                live_free |= free_vars(remaining[k])
            clash = [b for b in binds if b in live_free]
        if clash:
            # rename the binder in the rest of the comprehension
            ren = {b: fresh(b) for b in clash}
            q = _rename_binder(q, ren)
            rest, tail = _rename_rest(quals[i + 1:], tail, ren, fresh)
            quals = quals[:i + 1] + rest
            binds = qual_binds(q)
        for b in binds:
            m.pop(b, None)
        out.append(q)
        i += 1
        if not m:
            out += quals[i:]
            return out, tail
    return out, [subst(t, m, fresh) for t in tail]


def _subst_qual_exprs(q, m, fresh):
    if isinstance(q, Gen):
        return Gen(q.pat, subst(q.domain, m, fresh))
    if isinstance(q, Let):
        return Let(q.pat, subst(q.value, m, fresh))
    if isinstance(q, Cond):
        return Cond(subst(q.pred, m, fresh))
    if q.key is None:
        # the implicit key reads the pattern variables before rebinding them
        key = subst(q.key_expr, m, fresh)
        return q if key == q.key_expr else GroupBy(q.pat, key)
    return GroupBy(q.pat, subst(q.key, m, fresh))


def _rename_binder(q, ren):
    if isinstance(q, Gen):
        return Gen(rename_pat(q.pat, ren), q.domain)
    if isinstance(q, Let):
        return Let(rename_pat(q.pat, ren), q.value)
    return GroupBy(rename_pat(q.pat, ren), q.key_expr)


def _rename_rest(quals, tail, ren, fresh):
    mapping = {k: CVar(v) for k, v in ren.items()}
    q2, t2 = subst_quals(quals, tail, mapping, fresh)
    return q2, t2


def transform(e, fn):
    """Bottom-up rewrite: fn is applied to every node after its children."""
    if isinstance(e, Comp):
        quals = []
        for q in e.quals:
            if isinstance(q, Gen):
                quals.append(Gen(q.pat, transform(q.domain, fn)))
            elif isinstance(q, Let):
                quals.append(Let(q.pat, transform(q.value, fn)))
            elif isinstance(q, Cond):
                quals.append(Cond(transform(q.pred, fn)))
            else:
                quals.append(q if q.key is None else GroupBy(q.pat, transform(q.key, fn)))
        return fn(Comp(transform(e.head, fn), tuple(quals)))
    kids = children(e)
    if not kids:
        return fn(e)
    return fn(rebuild(e, [transform(c, fn) for c in kids]))


def walk(e):
    yield e
    for c in children(e):
        yield from walk(c)


def is_const(e) -> bool:
    if isinstance(e, CConst):
        return True
    if isinstance(e, CTuple):
        return all(is_const(x) for x in e.items)
    return False


def const_value(e):
    if isinstance(e, CConst):
        return e.value
    return tuple(const_value(x) for x in e.items)


def to_const(v):
    if isinstance(v, tuple):
        return CTuple(tuple(to_const(x) for x in v))
    return CConst(v)


def target_exprs(code) -> list:
    """All top-level comprehension terms in a target-code list."""
    out = []
    for c in code:
        if isinstance(c, TAssign):
            out.append(c.value)
        elif isinstance(c, TWhile):
            out.append(c.cond)
            out += target_exprs(c.body)
        elif isinstance(c, TBlock):
            out += target_exprs(c.items)
    return out
