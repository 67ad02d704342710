"""AST of the loop language.

Destinations (`Var`, `Proj`, `Index`) double as expressions; `is_dest` tells
whether an expression is a valid L-value. Source positions are carried but
never take part in equality, so re-parsed programs compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterator, Union


Pos = tuple[int, int]
_NOPOS: Pos = (0, 0)


def _pos():
    return field(default=_NOPOS, compare=False, repr=False)


# ---------------------------------------------------------------- types

@dataclass(frozen=True)
class TScalar:
    name: str  # Int | Double | Bool | String


@dataclass(frozen=True)
class TTuple:
    items: tuple


@dataclass(frozen=True)
class TRecord:
    fields: tuple  # ((name, type), ...)


@dataclass(frozen=True)
class TNamed:
    """Builtin record type referenced by name (ArgMin, Avg)."""
    name: str


@dataclass(frozen=True)
class TVector:
    elem: Any


@dataclass(frozen=True)
class TMatrix:
    elem: Any


@dataclass(frozen=True)
class TMap:
    key: Any
    elem: Any


Type = Union[TScalar, TTuple, TRecord, TNamed, TVector, TMatrix, TMap]

INT = TScalar("Int")
DOUBLE = TScalar("Double")
BOOL = TScalar("Bool")
STRING = TScalar("String")


def is_collection(t) -> bool:
    return isinstance(t, (TVector, TMatrix, TMap))


def dims(t) -> int:
    if isinstance(t, TMatrix):
        return 2
    if isinstance(t, (TVector, TMap)):
        return 1
    return 0


# ---------------------------------------------------------------- expressions

@dataclass(frozen=True)
class Var:
    name: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class Proj:
    base: Any
    field: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class Index:
    array: str
    indexes: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class BinOp:
    op: str
    left: Any
    right: Any
    pos: Pos = _pos()


@dataclass(frozen=True)
class UnOp:
    op: str
    operand: Any
    pos: Pos = _pos()


@dataclass(frozen=True)
class TupleExpr:
    items: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class RecordExpr:
    fields: tuple  # ((name, expr), ...)
    pos: Pos = _pos()


@dataclass(frozen=True)
class Const:
    value: Any
    pos: Pos = _pos()

    def __eq__(self, other):
        # keep 1 and 1.0 (and True) apart
        return (isinstance(other, Const) and type(self.value) is type(other.value)
                and self.value == other.value)

    def __hash__(self):
        return hash((type(self.value).__name__, self.value))


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple
    pos: Pos = _pos()


Expr = Union[Var, Proj, Index, BinOp, UnOp, TupleExpr, RecordExpr, Const, Call]


def is_dest(e) -> bool:
    if isinstance(e, (Var, Index)):
        return True
    if isinstance(e, Proj):
        return is_dest(e.base)
    return False


def dest_root(d) -> str:
    while isinstance(d, Proj):
        d = d.base
    return d.name if isinstance(d, Var) else d.array


# ---------------------------------------------------------------- statements

@dataclass(frozen=True)
class IncrUpdate:
    dest: Any
    op: str
    rhs: Any
    pos: Pos = _pos()


@dataclass(frozen=True)
class Assign:
    dest: Any
    rhs: Any
    pos: Pos = _pos()


@dataclass(frozen=True)
class VarDecl:
    name: str
    type: Any
    init: Any
    pos: Pos = _pos()


@dataclass(frozen=True)
class InputDecl:
    """`input NAME: type;` a variable supplied by the caller."""
    name: str
    type: Any
    pos: Pos = _pos()


@dataclass(frozen=True)
class ForRange:
    index: str
    lo: Any
    hi: Any
    body: Any
    pos: Pos = _pos()


@dataclass(frozen=True)
class ForIn:
    var: str
    coll: Any
    body: Any
    pos: Pos = _pos()


@dataclass(frozen=True)
class While:
    cond: Any
    body: Any
    pos: Pos = _pos()


@dataclass(frozen=True)
class If:
    cond: Any
    then: Any
    else_: Any = None
    pos: Pos = _pos()


@dataclass(frozen=True)
class Block:
    stmts: tuple
    pos: Pos = _pos()


Stmt = Union[IncrUpdate, Assign, VarDecl, InputDecl, ForRange, ForIn, While, If, Block]
SIMPLE_STMTS = (IncrUpdate, Assign, VarDecl, InputDecl)


@dataclass(frozen=True)
class SourceProgram:
    body: tuple

    @property
    def declarations(self) -> list:
        return [s for s in walk_stmts(self.body) if isinstance(s, (VarDecl, InputDecl))]

    @property
    def types(self) -> dict[str, Any]:
        return {d.name: d.type for d in self.declarations}

    @property
    def inputs(self) -> list[str]:
        return [d.name for d in self.declarations if isinstance(d, InputDecl)]


def child_stmts(s) -> list:
    if isinstance(s, (ForRange, ForIn, While)):
        return [s.body]
    if isinstance(s, If):
        return [s.then] if s.else_ is None else [s.then, s.else_]
    if isinstance(s, Block):
        return list(s.stmts)
    return []


def walk_stmts(stmts) -> Iterator:
    """Pre-order traversal over a statement or a sequence of statements."""
    stack = list(reversed(stmts)) if isinstance(stmts, (list, tuple)) else [stmts]
    while stack:
        s = stack.pop()
        yield s
        stack.extend(reversed(child_stmts(s)))


def child_exprs(e) -> list:
    if isinstance(e, Proj):
        return [e.base]
    if isinstance(e, Index):
        return list(e.indexes)
    if isinstance(e, BinOp):
        return [e.left, e.right]
    if isinstance(e, UnOp):
        return [e.operand]
    if isinstance(e, TupleExpr):
        return list(e.items)
    if isinstance(e, RecordExpr):
        return [x for _, x in e.fields]
    if isinstance(e, Call):
        return list(e.args)
    return []


def walk_expr(e) -> Iterator:
    stack = [e]
    while stack:
        x = stack.pop()
        yield x
        stack.extend(reversed(child_exprs(x)))


def expr_vars(e) -> set[str]:
    """Every variable name mentioned in an expression (array names included)."""
    out = set()
    for x in walk_expr(e):
        if isinstance(x, Var):
            out.add(x.name)
        elif isinstance(x, Index):
            out.add(x.array)
    return out
