"""Access sets, affine classification and the parallelizability check.

A parallel region is an outermost for-loop that contains no while-loop.
Contexts are the indexes of the loops enclosing a statement inside that
region; a traversal `for v in e` contributes an implicit position index
`v#pos` that destinations can never mention.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .errors import NotAffine
from .frontend import ast as A


@dataclass(frozen=True)
class DestOccurrence:
    dest: object
    context: tuple = ()
    pos: tuple = field(default=(0, 0), compare=False)


@dataclass
class AccessSets:
    readers: list = field(default_factory=list)
    writers: list = field(default_factory=list)
    aggregators: list = field(default_factory=list)

    def extend(self, other: AccessSets) -> None:
        self.readers += other.readers
        self.writers += other.writers
        self.aggregators += other.aggregators

    def dests(self, which: str) -> set:
        return {o.dest for o in getattr(self, which)}


@dataclass(frozen=True)
class AffineExpr:
    constant: int = 0
    terms: tuple = ()  # sorted ((index, coeff), ...), coeffs nonzero

    @property
    def coeffs(self) -> dict[str, int]:
        return dict(self.terms)

    def evaluate(self, env: dict[str, int]) -> int:
        return self.constant + sum(c * env[i] for i, c in self.terms)


@dataclass(frozen=True)
class Violation:
    rule: str  # R1 | R2 | R2a | R2b
    message: str
    locations: tuple = ()

    def render(self) -> str:
        where = self.locations[0] if self.locations else (0, 0)
        return f"RULE {self.rule} at {where[0]}:{where[1]}: {self.message}"


@dataclass
class Diagnostics:
    violations: list = field(default_factory=list)
    sequential: bool = False

    @property
    def verdict(self) -> str:
        return "rejected" if self.violations else "accepted"

    @property
    def accepted(self) -> bool:
        return not self.violations

    @property
    def rules(self) -> set[str]:
        return {v.rule for v in self.violations}

    def render(self) -> str:
        return "\n".join(v.render() for v in self.violations)


def pos_index(var: str) -> str:
    return f"{var}#pos"


# ---------------------------------------------------------------- access sets

def loop_names(stmts) -> set[str]:
    out = set()
    for s in A.walk_stmts(stmts):
        if isinstance(s, A.ForRange):
            out.add(s.index)
        elif isinstance(s, A.ForIn):
            out.add(s.var)
    return out


def expr_readers(e, bound: set[str], ctx: tuple = ()) -> list[DestOccurrence]:
    """L-values read by an expression (loop-bound names excluded)."""
    out: list[DestOccurrence] = []

    def go(x):
        if isinstance(x, A.Var):
            if x.name not in bound:
                out.append(DestOccurrence(x, ctx, x.pos))
        elif isinstance(x, A.Index):
            out.append(DestOccurrence(x, ctx, x.pos))
            for i in x.indexes:
                go(i)
        elif isinstance(x, A.Proj) and A.is_dest(x) and _dest_root_readable(x, bound):
            out.append(DestOccurrence(x, ctx, x.pos))
            out.extend(dest_index_readers(x, bound, ctx))
        else:
            for c in A.child_exprs(x):
                go(c)

    go(e)
    return out


def _dest_root_readable(d, bound) -> bool:
    while isinstance(d, A.Proj):
        d = d.base
    return not (isinstance(d, A.Var) and d.name in bound)


def dest_index_readers(d, bound: set[str], ctx: tuple = ()) -> list[DestOccurrence]:
    """Readers inside the index expressions of a destination."""
    if isinstance(d, A.Proj):
        return dest_index_readers(d.base, bound, ctx)
    if isinstance(d, A.Index):
        out = []
        for i in d.indexes:
            out += expr_readers(i, bound, ctx)
        return out
    return []


def access_sets(s, bound: set[str] | None = None, ctx: tuple = ()) -> AccessSets:
    if bound is None:
        bound = loop_names(s)
    acc = AccessSets()
    if isinstance(s, A.IncrUpdate):
        acc.aggregators.append(DestOccurrence(s.dest, ctx, s.pos))
        acc.readers += dest_index_readers(s.dest, bound, ctx) + expr_readers(s.rhs, bound, ctx)
    elif isinstance(s, A.Assign):
        acc.writers.append(DestOccurrence(s.dest, ctx, s.pos))
        acc.readers += dest_index_readers(s.dest, bound, ctx) + expr_readers(s.rhs, bound, ctx)
    elif isinstance(s, A.VarDecl):
        acc.writers.append(DestOccurrence(A.Var(s.name, s.pos), ctx, s.pos))
        acc.readers += expr_readers(s.init, bound, ctx)
    elif isinstance(s, A.ForRange):
        acc.readers += expr_readers(s.lo, bound, ctx) + expr_readers(s.hi, bound, ctx)
        acc.extend(access_sets(s.body, bound, ctx + (s.index,)))
    elif isinstance(s, A.ForIn):
        acc.readers += expr_readers(s.coll, bound, ctx)
        acc.extend(access_sets(s.body, bound, ctx + (pos_index(s.var),)))
    elif isinstance(s, A.While):
        acc.readers += expr_readers(s.cond, bound, ctx)
        acc.extend(access_sets(s.body, bound, ctx))
    elif isinstance(s, A.If):
        acc.readers += expr_readers(s.cond, bound, ctx)
        acc.extend(access_sets(s.then, bound, ctx))
        if s.else_ is not None:
            acc.extend(access_sets(s.else_, bound, ctx))
    elif isinstance(s, A.Block):
        for x in s.stmts:
            acc.extend(access_sets(x, bound, ctx))
    return acc


# ---------------------------------------------------------------- overlap / affine

def overlap(d1, d2) -> bool:
    if isinstance(d1, A.Proj) and isinstance(d2, A.Proj):
        return d1.field == d2.field and overlap(d1.base, d2.base)
    if isinstance(d1, A.Proj):
        return overlap(d1.base, d2)
    if isinstance(d2, A.Proj):
        return overlap(d1, d2.base)
    return A.dest_root(d1) == A.dest_root(d2)


def affine_form(e, indexes: Iterable[str]) -> AffineExpr | None:
    idx = set(indexes)

    def go(x):
        if isinstance(x, A.Const):
            v = x.value
            if isinstance(v, int) and not isinstance(v, bool):
                return v, {}
            return None
        if isinstance(x, A.Var):
            return (0, {x.name: 1}) if x.name in idx else None
        if isinstance(x, A.UnOp) and x.op == "-":
            r = go(x.operand)
            return None if r is None else (-r[0], {k: -c for k, c in r[1].items()})
        if isinstance(x, A.BinOp) and x.op in ("+", "-"):
            a, b = go(x.left), go(x.right)
            if a is None or b is None:
                return None
            sign = 1 if x.op == "+" else -1
            terms = dict(a[1])
            for k, c in b[1].items():
                terms[k] = terms.get(k, 0) + sign * c
            return a[0] + sign * b[0], terms
        if isinstance(x, A.BinOp) and x.op == "*":
            a, b = go(x.left), go(x.right)
            if a is None or b is None:
                return None
            if not a[1]:
                a, b = b, a
            if b[1]:
                return None  # product of two index terms
            return a[0] * b[0], {k: c * b[0] for k, c in a[1].items()}
        return None

    r = go(e)
    if r is None:
        return None
    return AffineExpr(r[0], tuple(sorted((k, c) for k, c in r[1].items() if c != 0)))


def dest_indexes(d, loop_vars: set[str]) -> set[str]:
    """Loop indexes mentioned anywhere inside the index expressions of d."""
    if isinstance(d, A.Proj):
        return dest_indexes(d.base, loop_vars)
    if isinstance(d, A.Index):
        out = set()
        for i in d.indexes:
            out |= A.expr_vars(i) & loop_vars
        return out
    return set()


def is_affine_dest(d, context: Iterable[str]) -> bool:
    ctx = set(context)
    if isinstance(d, A.Var):
        return not ctx
    if isinstance(d, A.Proj):
        return is_affine_dest(d.base, ctx)
    used: set[str] = set()
    for i in d.indexes:
        a = affine_form(i, ctx)
        if a is None:
            return False
        used |= set(a.coeffs)
    return ctx <= used


# ---------------------------------------------------------------- parallelizability check

def contains_while(s) -> bool:
    return any(isinstance(x, A.While) for x in A.walk_stmts(s))


@dataclass
class _Unit:
    """A simple statement (or a pseudo-statement for a loop/if header)."""
    order: int
    stmt: object
    context: tuple
    acc: AccessSets


def _units(loop) -> list[_Unit]:
    bound = loop_names(loop)
    units: list[_Unit] = []

    def add(stmt, ctx, acc):
        units.append(_Unit(len(units), stmt, ctx, acc))

    def go(s, ctx):
        if isinstance(s, A.SIMPLE_STMTS):
            add(s, ctx, access_sets(s, bound, ctx))
        elif isinstance(s, A.ForRange):
            add(s, ctx, AccessSets(readers=expr_readers(s.lo, bound, ctx)
                                   + expr_readers(s.hi, bound, ctx)))
            go(s.body, ctx + (s.index,))
        elif isinstance(s, A.ForIn):
            add(s, ctx, AccessSets(readers=expr_readers(s.coll, bound, ctx)))
            go(s.body, ctx + (pos_index(s.var),))
        elif isinstance(s, A.If):
            add(s, ctx, AccessSets(readers=expr_readers(s.cond, bound, ctx)))
            go(s.then, ctx)
            if s.else_ is not None:
                go(s.else_, ctx)
        elif isinstance(s, A.Block):
            for x in s.stmts:
                go(x, ctx)
        elif isinstance(s, A.While):
            add(s, ctx, AccessSets(readers=expr_readers(s.cond, bound, ctx)))
            go(s.body, ctx)

    go(loop, ())
    return units


def _show(d) -> str:
    from .frontend.printer import unparse_expr
    return unparse_expr(d)


def check_parallelizable(loop) -> Diagnostics:
    if not isinstance(loop, (A.ForRange, A.ForIn)):
        raise TypeError("check_parallelizable expects a for-loop")
    if contains_while(loop):
        return Diagnostics(sequential=True)
    loop_vars = loop_names(loop)
    units = _units(loop)
    diags = Diagnostics()
    seen = set()

    def report(rule, msg, locs):
        key = (rule, msg)
        if key not in seen:
            seen.add(key)
            diags.violations.append(Violation(rule, msg, tuple(locs)))

    # Restriction 1
    for u in units:
        for o in u.acc.writers:
            if not is_affine_dest(o.dest, u.context):
                missing = ", ".join(sorted(i for i in u.context
                                           if i not in dest_indexes(o.dest, loop_vars)))
                report("R1", f"destination {_show(o.dest)} is not affine"
                       + (f" (does not cover {missing})" if missing else ""), [o.pos])

    # Restriction 2 with exceptions (a) and (b)
    for u1 in units:
        targets = [(o, "W") for o in u1.acc.writers] + [(o, "A") for o in u1.acc.aggregators]
        for o1, kind in targets:
            for u2 in units:
                for o2 in u2.acc.readers:
                    if not overlap(o1.dest, o2.dest):
                        continue
                    # reading a field of the location counts as reading the location
                    same = o1.dest == o2.dest or _field_of(o2.dest, o1.dest)
                    precedes = u1.order < u2.order
                    d1 = _show(o1.dest)
                    if kind == "W" and same:
                        # a statement reads its own location before writing it
                        if precedes or u1 is u2:
                            continue
                        report("R2a", f"{d1} is read before it is written in the loop",
                               [o2.pos, o1.pos])
                    elif kind == "A" and same:
                        ctx_ok = set(u1.context) & set(u2.context) \
                            == dest_indexes(o1.dest, loop_vars)
                        if precedes and ctx_ok and is_affine_dest(o2.dest, u2.context):
                            continue
                        report("R2b", f"{d1} is incremented and read in the same loop "
                               f"outside the loops of its indexes", [o1.pos, o2.pos])
                    else:
                        report("R2", f"{d1} is {'written' if kind == 'W' else 'incremented'}"
                               f" and {_show(o2.dest)} is read in the same loop",
                               [o1.pos, o2.pos])
    return diags


def _field_of(d, base) -> bool:
    while isinstance(d, A.Proj):
        d = d.base
        if d == base:
            return True
    return False


def parallel_loops(stmts) -> list:
    """Outermost for-loops that will be translated in parallel, in program order."""
    out = []

    def go(s):
        if isinstance(s, (A.ForRange, A.ForIn)) and not contains_while(s):
            out.append(s)
            return
        for c in A.child_stmts(s):
            go(c)

    for s in (stmts if isinstance(stmts, (list, tuple)) else [stmts]):
        go(s)
    return out


def check_program(p: A.SourceProgram) -> list[tuple[object, Diagnostics]]:
    return [(loop, check_parallelizable(loop)) for loop in parallel_loops(p.body)]


# ---------------------------------------------------------------- loop distribution

def distribute_loops(s):
    """Split every parallel for-loop over a block into one loop per statement."""
    if isinstance(s, A.SourceProgram):
        return A.SourceProgram(tuple(distribute_loops(x) for x in s.body))
    if isinstance(s, (A.ForRange, A.ForIn)):
        if contains_while(s):
            return s
        d = check_parallelizable(s)
        if not d.accepted:
            raise NotAffine("cannot distribute a rejected loop:\n" + d.render(), d)
        return _distribute(s)
    if isinstance(s, A.Block):
        return A.Block(tuple(distribute_loops(x) for x in s.stmts), s.pos)
    if isinstance(s, A.If):
        els = None if s.else_ is None else distribute_loops(s.else_)
        return A.If(s.cond, distribute_loops(s.then), els, s.pos)
    return s  # simple statements and while-loops


def _with_body(loop, body):
    if isinstance(loop, A.ForRange):
        return A.ForRange(loop.index, loop.lo, loop.hi, body, loop.pos)
    return A.ForIn(loop.var, loop.coll, body, loop.pos)


def _flat(stmts) -> list:
    out = []
    for s in stmts:
        if isinstance(s, A.Block):
            out += _flat(s.stmts)
        else:
            out.append(s)
    return out


def _distribute(s):
    if isinstance(s, (A.ForRange, A.ForIn)):
        body = _distribute(s.body)
        parts = _flat([body])
        if len(parts) == 1:
            return _with_body(s, parts[0])
        return A.Block(tuple(_with_body(s, p) for p in parts), s.pos)
    if isinstance(s, A.Block):
        parts = _flat([_distribute(x) for x in s.stmts])
        return parts[0] if len(parts) == 1 else A.Block(tuple(parts), s.pos)
    if isinstance(s, A.If):
        els = None if s.else_ is None else _distribute(s.else_)
        return A.If(s.cond, _distribute(s.then), els, s.pos)
    return s
