"""Lowering of comprehensions to a dataflow plan.

Lowering happens in three passes:

* ``groupby_to_algebra`` turns each group-by qualifier into a generator over
  an explicit ``groupBy`` of (key, lifted values) pairs;
* ``qualifiers_to_flatmap`` produces the naive plan, one FlatMap per
  comprehension whose function evaluates the remaining qualifiers per row;
* ``detect_joins`` restructures FlatMaps: generators over closed collections
  become joins (or broadcast cross products), key lookups into arrays become
  co-groups, and group-bys whose lifted variables are only reduced become
  reduce-by-key with partial aggregation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

from .comp import ir as C
from .comp.printer import show, show_pat, show_qual
from .ops import is_comm_op

log = logging.getLogger(__name__)


# ---------------------------------------------------------------- plan nodes

@dataclass(frozen=True)
class Source:
    var: str


@dataclass(frozen=True)
class RangeSrc:
    lo: Any
    hi: Any


@dataclass(frozen=True)
class SingletonSrc:
    expr: Any


@dataclass(frozen=True)
class ExprSrc:
    """A bag computed by the driver with the naive evaluator."""
    expr: Any


@dataclass(frozen=True)
class FlatMapNode:
    """For each row x of input: bind pat to x, run quals, emit head."""
    input: Any
    pat: Any
    quals: tuple
    head: Any


@dataclass(frozen=True)
class JoinNode:
    """Inputs are (key, payload) pairs; output (key, (left payload, right payload))."""
    left: Any
    right: Any
    left_key: Any = None
    right_key: Any = None


@dataclass(frozen=True)
class CrossNode:
    left: Any
    right: Any


@dataclass(frozen=True)
class GroupByNode:
    input: Any


@dataclass(frozen=True)
class ReduceByKeyNode:
    """Values are tuples reduced componentwise with ``ops`` (a bare value when one op)."""
    ops: tuple
    input: Any


@dataclass(frozen=True)
class CoGroupNode:
    """'merge': right-biased union of two arrays.
    'lookup': left (key, payload) rows each paired with the bag of right pairs with that key."""
    mode: str
    left: Any
    right: Any


@dataclass(frozen=True)
class UnionNode:
    left: Any
    right: Any


@dataclass(frozen=True)
class ReduceNode:
    op: str
    input: Any


@dataclass(frozen=True)
class WithNode:
    """Evaluate sub-plans, bind them (bags, or scalars for reductions), then evaluate expr."""
    bindings: tuple  # ((name, plan, scalar), ...)
    expr: Any


PLAN_TYPES = (Source, RangeSrc, SingletonSrc, ExprSrc, FlatMapNode, JoinNode, CrossNode,
              GroupByNode, ReduceByKeyNode, CoGroupNode, UnionNode, ReduceNode, WithNode)


def plan_children(p) -> list:
    if isinstance(p, (FlatMapNode, GroupByNode, ReduceByKeyNode, ReduceNode)):
        return [p.input]
    if isinstance(p, (JoinNode, CrossNode, CoGroupNode, UnionNode)):
        return [p.left, p.right]
    if isinstance(p, WithNode):
        return [b[1] for b in p.bindings]
    return []


def walk_plan(p):
    yield p
    for c in plan_children(p):
        yield from walk_plan(c)


def count_nodes(p, kind) -> int:
    return sum(1 for n in walk_plan(p) if isinstance(n, kind))


# ---------------------------------------------------------------- group-by to algebra

def _one(xs, make):
    return xs[0] if len(xs) == 1 else make(tuple(xs))


def groupby_to_algebra(c, fresh: C.Fresh | None = None):
    """Replace group-by qualifiers, left to right, by generators over groupBy terms."""
    if not isinstance(c, C.Comp):
        return c
    fresh = fresh or C.Fresh(C.all_names(c))
    while True:
        g = next((i for i, q in enumerate(c.quals) if isinstance(q, C.GroupBy)), None)
        if g is None:
            return c
        c = _lower_group(c, g, fresh)


def _lower_group(c: C.Comp, g: int, fresh: C.Fresh) -> C.Comp:
    q = c.quals[g]
    q1, q2 = list(c.quals[:g]), list(c.quals[g + 1:])
    pat_names = set(C.pat_vars(q.pat))
    used = C.free_vars_quals(q2, [c.head])
    lifted = [v for v in dict.fromkeys(n for x in q1 for n in C.qual_binds(x))
              if v not in pat_names and v in used]
    value = _one([C.CVar(v) for v in lifted], C.CTuple) if lifted else C.UNIT
    inner = C.Comp(C.CTuple((q.key_expr, value)), tuple(q1))
    gv = fresh("g")
    new = [C.Gen(C.PTuple((q.pat, C.PVar(gv))), C.GroupByOp(inner))]
    if len(lifted) == 1:
        x = fresh("x")
        new.append(C.Let(C.PVar(lifted[0]), C.Comp(C.CVar(x), (C.Gen(C.PVar(x), C.CVar(gv)),))))
    elif lifted:
        xs = [fresh("x") for _ in lifted]
        tp = C.PTuple(tuple(C.PVar(x) for x in xs))
        for v, x in zip(lifted, xs):
            new.append(C.Let(C.PVar(v), C.Comp(C.CVar(x), (C.Gen(tp, C.CVar(gv)),))))
    return C.Comp(c.head, tuple(new + q2))


# ---------------------------------------------------------------- naive lowering

UNIT_SRC = SingletonSrc(C.UNIT)
UNIT_PAT = C.PTuple(())


class Planner:
    def __init__(self, taken: set[str] | None = None):
        self.fresh = C.Fresh(taken)
        self.warnings: list[str] = []

    # -- naive
    def naive(self, e):
        """Plan for a closed bag-valued expression without join detection."""
        if isinstance(e, C.CVar):
            return Source(e.name)
        if isinstance(e, C.Range):
            return RangeSrc(e.lo, e.hi)
        if isinstance(e, C.Merge):
            return CoGroupNode("merge", self.naive(e.left), self.naive(e.right))
        if isinstance(e, C.Union_):
            return UnionNode(self.naive(e.left), self.naive(e.right))
        if isinstance(e, C.GroupByOp):
            return GroupByNode(self.naive(e.arg))
        if isinstance(e, C.Comp):
            return self.qualifiers_to_flatmap(groupby_to_algebra(e, self.fresh))
        if isinstance(e, C.BagLit) and len(e.items) == 1 and not _has_comp(e.items[0]):
            return SingletonSrc(e.items[0])
        return self._with(e)

    def qualifiers_to_flatmap(self, c: C.Comp):
        quals = list(c.quals)
        if not quals:
            return SingletonSrc(c.head)
        first = quals[0]
        if isinstance(first, C.Gen):
            return FlatMapNode(self.naive(first.domain), first.pat, tuple(quals[1:]), c.head)
        return FlatMapNode(UNIT_SRC, UNIT_PAT, tuple(quals), c.head)

    def _with(self, e):
        bindings = []

        def hoist(x):
            if isinstance(x, C.Reduce) and isinstance(x.arg, C.Comp) and is_comm_op(x.op):
                name = self.fresh("r")
                bindings.append((name, ReduceNode(x.op, self.naive(x.arg)), True))
                return C.CVar(name)
            if isinstance(x, C.Comp):
                name = self.fresh("t")
                bindings.append((name, self.naive(x), False))
                return C.CVar(name)
            kids = C.children(x)
            return C.rebuild(x, [hoist(k) for k in kids]) if kids else x

        residual = hoist(e)
        if not bindings:
            return ExprSrc(e)
        return WithNode(tuple(bindings), residual)


def _has_comp(e) -> bool:
    return any(isinstance(x, C.Comp) for x in C.walk(e))


# ---------------------------------------------------------------- join detection

@dataclass
class _State:
    base: Any
    pat: Any
    pending: list = field(default_factory=list)

    def schema(self) -> list[str]:
        names = list(C.pat_vars(self.pat))
        for q in self.pending:
            names += C.qual_binds(q)
        return list(dict.fromkeys(names))

    @property
    def is_unit(self) -> bool:
        return self.base == UNIT_SRC and self.pat == UNIT_PAT and not self.pending

    def emit(self, head):
        if not self.pending and head == C.pat_to_expr(self.pat):
            return self.base
        return FlatMapNode(self.base, self.pat, tuple(self.pending), head)


def _tuple_of(names):
    return C.CTuple(tuple(C.CVar(n) for n in names))


def _ptuple_of(names):
    return C.PTuple(tuple(C.PVar(n) for n in names))


def _eq_sides(pred):
    if isinstance(pred, C.CBin) and pred.op == "==":
        return [(pred.left, pred.right), (pred.right, pred.left)]
    return []


class JoinDetector:
    def __init__(self, planner: Planner):
        self.pl = planner

    def run(self, p):
        if isinstance(p, FlatMapNode):
            return self._flatmap(p)
        if isinstance(p, GroupByNode):
            return GroupByNode(self.run(p.input))
        if isinstance(p, ReduceByKeyNode):
            return ReduceByKeyNode(p.ops, self.run(p.input))
        if isinstance(p, ReduceNode):
            return ReduceNode(p.op, self.run(p.input))
        if isinstance(p, JoinNode):
            return JoinNode(self.run(p.left), self.run(p.right), p.left_key, p.right_key)
        if isinstance(p, CrossNode):
            return CrossNode(self.run(p.left), self.run(p.right))
        if isinstance(p, CoGroupNode):
            return CoGroupNode(p.mode, self.run(p.left), self.run(p.right))
        if isinstance(p, UnionNode):
            return UnionNode(self.run(p.left), self.run(p.right))
        if isinstance(p, WithNode):
            return WithNode(tuple((n, self.run(b), s) for n, b, s in p.bindings), p.expr)
        return p

    def plan(self, e):
        return self.run(self.pl.naive(e))

    # -- FlatMap restructuring
    def _flatmap(self, p: FlatMapNode):
        quals = list(p.quals)
        head = p.head
        st = _State(self.run(p.input), p.pat)
        if isinstance(st.base, GroupByNode):
            r = self._reduce_by_key(st, quals, head)
            if r is not None:
                st, quals, head = r
        i = 0
        while i < len(quals):
            q = quals[i]
            schema = st.schema()
            if isinstance(q, C.Gen) and not (C.free_vars(q.domain) & set(schema)) \
                    and not (set(C.pat_vars(q.pat)) & set(schema)):
                quals = self._generator(st, quals, i)
                i = 0
                continue
            if isinstance(q, C.Let):
                q = C.Let(q.pat, self._hoist_lookups(st, q.value))
            elif isinstance(q, C.Cond):
                q = C.Cond(self._hoist_lookups(st, q.pred))
            st.pending.append(q)
            i += 1
        head = self._hoist_lookups(st, head)
        if st.is_unit and not _has_comp(head):
            return SingletonSrc(head)
        return st.emit(head)

    def _generator(self, st: _State, quals: list, i: int) -> list:
        """Consume quals[i], a generator over a closed domain; returns the remaining quals."""
        q = quals[i]
        src = self.plan(q.domain)
        if st.is_unit:
            st.base, st.pat = src, q.pat
            return quals[i + 1:]
        schema = set(st.schema())
        rvars = set(C.pat_vars(q.pat))
        pushed, lkeys, rkeys, used = [], [], [], set()
        bound_later: set[str] = set()
        for j in range(i + 1, len(quals)):
            x = quals[j]
            if isinstance(x, C.Cond):
                fv = C.free_vars(x.pred)
                if not (fv & bound_later):
                    if not (fv & schema):
                        pushed.append(x.pred)
                        used.add(j)
                        continue
                    for a, b in _eq_sides(x.pred):
                        fa, fb = C.free_vars(a), C.free_vars(b)
                        if fa & rvars and not (fa & schema) and fb & schema and not (fb & rvars):
                            rkeys.append(a)
                            lkeys.append(b)
                            used.add(j)
                            break
            bound_later |= set(C.qual_binds(x))
        rest = [x for j, x in enumerate(quals[i + 1:], i + 1) if j not in used]
        names = st.schema()
        rnames = list(dict.fromkeys(C.pat_vars(q.pat)))
        rquals = tuple(C.Cond(x) for x in pushed)
        if lkeys:
            lk, rk = _one(lkeys, C.CTuple), _one(rkeys, C.CTuple)
            left = st.emit(C.CTuple((lk, _tuple_of(names))))
            right = FlatMapNode(src, q.pat, rquals, C.CTuple((rk, _tuple_of(rnames))))
            st.base = JoinNode(left, right, lk, rk)
            st.pat = C.PTuple((C.PVar(self.pl.fresh("k")),
                               C.PTuple((_ptuple_of(names), _ptuple_of(rnames)))))
        else:
            msg = f"no join condition for generator {show_qual(q)}; using a broadcast cross product"
            self.pl.warnings.append(msg)
            log.warning(msg)
            left = st.emit(_tuple_of(names))
            right = FlatMapNode(src, q.pat, rquals, _tuple_of(rnames)) if rquals else \
                _State(src, q.pat).emit(_tuple_of(rnames))
            st.base = CrossNode(left, right)
            st.pat = C.PTuple((_ptuple_of(names), _ptuple_of(rnames)))
        st.pending = []
        return rest

    # -- lookups: [[ h | (k,v) <- X, k == e, ... ]] with e over the current row
    def _hoist_lookups(self, st: _State, e):
        while True:
            found = self._find_lookup(e, set(st.schema()), set())
            if found is None:
                return e
            comp, arr, keys, rest_quals, gen = found
            names = st.schema()
            left = st.emit(C.CTuple((_one(keys, C.CTuple), _tuple_of(names))))
            lv = self.pl.fresh("l")
            st.base = CoGroupNode("lookup", left, self.plan(arr))
            st.pat = C.PTuple((_ptuple_of(names), C.PVar(lv)))
            st.pending = []
            new = C.Comp(comp.head, (C.Gen(gen.pat, C.CVar(lv)),) + tuple(rest_quals))
            e = _replace(e, comp, new)

    def _find_lookup(self, e, schema: set, inner_bound: set):
        if isinstance(e, C.Comp):
            hit = self._match_lookup(e, schema, inner_bound)
            if hit is not None:
                return hit
            bound = set(inner_bound)
            for q in e.quals:
                for x in C.qual_exprs(q):
                    r = self._find_lookup(x, schema, bound)
                    if r is not None:
                        return r
                bound |= set(C.qual_binds(q))
            return self._find_lookup(e.head, schema, bound)
        for k in C.children(e):
            r = self._find_lookup(k, schema, inner_bound)
            if r is not None:
                return r
        return None

    def _match_lookup(self, c: C.Comp, schema: set, inner_bound: set):
        if not c.quals or not isinstance(c.quals[0], C.Gen):
            return None
        g = c.quals[0]
        if not isinstance(g.domain, C.CVar) or g.domain.name in schema | inner_bound:
            return None
        p = g.pat
        if not (isinstance(p, C.PTuple) and len(p.items) == 2):
            return None
        kp = p.items[0]
        if isinstance(kp, C.PVar):
            kvars = [kp.name]
        elif isinstance(kp, C.PTuple) and kp.items and all(isinstance(x, C.PVar) for x in kp.items):
            kvars = [x.name for x in kp.items]
        else:
            return None
        if len(set(kvars)) != len(kvars):
            return None
        local = set(inner_bound)
        for q in c.quals:
            local |= set(C.qual_binds(q))
        found: dict[str, Any] = {}
        used = set()
        for j, q in enumerate(c.quals[1:], 1):
            if isinstance(q, C.GroupBy):
                break
            if not isinstance(q, C.Cond):
                continue
            for a, b in _eq_sides(q.pred):
                if isinstance(a, C.CVar) and a.name in kvars and a.name not in found:
                    fb = C.free_vars(b)
                    if not (fb & local) and fb & schema:
                        found[a.name] = b
                        used.add(j)
                        break
        if len(found) != len(kvars):
            return None
        # later qualifiers may still mention the key variables; they keep their meaning
        rest = [q for j, q in enumerate(c.quals[1:], 1) if j not in used]
        return c, g.domain, [found[k] for k in kvars], rest, g

    # -- group-by whose lifted variables are only reduced
    def _reduce_by_key(self, st: _State, quals: list, head):
        p = st.pat
        if not (isinstance(p, C.PTuple) and len(p.items) == 2 and isinstance(p.items[1], C.PVar)):
            return None
        gv = p.items[1].name
        lifted, k = [], 0
        xs_pat = None
        while k < len(quals) and _is_lift_let(quals[k], gv):
            lifted.append(quals[k].pat.name)
            xs_pat = quals[k].value.quals[0].pat
            k += 1
        rest = quals[k:]
        if C.count_uses_quals(rest, [head], gv):
            return None
        ops = {}
        for v in lifted:
            op = _reduction_op(rest, head, v)
            if op is None:
                return None
            ops[v] = op
        if isinstance(xs_pat, C.PTuple) and len(xs_pat.items) != len(lifted):
            return None  # some lifted components are unused; keep the general form
        new_rest, tail = list(rest), [head]
        for v in lifted:
            new_rest, tail = _reduce_away(new_rest, tail, v, ops[v])
        value_pat = _one([C.PVar(v) for v in lifted], C.PTuple) if lifted else C.PVar(gv)
        base = ReduceByKeyNode(tuple(ops[v] for v in lifted), st.base.input)
        return _State(base, C.PTuple((p.items[0], value_pat))), new_rest, tail[0]


def _is_lift_let(q, gv) -> bool:
    return (isinstance(q, C.Let) and isinstance(q.pat, C.PVar) and isinstance(q.value, C.Comp)
            and len(q.value.quals) == 1 and isinstance(q.value.quals[0], C.Gen)
            and q.value.quals[0].domain == C.CVar(gv) and isinstance(q.value.head, C.CVar))


def _reducible_sites(e, v, ops: list) -> int:
    """Count uses of v in e that sit under a reduction; collects the ops used."""
    if isinstance(e, C.Reduce):
        arg = e.arg
        if arg == C.CVar(v):
            ops.append(e.op)
            return 1
        if isinstance(arg, C.Union_):
            sides = [arg.left, arg.right]
            if C.CVar(v) in sides:
                other = sides[1] if sides[0] == C.CVar(v) else sides[0]
                if not C.count_uses(other, v):
                    ops.append(e.op)
                    return 1
    if isinstance(e, C.Comp):
        # uses inside nested comprehensions are only safe when not rebound there
        n = 0
        for q in e.quals:
            for x in C.qual_exprs(q):
                n += _reducible_sites(x, v, ops)
            if v in C.qual_binds(q):
                return n
        return n + _reducible_sites(e.head, v, ops)
    return sum(_reducible_sites(k, v, ops) for k in C.children(e))


def _reduction_op(rest, head, v):
    ops: list[str] = []
    n = 0
    for q in rest:
        for x in C.qual_exprs(q):
            n += _reducible_sites(x, v, ops)
    n += _reducible_sites(head, v, ops)
    total = C.count_uses_quals(rest, [head], v)
    if n == 0 or n != total or len(set(ops)) != 1 or not is_comm_op(ops[0]):
        return None
    return ops[0]


def _reduce_away(quals, tail, v, op):
    """Replace op/v by v and op/(w ++ v) by op/(w ++ {v})."""
    def fix(e):
        if isinstance(e, C.Reduce) and e.op == op:
            if e.arg == C.CVar(v):
                return C.CVar(v)
            if isinstance(e.arg, C.Union_) and C.CVar(v) in (e.arg.left, e.arg.right):
                single = C.BagLit((C.CVar(v),))
                if e.arg.left == C.CVar(v):
                    return C.Reduce(op, C.Union_(single, e.arg.right))
                return C.Reduce(op, C.Union_(e.arg.left, single))
        return e

    def go(e):
        return C.transform(e, fix)

    out = []
    for q in quals:
        if isinstance(q, C.Gen):
            out.append(C.Gen(q.pat, go(q.domain)))
        elif isinstance(q, C.Let):
            out.append(C.Let(q.pat, go(q.value)))
        elif isinstance(q, C.Cond):
            out.append(C.Cond(go(q.pred)))
        else:
            out.append(C.GroupBy(q.pat, None if q.key is None else go(q.key)))
    return out, [go(t) for t in tail]


def _replace(e, old, new):
    if e == old:
        return new
    kids = C.children(e)
    if not kids:
        return e
    if isinstance(e, C.Comp):
        quals = []
        for q in e.quals:
            if isinstance(q, C.Gen):
                quals.append(C.Gen(q.pat, _replace(q.domain, old, new)))
            elif isinstance(q, C.Let):
                quals.append(C.Let(q.pat, _replace(q.value, old, new)))
            elif isinstance(q, C.Cond):
                quals.append(C.Cond(_replace(q.pred, old, new)))
            else:
                quals.append(C.GroupBy(q.pat, None if q.key is None else _replace(q.key, old, new)))
        return C.Comp(_replace(e.head, old, new), tuple(quals))
    return C.rebuild(e, [_replace(k, old, new) for k in kids])


# ---------------------------------------------------------------- public entry points

def qualifiers_to_flatmap(c: C.Comp, planner: Planner | None = None):
    pl = planner or Planner(C.all_names(c))
    return pl.qualifiers_to_flatmap(c)


def detect_joins(p, planner: Planner | None = None):
    return JoinDetector(planner or Planner(_plan_names(p))).run(p)


def _plan_names(p) -> set[str]:
    out: set[str] = set()
    for n in walk_plan(p):
        for v in vars(n).values():
            if isinstance(v, tuple):
                for x in v:
                    if not isinstance(x, (str, int)) and not isinstance(x, PLAN_TYPES):
                        try:
                            out |= C.all_names(x)
                        except TypeError:
                            pass
            elif not isinstance(v, (str, int)) and v is not None and not isinstance(v, PLAN_TYPES):
                try:
                    out |= C.all_names(v)
                except TypeError:
                    pass
    return out


def plan_expr(e, optimize: bool = True, planner: Planner | None = None):
    """Plan for a closed bag-valued comprehension term."""
    pl = planner or Planner(C.all_names(e))
    naive = pl.naive(e)
    return JoinDetector(pl).run(naive) if optimize else naive


@dataclass(frozen=True)
class PAssign:
    var: str
    plan: Any
    scalar: bool = False


@dataclass(frozen=True)
class PWhile:
    cond: Any
    body: tuple


@dataclass(frozen=True)
class PBlock:
    items: tuple


def plan_target(code, optimize: bool = True) -> list:
    taken: set[str] = set()
    for e in C.target_exprs(code):
        taken |= C.all_names(e)
    pl = Planner(taken)

    def go(items):
        out = []
        for c in items:
            if isinstance(c, C.TAssign):
                out.append(PAssign(c.var, plan_expr(c.value, optimize, pl), c.scalar))
            elif isinstance(c, C.TWhile):
                out.append(PWhile(plan_expr(c.cond, optimize, pl), tuple(go(c.body))))
            else:
                out.append(PBlock(tuple(go(c.items))))
        return out

    return go(code)


# ---------------------------------------------------------------- printing

def node_label(p) -> str:
    if isinstance(p, Source):
        return f"SOURCE {p.var}"
    if isinstance(p, RangeSrc):
        return f"RANGE({show(p.lo)},{show(p.hi)})"
    if isinstance(p, SingletonSrc):
        return f"SINGLETON {{{show(p.expr)}}}"
    if isinstance(p, ExprSrc):
        return f"EXPR {show(p.expr)}"
    if isinstance(p, FlatMapNode):
        qs = "".join(", " + show_qual(q) for q in p.quals)
        return f"FLATMAP({show_pat(p.pat)}{qs} => {show(p.head)})"
    if isinstance(p, JoinNode):
        if p.left_key is None:
            return "JOIN"
        return f"JOIN(key={show(p.left_key)} = {show(p.right_key)})"
    if isinstance(p, CrossNode):
        return "CROSS(broadcast)"
    if isinstance(p, GroupByNode):
        return "GROUP_BY_KEY"
    if isinstance(p, ReduceByKeyNode):
        return f"REDUCE_BY_KEY({','.join(p.ops) or 'distinct'})"
    if isinstance(p, CoGroupNode):
        return f"COGROUP({p.mode})"
    if isinstance(p, UnionNode):
        return "UNION"
    if isinstance(p, ReduceNode):
        return f"REDUCE({p.op})"
    if isinstance(p, WithNode):
        names = ", ".join(f"{n}{'' if s else '[]'}" for n, _, s in p.bindings)
        return f"WITH {names} => {show(p.expr)}"
    raise TypeError(f"not a plan node: {p!r}")


def show_plan(p) -> str:
    lines = [node_label(p)]

    def go(node, prefix):
        kids = plan_children(node)
        for idx, k in enumerate(kids):
            last = idx == len(kids) - 1
            lines.append(prefix + ("└─ " if last else "├─ ") + node_label(k))
            go(k, prefix + ("   " if last else "│  "))

    go(p, "")
    return "\n".join(lines)


def show_planned(code, indent: int = 0) -> str:
    pad = "  " * indent
    out = []
    for c in code:
        if isinstance(c, PAssign):
            out.append(f"{pad}{c.var} {'=' if c.scalar else ':='}")
            out += [pad + "  " + line for line in show_plan(c.plan).splitlines()]
        elif isinstance(c, PWhile):
            out.append(f"{pad}while")
            out += [pad + "  " + line for line in show_plan(c.cond).splitlines()]
            out.append(f"{pad}do")
            out.append(show_planned(c.body, indent + 1))
            out.append(f"{pad}end")
        else:
            out.append(show_planned(c.items, indent))
    return "\n".join(out)
