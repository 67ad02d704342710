"""Semantics-preserving simplification of comprehension terms.

The rewrites run bottom-up to a fixpoint: unnesting of generator domains,
singleton generators to lets, let inlining, splitting of tuple lets and
tuple equalities, constant folding, reduction folding, static merges of
constant-keyed literals, and group-by key tidying.
"""

from __future__ import annotations

from ..ops import BINOPS, UNOPS, comm_op, in_range, is_comm_op
from . import ir as C

EMPTY = C.BagLit(())
_MAX_ROUNDS = 60


def normalize(e):
    for _ in range(_MAX_ROUNDS):
        e2 = C.transform(e, _step)
        if e2 == e:
            return e
        e = e2
    return e


def normalize_target(code):
    return map_target(code, normalize)


def map_target(code, fn):
    out = []
    for c in code:
        if isinstance(c, C.TAssign):
            out.append(C.TAssign(c.var, fn(c.value), c.scalar))
        elif isinstance(c, C.TWhile):
            out.append(C.TWhile(fn(c.cond), tuple(map_target(c.body, fn))))
        else:
            out.append(C.TBlock(tuple(map_target(c.items, fn))))
    return out


# ---------------------------------------------------------------- node rules

def _step(e):
    if isinstance(e, C.Comp):
        return _comp_step(e)
    if isinstance(e, C.Reduce):
        return _reduce_step(e)
    if isinstance(e, C.CBin):
        return _bin_step(e)
    if isinstance(e, C.CUn):
        if isinstance(e.operand, C.CConst):
            return _fold(lambda: UNOPS[e.op](e.operand.value), e)
        if e.op == "!" and isinstance(e.operand, C.CUn) and e.operand.op == "!":
            return e.operand.operand
        return e
    if isinstance(e, C.InRange):
        if all(isinstance(x, C.CConst) for x in (e.x, e.lo, e.hi)):
            return _fold(lambda: in_range(e.x.value, e.lo.value, e.hi.value), e)
        return e
    if isinstance(e, C.NonEmpty):
        if isinstance(e.arg, C.BagLit):
            return C.CConst(len(e.arg.items) > 0)
        if isinstance(e.arg, C.Range) and isinstance(e.arg.lo, C.CConst) and isinstance(e.arg.hi, C.CConst):
            return _fold(lambda: e.arg.lo.value <= e.arg.hi.value, e)
        return e
    if isinstance(e, C.CProj):
        return _proj_step(e)
    if isinstance(e, C.Union_):
        if e.left == EMPTY:
            return e.right
        if e.right == EMPTY:
            return e.left
        if isinstance(e.left, C.BagLit) and isinstance(e.right, C.BagLit):
            return C.BagLit(e.left.items + e.right.items)
        return e
    if isinstance(e, C.Merge):
        return _merge_step(e)
    return e


def _fold(thunk, orig):
    try:
        v = thunk()
    except Exception:
        return orig  # leave runtime errors to run time
    if isinstance(v, (bool, int, float, str)):
        return C.CConst(v)
    return orig


def _bin_step(e: C.CBin):
    l, r = e.left, e.right
    if isinstance(l, C.CConst) and isinstance(r, C.CConst):
        return _fold(lambda: BINOPS[e.op](l.value, r.value), e)
    if is_comm_op(e.op):
        op = comm_op(e.op)
        if op.has_unit:
            unit = C.CConst(op.unit)
            if r == unit:
                return l
            if l == unit:
                return r
    return e


def _proj_step(e: C.CProj):
    base = e.expr
    if isinstance(base, C.CTuple) and e.field.startswith("_") and e.field[1:].isdigit():
        i = int(e.field[1:]) - 1
        if 0 <= i < len(base.items):
            return base.items[i]
    if isinstance(base, C.CRecord):
        for n, x in base.fields:
            if n == e.field:
                return x
    if isinstance(base, C.SetField):
        if base.field == e.field:
            return base.value
    return e


def _binop_of(symbol: str):
    if symbol in BINOPS:
        return lambda a, b: C.CBin(symbol, a, b)
    if symbol in ("min", "max"):
        return lambda a, b: C.CCall(symbol, (a, b))
    return None


def _reduce_step(e: C.Reduce):
    arg = e.arg
    op = comm_op(e.op)
    comb = _binop_of(e.op)
    if isinstance(arg, C.BagLit):
        if not arg.items:
            return C.CConst(op.unit) if op.has_unit else e
        if len(arg.items) == 1:
            return arg.items[0]
        if comb is not None:
            acc = arg.items[0]
            for x in arg.items[1:]:
                acc = comb(acc, x)
            return acc
        return e
    if isinstance(arg, C.Union_) and comb is not None and op.has_unit:
        # the reduction of an empty part is the unit, so splitting is exact
        if isinstance(arg.left, C.BagLit) and len(arg.left.items) == 1:
            return comb(arg.left.items[0], C.Reduce(e.op, arg.right))
        if isinstance(arg.right, C.BagLit) and len(arg.right.items) == 1:
            return comb(C.Reduce(e.op, arg.left), arg.right.items[0])
    return e


def _const_key(item):
    if isinstance(item, C.CTuple) and len(item.items) == 2 and C.is_const(item.items[0]):
        return C.const_value(item.items[0])
    return None


def _merge_step(e: C.Merge):
    x, y = e.left, e.right
    if y == EMPTY:
        return x
    if x == EMPTY:
        return y
    if isinstance(x, C.BagLit) and isinstance(y, C.BagLit):
        kx = [_const_key(i) for i in x.items]
        ky = [_const_key(i) for i in y.items]
        if None not in kx and None not in ky and len(set(kx)) == len(kx) and len(set(ky)) == len(ky):
            keep = tuple(i for i, k in zip(x.items, kx) if k not in set(ky))
            return C.BagLit(keep + y.items)
    if isinstance(x, C.BagLit) and len(x.items) == 1 and isinstance(y, C.Comp):
        absorbed = _absorb(x.items[0], y)
        if absorbed is not None:
            return absorbed
    return e


def _absorb(old, comp: C.Comp):
    """{(c,X)} <| [[ (c,H) | lets.., nonempty(b) ]]  ->  {(c,H')} when H' is X for an empty b.

    The guarded comprehension yields (c,H) when b is nonempty and nothing
    otherwise; if H reduces to X when b is empty, both cases agree.
    """
    ck = _const_key(old)
    head = comp.head
    if ck is None or _const_key(head) != ck:
        return None
    lets = {}
    guard = None
    for q in comp.quals:
        if isinstance(q, C.Let) and isinstance(q.pat, C.PVar):
            lets[q.pat.name] = q.value
        elif isinstance(q, C.Cond) and isinstance(q.pred, C.NonEmpty) and isinstance(q.pred.arg, C.CVar) \
                and guard is None:
            guard = q.pred.arg.name
        else:
            return None
    if guard is None or guard not in lets:
        return None
    # every let must be closed with respect to the others so they can be inlined
    if any(C.free_vars(v) & set(lets) for v in lets.values()):
        return None
    value = head.items[1]
    # lifted bags drawn from the same qualifiers as the guard are empty together with it
    g = lets[guard]
    empties = {n: EMPTY for n, v in lets.items()
               if n == guard or (isinstance(v, C.Comp) and isinstance(g, C.Comp) and v.quals == g.quals)}
    empty_case = normalize(C.subst(value, {**lets, **empties}))
    if empty_case != old.items[1]:
        return None
    return C.BagLit((C.CTuple((head.items[0], C.subst(value, lets))),))


# ---------------------------------------------------------------- comprehension rules

def _comp_step(c: C.Comp):
    quals = list(c.quals)
    if not quals:
        return C.BagLit((c.head,))
    for rule in (_rule_trivial, _rule_unnest, _rule_split, _rule_inline_let, _rule_self_join,
                 _rule_groupby_key, _rule_identity):
        r = rule(c)
        if r is not None:
            return r
    return c


def _rule_trivial(c: C.Comp):
    quals = []
    changed = False
    for q in c.quals:
        if isinstance(q, C.Cond) and isinstance(q.pred, C.CConst) and isinstance(q.pred.value, bool):
            if not q.pred.value:
                return EMPTY
            changed = True
            continue
        if isinstance(q, C.Gen) and isinstance(q.domain, C.BagLit):
            if not q.domain.items:
                return EMPTY
            if len(q.domain.items) == 1:
                quals.append(C.Let(q.pat, q.domain.items[0]))
                changed = True
                continue
        if isinstance(q, C.Gen) and isinstance(q.domain, C.Range) and \
                all(isinstance(x, C.CConst) for x in (q.domain.lo, q.domain.hi)) and \
                isinstance(q.domain.lo.value, int) and q.domain.lo.value > q.domain.hi.value:
            return EMPTY
        quals.append(q)
    if changed:
        return C.Comp(c.head, tuple(quals)) if quals else C.BagLit((c.head,))
    return None


def _binds_before(quals, idx) -> bool:
    return any(C.qual_binds(q) for q in quals[:idx])


def _rule_unnest(c: C.Comp):
    quals = list(c.quals)
    for idx, q in enumerate(quals):
        if not (isinstance(q, C.Gen) and isinstance(q.domain, C.Comp)):
            continue
        inner = q.domain
        if any(isinstance(x, C.GroupBy) for x in inner.quals) and _binds_before(quals, idx):
            continue
        outer_names = C.all_names(C.Comp(c.head, tuple(quals[:idx] + quals[idx + 1:])))
        outer_names |= C.free_vars(inner)
        inner_binders = set()
        for x in inner.quals:
            inner_binders |= set(C.qual_binds(x))
        clash = inner_binders & outer_names
        iq, ih = list(inner.quals), inner.head
        if clash:
            fresh = C.Fresh(outer_names | C.all_names(inner))
            iq, ih = rename_bound(iq, ih, {b: fresh(b) for b in clash})
        new = quals[:idx] + iq + [C.Let(q.pat, ih)] + quals[idx + 1:]
        return C.Comp(c.head, tuple(new))
    return None


def rename_bound(quals, head, ren: dict[str, str]):
    """Rename the binders listed in `ren` (and their uses) inside a qualifier list."""
    out = []
    m: dict[str, C.CExpr] = {}
    for q in quals:
        if isinstance(q, C.Gen):
            q = C.Gen(q.pat, C.subst(q.domain, m))
        elif isinstance(q, C.Let):
            q = C.Let(q.pat, C.subst(q.value, m))
        elif isinstance(q, C.Cond):
            q = C.Cond(C.subst(q.pred, m))
        else:
            q = C.GroupBy(q.pat, C.subst(q.key_expr, m))
        binds = C.qual_binds(q)
        if binds:
            for b in binds:
                m.pop(b, None)
            hit = {b: ren[b] for b in binds if b in ren}
            if hit:
                q = _rename_binder(q, hit)
                for b, nb in hit.items():
                    m[b] = C.CVar(nb)
        out.append(q)
    return out, C.subst(head, m)


def _rename_binder(q, ren):
    if isinstance(q, C.Gen):
        return C.Gen(C.rename_pat(q.pat, ren), q.domain)
    if isinstance(q, C.Let):
        return C.Let(C.rename_pat(q.pat, ren), q.value)
    return C.GroupBy(C.rename_pat(q.pat, ren), q.key_expr)


def _rule_split(c: C.Comp):
    quals = list(c.quals)
    for idx, q in enumerate(quals):
        if isinstance(q, C.Let) and isinstance(q.pat, C.PTuple) and isinstance(q.value, C.CTuple) \
                and len(q.pat.items) == len(q.value.items):
            names = set(C.pat_vars(q.pat))
            if any(C.free_vars(v) & names for v in q.value.items):
                continue
            lets = [C.Let(p, v) for p, v in zip(q.pat.items, q.value.items)]
            return C.Comp(c.head, tuple(quals[:idx] + lets + quals[idx + 1:]))
        if isinstance(q, C.Cond) and isinstance(q.pred, C.CBin) and q.pred.op == "==" \
                and isinstance(q.pred.left, C.CTuple) and isinstance(q.pred.right, C.CTuple) \
                and len(q.pred.left.items) == len(q.pred.right.items):
            conds = [C.Cond(C.CBin("==", a, b)) for a, b in zip(q.pred.left.items, q.pred.right.items)]
            return C.Comp(c.head, tuple(quals[:idx] + conds + quals[idx + 1:]))
    return None


def is_simple(e) -> bool:
    if isinstance(e, (C.CVar, C.CConst)):
        return True
    if isinstance(e, C.CTuple):
        return all(is_simple(x) for x in e.items)
    if isinstance(e, C.CProj):
        return isinstance(e.expr, C.CVar)
    if isinstance(e, C.BagLit):
        return len(e.items) <= 1 and all(is_simple(x) for x in e.items)
    return False


def _uses_in_comps(e, name: str) -> int:
    """Free occurrences of `name` that sit inside a nested comprehension."""
    if isinstance(e, C.Comp):
        return C.count_uses(e, name)
    return sum(_uses_in_comps(k, name) for k in C.children(e))


def _use_sites(quals, head, name: str):
    """(index, inside_comp) for every free use of `name` in quals/head, up to its rebinding."""
    sites = []
    for i, q in enumerate(quals):
        for x in C.qual_exprs(q):
            n = C.count_uses(x, name)
            inner = _uses_in_comps(x, name)
            sites += [(i, False)] * (n - inner) + [(i, True)] * inner
        if name in C.qual_binds(q):
            return sites
    n = C.count_uses(head, name)
    inner = _uses_in_comps(head, name)
    return sites + [(len(quals), False)] * (n - inner) + [(len(quals), True)] * inner


def _rule_inline_let(c: C.Comp):
    quals = list(c.quals)
    for idx, q in enumerate(quals):
        if not isinstance(q, C.Let):
            continue
        rest = quals[idx + 1:]
        if isinstance(q.pat, C.PTuple):
            if not any(_use_sites(rest, c.head, v) for v in C.pat_vars(q.pat)):
                return C.Comp(c.head, tuple(quals[:idx] + rest))
            continue
        name = q.pat.name
        sites = _use_sites(rest, c.head, name)
        if not sites:
            return C.Comp(c.head, tuple(quals[:idx] + rest))
        # past a group-by the variable denotes a bag of values, so it cannot be inlined
        first_group = next((j for j, x in enumerate(rest) if isinstance(x, C.GroupBy)), None)
        if first_group is not None and any(j > first_group for j, _ in sites):
            # a plain renaming of a variable that is lifted alongside it is still exact
            if not _lifted_rename(quals, idx, q.value, rest):
                continue
        if not (is_simple(q.value) or (len(sites) == 1 and not sites[0][1])):
            continue
        new_rest, tail = C.subst_quals(rest, [c.head], {name: q.value})
        return C.Comp(tail[0], tuple(quals[:idx] + new_rest))
    return None


def _lifted_rename(quals, idx, value, rest) -> bool:
    if not isinstance(value, C.CVar):
        return False
    target = value.name
    if target not in {n for q in quals[:idx] for n in C.qual_binds(q)}:
        return False
    # the target must not be rebound before the uses
    return not any(target in C.qual_binds(q) for q in rest)


def _rule_self_join(c: C.Comp):
    """Drop a second traversal of the same array matched on the full key of an earlier one."""
    quals = list(c.quals)
    for b, qb in enumerate(quals):
        kb = _array_keys(qb, quals, b)
        if kb is None:
            continue
        for a in range(b - 1, -1, -1):
            if isinstance(quals[a], C.GroupBy):
                break
            ka = _array_keys(quals[a], quals, a)
            if ka is None or quals[a].domain != qb.domain or len(ka) != len(kb):
                continue
            eqs = []
            for x, y in zip(ka, kb):
                j = _find_var_eq(quals, b, x, y)
                if j is None:
                    break
                eqs.append(j)
            else:
                # the arrays are key-unique, so the second traversal yields the first element again
                m = {y: C.CVar(x) for x, y in zip(ka, kb)}
                m[qb.pat.items[1].name] = C.pat_to_expr(quals[a].pat.items[1])
                rest = [q for j, q in enumerate(quals[b + 1:], b + 1) if j not in eqs]
                new_rest, tail = C.subst_quals(rest, [c.head], m)
                return C.Comp(tail[0], tuple(quals[:b] + new_rest))
    return None


def _array_keys(q, quals, idx):
    if not (isinstance(q, C.Gen) and isinstance(q.domain, C.CVar)):
        return None
    if any(q.domain.name in C.qual_binds(x) for x in quals[:idx]):
        return None
    p = q.pat
    if not (isinstance(p, C.PTuple) and len(p.items) == 2 and isinstance(p.items[1], C.PVar)):
        return None
    kp = p.items[0]
    if isinstance(kp, C.PVar):
        return [kp.name]
    if isinstance(kp, C.PTuple) and all(isinstance(x, C.PVar) for x in kp.items):
        return [x.name for x in kp.items]
    return None


def _find_var_eq(quals, start, x, y):
    for j in range(start + 1, len(quals)):
        q = quals[j]
        if isinstance(q, C.GroupBy):
            return None
        if isinstance(q, C.Cond) and isinstance(q.pred, C.CBin) and q.pred.op == "==" \
                and {q.pred.left, q.pred.right} == {C.CVar(x), C.CVar(y)}:
            return j
    return None


def _rule_groupby_key(c: C.Comp):
    quals = list(c.quals)
    for idx, q in enumerate(quals):
        if not isinstance(q, C.GroupBy) or q.key is None or not isinstance(q.pat, C.PVar):
            continue
        pat = C.expr_to_pat(q.key)
        if pat is None:
            continue
        key_vars = C.pat_vars(pat)
        bound_here = set()
        for x in quals[:idx]:
            bound_here |= set(C.qual_binds(x))
        if not set(key_vars) <= bound_here:
            continue
        rest = quals[idx + 1:]
        if any(_use_sites(rest, c.head, v) for v in key_vars):
            continue
        k = q.pat.name
        new_rest, tail = C.subst_quals(rest, [c.head], {k: q.key})
        return C.Comp(tail[0], tuple(quals[:idx] + [C.GroupBy(pat, None)] + new_rest))
    return None


def _rule_identity(c: C.Comp):
    # [[ x | x <- D ]] = D
    if len(c.quals) == 1 and isinstance(c.quals[0], C.Gen) and isinstance(c.quals[0].pat, C.PVar) \
            and c.head == C.CVar(c.quals[0].pat.name) and c.quals[0].pat.name not in C.free_vars(c.quals[0].domain):
        return c.quals[0].domain
    return None
