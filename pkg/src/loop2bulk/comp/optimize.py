"""Comprehension optimizations: range elimination and group-by elimination."""

from __future__ import annotations

from ..analysis import AffineExpr
from ..errors import NotApplicable
from . import ir as C
from .normalize import map_target, normalize

MAX_ROUNDS = 10


# ---------------------------------------------------------------- affine helpers

def c_affine(e, var: str) -> tuple[int, int] | None:
    """(c0, c1) when e is c0 + c1*var over integer literals, else None."""
    if isinstance(e, C.CVar):
        return (0, 1) if e.name == var else None
    if isinstance(e, C.CConst):
        v = e.value
        if isinstance(v, int) and not isinstance(v, bool):
            return v, 0
        return None
    if isinstance(e, C.CUn) and e.op == "-":
        r = c_affine(e.operand, var)
        return None if r is None else (-r[0], -r[1])
    if isinstance(e, C.CBin) and e.op in ("+", "-", "*"):
        a, b = c_affine(e.left, var), c_affine(e.right, var)
        if a is None or b is None:
            return None
        if e.op == "+":
            return a[0] + b[0], a[1] + b[1]
        if e.op == "-":
            return a[0] - b[0], a[1] - b[1]
        if a[1] and b[1]:
            return None
        return a[0] * b[0], a[0] * b[1] + a[1] * b[0]
    return None


def invert_affine_index(k: str, f: AffineExpr) -> tuple[str, AffineExpr] | None:
    """Solve k = c0 + c1*i for i; only unit coefficients have an integer inverse."""
    if len(f.terms) != 1:
        return None
    i, c1 = f.terms[0]
    if c1 not in (1, -1):
        return None
    # i = (k - c0) / c1 = c1*k - c1*c0
    return i, AffineExpr(-c1 * f.constant, ((k, c1),))


def _affine_to_c(a: AffineExpr):
    e = None
    for v, c in a.terms:
        t = C.CVar(v) if c == 1 else (C.CUn("-", C.CVar(v)) if c == -1 else C.CBin("*", C.CConst(c), C.CVar(v)))
        e = t if e is None else C.CBin("+", e, t)
    if e is None:
        return C.CConst(a.constant)
    if a.constant > 0:
        return C.CBin("+", e, C.CConst(a.constant))
    if a.constant < 0:
        return C.CBin("-", e, C.CConst(-a.constant))
    return e


# ---------------------------------------------------------------- range elimination

def _bound_before(quals, idx) -> set[str]:
    out = set()
    for q in quals[:idx]:
        out |= set(C.qual_binds(q))
    return out


def _array_gen(q, quals, idx):
    """Key variables of a generator over a base array, or None."""
    if not (isinstance(q, C.Gen) and isinstance(q.domain, C.CVar)):
        return None
    if q.domain.name in _bound_before(quals, idx):
        return None
    p = q.pat
    if not (isinstance(p, C.PTuple) and len(p.items) == 2):
        return None
    kp = p.items[0]
    if isinstance(kp, C.PVar):
        return [kp.name]
    if isinstance(kp, C.PTuple) and all(isinstance(x, C.PVar) for x in kp.items):
        return [x.name for x in kp.items]
    return None


def _segment(quals, idx):
    lo = 0
    for j in range(idx - 1, -1, -1):
        if isinstance(quals[j], C.GroupBy):
            lo = j + 1
            break
    hi = len(quals)
    for j in range(idx + 1, len(quals)):
        if isinstance(quals[j], C.GroupBy):
            hi = j
            break
    return lo, hi


def _uses(e, name) -> bool:
    return C.count_uses(e, name) > 0


def _find_equation(quals, after, hi, kvars, ivar):
    for c in range(after + 1, hi):
        q = quals[c]
        if not (isinstance(q, C.Cond) and isinstance(q.pred, C.CBin) and q.pred.op == "=="):
            continue
        for a, b in ((q.pred.left, q.pred.right), (q.pred.right, q.pred.left)):
            if isinstance(a, C.CVar) and a.name in kvars:
                f = c_affine(b, ivar)
                if f is not None and f[1] in (1, -1) and C.free_vars(b) == {ivar}:
                    return c, a.name, f
    return None


def _range_step(c: C.Comp):
    quals = list(c.quals)
    for r, q in enumerate(quals):
        if not (isinstance(q, C.Gen) and isinstance(q.pat, C.PVar) and isinstance(q.domain, C.Range)):
            continue
        i = q.pat.name
        lo, hi = _segment(quals, r)
        for a in range(lo, hi):
            if a == r:
                continue
            kvars = _array_gen(quals[a], quals, a)
            if kvars is None:
                continue
            if a > r and any(_uses(x, i) for mid in quals[r + 1:a] for x in C.qual_exprs(mid)):
                continue
            found = _find_equation(quals, max(r, a), hi, kvars, i)
            if found is None:
                continue
            return _eliminate(c, quals, r, a, found)
    return None


def _eliminate(c, quals, r, a, found):
    ceq, kv, (c0, c1) = found
    rng = quals[r]
    i = rng.pat.name
    guard = C.Cond(C.InRange(C.CVar(i), rng.domain.lo, rng.domain.hi))
    head = c.head
    new = []
    for idx, q in enumerate(quals):
        if idx in (r, ceq):
            if idx == r and a < r:
                new.append(guard) if (c0, c1) == (0, 1) else new.extend(_defn(i, kv, c0, c1, guard))
            continue
        new.append(q)
        if idx == a and a > r:
            new.extend([guard] if (c0, c1) == (0, 1) else _defn(i, kv, c0, c1, guard))
    if (c0, c1) == (0, 1):
        # identity inverse: the array's key variable takes the loop index's name
        gpos = new.index(quals[a])
        g = quals[a]
        new[gpos] = C.Gen(C.rename_pat(g.pat, {kv: i}), g.domain)
        rest, tail = C.subst_quals(new[gpos + 1:], [head], {kv: C.CVar(i)})
        pre = new[:gpos + 1]
        # uses of kv between the array generator and the old range position
        return C.Comp(tail[0], tuple(pre + rest))
    return C.Comp(head, tuple(new))


def _defn(i, kv, c0, c1, guard):
    inv = invert_affine_index(kv, AffineExpr(c0, ((i, c1),)))
    return [C.Let(C.PVar(i), _affine_to_c(inv[1])), guard]


def eliminate_range_iteration(c: C.Comp) -> C.Comp:
    """Replace loop-range generators joined to an array traversal by that traversal."""
    while True:
        r = _range_step(c)
        if r is None:
            return c
        c = r


# ---------------------------------------------------------------- group-by elimination

def _first_groupby(c: C.Comp):
    for idx, q in enumerate(c.quals):
        if isinstance(q, C.GroupBy):
            return idx
    return None


def _lifted_used(quals, head, g) -> list[str]:
    from .normalize import _use_sites
    pat = set(C.pat_vars(quals[g].pat))
    out = []
    for v in dict.fromkeys(n for q in quals[:g] for n in C.qual_binds(q)):
        if v in pat:
            continue
        if _use_sites(quals[g + 1:], head, v):
            out.append(v)
    return out


def eliminate_constant_key_groupby(c: C.Comp) -> C.Comp:
    g = _first_groupby(c)
    if g is None:
        raise NotApplicable("no group-by")
    q = c.quals[g]
    key = q.key_expr
    if not C.is_const(key):
        raise NotApplicable("group-by key is not constant")
    q1, q2 = list(c.quals[:g]), list(c.quals[g + 1:])
    lifted = _lifted_used(c.quals, c.head, g)
    if C.free_vars_quals(q1, []) & set(lifted):
        raise NotApplicable("lifted variable shadows an outer variable")
    new = [C.Let(C.PVar(v), C.Comp(C.CVar(v), tuple(q1))) for v in lifted]
    if lifted:
        new.append(C.Cond(C.NonEmpty(C.CVar(lifted[0]))))
    else:
        new.append(C.Cond(C.NonEmpty(C.Comp(C.UNIT, tuple(q1)))))
    new.append(C.Let(q.pat, key))
    return C.Comp(c.head, tuple(new + q2))


def _key_components(e):
    if isinstance(e, C.CTuple):
        out = []
        for x in e.items:
            out += _key_components(x)
        return out
    return [e]


def _single_var(e):
    fv = C.free_vars(e)
    if len(fv) != 1:
        return None
    v = next(iter(fv))
    f = c_affine(e, v)
    return v if f is not None and f[1] in (1, -1) else None


def infer_unique_key(c: C.Comp, g: int | C.GroupBy) -> bool:
    """True when every group of the group-by is provably a single binding."""
    if not isinstance(g, int):
        g = c.quals.index(g)
    q = c.quals[g]
    key = q.key_expr
    if C.is_const(key):
        return False
    quals = c.quals[:g]
    if any(isinstance(x, C.GroupBy) for x in quals):
        return False
    local = _bound_before(c.quals, g)
    det: set[str] = set()
    for comp in _key_components(key):
        if C.is_const(comp):
            continue
        v = _single_var(comp)
        if v is None:
            return False
        det.add(v)
    known = lambda e: C.free_vars(e) <= det | (C.free_vars(e) - local)  # noqa: E731
    changed = True
    while changed:
        changed = False

        def add(names):
            nonlocal changed
            new = set(names) - det
            if new:
                det.update(new)
                changed = True

        for idx, x in enumerate(quals):
            if isinstance(x, C.Cond) and isinstance(x.pred, C.CBin) and x.pred.op == "==":
                for a, b in ((x.pred.left, x.pred.right), (x.pred.right, x.pred.left)):
                    if isinstance(a, C.CVar) and a.name in local and known(b):
                        add([a.name])
                    sv = _single_var(b)
                    if sv is not None and sv in local and known(a):
                        add([sv])
            elif isinstance(x, C.Let) and known(x.value):
                add(C.pat_vars(x.pat))
            elif isinstance(x, C.Gen):
                kv = _array_gen(x, quals, idx)
                if kv is not None and set(kv) <= det:
                    add(C.pat_vars(x.pat))
    for idx, x in enumerate(quals):
        if not isinstance(x, C.Gen):
            continue
        if isinstance(x.domain, C.Range) and isinstance(x.pat, C.PVar):
            if x.pat.name not in det:
                return False
            continue
        kv = _array_gen(x, quals, idx)
        if kv is None or not set(kv) <= det:
            return False
    return True


def eliminate_unique_key_groupby(c: C.Comp) -> C.Comp:
    g = _first_groupby(c)
    if g is None:
        raise NotApplicable("no group-by")
    if not infer_unique_key(c, g):
        raise NotApplicable("group-by key is not provably unique")
    q = c.quals[g]
    lifted = _lifted_used(c.quals, c.head, g)
    q2, tail = C.subst_quals(c.quals[g + 1:], [c.head],
                             {v: C.BagLit((C.CVar(v),)) for v in lifted})
    return C.Comp(tail[0], tuple(list(c.quals[:g]) + [C.Let(q.pat, q.key_expr)] + q2))


# ---------------------------------------------------------------- pipeline

def _optimize_node(e):
    if not isinstance(e, C.Comp):
        return e
    e = eliminate_range_iteration(e)
    for rule in (eliminate_constant_key_groupby, eliminate_unique_key_groupby):
        try:
            return rule(e)
        except NotApplicable:
            pass
    return e


def optimize(e):
    e = normalize(e)
    for _ in range(MAX_ROUNDS):
        e2 = normalize(C.transform(e, _optimize_node))
        if e2 == e:
            break
        e = e2
    return e


def optimize_target(code):
    return map_target(code, optimize)
