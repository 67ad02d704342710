"""Canonical forms for comparing comprehensions modulo variable renaming."""

from __future__ import annotations

from . import ir as C
from .printer import show


def canonical(e, free_map: dict[str, str] | None = None):
    """Rename bound variables to v0, v1, ... in binding order.

    Runs of adjacent conditions are sorted and the operands of `==` are put in
    a fixed order, since neither affects the meaning of a comprehension.
    Free variables are kept unless `free_map` renames them.
    """
    counter = [0]
    return _canon(e, dict(free_map or {}), counter)


def alpha_equal(a, b) -> bool:
    return canonical(a) == canonical(b)


def _fresh(counter) -> str:
    n = counter[0]
    counter[0] += 1
    return f"v{n}"


def _rename_pat(p, env, counter):
    if isinstance(p, C.PVar):
        new = _fresh(counter)
        env[p.name] = new
        return C.PVar(new)
    return C.PTuple(tuple(_rename_pat(x, env, counter) for x in p.items))


def _canon(e, env: dict, counter):
    if isinstance(e, C.CVar):
        return C.CVar(env.get(e.name, e.name))
    if isinstance(e, C.CBin) and e.op in ("==", "!="):
        l, r = _canon(e.left, env, counter), _canon(e.right, env, counter)
        if show(l) > show(r):
            l, r = r, l
        return C.CBin(e.op, l, r)
    if isinstance(e, C.Comp):
        env = dict(env)
        quals = []
        for q in e.quals:
            if isinstance(q, C.Gen):
                dom = _canon(q.domain, env, counter)
                quals.append(C.Gen(_rename_pat(q.pat, env, counter), dom))
            elif isinstance(q, C.Let):
                val = _canon(q.value, env, counter)
                quals.append(C.Let(_rename_pat(q.pat, env, counter), val))
            elif isinstance(q, C.Cond):
                quals.append(C.Cond(_canon(q.pred, env, counter)))
            else:
                key = _canon(q.key_expr, env, counter)
                quals.append(C.GroupBy(_rename_pat(q.pat, env, counter), key))
        head = _canon(e.head, env, counter)
        return C.Comp(head, tuple(_sort_conditions(quals)))
    kids = C.children(e)
    if not kids:
        return e
    return C.rebuild(e, [_canon(k, env, counter) for k in kids])


def _sort_conditions(quals):
    out, run = [], []
    for q in quals:
        if isinstance(q, C.Cond):
            run.append(q)
            continue
        out += sorted(run, key=lambda c: show(c.pred))
        run = []
        out.append(q)
    return out + sorted(run, key=lambda c: show(c.pred))
