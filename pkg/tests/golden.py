"""Expected comprehensions and shape comparison modulo renaming."""

from __future__ import annotations

from loop2bulk.comp import canonical
from loop2bulk.comp import ir as C
from loop2bulk.frontend import parse_program
from loop2bulk.translator import translate

V, P, T = C.CVar, C.PVar, C.PTuple


def const(x):
    return C.CConst(x)


def eq(a, b):
    return C.Cond(C.CBin("==", a, b))


def in_range(x, lo, hi):
    return C.Cond(C.InRange(x, lo, hi))


def dm1(name):
    return C.CBin("-", V(name), const(1))


def translated(src: str) -> list:
    return translate(parse_program(src)).code


def final_merge_comp(code, var: str) -> C.Comp:
    """The comprehension merged into `var` by its last assignment."""
    a = [c for c in code if isinstance(c, C.TAssign) and c.var == var][-1]
    assert isinstance(a.value, C.Merge) and a.value.left == V(var), a.value
    return a.value.right


def strip_initial_lookup(e, var: str):
    """+/(lookup of var ++ v) -> +/v: drop the read of the destination's old value."""
    def fix(x):
        if isinstance(x, C.Reduce) and isinstance(x.arg, C.Union_):
            left = x.arg.left
            if isinstance(left, C.Comp) and isinstance(left.quals[0], C.Gen) \
                    and left.quals[0].domain == V(var):
                return C.Reduce(x.op, x.arg.right)
        return x
    return C.transform(e, fix)


def shape(c: C.Comp):
    """Canonical form with every condition moved to the end of its group-by segment."""
    c = canonical(c)
    segs, cur = [], []
    for q in c.quals:
        if isinstance(q, C.GroupBy):
            segs.append(cur)
            segs.append([q])
            cur = []
        else:
            cur.append(q)
    segs.append(cur)
    quals = []
    for seg in segs:
        quals += [q for q in seg if not isinstance(q, C.Cond)]
        conds = [q for q in seg if isinstance(q, C.Cond)]
        quals += sorted(conds, key=repr)
    return c.head, tuple(quals)


def _matmul_quals_expected():
    return (
        C.Gen(T((T((P("i"), P("k"))), P("m"))), V("M")),
        C.Gen(T((T((P("kk"), P("j"))), P("n"))), V("N")),
        eq(V("kk"), V("k")),
        in_range(V("i"), const(0), dm1("d")),
        in_range(V("j"), const(0), dm1("d")),
        in_range(V("k"), const(0), dm1("d")),
        C.Let(P("v"), C.CBin("*", V("m"), V("n"))),
        C.GroupBy(T((P("i"), P("j")))),
    )


def matmul_expected() -> C.Comp:
    """((i,j), +/v) | ((i,k),m) <- M, ((kk,j),n) <- N, kk == k, inRange..., let v = m*n, group by (i,j)"""
    return C.Comp(C.CTuple((C.CTuple((V("i"), V("j"))), C.Reduce("+", V("v")))),
                  _matmul_quals_expected())


def copy_loop_expected() -> C.Comp:
    """(i,w) | (i,w) <- W, inRange(i,1,10)"""
    return C.Comp(C.CTuple((V("i"), V("w"))),
                  (C.Gen(T((P("i"), P("w"))), V("W")), in_range(V("i"), const(1), const(10))))


def same_shape(a: C.Comp, b: C.Comp) -> bool:
    return shape(a) == shape(b)
