"""ASCII rendering of comprehensions: ``[[ head | q1, q2, ... ]]``."""

from __future__ import annotations

from ..values import format_value
from . import ir as C

_PREC = {"||": 1, "&&": 2, "==": 3, "!=": 3, "<": 3, "<=": 3, ">": 3, ">=": 3,
         "^": 4, "^^": 4, "+": 5, "-": 5, "*": 6, "/": 6, "%": 6}


def show_pat(p) -> str:
    if isinstance(p, C.PVar):
        return p.name
    return "(" + ",".join(show_pat(x) for x in p.items) + ")"


def show(e, prec: int = 0) -> str:
    if isinstance(e, C.CVar):
        return e.name
    if isinstance(e, C.CConst):
        s = format_value(e.value)
        return f"({s})" if s.startswith("-") and prec > 0 else s
    if isinstance(e, C.CTuple):
        return "(" + ",".join(show(x) for x in e.items) + ")"
    if isinstance(e, C.CRecord):
        return "<" + ", ".join(f"{n}={show(x)}" for n, x in e.fields) + ">"
    if isinstance(e, C.CProj):
        return f"{show(e.expr, 9)}.{e.field}"
    if isinstance(e, C.CBin):
        p = _PREC[e.op]
        s = f"{show(e.left, p)} {e.op} {show(e.right, p + 1)}"
        return f"({s})" if p < prec else s
    if isinstance(e, C.CUn):
        s = e.op + show(e.operand, 8)
        return f"({s})" if prec > 8 else s
    if isinstance(e, C.CCall):
        return f"{e.func}(" + ",".join(show(x) for x in e.args) + ")"
    if isinstance(e, C.Reduce):
        return f"{e.op}/{show(e.arg, 9)}"
    if isinstance(e, C.Merge):
        s = f"{show(e.left, 1)} <| {show(e.right, 2)}"
        return f"({s})" if prec > 1 else s
    if isinstance(e, C.Union_):
        s = f"{show(e.left, 1)} ++ {show(e.right, 2)}"
        return f"({s})" if prec > 1 else s
    if isinstance(e, C.Range):
        return f"range({show(e.lo)},{show(e.hi)})"
    if isinstance(e, C.InRange):
        return f"inRange({show(e.x)},{show(e.lo)},{show(e.hi)})"
    if isinstance(e, C.BagLit):
        return "{" + ",".join(show(x) for x in e.items) + "}"
    if isinstance(e, C.NonEmpty):
        return f"nonempty({show(e.arg)})"
    if isinstance(e, C.GroupByOp):
        return f"groupBy({show(e.arg)})"
    if isinstance(e, C.SetField):
        return f"setfield({show(e.base)},{e.field},{show(e.value)})"
    if isinstance(e, C.Comp):
        if not e.quals:
            return f"[[ {show(e.head)} | ]]"
        return f"[[ {show(e.head)} | " + ", ".join(show_qual(q) for q in e.quals) + " ]]"
    raise TypeError(f"not a comprehension term: {e!r}")


def show_qual(q) -> str:
    if isinstance(q, C.Gen):
        return f"{show_pat(q.pat)} <- {show(q.domain)}"
    if isinstance(q, C.Let):
        return f"let {show_pat(q.pat)} = {show(q.value)}"
    if isinstance(q, C.Cond):
        return show(q.pred)
    if q.key is None:
        return f"group by {show_pat(q.pat)}"
    return f"group by {show_pat(q.pat)}: {show(q.key)}"


def show_target(code, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    for c in code:
        if isinstance(c, C.TAssign):
            lines.append(f"{pad}{c.var} := {show(c.value)}")
        elif isinstance(c, C.TWhile):
            lines.append(f"{pad}while {show(c.cond)} do {{")
            if c.body:
                lines.append(show_target(c.body, indent + 1))
            lines.append(pad + "}")
        else:
            lines.append(f"{pad}{{")
            if c.items:
                lines.append(show_target(c.items, indent + 1))
            lines.append(pad + "}")
    return "\n".join(lines)
