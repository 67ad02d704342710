"""Pretty-printer producing source text that parses back to the same AST."""

from __future__ import annotations

from . import ast as A

_PREC = {"||": 1, "&&": 2, "==": 3, "!=": 3, "<": 3, "<=": 3, ">": 3, ">=": 3,
         "^": 4, "^^": 4, "+": 5, "-": 5, "*": 6, "/": 6, "%": 6}
_UNARY_PREC = 7

_INCR_SYMS = {"+": "+=", "*": "*=", "&&": "&&=", "||": "||=", "^": "^=", "^^": "^^="}


def unparse_type(t) -> str:
    if isinstance(t, A.TScalar):
        return t.name
    if isinstance(t, A.TNamed):
        return t.name
    if isinstance(t, A.TTuple):
        return "(" + ", ".join(unparse_type(x) for x in t.items) + ")"
    if isinstance(t, A.TRecord):
        return "<" + ", ".join(f"{n}: {unparse_type(x)}" for n, x in t.fields) + ">"
    if isinstance(t, A.TVector):
        return f"vector[{unparse_type(t.elem)}]"
    if isinstance(t, A.TMatrix):
        return f"matrix[{unparse_type(t.elem)}]"
    if isinstance(t, A.TMap):
        return f"map[{unparse_type(t.key)}, {unparse_type(t.elem)}]"
    raise TypeError(f"not a type: {t!r}")


def _const(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'
    if isinstance(v, float):
        r = repr(v)
        if "inf" in r or "nan" in r:
            raise ValueError(f"cannot print non-finite literal {v!r}")
        return r
    return str(v)


def unparse_expr(e, prec: int = 0) -> str:
    if isinstance(e, A.Const):
        s = _const(e.value)
        # a negative literal behaves like a unary minus
        return f"({s})" if s.startswith("-") and prec >= _UNARY_PREC else s
    if isinstance(e, A.Var):
        return e.name
    if isinstance(e, A.Index):
        return f"{e.array}[" + ", ".join(unparse_expr(x) for x in e.indexes) + "]"
    if isinstance(e, A.Proj):
        return f"{unparse_expr(e.base, 8)}.{e.field}"
    if isinstance(e, A.Call):
        return f"{e.func}(" + ", ".join(unparse_expr(x) for x in e.args) + ")"
    if isinstance(e, A.TupleExpr):
        return "(" + ", ".join(unparse_expr(x) for x in e.items) + ")"
    if isinstance(e, A.RecordExpr):
        return "<" + ", ".join(f"{n}={unparse_expr(x, 4)}" for n, x in e.fields) + ">"
    if isinstance(e, A.UnOp):
        s = e.op + unparse_expr(e.operand, _UNARY_PREC)
        return f"({s})" if prec > _UNARY_PREC else s
    if isinstance(e, A.BinOp):
        p = _PREC[e.op]
        # all binary operators are left-associative
        s = f"{unparse_expr(e.left, p)} {e.op} {unparse_expr(e.right, p + 1)}"
        return f"({s})" if p < prec else s
    raise TypeError(f"not an expression: {e!r}")


def _stmt_lines(s, ind: int) -> list[str]:
    pad = "    " * ind
    if isinstance(s, A.VarDecl):
        return [f"{pad}var {s.name}: {unparse_type(s.type)} = {unparse_expr(s.init)}"]
    if isinstance(s, A.InputDecl):
        return [f"{pad}input {s.name}: {unparse_type(s.type)}"]
    if isinstance(s, A.Assign):
        return [f"{pad}{unparse_expr(s.dest)} := {unparse_expr(s.rhs)}"]
    if isinstance(s, A.IncrUpdate):
        d = unparse_expr(s.dest)
        if s.op in _INCR_SYMS:
            return [f"{pad}{d} {_INCR_SYMS[s.op]} {unparse_expr(s.rhs)}"]
        return [f"{pad}{d} := {s.op}({d}, {unparse_expr(s.rhs)})"]
    if isinstance(s, A.ForRange):
        head = f"{pad}for {s.index} = {unparse_expr(s.lo)}, {unparse_expr(s.hi)} do"
        return _with_body(head, s.body, ind)
    if isinstance(s, A.ForIn):
        return _with_body(f"{pad}for {s.var} in {unparse_expr(s.coll)} do", s.body, ind)
    if isinstance(s, A.While):
        return _with_body(f"{pad}while ({unparse_expr(s.cond)})", s.body, ind)
    if isinstance(s, A.If):
        lines = _with_body(f"{pad}if ({unparse_expr(s.cond)})", s.then, ind)
        if s.else_ is not None:
            lines += _with_body(f"{pad}else", s.else_, ind)
        return lines
    if isinstance(s, A.Block):
        lines = [pad + "{"]
        for x in s.stmts:
            sub = _stmt_lines(x, ind + 1)
            sub[-1] += ";"
            lines += sub
        return lines + [pad + "}"]
    raise TypeError(f"not a statement: {s!r}")


def _with_body(head: str, body, ind: int) -> list[str]:
    if isinstance(body, A.Block):
        sub = _stmt_lines(body, ind)
        return [head + " " + sub[0].lstrip()] + sub[1:]
    return [head] + _stmt_lines(body, ind + 1)


def unparse_stmt(s, indent: int = 0) -> str:
    return "\n".join(_stmt_lines(s, indent))


def unparse(p: A.SourceProgram) -> str:
    if not p.body:
        return ""
    return "".join(unparse_stmt(s) + ";\n" for s in p.body)
