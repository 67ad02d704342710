"""Recursive-descent parser plus the scope/renaming pass."""

from __future__ import annotations

from typing import Any

from ..errors import ParseError, ScopeError
from ..ops import EMPTY_CONSTRUCTORS, FUNCTIONS, is_comm_op
from . import ast as A
from .lexer import INCR_TOKENS, Token, tokenize

SCALAR_TYPES = {"Int": A.INT, "Long": A.INT, "Double": A.DOUBLE, "Float": A.DOUBLE,
                "Bool": A.BOOL, "Boolean": A.BOOL, "String": A.STRING}
NAMED_TYPES = {"ArgMin", "Avg"}

CMP_OPS = {"EQEQ": "==", "NEQ": "!=", "LT": "<", "LE": "<=", "GT": ">", "GE": ">="}
ADD_OPS = {"PLUS": "+", "MINUS": "-"}
MUL_OPS = {"STAR": "*", "SLASH": "/", "PERCENT": "%"}
CARET_OPS = {"CARET": "^", "CARET2": "^^"}


class Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    # -- token helpers
    def peek(self, k: int = 0) -> Token | None:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def at(self, *kinds: str) -> bool:
        t = self.peek()
        return t is not None and t.kind in kinds

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str, what: str | None = None) -> Token:
        t = self.peek()
        if t is None or t.kind != kind:
            self.fail(f"expected {what or kind}")
        return self.advance()

    def fail(self, msg: str):
        t = self.peek()
        if t is None:
            last = self.toks[-1] if self.toks else None
            line, col = (last.line, last.col + len(last.text)) if last else (1, 1)
            raise ParseError(f"{msg}, found end of input", line, col)
        raise ParseError(f"{msg}, found {t.text!r}", t.line, t.col)

    # -- statements
    def program(self) -> list:
        stmts = self.stmt_list(end=None)
        if self.peek() is not None:
            self.fail("expected a statement")
        return stmts

    def stmt_list(self, end: str | None) -> list:
        out = []
        while True:
            while self.at("SEMI"):
                self.advance()
            if self.peek() is None or (end and self.at(end)):
                return out
            out.append(self.statement())

    def statement(self):
        t = self.peek()
        pos = (t.line, t.col)
        if t.kind == "VAR":
            self.advance()
            name = self.expect("IDENT", "variable name").value
            self.expect("COLON", "':'")
            ty = self.type_()
            self.expect("EQ", "'='")
            return A.VarDecl(name, ty, self.expr(), pos)
        if t.kind == "INPUT":
            self.advance()
            name = self.expect("IDENT", "variable name").value
            self.expect("COLON", "':'")
            return A.InputDecl(name, self.type_(), pos)
        if t.kind == "FOR":
            self.advance()
            name = self.expect("IDENT", "loop variable").value
            if self.at("IN"):
                self.advance()
                coll = self.expr()
                self.expect("DO", "'do'")
                return A.ForIn(name, coll, self.statement(), pos)
            self.expect("EQ", "'=' or 'in'")
            lo = self.expr()
            self.expect("COMMA", "','")
            hi = self.expr()
            self.expect("DO", "'do'")
            return A.ForRange(name, lo, hi, self.statement(), pos)
        if t.kind == "WHILE":
            self.advance()
            self.expect("LPAREN", "'('")
            cond = self.expr()
            self.expect("RPAREN", "')'")
            if self.at("DO"):
                self.advance()
            return A.While(cond, self.statement(), pos)
        if t.kind == "IF":
            self.advance()
            self.expect("LPAREN", "'('")
            cond = self.expr()
            self.expect("RPAREN", "')'")
            then = self.statement()
            k = 0
            while self.peek(k) is not None and self.peek(k).kind == "SEMI":
                k += 1
            els = None
            if self.peek(k) is not None and self.peek(k).kind == "ELSE":
                self.i += k + 1
                els = self.statement()
            return A.If(cond, then, els, pos)
        if t.kind == "LBRACE":
            self.advance()
            stmts = self.stmt_list(end="RBRACE")
            self.expect("RBRACE", "'}'")
            return A.Block(tuple(stmts), pos)
        return self.update()

    def update(self):
        t = self.peek()
        pos = (t.line, t.col)
        dest = self.postfix()
        if not A.is_dest(dest):
            raise ParseError("expected a destination (variable, projection or array element)",
                             t.line, t.col)
        op_tok = self.peek()
        if op_tok is not None and op_tok.kind in INCR_TOKENS:
            self.advance()
            return A.IncrUpdate(dest, INCR_TOKENS[op_tok.kind], self.expr(), pos)
        self.expect("ASSIGN", "':=' or an incremental update operator")
        rhs = self.expr()
        incr = as_incremental(dest, rhs)
        if incr is not None:
            return A.IncrUpdate(dest, incr[0], incr[1], pos)
        return A.Assign(dest, rhs, pos)

    # -- types
    def type_(self):
        t = self.peek()
        if t is None:
            self.fail("expected a type")
        if t.kind == "LPAREN":
            self.advance()
            items = [self.type_()]
            while self.at("COMMA"):
                self.advance()
                items.append(self.type_())
            self.expect("RPAREN", "')'")
            return items[0] if len(items) == 1 else A.TTuple(tuple(items))
        if t.kind == "LT":
            self.advance()
            fields = []
            while True:
                name = self.expect("IDENT", "field name").value
                self.expect("COLON", "':'")
                fields.append((name, self.type_()))
                if self.at("COMMA"):
                    self.advance()
                    continue
                break
            self.expect("GT", "'>'")
            return A.TRecord(tuple(fields))
        name = self.expect("IDENT", "a type").value
        if name in SCALAR_TYPES:
            return SCALAR_TYPES[name]
        if name in NAMED_TYPES:
            return A.TNamed(name)
        if name in ("vector", "matrix", "map"):
            self.expect("LBRACK", "'['")
            args = [self.type_()]
            while self.at("COMMA"):
                self.advance()
                args.append(self.type_())
            self.expect("RBRACK", "']'")
            if name == "map":
                if len(args) != 2:
                    raise ParseError("map takes two type arguments", t.line, t.col)
                return A.TMap(args[0], args[1])
            if len(args) != 1:
                raise ParseError(f"{name} takes one type argument", t.line, t.col)
            return A.TVector(args[0]) if name == "vector" else A.TMatrix(args[0])
        raise ParseError(f"unknown type {name!r}", t.line, t.col)

    # -- expressions
    def expr(self):
        return self.or_expr()

    def _binary(self, sub, table):
        left = sub()
        while self.peek() is not None and self.peek().kind in table:
            t = self.advance()
            left = A.BinOp(table[t.kind], left, sub(), (t.line, t.col))
        return left

    def or_expr(self):
        return self._binary(self.and_expr, {"OR": "||"})

    def and_expr(self):
        return self._binary(self.cmp_expr, {"AND": "&&"})

    def cmp_expr(self):
        return self._binary(self.caret_expr, CMP_OPS)

    def caret_expr(self):
        return self._binary(self.add_expr, CARET_OPS)

    def add_expr(self):
        return self._binary(self.mul_expr, ADD_OPS)

    def mul_expr(self):
        return self._binary(self.unary, MUL_OPS)

    def unary(self):
        t = self.peek()
        if t is not None and t.kind in ("MINUS", "NOT"):
            self.advance()
            operand = self.unary()
            if t.kind == "MINUS" and isinstance(operand, A.Const) \
                    and isinstance(operand.value, (int, float)) \
                    and not isinstance(operand.value, bool):
                return A.Const(-operand.value, (t.line, t.col))
            return A.UnOp("-" if t.kind == "MINUS" else "!", operand, (t.line, t.col))
        return self.postfix()

    def postfix(self):
        e = self.primary()
        while True:
            t = self.peek()
            if t is None:
                return e
            if t.kind == "DOT":
                self.advance()
                name_tok = self.peek()
                if name_tok is not None and name_tok.kind == "INT":
                    # tuple projection written as `p._1` lexes as IDENT; `p.1` is not allowed
                    self.fail("expected a field name")
                name = self.expect("IDENT", "field name").value
                if self.at("LPAREN"):
                    args = self.call_args()
                    e = A.Call(name, (e,) + tuple(args), (t.line, t.col))
                else:
                    e = A.Proj(e, name, (t.line, t.col))
            elif t.kind == "LBRACK":
                if not isinstance(e, A.Var):
                    raise ParseError("only named arrays can be indexed (no nested arrays)",
                                     t.line, t.col)
                self.advance()
                idx = [self.expr()]
                while self.at("COMMA"):
                    self.advance()
                    idx.append(self.expr())
                self.expect("RBRACK", "']'")
                e = A.Index(e.name, tuple(idx), e.pos)
            else:
                return e

    def call_args(self) -> list:
        self.expect("LPAREN", "'('")
        args = []
        if not self.at("RPAREN"):
            args.append(self.expr())
            while self.at("COMMA"):
                self.advance()
                args.append(self.expr())
        self.expect("RPAREN", "')'")
        return args

    def primary(self):
        t = self.peek()
        if t is None:
            self.fail("expected an expression")
        pos = (t.line, t.col)
        if t.kind in ("INT", "FLOAT", "STRING", "TRUE", "FALSE"):
            self.advance()
            return A.Const(t.value, pos)
        if t.kind == "IDENT":
            self.advance()
            if self.at("LPAREN"):
                return A.Call(t.value, tuple(self.call_args()), pos)
            return A.Var(t.value, pos)
        if t.kind == "LPAREN":
            self.advance()
            if self.at("RPAREN"):
                self.advance()
                return A.TupleExpr((), pos)
            items = [self.expr()]
            while self.at("COMMA"):
                self.advance()
                items.append(self.expr())
            self.expect("RPAREN", "')'")
            return items[0] if len(items) == 1 else A.TupleExpr(tuple(items), pos)
        if t.kind == "LT":
            self.advance()
            fields = []
            while True:
                name = self.expect("IDENT", "field name").value
                self.expect("EQ", "'='")
                fields.append((name, self.caret_expr()))
                if self.at("COMMA"):
                    self.advance()
                    continue
                break
            self.expect("GT", "'>'")
            return A.RecordExpr(tuple(fields), pos)
        self.fail("expected an expression")


def as_incremental(dest, rhs) -> tuple[str, Any] | None:
    """Recognize `d := d op e` (or `d := op(d, e)`) for a registered commutative op."""
    if isinstance(rhs, A.Call) and len(rhs.args) == 2 and rhs.func in ("min", "max") \
            and is_comm_op(rhs.func):
        a, b = rhs.args
        if a == dest and dest not in _subterms(b):
            return rhs.func, b
        if b == dest and dest not in _subterms(a):
            return rhs.func, a
        return None
    if not isinstance(rhs, A.BinOp) or not is_comm_op(rhs.op):
        return None
    op = rhs.op
    operands = _flatten(rhs, op)
    hits = [k for k, x in enumerate(operands) if x == dest]
    if len(hits) != 1 or hits[0] not in (0, len(operands) - 1):
        return None
    rest = operands[:hits[0]] + operands[hits[0] + 1:]
    if any(dest in _subterms(x) for x in rest):
        return None
    acc = rest[0]
    for x in rest[1:]:
        acc = A.BinOp(op, acc, x, x.pos)
    return op, acc


def _flatten(e, op) -> list:
    if isinstance(e, A.BinOp) and e.op == op:
        return _flatten(e.left, op) + _flatten(e.right, op)
    return [e]


def _subterms(e) -> list:
    return list(A.walk_expr(e))


# ---------------------------------------------------------------- scope pass

class _Resolver:
    def __init__(self, body):
        self.declared: dict[str, Any] = {}
        self.all_decl_names = {s.name for s in A.walk_stmts(body)
                               if isinstance(s, (A.VarDecl, A.InputDecl))}
        self.taken = set(self.all_decl_names)
        for s in A.walk_stmts(body):
            if isinstance(s, A.ForRange):
                self.taken.add(s.index)
            elif isinstance(s, A.ForIn):
                self.taken.add(s.var)
        self.bound_indexes: set[str] = set()

    def fresh(self, base: str) -> str:
        n = 1
        while f"{base}_{n}" in self.taken:
            n += 1
        name = f"{base}_{n}"
        self.taken.add(name)
        return name

    def stmt(self, s, scope: dict[str, str], in_for: bool):
        if isinstance(s, A.VarDecl):
            if in_for:
                raise ScopeError(f"variable declaration of {s.name!r} inside a for-loop", *s.pos)
            init = self.expr(s.init, scope, allow_empty=A.is_collection(s.type))
            self.declare(s.name, s.type, s.pos)
            return A.VarDecl(s.name, s.type, init, s.pos)
        if isinstance(s, A.InputDecl):
            if in_for:
                raise ScopeError(f"input declaration of {s.name!r} inside a for-loop", *s.pos)
            self.declare(s.name, s.type, s.pos)
            return s
        if isinstance(s, (A.Assign, A.IncrUpdate)):
            dest = self.dest(s.dest, scope)
            rhs = self.expr(s.rhs, scope, allow_empty=isinstance(s, A.Assign)
                            and isinstance(dest, A.Var)
                            and A.is_collection(self.declared.get(dest.name)))
            if isinstance(s, A.Assign):
                return A.Assign(dest, rhs, s.pos)
            return A.IncrUpdate(dest, s.op, rhs, s.pos)
        if isinstance(s, A.ForRange):
            lo = self.expr(s.lo, scope)
            hi = self.expr(s.hi, scope)
            name = self.bind_index(s.index, scope)
            body = self.stmt(s.body, {**scope, s.index: name}, True)
            return A.ForRange(name, lo, hi, body, s.pos)
        if isinstance(s, A.ForIn):
            coll = self.expr(s.coll, scope)
            name = self.bind_index(s.var, scope)
            body = self.stmt(s.body, {**scope, s.var: name}, True)
            return A.ForIn(name, coll, body, s.pos)
        if isinstance(s, A.While):
            return A.While(self.expr(s.cond, scope), self.stmt(s.body, scope, in_for), s.pos)
        if isinstance(s, A.If):
            cond = self.expr(s.cond, scope)
            then = self.stmt(s.then, scope, in_for)
            els = None if s.else_ is None else self.stmt(s.else_, scope, in_for)
            return A.If(cond, then, els, s.pos)
        if isinstance(s, A.Block):
            return A.Block(tuple(self.stmt(x, scope, in_for) for x in s.stmts), s.pos)
        raise ScopeError(f"unknown statement {s!r}")

    def declare(self, name, ty, pos):
        if name in self.declared:
            raise ScopeError(f"variable {name!r} declared twice", *pos)
        self.declared[name] = ty

    def bind_index(self, name: str, scope) -> str:
        if name in self.bound_indexes or name in self.all_decl_names or name in scope:
            name = self.fresh(name)
        self.bound_indexes.add(name)
        return name

    def dest(self, d, scope):
        if isinstance(d, A.Var):
            if d.name in scope:
                raise ScopeError(f"cannot assign to loop variable {d.name!r}", *d.pos)
            if d.name not in self.declared:
                raise ScopeError(f"undeclared variable {d.name!r}", *d.pos)
            return d
        if isinstance(d, A.Proj):
            return A.Proj(self.dest(d.base, scope), d.field, d.pos)
        return self.expr(d, scope)

    def expr(self, e, scope, allow_empty: bool = False):
        if isinstance(e, A.Var):
            if e.name in scope:
                return A.Var(scope[e.name], e.pos)
            if e.name not in self.declared:
                raise ScopeError(f"undeclared variable {e.name!r}", *e.pos)
            return e
        if isinstance(e, A.Index):
            if e.array in scope:
                raise ScopeError(f"loop variable {e.array!r} is not an array", *e.pos)
            if e.array not in self.declared:
                raise ScopeError(f"undeclared variable {e.array!r}", *e.pos)
            ty = self.declared[e.array]
            if not A.is_collection(ty):
                raise ScopeError(f"{e.array!r} is not a collection", *e.pos)
            if A.dims(ty) != len(e.indexes):
                raise ScopeError(f"{e.array!r} expects {A.dims(ty)} index(es), "
                                 f"got {len(e.indexes)}", *e.pos)
            return A.Index(e.array, tuple(self.expr(x, scope) for x in e.indexes), e.pos)
        if isinstance(e, A.Call):
            if e.func in EMPTY_CONSTRUCTORS and not e.args:
                if not allow_empty:
                    raise ScopeError(f"{e.func}() may only initialize a collection", *e.pos)
                return e
            if e.func not in FUNCTIONS:
                raise ScopeError(f"unknown function {e.func!r}", *e.pos)
            return A.Call(e.func, tuple(self.expr(x, scope) for x in e.args), e.pos)
        if isinstance(e, A.Proj):
            return A.Proj(self.expr(e.base, scope), e.field, e.pos)
        if isinstance(e, A.BinOp):
            return A.BinOp(e.op, self.expr(e.left, scope), self.expr(e.right, scope), e.pos)
        if isinstance(e, A.UnOp):
            return A.UnOp(e.op, self.expr(e.operand, scope), e.pos)
        if isinstance(e, A.TupleExpr):
            return A.TupleExpr(tuple(self.expr(x, scope) for x in e.items), e.pos)
        if isinstance(e, A.RecordExpr):
            return A.RecordExpr(tuple((n, self.expr(x, scope)) for n, x in e.fields), e.pos)
        return e


def parse_program(text: str) -> A.SourceProgram:
    raw = Parser(tokenize(text)).program()
    body = tuple(raw)
    r = _Resolver(body)
    return A.SourceProgram(tuple(r.stmt(s, {}, False) for s in body))


def parse_expr(text: str):
    """Parse a lone expression without scope checking (tests, tooling)."""
    p = Parser(tokenize(text))
    e = p.expr()
    if p.peek() is not None:
        p.fail("unexpected trailing input")
    return e


def parse_stmt(text: str):
    """Parse statements without scope checking; returns a Block when several."""
    stmts = Parser(tokenize(text)).program()
    return stmts[0] if len(stmts) == 1 else A.Block(tuple(stmts))
