"""Translation of loop programs to target code over monoid comprehensions.

Every expression becomes a bag (empty when an array read misses), every
destination a bag of keys, and every statement a bulk assignment built from
the qualifiers of its enclosing for-loops and if-conditions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .analysis import check_program, contains_while, distribute_loops
from .comp import ir as C
from .comp.optimize import optimize_target
from .errors import NotAffine, UnsupportedStatement
from .frontend import ast as A
from .ops import EMPTY_CONSTRUCTORS

EMPTY = C.BagLit(())


def _single(x):
    return C.BagLit((x,))


@dataclass
class Translation:
    code: list
    types: dict
    temps: list = field(default_factory=list)


class Translator:
    def __init__(self, types: dict, taken: set[str] | None = None):
        self.types = dict(types)
        self.fresh = C.Fresh(set(taken or ()) | set(types))
        self.temps: list[str] = []

    # ------------------------------------------------------------ helpers

    def _dims(self, name: str) -> int:
        t = self.types.get(name)
        if t is None or not A.is_collection(t):
            raise UnsupportedStatement(f"{name} is not an array")
        return A.dims(t)

    def _key_pat(self, name: str):
        n = self._dims(name)
        names = [self.fresh("i") for _ in range(n)]
        if n == 1:
            return C.PVar(names[0]), [C.CVar(names[0])]
        return C.PTuple(tuple(C.PVar(x) for x in names)), [C.CVar(x) for x in names]

    def _lift(self, build, parts):
        """[[ build(v1..vn) | v1 <- parts[0], ..., vn <- parts[n-1] ]]"""
        names = [self.fresh("v") for _ in parts]
        quals = tuple(C.Gen(C.PVar(n), p) for n, p in zip(names, parts))
        return C.Comp(build([C.CVar(n) for n in names]), quals)

    # ------------------------------------------------------------ E: expressions

    def trans_expr(self, e):
        if isinstance(e, A.Var):
            return _single(C.CVar(e.name))
        if isinstance(e, A.Const):
            return _single(C.CConst(e.value))
        if isinstance(e, A.Proj):
            return self._lift(lambda vs: C.CProj(vs[0], e.field), [self.trans_expr(e.base)])
        if isinstance(e, A.Index):
            kp, kvars = self._key_pat(e.array)
            v = self.fresh("v")
            quals = [C.Gen(C.PTuple((kp, C.PVar(v))), C.CVar(e.array))]
            for kv, ix in zip(kvars, e.indexes):
                a = self.fresh("a")
                quals += [C.Gen(C.PVar(a), self.trans_expr(ix)), C.Cond(C.CBin("==", kv, C.CVar(a)))]
            return C.Comp(C.CVar(v), tuple(quals))
        if isinstance(e, A.BinOp):
            return self._lift(lambda vs: C.CBin(e.op, vs[0], vs[1]),
                              [self.trans_expr(e.left), self.trans_expr(e.right)])
        if isinstance(e, A.UnOp):
            return self._lift(lambda vs: C.CUn(e.op, vs[0]), [self.trans_expr(e.operand)])
        if isinstance(e, A.TupleExpr):
            return self._lift(lambda vs: C.CTuple(tuple(vs)), [self.trans_expr(x) for x in e.items])
        if isinstance(e, A.RecordExpr):
            names = [n for n, _ in e.fields]
            return self._lift(lambda vs: C.CRecord(tuple(zip(names, vs))),
                              [self.trans_expr(x) for _, x in e.fields])
        if isinstance(e, A.Call):
            if e.func in EMPTY_CONSTRUCTORS:
                return _single(EMPTY)
            return self._lift(lambda vs: C.CCall(e.func, tuple(vs)), [self.trans_expr(x) for x in e.args])
        raise UnsupportedStatement(f"cannot translate expression {e!r}")

    # ------------------------------------------------------------ K and D: destinations

    def dest_key(self, d):
        if isinstance(d, A.Var):
            return _single(C.UNIT)
        if isinstance(d, A.Proj):
            return self.dest_key(d.base)
        parts = [self.trans_expr(x) for x in d.indexes]
        if len(parts) == 1:
            return parts[0]
        return self._lift(lambda vs: C.CTuple(tuple(vs)), parts)

    def dest_from_key(self, d, k):
        if isinstance(d, A.Var):
            return _single(C.CVar(d.name))
        if isinstance(d, A.Proj):
            w = self.fresh("w")
            return C.Comp(C.CProj(C.CVar(w), d.field), (C.Gen(C.PVar(w), self.dest_from_key(d.base, k)),))
        kp, kvars = self._key_pat(d.array)
        v = self.fresh("v")
        key = kvars[0] if len(kvars) == 1 else C.CTuple(tuple(kvars))
        return C.Comp(C.CVar(v), (C.Gen(C.PTuple((kp, C.PVar(v))), C.CVar(d.array)),
                                  C.Cond(C.CBin("==", key, k))))

    # ------------------------------------------------------------ U: updates

    def make_update(self, d, x) -> list:
        if isinstance(d, A.Var):
            if A.is_collection(self.types.get(d.name)):
                raise UnsupportedStatement(f"element-wise update of whole array {d.name}")
            k, v = self.fresh("k"), self.fresh("v")
            old = _single(C.CTuple((C.UNIT, C.CVar(d.name))))
            return [C.TAssign(d.name, C.Comp(C.CVar(v), (C.Gen(C.PTuple((C.PVar(k), C.PVar(v))),
                                                                C.Merge(old, x)),)), scalar=True)]
        if isinstance(d, A.Proj):
            k, v, w = self.fresh("k"), self.fresh("v"), self.fresh("w")
            rebuilt = C.Comp(C.CTuple((C.CVar(k), C.SetField(C.CVar(w), d.field, C.CVar(v)))),
                             (C.Gen(C.PTuple((C.PVar(k), C.PVar(v))), x),
                              C.Gen(C.PVar(w), self.dest_from_key(d.base, C.CVar(k)))))
            return self.make_update(d.base, rebuilt)
        return [C.TAssign(d.array, C.Merge(C.CVar(d.array), x))]

    # ------------------------------------------------------------ S: statements

    def trans_stmt(self, s, quals: tuple = ()) -> list:
        if isinstance(s, A.IncrUpdate):
            v, k, w = self.fresh("v"), self.fresh("k"), self.fresh("w")
            x = C.Comp(C.CTuple((C.CVar(k), C.Reduce(s.op, C.Union_(C.CVar(w), C.CVar(v))))),
                       quals + (C.Gen(C.PVar(v), self.trans_expr(s.rhs)),
                                C.Gen(C.PVar(k), self.dest_key(s.dest)),
                                C.GroupBy(C.PVar(k)),
                                C.Let(C.PVar(w), self.dest_from_key(s.dest, C.CVar(k)))))
            return self.make_update(s.dest, x)
        if isinstance(s, A.Assign):
            if isinstance(s.dest, A.Var) and A.is_collection(self.types.get(s.dest.name)):
                if quals:
                    raise UnsupportedStatement(f"whole-array assignment to {s.dest.name} inside a loop")
                return [C.TAssign(s.dest.name, self._collection_value(s.rhs))]
            v, k = self.fresh("v"), self.fresh("k")
            x = C.Comp(C.CTuple((C.CVar(k), C.CVar(v))),
                       quals + (C.Gen(C.PVar(v), self.trans_expr(s.rhs)),
                                C.Gen(C.PVar(k), self.dest_key(s.dest))))
            return self.make_update(s.dest, x)
        if isinstance(s, A.VarDecl):
            if quals:
                raise UnsupportedStatement(f"declaration of {s.name} inside a loop")
            if A.is_collection(s.type):
                return [C.TAssign(s.name, self._collection_value(s.init))]
            return [C.TAssign(s.name, self.trans_expr(s.init), scalar=True)]
        if isinstance(s, A.InputDecl):
            return []
        if isinstance(s, A.Block):
            out = []
            for x in s.stmts:
                out += self.trans_stmt(x, quals)
            return out
        if isinstance(s, A.ForRange):
            if contains_while(s):
                return self._sequential_for(s, quals)
            lo, hi = self.fresh("lo"), self.fresh("hi")
            q = quals + (C.Gen(C.PVar(lo), self.trans_expr(s.lo)), C.Gen(C.PVar(hi), self.trans_expr(s.hi)),
                         C.Gen(C.PVar(s.index), C.Range(C.CVar(lo), C.CVar(hi))))
            return self.trans_stmt(s.body, q)
        if isinstance(s, A.ForIn):
            if contains_while(s):
                raise UnsupportedStatement("a traversal containing a while-loop cannot be translated")
            a, p = self.fresh("A"), self.fresh("p")
            q = quals + (C.Gen(C.PVar(a), self.trans_expr(s.coll)),
                         C.Gen(C.PTuple((C.PVar(p), C.PVar(s.var))), C.CVar(a)))
            return self.trans_stmt(s.body, q)
        if isinstance(s, A.While):
            if quals:
                raise UnsupportedStatement("while-loop inside a parallel loop")
            return [C.TWhile(self.trans_expr(s.cond), tuple(self.trans_stmt(s.body)))]
        if isinstance(s, A.If):
            return self._if(s, quals)
        raise UnsupportedStatement(f"cannot translate statement {s!r}")

    def _collection_value(self, e):
        if isinstance(e, A.Call) and e.func in EMPTY_CONSTRUCTORS:
            return EMPTY
        if isinstance(e, A.Var) and A.is_collection(self.types.get(e.name)):
            return C.CVar(e.name)
        raise UnsupportedStatement("a whole array can only be set to another array or an empty one")

    def _if(self, s: A.If, quals: tuple) -> list:
        out = []
        if not quals:
            if contains_while(s):
                raise UnsupportedStatement("if-statement containing a while-loop")
            # evaluate the predicate once, before either branch changes the state
            tmp = self.fresh("cond")
            self.temps.append(tmp)
            out.append(C.TAssign(tmp, self.trans_expr(s.cond)))
            pred = C.CVar(tmp)
        else:
            pred = self.trans_expr(s.cond)
        p = self.fresh("p")
        out += self.trans_stmt(s.then, quals + (C.Gen(C.PVar(p), pred), C.Cond(C.CVar(p))))
        if s.else_ is not None:
            p2 = self.fresh("p")
            out += self.trans_stmt(s.else_, quals + (C.Gen(C.PVar(p2), pred),
                                                     C.Cond(C.CUn("!", C.CVar(p2)))))
        return out

    def _sequential_for(self, s: A.ForRange, quals: tuple) -> list:
        if quals:
            raise UnsupportedStatement("sequential loop nested inside a parallel loop")
        hi = self.fresh("hi")
        self.temps.append(hi)
        i = C.CVar(s.index)
        self.types.setdefault(s.index, A.INT)
        return [C.TAssign(s.index, self.trans_expr(s.lo), scalar=True),
                C.TAssign(hi, self.trans_expr(s.hi), scalar=True),
                C.TWhile(_single(C.CBin("<=", i, C.CVar(hi))),
                         tuple(self.trans_stmt(s.body)
                               + [C.TAssign(s.index, _single(C.CBin("+", i, C.CConst(1))), scalar=True)]))]


def program_names(p: A.SourceProgram) -> set[str]:
    names = set(p.types)
    for s in A.walk_stmts(p.body):
        if isinstance(s, A.ForRange):
            names.add(s.index)
        elif isinstance(s, A.ForIn):
            names.add(s.var)
    return names


def translate(p: A.SourceProgram, optimize: bool = True) -> Translation:
    for loop, diags in check_program(p):
        if not diags.accepted:
            raise NotAffine("loop is not parallelizable:\n" + diags.render(), diags)
    dist = distribute_loops(p)
    tr = Translator(p.types, program_names(p))
    code = []
    for s in dist.body:
        code += tr.trans_stmt(s)
    if optimize:
        code = optimize_target(code)
    return Translation(code, tr.types, tr.temps)


def translate_program(p: A.SourceProgram) -> list:
    return translate(p).code
