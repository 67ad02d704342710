"""Naive evaluator for comprehension terms.

Terms are compiled to Python closures over an environment dict; the runtime
reuses the same closures for per-row work, so the naive evaluator and the
engine agree on the meaning of every scalar operation.
"""

from __future__ import annotations

from typing import Any, Callable

from ..errors import DuplicateKey, NonBooleanCond, NonSingletonScalar, TypeMismatch, UnboundVariable
from ..ops import BINOPS, UNOPS, call_function, comm_op, in_range
from ..values import Record, project
from . import ir as C

Fn = Callable[[dict], Any]


def _hashable(k):
    if isinstance(k, list):
        raise TypeMismatch(f"a bag cannot be used as a key: {k!r}")
    return k


def merge_bags(x: list, y: list) -> list:
    """Right-biased union of two key-value bags."""
    right: dict = {}
    for k, v in y:
        if _hashable(k) in right:
            raise DuplicateKey(f"duplicate key {k!r} in right operand of merge")
        right[k] = v
    seen = set()
    out = []
    for k, v in x:
        if k in seen:
            raise DuplicateKey(f"duplicate key {k!r} in left operand of merge")
        seen.add(k)
        if k not in right:
            out.append((k, v))
    out.extend(y)
    return out


def group_pairs(x: list) -> list:
    groups: dict = {}
    for k, v in x:
        groups.setdefault(_hashable(k), []).append(v)
    return list(groups.items())


def set_field(base, name: str, value):
    if isinstance(base, Record):
        return base.replace(name, value)
    if isinstance(base, tuple) and name.startswith("_") and name[1:].isdigit():
        i = int(name[1:]) - 1
        return base[:i] + (value,) + base[i + 1:]
    raise TypeMismatch(f"cannot set field {name!r} of {base!r}")


def bind_pattern(p, value, env: dict) -> None:
    if isinstance(p, C.PVar):
        env[p.name] = value
        return
    if not isinstance(value, tuple) or len(value) != len(p.items):
        raise TypeMismatch(f"value {value!r} does not match tuple pattern of arity {len(p.items)}")
    for sub, v in zip(p.items, value):
        bind_pattern(sub, v, env)


def _as_bool(v):
    if not isinstance(v, bool):
        raise NonBooleanCond(f"condition evaluated to non-boolean {v!r}")
    return v


def _as_bag(v, what="generator domain"):
    if not isinstance(v, list):
        raise TypeMismatch(f"{what} is not a bag: {v!r}")
    return v


def compile_expr(e) -> Fn:
    if isinstance(e, C.CVar):
        name = e.name

        def var(env):
            try:
                return env[name]
            except KeyError:
                raise UnboundVariable(f"unbound variable {name!r}") from None
        return var
    if isinstance(e, C.CConst):
        v = e.value
        return lambda env: v
    if isinstance(e, C.CTuple):
        fs = [compile_expr(x) for x in e.items]
        return lambda env: tuple(f(env) for f in fs)
    if isinstance(e, C.CRecord):
        fs = [(n, compile_expr(x)) for n, x in e.fields]
        return lambda env: Record({n: f(env) for n, f in fs})
    if isinstance(e, C.CProj):
        f, name = compile_expr(e.expr), e.field
        return lambda env: project(f(env), name)
    if isinstance(e, C.CBin):
        op = BINOPS[e.op]
        fl, fr = compile_expr(e.left), compile_expr(e.right)
        return lambda env: op(fl(env), fr(env))
    if isinstance(e, C.CUn):
        op = UNOPS[e.op]
        f = compile_expr(e.operand)
        return lambda env: op(f(env))
    if isinstance(e, C.CCall):
        fs = [compile_expr(x) for x in e.args]
        name = e.func
        return lambda env: call_function(name, [f(env) for f in fs])
    if isinstance(e, C.Reduce):
        op = comm_op(e.op)
        f = compile_expr(e.arg)
        return lambda env: op.reduce(_as_bag(f(env), "reduction argument"))
    if isinstance(e, C.Merge):
        fl, fr = compile_expr(e.left), compile_expr(e.right)
        return lambda env: merge_bags(fl(env), fr(env))
    if isinstance(e, C.Union_):
        fl, fr = compile_expr(e.left), compile_expr(e.right)
        return lambda env: _as_bag(fl(env)) + _as_bag(fr(env))
    if isinstance(e, C.Range):
        flo, fhi = compile_expr(e.lo), compile_expr(e.hi)
        return lambda env: list(range(flo(env), fhi(env) + 1))
    if isinstance(e, C.InRange):
        fx, flo, fhi = compile_expr(e.x), compile_expr(e.lo), compile_expr(e.hi)
        return lambda env: in_range(fx(env), flo(env), fhi(env))
    if isinstance(e, C.BagLit):
        fs = [compile_expr(x) for x in e.items]
        return lambda env: [f(env) for f in fs]
    if isinstance(e, C.NonEmpty):
        f = compile_expr(e.arg)
        return lambda env: len(_as_bag(f(env))) > 0
    if isinstance(e, C.SetField):
        fb, fv, name = compile_expr(e.base), compile_expr(e.value), e.field
        return lambda env: set_field(fb(env), name, fv(env))
    if isinstance(e, C.GroupByOp):
        f = compile_expr(e.arg)
        return lambda env: group_pairs(_as_bag(f(env), "groupBy argument"))
    if isinstance(e, C.Comp):
        return _compile_comp(e)
    raise TypeError(f"cannot compile {e!r}")


def compile_quals(quals) -> Callable[[dict], list[dict]]:
    """Compile a qualifier list to a function from an environment to the list of extended environments."""
    stages = []
    bound: list[str] = []
    for q in quals:
        if isinstance(q, C.Gen):
            stages.append(("gen", q.pat, compile_expr(q.domain)))
        elif isinstance(q, C.Let):
            stages.append(("let", q.pat, compile_expr(q.value)))
        elif isinstance(q, C.Cond):
            stages.append(("cond", None, compile_expr(q.pred)))
        else:
            pat_names = set(C.pat_vars(q.pat))
            lifted = [v for v in dict.fromkeys(bound) if v not in pat_names]
            stages.append(("group", q.pat, (compile_expr(q.key_expr), lifted)))
        bound += C.qual_binds(q)

    def run(env: dict) -> list[dict]:
        envs = [env]
        for kind, pat, f in stages:
            if kind == "gen":
                nxt = []
                for en in envs:
                    for x in _as_bag(f(en)):
                        e2 = dict(en)
                        bind_pattern(pat, x, e2)
                        nxt.append(e2)
                envs = nxt
            elif kind == "let":
                nxt = []
                for en in envs:
                    e2 = dict(en)
                    bind_pattern(pat, f(en), e2)
                    nxt.append(e2)
                envs = nxt
            elif kind == "cond":
                envs = [en for en in envs if _as_bool(f(en))]
            else:
                keyf, lifted = f
                groups: dict = {}
                for en in envs:
                    groups.setdefault(_hashable(keyf(en)), []).append(en)
                nxt = []
                for k, members in groups.items():
                    e2 = dict(env)
                    for v in lifted:
                        e2[v] = [m[v] for m in members]
                    bind_pattern(pat, k, e2)
                    nxt.append(e2)
                envs = nxt
        return envs

    return run


def _compile_comp(c: C.Comp) -> Fn:
    run = compile_quals(c.quals)
    head = compile_expr(c.head)
    return lambda env: [head(en) for en in run(env)]


def evaluate(e, env: dict | None = None) -> Any:
    return compile_expr(e)(dict(env or {}))


def evaluate_target(code, env: dict) -> dict:
    """Sequential reference execution of target code (used by tests)."""
    env = dict(env)
    for c in code:
        if isinstance(c, C.TAssign):
            v = evaluate(c.value, env)
            if c.scalar:
                if len(v) != 1:
                    raise NonSingletonScalar(f"{c.var} assigned a bag of size {len(v)}")
                v = v[0]
            env[c.var] = v
        elif isinstance(c, C.TBlock):
            env = evaluate_target(c.items, env)
        else:
            while True:
                v = evaluate(c.cond, env)
                if not (isinstance(v, list) and len(v) == 1 and isinstance(v[0], bool)):
                    raise NonBooleanCond(f"while condition must be a single boolean, got {v!r}")
                if not v[0]:
                    break
                env = evaluate_target(c.body, env)
    return env
