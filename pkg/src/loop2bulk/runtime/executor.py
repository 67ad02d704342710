"""Driver for target code: bulk assignments, while-loops and blocks."""

from __future__ import annotations

from .. import planner as P
from ..errors import NonBooleanCond, NonSingletonScalar
from ..values import format_value
from .engine import Engine, EngineConfig


def run_planned(code, env: dict, eng: Engine) -> dict:
    for c in code:
        if isinstance(c, P.PAssign):
            v = eng.collect(eng.run(c.plan, env))
            if c.scalar:
                if len(v) != 1:
                    raise NonSingletonScalar(f"{c.var} assigned a bag of size {len(v)}")
                v = v[0]
            # bulk replacement of the whole variable
            env[c.var] = v
        elif isinstance(c, P.PWhile):
            while True:
                v = eng.collect(eng.run(c.cond, env))
                if len(v) != 1 or not isinstance(v[0], bool):
                    raise NonBooleanCond(f"while condition must be a single boolean, got {format_value(v)}")
                if not v[0]:
                    break
                run_planned(c.body, env, eng)
        else:
            run_planned(c.items, env, eng)
    return env


def execute_target(code, env: dict, cfg: EngineConfig | None = None, optimize: bool = True) -> dict:
    """Run target code against a copy of ``env`` and return the final environment."""
    planned = P.plan_target(code, optimize)
    env = dict(env)
    with Engine(cfg) as eng:
        return run_planned(planned, env, eng)
