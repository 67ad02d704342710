"""Partitioned dataflow runtime."""

from .engine import Engine, EngineConfig, execute_plan, group_by, join, merge, reduce_by_key
from .executor import execute_target, run_planned

__all__ = ["Engine", "EngineConfig", "execute_plan", "execute_target", "group_by", "join",
           "merge", "reduce_by_key", "run_planned"]
