"""Command-line driver: check, translate, run, run-seq, compare, bench, gen-data."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from pathlib import Path

from . import planner as P
from .analysis import check_program
from .comp import show_target
from .corpus import BENCHMARKS, BenchmarkSpec, gen_data, load_program
from .corpus.benchmarks import MEDIUM, SMALL
from .errors import Loop2BulkError, NotAffine, SourceError
from .frontend import ast as A
from .frontend import parse_program
from .io import DataError, dump_state, read_inputs, write_inputs, write_state
from .oracle import compare_states, eval_program
from .runtime import EngineConfig, execute_target
from .translator import translate

OK, FAIL, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def load_source(arg: str) -> tuple[A.SourceProgram, str | None]:
    """A program file, or the name of a corpus benchmark."""
    path = Path(arg)
    if path.exists():
        try:
            text = path.read_text()
        except OSError as e:
            raise UsageError(f"cannot read {arg}: {e}") from None
        name = path.stem.replace("_", "-")
        return parse_program(text), None if name not in BENCHMARKS else name
    if arg in BENCHMARKS:
        return load_program(arg), arg
    raise UsageError(f"{arg}: no such file or benchmark")


def _sizes(pairs: list[str] | None) -> dict:
    out = {}
    for p in pairs or ():
        k, sep, v = p.partition("=")
        if not sep:
            raise UsageError(f"--size expects key=value, got {p!r}")
        try:
            out[k] = int(v)
        except ValueError:
            raise UsageError(f"--size {k}: not an integer: {v!r}") from None
    return out


def _spec(name: str, args, table=SMALL) -> BenchmarkSpec:
    return BenchmarkSpec(name, {**table[name], **_sizes(getattr(args, "size", None))},
                         args.seed, args.tolerance)


def _inputs(args, program, bench) -> dict:
    if getattr(args, "data", None):
        return read_inputs(args.data, program)
    if bench is None:
        raise UsageError("--data DIR is required for programs outside the benchmark corpus")
    return gen_data(_spec(bench, args))


def _config(args) -> EngineConfig:
    return EngineConfig.from_env(args.workers, args.partitions, args.seed)


def _declared(program) -> list[str]:
    return sorted(program.types)


def _emit_state(state: dict, names, out: str | None) -> None:
    if out:
        for path in write_state(out, state, names):
            print(path)
    else:
        sys.stdout.write(dump_state(state, names))


# ---------------------------------------------------------------- commands

def cmd_check(args) -> int:
    program, _ = load_source(args.file)
    if not program.body:
        print("warning: empty program", file=sys.stderr)
        return OK
    status = OK
    results = check_program(program)
    for loop, diags in results:
        where = f"{loop.pos[0]}:{loop.pos[1]}" if getattr(loop, "pos", None) else "?"
        if diags.accepted:
            print(f"loop at {where}: accepted")
        else:
            status = FAIL
            print(f"loop at {where}: rejected")
            print(diags.render())
    if not results:
        print("no parallel loops")
    return status


def cmd_translate(args) -> int:
    program, _ = load_source(args.file)
    t0 = time.perf_counter()
    t = translate(program, optimize=not args.no_optimize)
    elapsed = time.perf_counter() - t0
    if args.show_ir or not args.show_plan:
        print(show_target(t.code))
    if args.show_plan:
        if args.show_ir:
            print()
        print(P.show_planned(P.plan_target(t.code, optimize=not args.no_optimize)))
    print(f"# translated in {elapsed:.3f}s", file=sys.stderr)
    return OK


def cmd_run(args) -> int:
    program, bench = load_source(args.file)
    inputs = _inputs(args, program, bench)
    t = translate(program)
    state = execute_target(t.code, inputs, _config(args))
    _emit_state(state, _declared(program), args.out)
    return OK


def cmd_run_seq(args) -> int:
    program, bench = load_source(args.file)
    inputs = _inputs(args, program, bench)
    state = eval_program(program, inputs)
    _emit_state(state, _declared(program), args.out)
    return OK


def compare_once(program, inputs: dict, cfg: EngineConfig, tolerance: float):
    t0 = time.perf_counter()
    t = translate(program)
    t1 = time.perf_counter()
    expected = eval_program(program, inputs)
    t2 = time.perf_counter()
    actual = execute_target(t.code, inputs, cfg)
    t3 = time.perf_counter()
    report = compare_states(expected, actual, tolerance, _declared(program))
    return report, (t1 - t0, t2 - t1, t3 - t2)


def cmd_compare(args) -> int:
    program, bench = load_source(args.file)
    inputs = _inputs(args, program, bench)
    report, _ = compare_once(program, inputs, _config(args), args.tolerance)
    print(report.render())
    print("PASS" if report.ok else "FAIL")
    return OK if report.ok else FAIL


def cmd_bench(args) -> int:
    names = list(BENCHMARKS) if args.all else args.names
    if not names:
        raise UsageError("bench: name at least one benchmark, or pass --all")
    for n in names:
        if n not in BENCHMARKS:
            raise UsageError(f"unknown benchmark {n!r}")
    table = SMALL if args.small else MEDIUM
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["benchmark", "seed", "translate_s", "seq_s", "par_s", "result"])
    status = OK
    for name in names:
        program = load_program(name)
        for seed in range(args.seed, args.seed + args.seeds):
            spec = BenchmarkSpec(name, {**table[name], **_sizes(args.size)}, seed, args.tolerance)
            cfg = EngineConfig.from_env(args.workers, args.partitions, seed)
            report, times = compare_once(program, gen_data(spec), cfg, args.tolerance)
            if not report.ok:
                status = FAIL
                print(report.render(), file=sys.stderr)
            writer.writerow([name, seed, *(f"{x:.4f}" for x in times), "pass" if report.ok else "FAIL"])
            sys.stdout.flush()
    return status


def cmd_gen_data(args) -> int:
    spec = _spec(args.name, args, SMALL if args.small else MEDIUM)
    program = load_program(args.name)
    for path in write_inputs(args.out, program, gen_data(spec)):
        print(path)
    return OK


# ---------------------------------------------------------------- argument parsing

def _common(p: argparse.ArgumentParser, engine: bool = True, data: bool = True) -> None:
    p.add_argument("--seed", type=int, default=0, help="data and partitioning seed")
    p.add_argument("--tolerance", type=float, default=1e-9, help="relative tolerance for Doubles")
    if engine:
        p.add_argument("--partitions", type=int, default=4)
        p.add_argument("--workers", type=int, default=None,
                       help="worker threads (default: $LOOP2BULK_WORKERS or 1)")
    if data:
        p.add_argument("--data", metavar="DIR", help="input directory (see gen-data)")
        p.add_argument("--size", action="append", metavar="KEY=N",
                       help="override a generator size parameter")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="loop2bulk",
                                 description="Translate loop programs to bulk dataflow code.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log planner warnings")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="run the parallelizability check")
    p.add_argument("file")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("translate", help="print target code")
    p.add_argument("file")
    p.add_argument("--show-ir", action="store_true", help="print the comprehension IR")
    p.add_argument("--show-plan", action="store_true", help="print the dataflow plan")
    p.add_argument("--no-optimize", action="store_true", help="skip the group-by rewrites")
    p.set_defaults(fn=cmd_translate)

    for name, fn, engine, help_ in [("run", cmd_run, True, "run on the partitioned runtime"),
                                    ("run-seq", cmd_run_seq, False, "run the sequential oracle")]:
        p = sub.add_parser(name, help=help_)
        p.add_argument("file")
        _common(p, engine=engine)
        p.add_argument("--out", metavar="DIR", help="write one file per variable")
        p.set_defaults(fn=fn)

    p = sub.add_parser("compare", help="runtime vs oracle on the same inputs")
    p.add_argument("file")
    _common(p)
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("bench", help="differential suite with timings (CSV)")
    p.add_argument("names", nargs="*")
    p.add_argument("--all", action="store_true")
    p.add_argument("--small", action="store_true", help="small sizes")
    p.add_argument("--seeds", type=int, default=10, help="seeds per benchmark")
    _common(p, data=False)
    p.add_argument("--size", action="append", metavar="KEY=N")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("gen-data", help="write generated inputs for a benchmark")
    p.add_argument("name", choices=BENCHMARKS)
    p.add_argument("--out", metavar="DIR", required=True)
    p.add_argument("--small", action="store_true", help="small sizes")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=1e-9, help=argparse.SUPPRESS)
    p.add_argument("--size", action="append", metavar="KEY=N")
    p.set_defaults(fn=cmd_gen_data)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.WARNING if args.verbose else logging.ERROR,
                        format="%(levelname)s: %(message)s")
    try:
        return args.fn(args)
    except (UsageError, SourceError, DataError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE
    except NotAffine as e:
        print(f"error: {e}", file=sys.stderr)
        return FAIL
    except Loop2BulkError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return FAIL


if __name__ == "__main__":
    sys.exit(main())
