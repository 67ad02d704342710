"""The benchmark programs and their input generators."""

from .benchmarks import BENCHMARKS, BenchmarkSpec, gen_data, load_program, program_text

__all__ = ["BENCHMARKS", "BenchmarkSpec", "gen_data", "load_program", "program_text"]
