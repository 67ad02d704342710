"""Lexer, parser and printer for the loop language."""

from .ast import SourceProgram
from .lexer import Token, tokenize
from .parser import parse_expr, parse_program, parse_stmt
from .printer import unparse, unparse_expr, unparse_stmt

__all__ = ["SourceProgram", "Token", "tokenize", "parse_program", "parse_expr",
           "parse_stmt", "unparse", "unparse_expr", "unparse_stmt"]
