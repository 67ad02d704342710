"""Tokenizer for `.dbl` sources."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from ..errors import LexError

KEYWORDS = {
    "var": "VAR", "input": "INPUT", "for": "FOR", "in": "IN", "do": "DO",
    "while": "WHILE", "if": "IF", "else": "ELSE", "true": "TRUE", "false": "FALSE",
}

# longest first
PUNCT = [
    ("^^=", "CARET2EQ"), ("&&=", "ANDEQ"), ("||=", "OREQ"),
    (":=", "ASSIGN"), ("+=", "PLUSEQ"), ("*=", "TIMESEQ"), ("^=", "CARETEQ"),
    ("==", "EQEQ"), ("!=", "NEQ"), ("<=", "LE"), (">=", "GE"),
    ("&&", "AND"), ("||", "OR"), ("^^", "CARET2"),
    ("<", "LT"), (">", "GT"), ("=", "EQ"), ("!", "NOT"),
    ("+", "PLUS"), ("-", "MINUS"), ("*", "STAR"), ("/", "SLASH"), ("%", "PERCENT"),
    ("^", "CARET"), ("(", "LPAREN"), (")", "RPAREN"), ("[", "LBRACK"), ("]", "RBRACK"),
    ("{", "LBRACE"), ("}", "RBRACE"), (",", "COMMA"), (";", "SEMI"), (":", "COLON"),
    (".", "DOT"),
]

# incremental-update tokens and the reducer symbol they denote
INCR_TOKENS = {"PLUSEQ": "+", "TIMESEQ": "*", "ANDEQ": "&&", "OREQ": "||",
               "CARETEQ": "^", "CARET2EQ": "^^"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    value: Any
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r\f":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_col = col
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = KEYWORDS.get(word, "IDENT")
            value = {"TRUE": True, "FALSE": False}.get(kind, word)
            toks.append(Token(kind, word, value, line, start_col))
            col += j - i
            i = j
            continue
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and text[j].isdigit():
                j += 1
            is_float = False
            if j < n and text[j] == "." and j + 1 < n and text[j + 1].isdigit():
                is_float = True
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    is_float = True
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            lit = text[i:j]
            if is_float:
                toks.append(Token("FLOAT", lit, float(lit), line, start_col))
            else:
                toks.append(Token("INT", lit, int(lit), line, start_col))
            col += j - i
            i = j
            continue
        if c == '"':
            j = i + 1
            buf = []
            while j < n and text[j] != '"':
                if text[j] == "\n":
                    raise LexError("unterminated string literal", line, start_col)
                if text[j] == "\\" and j + 1 < n:
                    buf.append({"n": "\n", "t": "\t"}.get(text[j + 1], text[j + 1]))
                    j += 2
                    continue
                buf.append(text[j])
                j += 1
            if j >= n:
                raise LexError("unterminated string literal", line, start_col)
            toks.append(Token("STRING", text[i:j + 1], "".join(buf), line, start_col))
            col += j + 1 - i
            i = j + 1
            continue
        for sym, kind in PUNCT:
            if text.startswith(sym, i):
                toks.append(Token(kind, sym, sym, line, start_col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise LexError(f"illegal character {c!r}", line, start_col)
    return toks
