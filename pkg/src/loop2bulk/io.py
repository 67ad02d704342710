"""Tab-separated input files and sorted result dumps.

Layout of a data directory:
  params.tsv      "name<TAB>value" for every scalar input
  <name>.tsv      one line per element of a collection input:
                    vector of Int/Double/Bool  "i<TAB>v"
                    vector of anything else    the element only; the index is the line number (from 0)
                    matrix                     "i<TAB>j<TAB>v"
                    map                        "k<TAB>v"
Tuple and record elements spread their components over consecutive columns
(record fields in declaration order).
"""

from __future__ import annotations

from pathlib import Path

from .errors import Loop2BulkError
from .frontend import ast as A
from .values import Record, format_value

PARAMS = "params.tsv"


class DataError(Loop2BulkError):
    pass


def _width(t) -> int:
    if isinstance(t, A.TTuple):
        return sum(_width(x) for x in t.items)
    if isinstance(t, A.TRecord):
        return sum(_width(x) for _, x in t.fields)
    return 1


def _encode(v, t) -> list[str]:
    if isinstance(t, A.TTuple):
        return [c for x, ti in zip(v, t.items) for c in _encode(x, ti)]
    if isinstance(t, A.TRecord):
        return [c for name, ti in t.fields for c in _encode(v.get(name), ti)]
    if isinstance(v, bool):
        return ["true" if v else "false"]
    if isinstance(v, str):
        if "\t" in v or "\n" in v:
            raise DataError(f"string value {v!r} contains a tab or newline")
        return [v]
    return [repr(v) if isinstance(v, float) else str(v)]


def _decode(cols: list[str], t):
    """Decode the leading columns as a value of type t; returns (value, remaining columns)."""
    if isinstance(t, A.TTuple):
        items = []
        for ti in t.items:
            x, cols = _decode(cols, ti)
            items.append(x)
        return tuple(items), cols
    if isinstance(t, A.TRecord):
        fields = []
        for name, ti in t.fields:
            x, cols = _decode(cols, ti)
            fields.append((name, x))
        return Record(fields), cols
    if not cols:
        raise DataError("too few columns")
    c, rest = cols[0], cols[1:]
    name = t.name if isinstance(t, A.TScalar) else None
    try:
        if name == "Int":
            return int(c), rest
        if name == "Double":
            return float(c), rest
        if name == "Bool":
            if c not in ("true", "false"):
                raise ValueError(c)
            return c == "true", rest
        if name == "String":
            return c, rest
    except ValueError:
        raise DataError(f"cannot read {c!r} as {name}") from None
    raise DataError(f"unsupported element type {t!r}")


def _implicit_index(t) -> bool:
    return isinstance(t, A.TVector) and not (
        isinstance(t.elem, A.TScalar) and t.elem.name in ("Int", "Double", "Bool"))


def _key_type(t):
    if isinstance(t, A.TMatrix):
        return A.TTuple((A.INT, A.INT))
    if isinstance(t, A.TMap):
        return t.key
    return A.INT


def encode_collection(bag, t) -> list[str]:
    if _implicit_index(t):
        byk = dict(bag)
        if sorted(byk) != list(range(len(byk))):
            raise DataError("implicitly indexed vector needs indexes 0..n-1")
        return ["\t".join(_encode(byk[i], t.elem)) for i in range(len(byk))]
    kt = _key_type(t)
    try:
        rows = sorted(bag, key=lambda kv: kv[0])
    except TypeError:
        rows = sorted(bag, key=lambda kv: format_value(kv[0]))
    return ["\t".join(_encode(k, kt) + _encode(v, t.elem)) for k, v in rows]


def decode_collection(lines, t, where: str = "") -> list:
    out = []
    kt = _key_type(t)
    n = 0
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        cols = line.rstrip("\n").split("\t")
        try:
            if _implicit_index(t):
                k = n
            else:
                k, cols = _decode(cols, kt)
            v, cols = _decode(cols, t.elem)
            if cols:
                raise DataError(f"{len(cols)} extra column(s)")
        except DataError as e:
            raise DataError(f"{where}:{lineno}: {e}") from None
        out.append((k, v))
        n += 1
    return out


def write_inputs(directory, program: A.SourceProgram, inputs: dict) -> list[Path]:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    types = program.types
    written, params = [], []
    for name in program.inputs:
        t = types[name]
        if A.is_collection(t):
            path = d / f"{name}.tsv"
            path.write_text("".join(line + "\n" for line in encode_collection(inputs[name], t)))
            written.append(path)
        else:
            params.append(f"{name}\t" + "\t".join(_encode(inputs[name], t)))
    if params:
        path = d / PARAMS
        path.write_text("".join(line + "\n" for line in params))
        written.append(path)
    return written


def read_inputs(directory, program: A.SourceProgram) -> dict:
    d = Path(directory)
    if not d.is_dir():
        raise DataError(f"data directory {d} does not exist")
    types = program.types
    params: dict[str, list[str]] = {}
    if (d / PARAMS).exists():
        for lineno, line in enumerate((d / PARAMS).read_text().splitlines(), 1):
            if line.strip():
                name, *cols = line.split("\t")
                params[name] = cols
    out = {}
    for name in program.inputs:
        t = types[name]
        if A.is_collection(t):
            path = d / f"{name}.tsv"
            if not path.exists():
                raise DataError(f"missing input file {path}")
            out[name] = decode_collection(path.read_text().splitlines(), t, str(path))
        else:
            if name not in params:
                raise DataError(f"input {name} missing from {d / PARAMS}")
            try:
                v, rest = _decode(params[name], t)
            except DataError as e:
                raise DataError(f"{d / PARAMS}: {name}: {e}") from None
            if rest:
                raise DataError(f"{d / PARAMS}: {name}: extra columns")
            out[name] = v
    return out


# ---------------------------------------------------------------- result dumps

def visible(name: str) -> bool:
    return "$" not in name


def dump_lines(state: dict, names=None) -> list[str]:
    """Sorted "key<TAB>value" lines; array elements are keyed name[k]."""
    lines = []
    for name in (names if names is not None else state):
        if not visible(name):
            continue
        v = state[name]
        if isinstance(v, dict):
            v = list(v.items())
        if isinstance(v, list) and all(isinstance(e, tuple) and len(e) == 2 for e in v):
            for k, x in v:
                ks = ",".join(format_value(c) for c in k) if isinstance(k, tuple) else format_value(k)
                lines.append(f"{name}[{ks}]\t{format_value(x)}")
        else:
            lines.append(f"{name}\t{format_value(v)}")
    return sorted(lines)


def dump_state(state: dict, names=None) -> str:
    return "".join(line + "\n" for line in dump_lines(state, names))


def write_state(directory, state: dict, names=None) -> list[Path]:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    paths = []
    for name in (names if names is not None else sorted(state)):
        if visible(name):
            path = d / f"{name}.tsv"
            path.write_text(dump_state(state, [name]))
            paths.append(path)
    return paths
