"""Seeded random comprehension terms for rewrite-soundness tests.

Every generated term is closed over ENV-style inputs:
  X, Y  key-value vectors with unique int keys
  M     matrix of ((i, j), v) pairs
  B     bag of ints with duplicates
  n     int scalar
"""

from __future__ import annotations

import random

from loop2bulk.comp import ir as C

CMP_OPS = ("<", "<=", "==", "!=")


def random_env(rng: random.Random) -> dict:
    def vec():
        keys = rng.sample(range(8), rng.randint(0, 6))
        return [(k, rng.randint(-3, 5)) for k in keys]

    cells = [(i, j) for i in range(4) for j in range(4)]
    return {
        "X": vec(),
        "Y": vec(),
        "M": [(c, rng.randint(-2, 4)) for c in rng.sample(cells, rng.randint(0, 10))],
        "B": [rng.randint(-2, 4) for _ in range(rng.randint(0, 5))],
        "n": rng.randint(0, 6),
    }


def const(v) -> C.CConst:
    return C.CConst(v)


def var(n) -> C.CVar:
    return C.CVar(n)


class IRGen:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self.count = 0

    def fresh(self, base: str = "x") -> str:
        self.count += 1
        return f"{base}{self.count}"

    # ------------------------------------------------------------ general terms

    def scalar(self, ints: list[str], bags: list[str], depth: int):
        r = self.rng
        choices = ["const", "const"]
        if ints:
            choices += ["var"] * 3
        if depth > 0:
            choices += ["bin", "bin", "reduce"]
        if bags:
            choices += ["lifted"]
        c = r.choice(choices)
        if c == "const":
            return const(r.randint(-2, 4))
        if c == "var":
            return var(r.choice(ints))
        if c == "bin":
            return C.CBin(r.choice("+-*"), self.scalar(ints, bags, depth - 1),
                          self.scalar(ints, bags, depth - 1))
        if c == "lifted":
            return C.Reduce(r.choice(["+", "+", "*"]), var(r.choice(bags)))
        return C.Reduce("+", self.bag(ints, bags, depth - 1))

    def cond(self, ints, bags, depth):
        return C.CBin(self.rng.choice(CMP_OPS), self.scalar(ints, bags, depth),
                      self.scalar(ints, bags, depth))

    def bag(self, ints, bags, depth: int):
        r = self.rng
        choices = ["B", "lit", "range"]
        if depth > 0:
            choices += ["comp", "comp", "comp", "union"]
        if bags:
            choices += ["lifted"]
        c = r.choice(choices)
        if c == "B":
            return var("B")
        if c == "lifted":
            return var(r.choice(bags))
        if c == "lit":
            return C.BagLit(tuple(self.scalar(ints, bags, 0) for _ in range(r.randint(0, 2))))
        if c == "range":
            lo = r.randint(-1, 2)
            return C.Range(const(lo), const(lo + r.randint(-1, 3)))
        if c == "union":
            return C.Union_(self.bag(ints, bags, depth - 1), self.bag(ints, bags, depth - 1))
        return self.comp(ints, bags, depth - 1)

    def comp(self, ints, bags, depth: int, pair_head: bool = False, allow_groupby: bool = True):
        r = self.rng
        ints, bags = list(ints), list(bags)
        local: list[str] = []
        quals = []
        grouped = False
        for _ in range(r.randint(1, 4)):
            c = r.choice(["gen", "gen", "arr", "let", "cond", "group"])
            if c == "group" and (grouped or not allow_groupby or not local):
                c = "cond"
            if c == "gen":
                x = self.fresh()
                quals.append(C.Gen(C.PVar(x), self.bag(ints, bags, depth)))
                ints.append(x)
                local.append(x)
            elif c == "arr":
                k, v = self.fresh("k"), self.fresh("v")
                quals.append(C.Gen(C.PTuple((C.PVar(k), C.PVar(v))), var(r.choice("XY"))))
                ints += [k, v]
                local += [k, v]
            elif c == "let":
                x = self.fresh("l")
                quals.append(C.Let(C.PVar(x), self.scalar(ints, bags, depth)))
                ints.append(x)
                local.append(x)
            elif c == "cond":
                quals.append(C.Cond(self.cond(ints, bags, min(depth, 1))))
            else:
                g = self.fresh("g")
                quals.append(C.GroupBy(C.PVar(g), self.scalar(ints, [], 1)))
                grouped = True
                # variables bound so far in this comprehension become bags
                ints = [x for x in ints if x not in local] + [g]
                bags = bags + local
                local = [g]
        head = self.scalar(ints, bags, 1)
        if pair_head:
            head = C.CTuple((self.scalar(ints, bags, 0), head))
        return C.Comp(head, tuple(quals))

    def term(self):
        return self.comp([], [], 2, pair_head=self.rng.random() < 0.5)

    # ------------------------------------------------------------ rule-specific shapes

    def _prefix(self, ints: list[str], min_gens: int = 0):
        """Random generators, lets and conditions; returns (quals, bound names)."""
        r = self.rng
        quals, bound = [], []
        for idx in range(r.randint(min_gens, 3)):
            c = r.choice(["arr", "gen", "let", "cond"]) if idx >= min_gens else r.choice(["arr", "gen"])
            scope = ints + bound
            if c == "arr":
                k, v = self.fresh("k"), self.fresh("v")
                quals.append(C.Gen(C.PTuple((C.PVar(k), C.PVar(v))), var(r.choice("XY"))))
                bound += [k, v]
            elif c == "gen":
                x = self.fresh()
                quals.append(C.Gen(C.PVar(x), self.bag(scope, [], 1)))
                bound.append(x)
            elif c == "let" and scope:
                x = self.fresh("l")
                quals.append(C.Let(C.PVar(x), self.scalar(scope, [], 1)))
                bound.append(x)
            elif scope:
                quals.append(C.Cond(self.cond(scope, [], 1)))
        return quals, bound

    def _after_group(self, key: str, lifted: list[str]):
        r = self.rng
        quals = []
        if r.random() < 0.3 and lifted:
            quals.append(C.Cond(self.cond([key], lifted, 0)))
        head = self.scalar([key], lifted, 1)
        if r.random() < 0.6:
            head = C.CTuple((var(key), head))
        return quals, head

    def constant_key_groupby(self):
        """[[ h | q1, group by g: c, q2 ]] with a constant key."""
        q1, bound = self._prefix(["n"])
        g = self.fresh("g")
        key = const(self.rng.randint(0, 3)) if self.rng.random() < 0.8 else \
            C.CTuple((const(1), const(self.rng.randint(0, 2))))
        lifted = [x for x in bound]
        q2, head = self._after_group(g, lifted)
        if isinstance(key, C.CTuple):
            head = C.CTuple((var(g), C.Reduce("+", C.BagLit((const(1),)))))
        return C.Comp(head, tuple(q1 + [C.GroupBy(C.PVar(g), key)] + q2))

    def unique_key_groupby(self):
        """Group-bys whose key determines every generator: array keys, ranges, joins."""
        r = self.rng
        shape = r.choice(["array", "array", "range", "join", "matrix", "offset"])
        quals, key_expr, local = [], None, []
        if shape in ("array", "offset", "join"):
            k, v = self.fresh("k"), self.fresh("v")
            quals.append(C.Gen(C.PTuple((C.PVar(k), C.PVar(v))), var(r.choice("XY"))))
            local += [k, v]
            key_expr = var(k) if shape != "offset" else C.CBin("+", var(k), const(r.randint(-2, 2)))
            if shape == "join":
                k2, w = self.fresh("k"), self.fresh("w")
                quals.append(C.Gen(C.PTuple((C.PVar(k2), C.PVar(w))), var("Y")))
                quals.append(C.Cond(C.CBin("==", var(k2), C.CBin("+", var(k), const(r.randint(0, 1))))))
                local += [k2, w]
        elif shape == "range":
            i = self.fresh("i")
            lo = r.randint(-1, 2)
            quals.append(C.Gen(C.PVar(i), C.Range(const(lo), const(lo + r.randint(0, 4)))))
            local.append(i)
            key_expr = var(i)
        else:
            a, b, v = self.fresh("a"), self.fresh("b"), self.fresh("v")
            quals.append(C.Gen(C.PTuple((C.PTuple((C.PVar(a), C.PVar(b))), C.PVar(v))), var("M")))
            local += [a, b, v]
            key_expr = C.CTuple((var(a), var(b)))
        for _ in range(r.randint(0, 2)):
            if r.random() < 0.5:
                x = self.fresh("l")
                quals.append(C.Let(C.PVar(x), self.scalar(local, [], 1)))
                local.append(x)
            else:
                quals.append(C.Cond(self.cond(local, [], 1)))
        g = self.fresh("g")
        q2, head = self._after_group(g, local)
        return C.Comp(head, tuple(quals + [C.GroupBy(C.PVar(g), key_expr)] + q2))

    def range_join(self):
        """A range generator tied to an array traversal by an affine key equation."""
        r = self.rng
        i = self.fresh("i")
        lo = r.randint(-1, 2)
        rng_q = C.Gen(C.PVar(i), C.Range(const(lo), const(lo + r.randint(-1, 5))))
        if r.random() < 0.25:
            a, b, v = self.fresh("a"), self.fresh("b"), self.fresh("v")
            arr = C.Gen(C.PTuple((C.PTuple((C.PVar(a), C.PVar(b))), C.PVar(v))), var("M"))
            kv, others = a, [b, v]
        else:
            k, v = self.fresh("k"), self.fresh("v")
            arr = C.Gen(C.PTuple((C.PVar(k), C.PVar(v))), var(r.choice("XY")))
            kv, others = k, [v]
        c0 = r.randint(-2, 2)
        form = r.choice(["id", "plus", "neg"])
        rhs = {"id": var(i), "plus": C.CBin("+", var(i), const(c0)),
               "neg": C.CBin("-", const(c0), var(i))}[form]
        eq = C.Cond(C.CBin("==", var(kv), rhs) if r.random() < 0.5 else C.CBin("==", rhs, var(kv)))
        quals = [rng_q, arr] if r.random() < 0.5 else [arr, rng_q]
        quals.append(eq)
        local = [i, kv] + others
        for _ in range(r.randint(0, 2)):
            if r.random() < 0.5:
                quals.append(C.Cond(self.cond(local, [], 1)))
            else:
                x = self.fresh("l")
                quals.append(C.Let(C.PVar(x), self.scalar(local, [], 1)))
                local.append(x)
        head = self.scalar(local, [], 1)
        if r.random() < 0.3:
            g = self.fresh("g")
            quals.append(C.GroupBy(C.PVar(g), var(i)))
            q2, head = self._after_group(g, [x for x in local if x != g])
            quals += q2
        elif r.random() < 0.5:
            head = C.CTuple((var(i), head))
        return C.Comp(head, tuple(quals))

    def join_term(self):
        """Multi-generator terms with equi-joins, lookups and reducible group-bys."""
        r = self.rng
        shape = r.choice(["join", "join", "lookup", "matmul", "general", "groupby"])
        if shape == "general":
            return self.term()
        if shape == "matmul":
            a, k, v1 = self.fresh("a"), self.fresh("k"), self.fresh("v")
            k2, b, v2 = self.fresh("k"), self.fresh("b"), self.fresh("v")
            quals = [C.Gen(C.PTuple((C.PTuple((C.PVar(a), C.PVar(k))), C.PVar(v1))), var("M")),
                     C.Gen(C.PTuple((C.PTuple((C.PVar(k2), C.PVar(b))), C.PVar(v2))), var("M")),
                     C.Cond(C.CBin("==", var(k2), var(k)))]
            x = self.fresh("l")
            quals.append(C.Let(C.PVar(x), C.CBin("*", var(v1), var(v2))))
            quals.append(C.GroupBy(C.PTuple((C.PVar(a), C.PVar(b)))))
            return C.Comp(C.CTuple((C.CTuple((var(a), var(b))), C.Reduce("+", var(x)))), tuple(quals))
        k, v = self.fresh("k"), self.fresh("v")
        quals = [C.Gen(C.PTuple((C.PVar(k), C.PVar(v))), var("X"))]
        local = [k, v]
        if r.random() < 0.5:
            quals.append(C.Cond(self.cond(local, [], 0)))
        if shape in ("join", "groupby"):
            k2, w = self.fresh("k"), self.fresh("w")
            quals.append(C.Gen(C.PTuple((C.PVar(k2), C.PVar(w))), var(r.choice("XY"))))
            rhs = r.choice([var(k), C.CBin("+", var(k), const(1)), var(v)])
            quals.append(C.Cond(C.CBin("==", var(k2), rhs) if r.random() < 0.5 else C.CBin("==", rhs, var(k2))))
            local += [k2, w]
            if r.random() < 0.4:
                x = self.fresh()
                quals.append(C.Gen(C.PVar(x), var("B")))
                local.append(x)
                if r.random() < 0.5:
                    quals.append(C.Cond(C.CBin("==", var(x), var(w))))
        if shape == "lookup":
            k2, w = self.fresh("k"), self.fresh("w")
            look = C.Comp(var(w), (C.Gen(C.PTuple((C.PVar(k2), C.PVar(w))), var("Y")),
                                   C.Cond(C.CBin("==", var(k2), var(k)))))
            x = self.fresh("l")
            quals.append(C.Let(C.PVar(x), C.Reduce("+", C.Union_(look, C.BagLit((var(v),))))))
            local.append(x)
        if shape == "groupby" or r.random() < 0.3:
            g = self.fresh("g")
            lets = []
            x = self.fresh("l")
            lets.append(C.Let(C.PVar(x), self.scalar(local, [], 1)))
            key = r.choice([var(k), var(v), const(0)])
            op = r.choice(["+", "max", "min", "*"])
            head = C.CTuple((var(g), C.Reduce(op, var(x))))
            return C.Comp(head, tuple(quals + lets + [C.GroupBy(C.PVar(g), key)]))
        head = C.CTuple((var(k), self.scalar(local, [], 1)))
        return C.Comp(head, tuple(quals))
