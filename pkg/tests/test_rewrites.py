from __future__ import annotations

import random

import pytest

import checks
from irgen import IRGen
from loop2bulk.comp import eliminate_constant_key_groupby, infer_unique_key
from loop2bulk.comp.optimize import _first_groupby
from loop2bulk.errors import NotApplicable


@pytest.mark.parametrize("kind", checks.REWRITES)
def test_rewrite_preserves_bag_semantics(kind):
    assert checks.rewrite_soundness(kind, 500) == []


def test_constant_and_unique_key_guards_are_disjoint():
    rng = random.Random(17)
    gen = IRGen(rng)
    for _ in range(300):
        for e in (gen.constant_key_groupby(), gen.unique_key_groupby()):
            g = _first_groupby(e)
            if infer_unique_key(e, g):
                with pytest.raises(NotApplicable):
                    eliminate_constant_key_groupby(e)
