"""Which detector preparations move the nondemolition points?

With the default Bell-pair preparation, only equal interaction counts give a
definite comparison. Other preparations shift that pattern.

Run: python demos/05_alternative_preparation.py
"""

import numpy as np

from hkreduce import nondemolition as nd
from hkreduce.nondemolition import Comparison

DEF, INDEF = Comparison.DEFINITE, Comparison.INDEFINITE


def table(prep=None):
    t = nd.comparison_table(prep)
    return "  ".join(f"{k.k1}{k.k2}:{v.value[0]}" for k, v in t.items())


print("default:    ", table())

prep = nd.alternative_preparation()
print("D1 in |+>, D2 in |1>:", np.round(prep.amplitudes.real, 3))
print("alternative:", table(prep))

found = nd.search_preparations({(2, 1): DEF, (1, 1): INDEF})
print(f"\n{len(found)} grid preparations make the (2,1) pair nondemolitional, e.g.",
      np.round(found[0].amplitudes.real, 3))

both = nd.search_preparations({(1, 0): DEF, (2, 1): DEF, (1, 1): INDEF})
print(f"preparations satisfying (1,0) and (2,1) definite with (1,1) indefinite: {len(both)}")
