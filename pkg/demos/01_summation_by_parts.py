"""
Two-dimensional summation by parts
==================================

A double sum ``sum a_ij u_ij`` can be rewritten against the
second-difference table of ``a`` and the rectangular partial sums of
``u``.  When the entries, the differences, and the partial sums are all
nonnegative, the sum itself must be nonnegative.
"""

import numpy as np

from steff2d import (
    DoubleSequence,
    delta_table,
    hardy_residual,
    partial_sums,
    steffensen_check,
)

rng = np.random.default_rng(0)

# The identity holds for arbitrary real tables.
a = DoubleSequence(rng.uniform(-1, 1, size=(5, 7)))
u = DoubleSequence(rng.uniform(-1, 1, size=(5, 7)))
res = hardy_residual(a, u)
print(f"identity residual on a random 5x7 pair: {res.abs_residual:.3e}")

# A classical downward-monotone table: a_ij = (i+j)^(-1/2).
a = DoubleSequence.from_function(6, 6, lambda i, j: (i + j) ** -0.5)
print("all second differences nonnegative:", bool(delta_table(a).values.min() >= 0))

# Oscillating u with nonnegative partial sums.
u = DoubleSequence.from_function(6, 6, lambda i, j: (-1.0) ** (i + j))
print("partial sums:")
print(partial_sums(u).values)

rep = steffensen_check(a, u)
print(f"hypotheses hold: {rep.hypotheses_hold}; sum = {rep.total:.6f} >= 0")

# Breaking a hypothesis is reported with a witness index.
bad = DoubleSequence([[1.0, 2.0], [2.0, 4.0]])
rep = steffensen_check(bad, DoubleSequence([[1.0, -1.0], [-1.0, 1.0]]))
print("difference-table violation at 1-based index:", rep.first_violation_delta)
