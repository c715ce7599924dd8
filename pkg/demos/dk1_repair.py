"""A d=k+1 code, [8,5,6] over F11: repair node 8 from six helpers.

Run: python demos/dk1_repair.py
"""

from __future__ import annotations

import numpy as np

from regencodes import dk1, verifier

code = dk1.construct_dk1(8, 5, 11)
print(f"[n,k,d] = [{code.params.n},{code.params.k},{code.params.d}], alpha = 2, B = 10")
print("MDS:", verifier.verify_mds(code))

rng = np.random.default_rng(0)
u1, u2 = rng.integers(0, 11, 5), rng.integers(0, 11, 5)
y = dk1.encode_dk1(code, u1, u2)

failed, helpers = 8, list(range(1, 7))
co = dk1.repair_coefficients(code, failed, helpers)
print("lambda =", co.lambdas.tolist())
received = [dk1.helper_symbol(co, h, y[h - 1]) for h in co.helpers]
stored, r_new = dk1.repair_dk1(code, failed, helpers, received, co)
print(f"node {failed}: first symbol {y[failed - 1][0]} -> {stored[0]} (exact), second symbol is a new combination")
print("new r row:", r_new.tolist())

# the repaired code is still MDS and decodes from any 5 nodes
y[failed - 1] = stored
back1, back2 = dk1.reconstruct_dk1(code, (2, 4, 6, 7, 8), y[[1, 3, 5, 6, 7]])
print("decode after repair:", bool((back1 == u1).all() and (back2 == u2).all()))
print("MDS after repair:", verifier.verify_mds(code))
