"""MISER [6,3,5] over F7: encode, repair a systematic node, decode from parity.

Run: python demos/miser_walkthrough.py
"""

from __future__ import annotations

import numpy as np

from regencodes import cauchy, miser, verifier

code = miser.construct(3, 7, cauchy_spec=cauchy.make_spec((4, 5, 6), (1, 2, 3), 7), epsilon=2)
print(f"[n,k,d] = [{code.n},{code.k},{code.d}], alpha = {code.alpha}, B = {code.B}, q = {code.q}")
print("Psi =\n", code.psi)

# one stripe of B message symbols
u = np.arange(1, code.B + 1) % code.q
y = miser.encode(code, u)
for m in range(1, code.n + 1):
    print(f"node {m}: {y[m - 1].tolist()}")

print("MDS:", verifier.verify_mds(code))

# node 1 fails; each of the other five nodes sends one symbol
failed = 1
helpers = miser.default_helpers(code, failed)
symbols = [miser.repair_symbol(code, h, failed, y[h - 1]) for h in helpers]
print(f"repair node {failed} from {helpers}: downloaded {len(symbols)} symbols instead of {code.B}")
restored = miser.repair_systematic(code, failed, symbols)
print("restored:", restored.tolist(), "matches:", bool((restored == y[failed - 1]).all()))

# a data collector connecting to the three parity nodes only
nodes = (4, 5, 6)
decoded = miser.reconstruct(code, nodes, y[[m - 1 for m in nodes]])
print("decoded from parity nodes:", decoded.tolist(), "matches:", bool((decoded == u).all()))

report = verifier.check_alignment(code, failed)
print("component ranks of the passed kernels:", report.component_ranks)
