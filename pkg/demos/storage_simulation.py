"""File store on disk: encode, lose nodes, repair, read back.

Run: python demos/storage_simulation.py
"""

from __future__ import annotations

import hashlib
import os
import tempfile
from pathlib import Path

from regencodes import storage

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    src = tmp / "data.bin"
    src.write_bytes(os.urandom(4096))

    for family, n, k, lost in (("miser", 6, 3, [2]), ("dk1", 8, 5, [3, 7])):
        store = tmp / family
        storage.encode_file(src, store, family, n, k, q=257)
        for node in lost:
            storage.fail_node(store, node)
        for node in lost:
            rec = storage.repair_node(store, node, verify=True)
            print(f"{family}: node {node} repaired ({rec['mode']}), "
                  f"{rec['symbols_per_stripe']} symbols/stripe vs {rec['baseline_symbols'] // rec['stripes']}")
        out = tmp / f"{family}.out"
        storage.reconstruct_file(store, out, nodes=list(range(n - k + 1, n + 1)))
        same = hashlib.sha256(out.read_bytes()).digest() == hashlib.sha256(src.read_bytes()).digest()
        print(f"{family}: read back from nodes {n - k + 1}..{n}, identical = {same}")
        print(f"{family}: verify_store -> {storage.verify_store(store)}")
