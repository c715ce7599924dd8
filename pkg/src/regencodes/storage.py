"""File-level storage on top of the codes.

A *store* is a directory holding one chunk file per node, ``manifest.json``
and an append-only ``ledger.jsonl``. Each byte of the input becomes one
GF(q) symbol (so ``q > 255``); the payload is zero-padded to whole stripes
of ``B`` symbols and each stripe is encoded independently. Chunk files are
raw little-endian ``uint16`` arrays, stripe-major.

Every mutating operation holds ``<store>/.lock``.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import random
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from filelock import FileLock

from . import cauchy, dk1, miser
from .errors import (
    ArityError,
    HelperSetError,
    InsufficientNodesError,
    ManifestError,
    ParamsError,
)
from .gf import PrimeField

FORMAT_VERSION = 1
MANIFEST_NAME = "manifest.json"
LEDGER_NAME = "ledger.jsonl"
LOCK_NAME = ".lock"
FAMILIES = ("miser", "dk1")
# Chunk files hold u16 symbols.
MAX_Q = 1 << 16
# --verify checks every k-subset up to this many, then samples this many.
VERIFY_SUBSETS = 200


@dataclass
class Manifest:
    family: str
    n: int
    k: int
    d: int
    q: int
    stripe_count: int
    original_length: int
    sha256: str
    chunks: list[str]
    cauchy: dict | None = None
    epsilon: int | None = None
    shortened_by: int = 0
    p: list[list[int]] | None = None
    r: list[list[int]] | None = None
    format_version: int = FORMAT_VERSION
    failed: list[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ManifestError(f"unknown code family {self.family!r}")
        if (self.r is not None) != (self.family == "dk1"):
            raise ManifestError("r-vectors must be present exactly for the dk1 family")
        if len(self.chunks) != self.n:
            raise ManifestError(f"manifest lists {len(self.chunks)} chunks for n={self.n}")

    @property
    def alpha(self) -> int:
        return self.d - self.k + 1

    @property
    def B(self) -> int:
        return self.k * self.alpha

    @property
    def padding(self) -> int:
        """Zero symbols appended to fill the last stripe."""
        return self.stripe_count * self.B - self.original_length

    def to_dict(self) -> dict:
        out = asdict(self)
        out["padding"] = self.padding
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> Manifest:
        data = dict(data)
        version = data.get("format_version")
        if version != FORMAT_VERSION:
            raise ManifestError(f"unsupported manifest format_version {version!r}")
        padding = data.pop("padding", None)
        try:
            m = cls(**data)
        except TypeError as exc:
            raise ManifestError(f"malformed manifest: {exc}") from exc
        if padding is not None and padding != m.padding:
            raise ManifestError(f"manifest padding {padding} disagrees with stripe count")
        return m

    @classmethod
    def from_json(cls, text: str) -> Manifest:
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ManifestError(f"manifest is not valid JSON: {exc}") from exc


class BandwidthLedger:
    """Append-only JSON-lines log of store events."""

    def __init__(self, path: Path):
        self.path = Path(path)

    def append(self, record: dict) -> None:
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")

    def records(self) -> list[dict]:
        if not self.path.exists():
            return []
        with self.path.open(encoding="utf-8") as fh:
            return [json.loads(line) for line in fh if line.strip()]


# ---------------------------------------------------------------------------
# code objects and symbol I/O


def build_code(m: Manifest):
    field_ = PrimeField(m.q)
    if m.family == "miser":
        spec = cauchy.make_spec(m.cauchy["x"], m.cauchy["y"], field_) if m.cauchy else None
        code = miser.construct_general(m.n, m.k, field_, d=m.d, cauchy_spec=spec, epsilon=m.epsilon)
        if code.shortened_by != m.shortened_by:
            raise ManifestError(f"manifest shortened_by={m.shortened_by} disagrees with [{m.n},{m.k},{m.d}]")
        return code
    return dk1.construct_dk1(m.n, m.k, field_, p=m.p, r=m.r)


def bytes_to_symbols(data: bytes) -> np.ndarray:
    return np.frombuffer(data, dtype=np.uint8).astype(np.int64)


def _chunk_path(store: Path, m: Manifest, node: int) -> Path:
    return store / m.chunks[node - 1]


def write_chunk(path: Path, symbols: np.ndarray) -> None:
    arr = np.ascontiguousarray(symbols, dtype="<u2")
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(arr.tobytes())
    tmp.replace(path)


def read_chunk(store: Path, m: Manifest, node: int) -> np.ndarray:
    """``(stripes, alpha)`` symbols of ``node``."""
    path = _chunk_path(store, m, node)
    if not path.exists():
        raise InsufficientNodesError(f"chunk for node {node} is missing ({path.name})")
    raw = np.frombuffer(path.read_bytes(), dtype="<u2").astype(np.int64)
    width = m.alpha
    if raw.size != m.stripe_count * width:
        raise ManifestError(f"chunk {path.name} holds {raw.size} symbols, expected {m.stripe_count * width}")
    if raw.size and raw.max() >= m.q:
        raise ManifestError(f"chunk {path.name} holds a symbol >= q={m.q}")
    return raw.reshape(m.stripe_count, width)


def load_manifest(store: Path) -> Manifest:
    path = Path(store) / MANIFEST_NAME
    if not path.exists():
        raise ManifestError(f"no manifest in {store}")
    return Manifest.from_json(path.read_text(encoding="utf-8"))


def save_manifest(store: Path, m: Manifest) -> None:
    path = Path(store) / MANIFEST_NAME
    tmp = path.with_suffix(".json.tmp")
    tmp.write_text(m.to_json(), encoding="utf-8")
    tmp.replace(path)


def _lock(store: Path) -> FileLock:
    return FileLock(str(Path(store) / LOCK_NAME))


def available_nodes(store: Path, m: Manifest) -> list[int]:
    return [node for node in range(1, m.n + 1) if _chunk_path(store, m, node).exists()]


# ---------------------------------------------------------------------------
# operations


def _encode_stripes(code, family: str, msgs: np.ndarray) -> np.ndarray:
    """``(S, n, alpha)`` stored symbols for ``(S, B)`` messages."""
    if family == "miser":
        return miser.encode(code, msgs)
    k = code.k
    return dk1.encode_dk1(code, msgs[:, :k], msgs[:, k:])


def _decode_stripes(code, family: str, nodes: Sequence[int], symbols: np.ndarray) -> np.ndarray:
    if family == "miser":
        return miser.reconstruct(code, nodes, symbols)
    u1, u2 = dk1.reconstruct_dk1(code, nodes, symbols)
    return np.concatenate([u1, u2], axis=-1)


def encode_file(
    src: Path | str,
    store: Path | str,
    family: str,
    n: int,
    k: int,
    q: int = 257,
) -> Manifest:
    """Stripe ``src`` and write ``n`` chunks plus a manifest into ``store``."""
    src, store = Path(src), Path(store)
    if family not in FAMILIES:
        raise ParamsError(f"family must be one of {FAMILIES}, got {family!r}")
    if q < 257:
        raise ParamsError(f"byte payloads need q >= 257, got {q}")
    if q > MAX_Q:
        raise ParamsError(f"u16 chunk files need q <= {MAX_Q}, got {q}")
    field_ = PrimeField(q)
    if family == "miser":
        code = miser.construct_general(n, k, field_)
        extra = {
            "cauchy": code.cauchy_spec.to_dict(),
            "epsilon": code.epsilon.value,
            "shortened_by": code.shortened_by,
        }
    else:
        code = dk1.construct_dk1(n, k, field_)
        extra = {"p": code.p.tolist(), "r": code.r.tolist()}

    data = src.read_bytes()
    symbols = bytes_to_symbols(data)
    B = code.B
    stripes = -(-symbols.size // B)
    msgs = np.zeros(stripes * B, dtype=np.int64)
    msgs[: symbols.size] = symbols
    stored = _encode_stripes(code, family, msgs.reshape(stripes, B))

    store.mkdir(parents=True, exist_ok=True)
    with _lock(store):
        m = Manifest(
            family=family, n=n, k=k, d=code.d, q=q,
            stripe_count=stripes, original_length=len(data),
            sha256=hashlib.sha256(data).hexdigest(),
            chunks=[f"node_{node:03d}.chunk" for node in range(1, n + 1)],
            **extra,
        )
        for node in range(1, n + 1):
            write_chunk(_chunk_path(store, m, node), stored[:, node - 1, :])
        save_manifest(store, m)
        ledger = BandwidthLedger(store / LEDGER_NAME)
        if ledger.path.exists():
            ledger.path.unlink()
        ledger.append({"event": "encode", "family": family, "n": n, "k": k, "d": code.d,
                       "B": B, "stripes": stripes, "bytes": len(data)})
    return m


def fail_node(store: Path | str, node: int) -> None:
    """Simulate the loss of ``node`` by deleting its chunk."""
    store = Path(store)
    with _lock(store):
        m = load_manifest(store)
        if not 1 <= node <= m.n:
            raise IndexError(f"node {node} out of range 1..{m.n}")
        path = _chunk_path(store, m, node)
        if not path.exists():
            raise InsufficientNodesError(f"node {node} has already failed")
        path.unlink()
        if node not in m.failed:
            m.failed = sorted(m.failed + [node])
        save_manifest(store, m)
        BandwidthLedger(store / LEDGER_NAME).append({"event": "fail", "node": node})


def _default_helpers(m: Manifest, code, node: int, alive: list[int]) -> list[int]:
    if m.family == "miser":
        if node <= m.k:
            try:
                return miser.default_helpers(code, node, alive)
            except HelperSetError:
                pass  # too many nodes down for optimal repair; fall back below
        if len(alive) < m.k:
            raise InsufficientNodesError(f"fallback repair needs {m.k} surviving nodes, have {len(alive)}")
        return alive[: m.k]
    if len(alive) < m.d:
        raise InsufficientNodesError(f"repair needs {m.d} surviving nodes, have {len(alive)}")
    return alive[: m.d]


def repair_node(
    store: Path | str,
    node: int,
    helpers: Sequence[int] | None = None,
    verify: bool = False,
) -> dict:
    """Regenerate the chunk of a failed node and log the download.

    MISER systematic nodes and every dk1 node use optimal repair (``d``
    symbols per stripe). MISER parity nodes fall back to downloading ``k``
    whole nodes and re-encoding (``k alpha`` symbols per stripe); so does a
    systematic node when too few nodes survive for an optimal helper set and
    no helpers were named.
    """
    store = Path(store)
    with _lock(store):
        m = load_manifest(store)
        if not 1 <= node <= m.n:
            raise IndexError(f"node {node} out of range 1..{m.n}")
        alive = available_nodes(store, m)
        if node in alive:
            raise HelperSetError(f"node {node} has not failed")
        code = build_code(m)
        helpers = sorted(int(h) for h in helpers) if helpers is not None else _default_helpers(m, code, node, alive)
        if node in helpers:
            raise HelperSetError(f"node {node} cannot help repair itself")
        missing = [h for h in helpers if h not in alive]
        if missing:
            raise InsufficientNodesError(f"helpers {missing} have no chunk")
        content = {h: read_chunk(store, m, h) for h in helpers}
        S = m.stripe_count

        if m.family == "miser" and node <= m.k and len(helpers) == m.d:
            syms = [miser.repair_symbol(code, h, node, content[h]) for h in helpers]
            rebuilt = miser.repair_systematic(code, node, syms)
            mode, per_stripe = "optimal", len(syms)
        elif m.family == "miser":
            if len(helpers) < m.k:
                raise ArityError(f"fallback repair needs k={m.k} helpers, got {len(helpers)}")
            helpers = helpers[: m.k]
            rebuilt = miser.repair_parity_fallback(code, node, {h: content[h] for h in helpers})
            mode, per_stripe = "fallback", m.k * m.alpha
        else:
            coeffs = dk1.repair_coefficients(code, node, helpers)
            received = [dk1.helper_symbol(coeffs, h, content[h]) for h in helpers]
            rebuilt, r_new = dk1.repair_dk1(code, node, helpers, received, coeffs)
            m.r = code.r.tolist()
            mode, per_stripe = "optimal", len(received)

        write_chunk(_chunk_path(store, m, node), rebuilt.reshape(S, m.alpha))
        m.failed = [f for f in m.failed if f != node]
        save_manifest(store, m)
        record = {
            "event": "repair", "node": node, "helpers": list(helpers), "mode": mode,
            "symbols_per_stripe": per_stripe, "stripes": S,
            "symbols_downloaded": per_stripe * S, "baseline_symbols": m.B * S,
        }
        if verify:
            record["verified_subsets"] = _verify_subsets(store, m, code)
        BandwidthLedger(store / LEDGER_NAME).append(record)
    return record


def _verify_subsets(store: Path, m: Manifest, code, seed: int | None = 0) -> int:
    alive = available_nodes(store, m)
    subsets = list(itertools.combinations(alive, m.k))
    if len(subsets) > VERIFY_SUBSETS:
        subsets = random.Random(seed).sample(subsets, VERIFY_SUBSETS)
    chunks = {node: read_chunk(store, m, node) for node in alive}
    for subset in subsets:
        data = _reassemble(m, code, subset, chunks)
        if hashlib.sha256(data).hexdigest() != m.sha256:
            raise ManifestError(f"reconstruction from nodes {subset} does not match the original file")
    return len(subsets)


def _reassemble(m: Manifest, code, nodes: Sequence[int], chunks: dict[int, np.ndarray]) -> bytes:
    symbols = np.stack([chunks[node] for node in nodes], axis=1)
    msgs = _decode_stripes(code, m.family, nodes, symbols)
    flat = msgs.reshape(-1)[: m.original_length]
    if flat.size and flat.max() > 255:
        raise ManifestError("decoded symbol does not fit in a byte")
    return flat.astype(np.uint8).tobytes()


def reconstruct_file(store: Path | str, out: Path | str, nodes: Sequence[int] | None = None) -> bytes:
    """Decode the original file from ``k`` nodes (default: lowest available) into ``out``."""
    store = Path(store)
    with _lock(store):
        m = load_manifest(store)
        alive = available_nodes(store, m)
        if nodes is None:
            if len(alive) < m.k:
                raise InsufficientNodesError(f"need {m.k} nodes, only {len(alive)} available")
            nodes = alive[: m.k]
        nodes = [int(x) for x in nodes]
        if len(nodes) < m.k:
            raise InsufficientNodesError(f"need {m.k} nodes, got {len(nodes)}")
        if len(nodes) > m.k:
            raise ArityError(f"reconstruction uses exactly k={m.k} nodes, got {len(nodes)}")
        if len(set(nodes)) != len(nodes):
            raise IndexError(f"duplicate nodes in {nodes}")
        for node in nodes:
            if not 1 <= node <= m.n:
                raise IndexError(f"node {node} out of range 1..{m.n}")
        code = build_code(m)
        data = _reassemble(m, code, nodes, {node: read_chunk(store, m, node) for node in nodes})
        if hashlib.sha256(data).hexdigest() != m.sha256:
            raise ManifestError("reconstructed data does not match the recorded sha256")
        Path(out).write_bytes(data)
        BandwidthLedger(store / LEDGER_NAME).append({
            "event": "reconstruct", "nodes": nodes, "stripes": m.stripe_count,
            "symbols_downloaded": m.B * m.stripe_count,
        })
    return data


def stats(store: Path | str) -> dict:
    """Repair bandwidth totals against the naive download-everything baseline."""
    store = Path(store)
    m = load_manifest(store)
    repairs = [r for r in BandwidthLedger(store / LEDGER_NAME).records() if r["event"] == "repair"]
    optimal = [r for r in repairs if r["mode"] == "optimal"]
    return {
        "family": m.family, "n": m.n, "k": m.k, "d": m.d, "alpha": m.alpha, "B": m.B,
        "stripes": m.stripe_count,
        "repairs": len(repairs),
        "optimal_repairs": len(optimal),
        "fallback_repairs": len(repairs) - len(optimal),
        "repair_symbols": sum(r["symbols_downloaded"] for r in repairs),
        "baseline_symbols": sum(r["baseline_symbols"] for r in repairs),
        "events": [
            {"node": r["node"], "mode": r["mode"], "per_stripe": r["symbols_per_stripe"], "baseline_per_stripe": m.B}
            for r in repairs
        ],
    }


def verify_store(store: Path | str, seed: int | None = 0) -> dict:
    """Check that every (or a sample of) ``k``-subset of surviving nodes decodes the file."""
    store = Path(store)
    with _lock(store):
        m = load_manifest(store)
        code = build_code(m)
        alive = available_nodes(store, m)
        if len(alive) < m.k:
            raise InsufficientNodesError(f"need {m.k} nodes, only {len(alive)} available")
        checked = _verify_subsets(store, m, code, seed)
    return {"available": alive, "subsets_checked": checked, "ok": True}
