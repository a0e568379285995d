"""Proof-size measurement for compact vs naive proofs."""

from __future__ import annotations

import hashlib
import random
import statistics
from typing import Optional

from .smt import SmtConfig, SparseMerkleTree, compact


def bench_compact_proofs(
    txs: int = 2378,
    depth: int = 64,
    trials: int = 1000,
    seed: int = 0,
    config: Optional[SmtConfig] = None,
) -> dict:
    """Fill a depth-``depth`` tree with ``txs`` random occupied slots and
    measure serialized proof sizes over ``trials`` sampled occupied slots."""
    config = config or SmtConfig(depth=depth)
    rng = random.Random(seed)
    slots = set()
    while len(slots) < txs:
        slots.add(rng.getrandbits(depth))
    leaves = {
        s: hashlib.sha256(b"leaf:" + s.to_bytes(8, "big")).digest() for s in slots
    }
    tree = SparseMerkleTree(config, leaves)

    population = sorted(slots)
    sizes = []
    naive_sizes = []
    for _ in range(trials):
        slot = rng.choice(population)
        proof = tree.prove(slot)
        naive_sizes.append(len(proof.to_bytes()))
        sizes.append(len(compact(proof, config).to_bytes(config)))

    return {
        "txs": txs,
        "depth": depth,
        "trials": trials,
        "seed": seed,
        "naive_size": naive_sizes[0],
        "naive_uniform": len(set(naive_sizes)) == 1,
        "mean_compact": statistics.fmean(sizes),
        "min_compact": min(sizes),
        "max_compact": max(sizes),
    }
