"""Synthetic workload generation: a domain file plus m relation CSVs.

Two shapes: `uniform` samples each client's values uniformly without
replacement; `skewed` uses Zipf-like weights (1/rank) so low positions are
much more likely to be shared.  Output is deterministic given the seed.
"""

from __future__ import annotations

import math
import os
import random

from .errors import ParameterError

WORKLOADS = ("uniform", "skewed")


def domain_values(n: int) -> list[str]:
    """Canonical integer strings 0..n-1 in byte-wise lexicographic order."""
    if n < 1:
        raise ParameterError(f"domain cardinality must be >= 1, got {n}")
    return sorted(str(i) for i in range(n))


def sample_client_values(
    workload: str, values: list[str], count: int, rng: random.Random
) -> list[str]:
    if workload not in WORKLOADS:
        raise ParameterError(f"unknown workload {workload!r}; expected one of {WORKLOADS}")
    n = len(values)
    if count > n:
        raise ParameterError(f"per-client count {count} exceeds domain cardinality {n}")
    if workload == "uniform":
        return rng.sample(values, count)
    # Weighted sampling without replacement (Efraimidis-Spirakis): the `count`
    # largest u^(1/w) keys, with w = 1/(rank+1).
    keyed = []
    for rank, v in enumerate(values):
        w = 1.0 / (rank + 1)
        u = rng.random()
        keyed.append((math.log(u) / w, v))
    keyed.sort(reverse=True)
    return [v for _, v in keyed[:count]]


def generate_workload(
    workload: str,
    n: int,
    m: int,
    count: int,
    seed: int,
    out_dir: str,
) -> tuple[str, list[str]]:
    """Write domain + m relation files; returns (domain_path, relation_paths)."""
    if m < 1:
        raise ParameterError(f"client count must be >= 1, got {m}")
    values = domain_values(n)
    rng = random.Random(seed)

    os.makedirs(out_dir, exist_ok=True)
    domain_path = os.path.join(out_dir, "domain.txt")
    with open(domain_path, "w", encoding="utf-8") as fh:
        for v in values:
            fh.write(v + "\n")

    relation_paths = []
    for i in range(m):
        sampled = sample_client_values(workload, values, count, rng)
        path = os.path.join(out_dir, f"relation_{i}.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("value\n")
            for v in sampled:
                fh.write(v + "\n")
        relation_paths.append(path)
    return domain_path, relation_paths
