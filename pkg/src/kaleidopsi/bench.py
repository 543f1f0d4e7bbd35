"""Desk-scale benchmark harness: run each scheme on identical data and record
per-stage timings plus wire accounting.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from statistics import mean
from typing import Sequence

from .domain import DomainCatalog, Relation
from .errors import ParameterError
from .oracle import RunConfig, Scheme, make_run_config
from .rng import SeededRandomSource
from .runner import RunOutcome, execute_run, make_backend
from . import transport

CLIENT_STAGES = ("Load", "Hash", "Split", "Recover")
SERVER_STAGES = ("Receive", "Aggregate", "Encode", "Broadcast")


@dataclass
class BenchmarkRecord:
    """Per-run accounting: stage timings averaged across the parties of each
    role, message/byte totals per direction, and single-frame sizes."""

    scheme: Scheme
    m: int
    n: int
    client_stages: dict[str, float] = field(default_factory=dict)
    server_stages: dict[str, float] = field(default_factory=dict)
    upstream_messages: int = 0
    downstream_messages: int = 0
    upstream_bytes: int = 0
    downstream_bytes: int = 0
    client_vector_bytes: int = 0
    server_vector_bytes: int = 0

    @classmethod
    def from_outcome(cls, scheme: Scheme, m: int, n: int, outcome: RunOutcome) -> "BenchmarkRecord":
        rec = cls(scheme=scheme, m=m, n=n)
        for stage in CLIENT_STAGES:
            rec.client_stages[stage] = mean(
                r.stage_timings.get(stage, 0.0) for r in outcome.client_results.values()
            )
        for stage in SERVER_STAGES:
            rec.server_stages[stage] = mean(
                r.stage_timings.get(stage, 0.0) for r in outcome.server_results.values()
            )
        audit = outcome.audit
        rec.upstream_messages = audit.count(transport.MSG_SHARE_VECTOR)
        rec.downstream_messages = audit.count(transport.MSG_ENCODED_VECTOR)
        rec.upstream_bytes = audit.total_bytes(transport.MSG_SHARE_VECTOR)
        rec.downstream_bytes = audit.total_bytes(transport.MSG_ENCODED_VECTOR)
        if rec.upstream_messages:
            rec.client_vector_bytes = rec.upstream_bytes // rec.upstream_messages
        if rec.downstream_messages:
            rec.server_vector_bytes = rec.downstream_bytes // rec.downstream_messages
        return rec

    def stage_row(self) -> dict[str, float]:
        row = {f"client_{s.lower()}_s": self.client_stages.get(s, 0.0) for s in CLIENT_STAGES}
        row.update({f"server_{s.lower()}_s": self.server_stages.get(s, 0.0) for s in SERVER_STAGES})
        return row


@dataclass
class BenchmarkSummary:
    """min/mean/max of every stage across repetitions, one per scheme."""

    scheme: Scheme
    m: int
    n: int
    repetitions: int
    stage_stats: dict[str, tuple[float, float, float]]
    upstream_messages: int
    downstream_messages: int
    upstream_bytes: int
    downstream_bytes: int
    client_vector_bytes: int
    server_vector_bytes: int


def summarize(records: Sequence[BenchmarkRecord]) -> BenchmarkSummary:
    if not records:
        raise ParameterError("no benchmark records to summarize")
    first = records[0]
    stage_stats = {}
    for key in first.stage_row():
        vals = [r.stage_row()[key] for r in records]
        stage_stats[key] = (min(vals), mean(vals), max(vals))
    return BenchmarkSummary(
        scheme=first.scheme,
        m=first.m,
        n=first.n,
        repetitions=len(records),
        stage_stats=stage_stats,
        upstream_messages=first.upstream_messages,
        downstream_messages=first.downstream_messages,
        upstream_bytes=first.upstream_bytes,
        downstream_bytes=first.downstream_bytes,
        client_vector_bytes=first.client_vector_bytes,
        server_vector_bytes=first.server_vector_bytes,
    )


def run_benchmark(
    schemes: Sequence[Scheme],
    relations: Sequence[Relation],
    catalog: DomainCatalog,
    params,
    repetitions: int = 1,
    seed: int = 0,
    backend_name: str = "inproc",
    protocol_iv: int | None = None,
) -> dict[Scheme, BenchmarkSummary]:
    """Run every scheme `repetitions` times on the same data."""
    if repetitions < 1:
        raise ParameterError(f"repetitions must be >= 1, got {repetitions}")
    m = len(relations)
    summaries = {}
    master = SeededRandomSource(seed)
    for scheme in schemes:
        records = []
        for rep in range(repetitions):
            rng = master.spawn(f"{scheme.value}:{rep}")
            kwargs = {} if protocol_iv is None else {"protocol_iv": protocol_iv}
            config = make_run_config(scheme, params, m, catalog.n, rng, **kwargs)
            backend = make_backend(backend_name, m)
            try:
                outcome = execute_run(
                    relations, catalog, config, backend,
                    [rng.spawn(f"client:{i}") for i in range(m)],
                )
            finally:
                backend.close()
            records.append(BenchmarkRecord.from_outcome(scheme, m, catalog.n, outcome))
        summaries[scheme] = summarize(records)
    return summaries
