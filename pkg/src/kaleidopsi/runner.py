"""Run orchestration.

execute_run spawns the two server actors and the m client actors on a real
transport backend (in-process queues or localhost TCP) and joins them; this
is the path the CLI uses and the one the traffic audit watches.

simulate_protocol computes the identical protocol arithmetic without any
transport; the attack experiments and the randomized correctness tests use
it because they need thousands of runs.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Sequence

from .client import ClientResult, client_run, combine, extract_psi
from .domain import DomainCatalog, Relation, vectorize
from .errors import ParameterError, ProtocolError
from .oracle import RunConfig, Scheme, client_projection, server_projection
from .rng import RandomSource
from .server import (
    EncodedVector,
    ServerResult,
    aggregate,
    encode,
    server_run,
    strategy_for,
)
from .sharing import ShareVector, split_vector
from .transport import (
    SERVER_0,
    SERVER_1,
    AuditLog,
    InProcessBackend,
    TcpBackend,
    TransportBackend,
)


@dataclass
class RunOutcome:
    client_results: dict[int, ClientResult]
    server_results: dict[int, ServerResult]
    audit: AuditLog


def make_backend(
    name: str,
    m: int,
    *,
    audit: AuditLog | None = None,
    timeout: float = 30.0,
) -> TransportBackend:
    party_ids = list(range(m)) + [SERVER_0, SERVER_1]
    if name == "inproc":
        return InProcessBackend(party_ids, audit=audit, timeout=timeout)
    if name == "tcp":
        return TcpBackend(party_ids, audit=audit, timeout=timeout)
    raise ParameterError(f"unknown transport backend {name!r}; expected 'inproc' or 'tcp'")


def execute_run(
    relations: Sequence[Relation],
    catalog: DomainCatalog,
    config: RunConfig,
    backend: TransportBackend,
    client_rngs: Sequence[RandomSource],
    *,
    timeout: float | None = None,
) -> RunOutcome:
    """Run the full protocol with one thread per party; raises the first
    actor failure after joining everyone."""
    m = config.m
    if len(relations) != m:
        raise ParameterError(f"expected {m} relations, got {len(relations)}")
    if len(client_rngs) != m:
        raise ParameterError(f"expected {m} client random sources, got {len(client_rngs)}")
    if catalog.n != config.n:
        raise ParameterError(f"catalog cardinality {catalog.n} != configured n {config.n}")

    client_ids = list(range(m))
    ccfg = client_projection(config)
    client_results: dict[int, ClientResult] = {}
    server_results: dict[int, ServerResult] = {}
    errors: list[BaseException] = []
    lock = threading.Lock()

    def run_server(b: int) -> None:
        try:
            result = server_run(
                backend.endpoint(SERVER_0 if b == 0 else SERVER_1),
                server_projection(config, b),
                client_ids,
                timeout=timeout,
            )
            with lock:
                server_results[b] = result
        except BaseException as exc:  # joined and re-raised below
            with lock:
                errors.append(exc)

    def run_client(i: int) -> None:
        try:
            result = client_run(
                relations[i],
                catalog,
                ccfg,
                backend.endpoint(i),
                client_rngs[i],
                timeout=timeout,
            )
            with lock:
                client_results[i] = result
        except BaseException as exc:
            with lock:
                errors.append(exc)

    threads = [threading.Thread(target=run_server, args=(b,)) for b in (0, 1)]
    threads += [threading.Thread(target=run_client, args=(i,)) for i in client_ids]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    if errors:
        raise errors[0]
    return RunOutcome(client_results, server_results, backend.audit)


@dataclass
class RunTrace:
    """All intermediate vectors of one transport-free protocol execution."""

    plain_vectors: list[tuple[int, ...]]
    shares: list[tuple[ShareVector, ShareVector]]
    aggregated: tuple[ShareVector, ShareVector]
    encoded: tuple[EncodedVector, EncodedVector]
    combined: EncodedVector
    psi_positions: set[int] = field(default_factory=set)
    psi_values: set[str] = field(default_factory=set)


def simulate_protocol(
    relations: Sequence[Relation],
    catalog: DomainCatalog,
    config: RunConfig,
    client_rngs: Sequence[RandomSource],
) -> RunTrace:
    """Same arithmetic as execute_run, no actors or frames."""
    if len(relations) != config.m:
        raise ParameterError(f"expected {config.m} relations, got {len(relations)}")
    if config.scheme is Scheme.KALEIDO_RND and config.rnd_seed is None:
        raise ProtocolError("Kaleido-RND simulation needs the shared seed in the config")

    params = config.params
    plain = [vectorize(rel, catalog) for rel in relations]
    shares = [split_vector(v, params, rng) for v, rng in zip(plain, client_rngs)]

    aggregated = tuple(
        aggregate([pair[b] for pair in shares], config.m_shares[b], params) for b in (0, 1)
    )
    encoded = tuple(
        encode(
            aggregated[b],
            strategy_for(server_projection(config, b), config.rnd_seed),
            params,
        )
        for b in (0, 1)
    )
    combined = combine(encoded[0], encoded[1], params)
    positions, values = extract_psi(combined, catalog)
    return RunTrace(
        plain_vectors=plain,
        shares=shares,
        aggregated=aggregated,  # type: ignore[arg-type]
        encoded=encoded,  # type: ignore[arg-type]
        combined=combined,
        psi_positions=positions,
        psi_values=values,
    )
