"""Database-owner pipeline: vectorize the local relation, split it into two
additive shares, submit one share to each server, combine the two broadcast
encodings, and read off the intersection (positions whose product is 1).

Stage timings are recorded under the names Load, Hash, Split, Recover.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

from .domain import DomainCatalog, Relation, vectorize
from .errors import ParameterError, ProtocolError
from .groups import GroupParams
from .oracle import ClientConfig
from .rng import RandomSource
from .server import EncodedVector
from .sharing import split_vector
from . import transport
from .transport import Endpoint, Frame


@dataclass
class ClientResult:
    combined: EncodedVector
    psi_positions: set[int]
    psi_values: set[str]
    stage_timings: dict[str, float] = field(default_factory=dict)


def combine(u0: EncodedVector, u1: EncodedVector, params: GroupParams) -> EncodedVector:
    """Element-wise product mod q of the two server encodings."""
    if len(u0) != len(u1):
        raise ProtocolError(f"encoded vector length mismatch: {len(u0)} != {len(u1)}")
    q = params.q
    for u in (u0, u1):
        for v in u.elements:
            if not 1 <= v <= q - 1:
                raise ProtocolError(f"encoded element {v} out of range [1, {q - 1}]")
    return EncodedVector(tuple((a * b) % q for a, b in zip(u0.elements, u1.elements)))


def extract_psi(combined: EncodedVector, catalog: DomainCatalog) -> tuple[set[int], set[str]]:
    """Positions whose combined element is 1, mapped to catalog values."""
    if len(combined) != catalog.n:
        raise ParameterError(
            f"combined vector length {len(combined)} != domain cardinality {catalog.n}"
        )
    positions = {i for i, v in enumerate(combined.elements) if v == 1}
    return positions, {catalog.values[i] for i in positions}


def client_run(
    relation: Relation,
    catalog: DomainCatalog,
    config: ClientConfig,
    endpoint: Endpoint,
    randomness: RandomSource,
    *,
    timeout: float | None = None,
) -> ClientResult:
    """One full client actor run against both servers."""
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    items = relation.items  # relation already loaded; kept as its own stage
    timings["Load"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    v = vectorize(Relation(relation.owner_id, items), catalog)
    timings["Hash"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    share0, share1 = split_vector(v, config.params, randomness)
    timings["Split"] = time.perf_counter() - t0

    endpoint.send(
        transport.SERVER_0,
        Frame(transport.MSG_SHARE_VECTOR, endpoint.party_id, share0.elements),
    )
    endpoint.send(
        transport.SERVER_1,
        Frame(transport.MSG_SHARE_VECTOR, endpoint.party_id, share1.elements),
    )

    # Broadcasts may arrive in either order; key them by sender.
    broadcasts: dict[int, EncodedVector] = {}
    while len(broadcasts) < 2:
        frame = endpoint.receive(timeout)
        if frame.msg_type != transport.MSG_ENCODED_VECTOR:
            raise ProtocolError(
                f"client {endpoint.party_id}: unexpected frame type 0x{frame.msg_type:02x}"
            )
        if frame.sender_id == transport.SERVER_0:
            broadcasts[0] = EncodedVector(frame.elements, server_index=0)
        elif frame.sender_id == transport.SERVER_1:
            broadcasts[1] = EncodedVector(frame.elements, server_index=1)
        else:
            raise ProtocolError(
                f"client {endpoint.party_id}: encoded vector from non-server {frame.sender_id}"
            )

    t0 = time.perf_counter()
    combined = combine(broadcasts[0], broadcasts[1], config.params)
    positions, values = extract_psi(combined, catalog)
    timings["Recover"] = time.perf_counter() - t0

    return ClientResult(
        combined=combined,
        psi_positions=positions,
        psi_values=values,
        stage_timings=timings,
    )
