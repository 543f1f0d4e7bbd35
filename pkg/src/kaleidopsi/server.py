"""Server side of the protocol: aggregate client share vectors, subtract the
server's share of the client count, exponentiate each position with a
per-strategy generator, and broadcast the encoded vector.

Generator strategies:
  Prism        one fixed order-p generator for every position (deterministic,
               leaks equal-count structure).
  Kaleido-RND  per-position generators from a shared pseudorandom stream; the
               seed travels from server 0 to server 1 in one frame.
  Kaleido-AES  per-position generators from a keyed PRF, so both servers agree
               without exchanging a single message.
  Injected     explicit per-position generators, order check bypassed; test
               and case-study use only.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import ParameterError, ProtocolError
from .groups import GroupParams, mod_exp, next_order_p_generator
from .oracle import Scheme, ServerConfig
from .prf import AesPrf
from .sharing import ShareVector
from . import transport
from .transport import Endpoint, Frame


@dataclass(frozen=True)
class EncodedVector:
    """Exponentiated vector over Z_q^*; server_index is None on the
    client-side combined vector."""

    elements: tuple[int, ...]
    server_index: int | None = None

    def __len__(self) -> int:
        return len(self.elements)

    def __getitem__(self, i: int) -> int:
        return self.elements[i]


class EncoderStrategy:
    """Maps a vector position to the generator used at that position."""

    def generator_for(self, pos: int, params: GroupParams) -> int:
        raise NotImplementedError


@dataclass(frozen=True)
class PrismStrategy(EncoderStrategy):
    generator: int

    def generator_for(self, pos: int, params: GroupParams) -> int:
        return self.generator


class KaleidoRndStrategy(EncoderStrategy):
    """Deterministic pseudorandom generator stream from a shared seed."""

    def __init__(self, seed: int):
        self.seed = seed
        self._stream = random.Random(seed)
        self._values: list[int] = []

    def _raw(self, pos: int) -> int:
        while len(self._values) <= pos:
            self._values.append(self._stream.getrandbits(128))
        return self._values[pos]

    def generator_for(self, pos: int, params: GroupParams) -> int:
        seed_g = (self._raw(pos) % (params.q - 2)) + 2
        return next_order_p_generator(seed_g, params)


class KaleidoAesStrategy(EncoderStrategy):
    """PRF-derived generators; identical on both servers with no messages."""

    def __init__(self, prf: Callable[[int], int]):
        self._prf = prf

    def generator_for(self, pos: int, params: GroupParams) -> int:
        seed_g = (self._prf(pos) % (params.q - 2)) + 2
        return next_order_p_generator(seed_g, params)


@dataclass(frozen=True)
class InjectedStrategy(EncoderStrategy):
    """Verbatim per-position generators with no order-p check.

    The order check is deliberately skipped so small worked examples with
    out-of-order generators can be reproduced; never used on a real path.
    """

    generators: tuple[int, ...]

    def generator_for(self, pos: int, params: GroupParams) -> int:
        return self.generators[pos]


def strategy_for(config: ServerConfig, rnd_seed: int | None = None) -> EncoderStrategy:
    """Build the encoder strategy a server uses under its config projection.

    For Kaleido-RND the seed must be supplied explicitly (server 0 from its
    config, server 1 from the received seed frame).
    """
    if config.scheme is Scheme.PRISM:
        if config.fixed_generator is None:
            raise ProtocolError("Prism config lacks a fixed generator")
        return PrismStrategy(config.fixed_generator)
    if config.scheme is Scheme.KALEIDO_AES:
        if config.prf_key is None:
            raise ProtocolError("Kaleido-AES config lacks a PRF key")
        return KaleidoAesStrategy(AesPrf(config.prf_key, config.protocol_iv))
    if rnd_seed is None:
        raise ProtocolError("Kaleido-RND strategy needs the shared seed")
    return KaleidoRndStrategy(rnd_seed)


def aggregate(shares: Sequence[ShareVector], m_share: int, params: GroupParams) -> ShareVector:
    """Per position: (sum of client shares - m_share) mod p."""
    if not shares:
        raise ProtocolError("no share vectors to aggregate")
    n = len(shares[0])
    b = shares[0].server_index
    for sv in shares:
        if len(sv) != n:
            raise ProtocolError(f"share vector length {len(sv)} != {n}")
        if sv.server_index != b:
            raise ProtocolError(
                f"mixed server indices in aggregation: {sv.server_index} vs {b}"
            )
    if not 0 <= m_share < params.p:
        raise ParameterError(f"m share {m_share} out of range [0, {params.p})")
    elements = tuple(
        (sum(sv[i] for sv in shares) - m_share) % params.p for i in range(n)
    )
    return ShareVector(elements, server_index=b)


def derive_generator(strategy: EncoderStrategy, pos: int, params: GroupParams) -> int:
    if pos < 0:
        raise ParameterError(f"position must be non-negative, got {pos}")
    return strategy.generator_for(pos, params)


def encode(aggregated: ShareVector, strategy: EncoderStrategy, params: GroupParams) -> EncodedVector:
    """Per position i: generator_i ^ aggregated[i] mod q."""
    elements = tuple(
        mod_exp(derive_generator(strategy, i, params), v, params.q)
        for i, v in enumerate(aggregated.elements)
    )
    return EncodedVector(elements, server_index=aggregated.server_index)


@dataclass
class ServerResult:
    aggregated: ShareVector
    encoded: EncodedVector
    stage_timings: dict[str, float] = field(default_factory=dict)


def server_run(
    endpoint: Endpoint,
    config: ServerConfig,
    client_ids: Sequence[int],
    *,
    rnd_seed_source=None,
    timeout: float | None = None,
) -> ServerResult:
    """One full server actor run: receive m share vectors, aggregate, encode,
    broadcast.  For Kaleido-RND server 0 draws the seed and ships it to
    server 1 before encoding; server 1 blocks on that frame."""
    m = config.m
    if m < 1:
        raise ProtocolError("server run needs at least one client")
    b = config.server_index
    own_id = transport.SERVER_0 if b == 0 else transport.SERVER_1
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    inbox: dict[int, ShareVector] = {}
    while len(inbox) < m:
        frame = endpoint.receive(timeout)
        if frame.msg_type != transport.MSG_SHARE_VECTOR:
            raise ProtocolError(
                f"server {b}: unexpected frame type 0x{frame.msg_type:02x} from {frame.sender_id}"
            )
        if frame.sender_id in inbox:
            raise ProtocolError(f"server {b}: duplicate submission from client {frame.sender_id}")
        if frame.sender_id not in client_ids:
            raise ProtocolError(f"server {b}: submission from unknown client {frame.sender_id}")
        for v in frame.elements:
            if not 0 <= v < config.params.p:
                raise ProtocolError(
                    f"server {b}: share element {v} from client {frame.sender_id} "
                    f"out of range [0, {config.params.p})"
                )
        inbox[frame.sender_id] = ShareVector(frame.elements, server_index=b)
    timings["Receive"] = time.perf_counter() - t0

    # Kaleido-RND seed synchronization: the one whitelisted S0 -> S1 frame.
    rnd_seed = None
    if config.scheme is Scheme.KALEIDO_RND:
        if b == 0:
            rnd_seed = config.rnd_seed
            if rnd_seed is None:
                if rnd_seed_source is None:
                    raise ProtocolError("server 0 has no RND seed and no seed source")
                rnd_seed = rnd_seed_source.randbelow(1 << 64)
            endpoint.send(
                transport.SERVER_1,
                Frame(transport.MSG_RND_SEED, own_id, (rnd_seed,)),
            )
        else:
            frame = endpoint.receive(timeout)
            if frame.msg_type != transport.MSG_RND_SEED or frame.sender_id != transport.SERVER_0:
                raise ProtocolError("server 1: expected the RND seed frame from server 0")
            rnd_seed = frame.elements[0]

    t0 = time.perf_counter()
    ordered = [inbox[cid] for cid in sorted(inbox)]
    aggregated = aggregate(ordered, config.m_share, config.params)
    timings["Aggregate"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    strategy = strategy_for(config, rnd_seed)
    encoded = encode(aggregated, strategy, config.params)
    timings["Encode"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    out = Frame(transport.MSG_ENCODED_VECTOR, own_id, encoded.elements)
    for cid in client_ids:
        endpoint.send(cid, out)
    timings["Broadcast"] = time.perf_counter() - t0

    return ServerResult(aggregated=aggregated, encoded=encoded, stage_timings=timings)
