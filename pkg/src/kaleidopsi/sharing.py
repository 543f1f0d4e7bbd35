"""Additive secret sharing over Z_p: split a value into two shares that sum
back to it mod p.  A single share is uniform on [0, p) and reveals nothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import ParameterError
from .groups import GroupParams
from .rng import RandomSource


@dataclass(frozen=True)
class ShareVector:
    """One server's share vector: elements in [0, p), tagged with the server index."""

    elements: tuple[int, ...]
    server_index: int

    def __len__(self) -> int:
        return len(self.elements)

    def __getitem__(self, i: int) -> int:
        return self.elements[i]


def split_scalar(v: int, params: GroupParams, randomness: RandomSource) -> tuple[int, int]:
    """Split v into (share0, share1) with share0 uniform and share0+share1 = v mod p."""
    p = params.p
    if not 0 <= v < p:
        raise ParameterError(f"value {v} out of range [0, {p})")
    share0 = randomness.randbelow(p)
    share1 = (v - share0) % p
    return share0, share1


def split_vector(
    v: Sequence[int], params: GroupParams, randomness: RandomSource
) -> tuple[ShareVector, ShareVector]:
    """Element-wise split of a boolean vector into two ShareVectors."""
    for x in v:
        if x not in (0, 1):
            raise ParameterError(f"vector element {x} is not boolean")
    pairs = [split_scalar(x, params, randomness) for x in v]
    return (
        ShareVector(tuple(s0 for s0, _ in pairs), server_index=0),
        ShareVector(tuple(s1 for _, s1 in pairs), server_index=1),
    )


def reconstruct(share0: int, share1: int, params: GroupParams) -> int:
    """(share0 + share1) mod p."""
    p = params.p
    for s in (share0, share1):
        if not 0 <= s < p:
            raise ParameterError(f"share {s} out of range [0, {p})")
    return (share0 + share1) % p
