"""Keyed pseudorandom function used to derive per-position generators.

The production instantiation is AES-128 in CBC mode with PKCS7 padding over
the 16-byte big-endian block of (pos XOR protocol_iv).  The CBC chaining IV
is all-zero so both servers compute bit-identical outputs from the shared
key alone; the protocol IV enters only through the XOR with the position.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence

from cryptography.hazmat.primitives import padding
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

from .errors import ParameterError

_BLOCK_BITS = 128
_ZERO_CBC_IV = bytes(16)


@dataclass(frozen=True)
class PrfKey:
    """16-byte secret key shared by both servers."""

    bytes: bytes

    def __post_init__(self):
        if len(self.bytes) != 16:
            raise ParameterError(f"PRF key must be 16 bytes, got {len(self.bytes)}")

    @classmethod
    def from_hex(cls, hexstr: str) -> "PrfKey":
        try:
            raw = bytes.fromhex(hexstr)
        except ValueError as exc:
            raise ParameterError(f"invalid hex key: {hexstr!r}") from exc
        return cls(raw)


@dataclass(frozen=True)
class ProtocolIv:
    """Run-level IV distributed by the oracle; XORed with the position index."""

    value: int

    def __post_init__(self):
        if not 0 <= self.value < (1 << _BLOCK_BITS):
            raise ParameterError("protocol IV must fit in 128 bits")


class Prf(Protocol):
    def __call__(self, pos: int) -> int: ...


def prf_eval(key: PrfKey, iv: ProtocolIv, pos: int) -> int:
    """AES-128-CBC(zero IV, PKCS7) over the block of pos XOR iv, as one integer.

    The padded input is two blocks (32 bytes); the full 32-byte ciphertext is
    interpreted big-endian.
    """
    if not 0 <= pos < (1 << _BLOCK_BITS):
        raise ParameterError(f"position {pos} does not fit in 128 bits")
    block = (pos ^ iv.value).to_bytes(16, "big")
    padder = padding.PKCS7(_BLOCK_BITS).padder()
    data = padder.update(block) + padder.finalize()
    enc = Cipher(algorithms.AES(key.bytes), modes.CBC(_ZERO_CBC_IV)).encryptor()
    ct = enc.update(data) + enc.finalize()
    return int.from_bytes(ct, "big")


class AesPrf:
    """prf_eval bound to a fixed (key, iv)."""

    def __init__(self, key: PrfKey, iv: ProtocolIv):
        self.key = key
        self.iv = iv

    def __call__(self, pos: int) -> int:
        return prf_eval(self.key, self.iv, pos)


class StubPrf:
    """Test double: returns a fixed sequence of values, cycling by position."""

    def __init__(self, values: Sequence[int]):
        vals = list(values)
        if not vals:
            raise ParameterError("stub PRF needs a non-empty value sequence")
        for v in vals:
            if v < 0:
                raise ParameterError(f"stub PRF values must be non-negative, got {v}")
        self._values = vals

    def __call__(self, pos: int) -> int:
        if pos < 0:
            raise ParameterError(f"position must be non-negative, got {pos}")
        return self._values[pos % len(self._values)]
