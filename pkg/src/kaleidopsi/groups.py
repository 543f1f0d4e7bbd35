"""Modular arithmetic over the pair of cyclic groups (Z_p, +) and (Z_q^*, x).

The additive group holds secret shares; the multiplicative group holds the
exponentiated encodings.  A generator of order p exists in Z_q^* exactly when
p divides q - 1, which is enforced by validate_params.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import GroupParameterError, ParameterError

_TRIAL_DIVISION_BOUND = 1 << 20
_MILLER_RABIN_ROUNDS = 64


@dataclass(frozen=True)
class GroupParams:
    """Orders of the two groups: p for (Z_p, +), q for (Z_q^*, x)."""

    p: int
    q: int


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    failure: str | None = None


def mod_exp(base: int, exponent: int, modulus: int) -> int:
    """base^exponent mod modulus by square-and-multiply."""
    if modulus < 2:
        raise ParameterError(f"modulus must be >= 2, got {modulus}")
    if exponent < 0:
        raise ParameterError(f"exponent must be >= 0, got {exponent}")
    if not 0 <= base < modulus:
        raise ParameterError(f"base {base} out of range [0, {modulus})")
    return pow(base, exponent, modulus)


def element_order(g: int, params: GroupParams) -> int:
    """Smallest k >= 1 with g^k = 1 (mod q).

    Orders divide q - 1 (q prime), so only divisors of q - 1 are tested
    rather than enumerating all powers.
    """
    q = params.q
    if g % q == 0:
        raise ParameterError("0 has no multiplicative order")
    g %= q
    for d in sorted(_divisors(q - 1)):
        if pow(g, d, q) == 1:
            return d
    raise GroupParameterError(f"no order found for {g} mod {q}; q is not prime")


def _divisors(n: int) -> list[int]:
    divs = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            divs.append(d)
            if d != n // d:
                divs.append(n // d)
        d += 1
    return divs


def _advance(g: int, q: int) -> int:
    # Candidate scan rule: g <- ((g+1) mod (q-2)) + 2, wrapping q-1 back to 4.
    return ((g + 1) % (q - 2)) + 2


def next_order_p_generator(start: int, params: GroupParams) -> int:
    """First candidate from `start` (inclusive) whose order in Z_q^* equals p.

    Candidates advance by ((g+1) mod (q-2)) + 2, staying in [2, q-1].
    """
    q = params.q
    if not 2 <= start <= q - 1:
        raise ParameterError(f"start {start} out of range [2, {q - 1}]")
    g = start
    for _ in range(q - 2):
        if element_order(g, params) == params.p:
            return g
        g = _advance(g, q)
    raise GroupParameterError(
        f"no element of order {params.p} in Z_{q}^*; check that p divides q-1"
    )


def is_prime(n: int) -> bool:
    """Deterministic trial division below 2^20, Miller-Rabin above."""
    if n < 2:
        return False
    for small in (2, 3, 5, 7, 11, 13):
        if n == small:
            return True
        if n % small == 0:
            return False
    if n < _TRIAL_DIVISION_BOUND:
        d = 17
        while d * d <= n:
            if n % d == 0:
                return False
            d += 2
        return True
    return _miller_rabin(n, _MILLER_RABIN_ROUNDS)


def _miller_rabin(n: int, rounds: int) -> bool:
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    rng = random.Random(0xC0FFEE ^ n)
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = pow(x, 2, n)
            if x == n - 1:
                break
        else:
            return False
    return True


def validate_params(params: GroupParams) -> ValidationReport:
    """Check primality of p and q, the bounds p >= 2 / q >= 3, and p | q-1."""
    p, q = params.p, params.q
    if p < 2:
        return ValidationReport(False, f"p must be >= 2, got {p}")
    if q < 3:
        return ValidationReport(False, f"q must be >= 3, got {q}")
    if not is_prime(p):
        return ValidationReport(False, f"p = {p} is not prime")
    if not is_prime(q):
        return ValidationReport(False, f"q = {q} is not prime")
    if (q - 1) % p != 0:
        return ValidationReport(False, f"p = {p} does not divide q - 1 = {q - 1}")
    return ValidationReport(True)
