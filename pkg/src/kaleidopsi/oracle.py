"""The initiator ("oracle"): validates group parameters, splits the client
count m into additive shares, and produces per-party configuration.

The oracle acts once per run and then goes inert.  Server-only secrets
(fixed generator, PRF key, RND seed) never appear in the client projection.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import DataError, GroupParameterError, ParameterError
from .groups import GroupParams, element_order, next_order_p_generator, validate_params
from .prf import PrfKey, ProtocolIv
from .rng import RandomSource

DEFAULT_PROTOCOL_IV = 1234


class Scheme(enum.Enum):
    PRISM = "prism"
    KALEIDO_RND = "kaleido-rnd"
    KALEIDO_AES = "kaleido-aes"

    @classmethod
    def parse(cls, name: str) -> "Scheme":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ParameterError(
                f"unknown scheme {name!r}; expected one of "
                f"{', '.join(s.value for s in cls)}"
            ) from None


@dataclass(frozen=True)
class RunConfig:
    """Complete configuration for one PSI run, held by the oracle."""

    params: GroupParams
    scheme: Scheme
    m: int
    n: int
    m_shares: tuple[int, int]
    protocol_iv: ProtocolIv
    prf_key: PrfKey | None = None  # Kaleido-AES only
    fixed_generator: int | None = None  # Prism only
    rnd_seed: int | None = None  # Kaleido-RND only


@dataclass(frozen=True)
class ServerConfig:
    """Server-side projection of a RunConfig (one per server)."""

    params: GroupParams
    scheme: Scheme
    m: int
    n: int
    server_index: int
    m_share: int
    protocol_iv: ProtocolIv
    prf_key: PrfKey | None = None
    fixed_generator: int | None = None
    rnd_seed: int | None = None  # present only on server 0 for Kaleido-RND


@dataclass(frozen=True)
class ClientConfig:
    """Client-side projection: structurally free of any server secret."""

    params: GroupParams
    scheme: Scheme
    n: int


def split_client_count(m: int, params: GroupParams, randomness: RandomSource) -> tuple[int, int]:
    """Split m into (m0, m1) with m0 uniform on [0, p) and m0+m1 = m mod p."""
    if m < 1:
        raise ParameterError(f"client count must be >= 1, got {m}")
    m0 = randomness.randbelow(params.p)
    m1 = (m - m0) % params.p
    return m0, m1


def make_run_config(
    scheme: Scheme,
    params: GroupParams,
    m: int,
    n: int,
    randomness: RandomSource,
    *,
    protocol_iv: int = DEFAULT_PROTOCOL_IV,
    prf_key: PrfKey | None = None,
    fixed_generator: int | None = None,
    rnd_seed: int | None = None,
) -> RunConfig:
    """Build a complete, internally consistent RunConfig.

    Rejects m >= p: an aggregate held by exactly m - p clients would also map
    to exponent 0 and be misreported as an intersection member.
    """
    report = validate_params(params)
    if not report.ok:
        raise GroupParameterError(report.failure)
    if m < 1:
        raise ParameterError(f"client count must be >= 1, got {m}")
    if m >= params.p:
        raise ParameterError(
            f"client count m = {m} must be below p = {params.p}: positions held by "
            f"exactly m - p clients would alias to the intersection exponent 0"
        )
    if n < 1:
        raise ParameterError(f"domain cardinality must be >= 1, got {n}")

    m_shares = split_client_count(m, params, randomness)
    iv = ProtocolIv(protocol_iv)

    if scheme is Scheme.PRISM:
        if fixed_generator is None:
            start = 2 + randomness.randbelow(params.q - 2)
            fixed_generator = next_order_p_generator(start, params)
        elif element_order(fixed_generator, params) != params.p:
            raise ParameterError(
                f"fixed generator {fixed_generator} does not have order {params.p} "
                f"in Z_{params.q}^*"
            )
        return RunConfig(params, scheme, m, n, m_shares, iv, fixed_generator=fixed_generator)

    if scheme is Scheme.KALEIDO_AES:
        if prf_key is None:
            prf_key = PrfKey(randomness.randbelow(1 << 128).to_bytes(16, "big"))
        return RunConfig(params, scheme, m, n, m_shares, iv, prf_key=prf_key)

    if rnd_seed is None:
        rnd_seed = randomness.randbelow(1 << 64)
    return RunConfig(params, scheme, m, n, m_shares, iv, rnd_seed=rnd_seed)


def server_projection(config: RunConfig, server_index: int) -> ServerConfig:
    if server_index not in (0, 1):
        raise ParameterError(f"server index must be 0 or 1, got {server_index}")
    return ServerConfig(
        params=config.params,
        scheme=config.scheme,
        m=config.m,
        n=config.n,
        server_index=server_index,
        m_share=config.m_shares[server_index],
        protocol_iv=config.protocol_iv,
        prf_key=config.prf_key,
        fixed_generator=config.fixed_generator,
        # Server 0 originates the RND seed and ships it to server 1 in-band.
        rnd_seed=config.rnd_seed if server_index == 0 else None,
    )


def client_projection(config: RunConfig) -> ClientConfig:
    return ClientConfig(params=config.params, scheme=config.scheme, n=config.n)


_CONFIG_KEYS = {"p", "q", "scheme", "m", "prf_key_hex", "protocol_iv", "prism_generator", "rnd_seed"}


def parse_config_file(path: str) -> dict[str, str]:
    """Read a `key = value` config file; '#' starts a comment line."""
    values: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise DataError(f"{path}: line {lineno}: expected 'key = value'")
                key, _, value = line.partition("=")
                key = key.strip()
                if key not in _CONFIG_KEYS:
                    raise DataError(f"{path}: line {lineno}: unknown key {key!r}")
                values[key] = value.strip()
    except OSError as exc:
        raise DataError(f"cannot read config file {path}: {exc}") from exc
    return values


def config_from_file(path: str, m: int, n: int, randomness: RandomSource) -> RunConfig:
    """Build a RunConfig from a config file plus the run's m and n."""
    raw = parse_config_file(path)
    try:
        params = GroupParams(p=int(raw["p"]), q=int(raw["q"]))
        scheme = Scheme.parse(raw.get("scheme", "prism"))
    except KeyError as exc:
        raise DataError(f"{path}: missing required key {exc.args[0]!r}") from exc
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from exc
    kwargs = {}
    if "protocol_iv" in raw:
        kwargs["protocol_iv"] = int(raw["protocol_iv"])
    if "prf_key_hex" in raw:
        kwargs["prf_key"] = PrfKey.from_hex(raw["prf_key_hex"])
    if "prism_generator" in raw:
        kwargs["fixed_generator"] = int(raw["prism_generator"])
    if "rnd_seed" in raw:
        kwargs["rnd_seed"] = int(raw["rnd_seed"])
    return make_run_config(scheme, params, m, n, randomness, **kwargs)
