"""Multi-owner private set intersection over additively secret-shared boolean
vectors, with two non-colluding servers and three server-side encodings
(fixed-generator baseline, seeded-random generators, PRF-derived generators).
"""

from .groups import GroupParams, mod_exp, element_order, next_order_p_generator, validate_params
from .sharing import ShareVector, split_scalar, split_vector, reconstruct
from .domain import DomainCatalog, Relation, vectorize, card_k, true_intersection
from .oracle import RunConfig, Scheme, make_run_config, split_client_count
from .server import EncodedVector, aggregate, derive_generator, encode
from .client import ClientResult, combine, extract_psi
from .rng import RandomSource, SecureRandomSource, SeededRandomSource
from .runner import RunOutcome, execute_run, make_backend, simulate_protocol

__all__ = [
    "GroupParams",
    "mod_exp",
    "element_order",
    "next_order_p_generator",
    "validate_params",
    "ShareVector",
    "split_scalar",
    "split_vector",
    "reconstruct",
    "DomainCatalog",
    "Relation",
    "vectorize",
    "card_k",
    "true_intersection",
    "RunConfig",
    "Scheme",
    "make_run_config",
    "split_client_count",
    "EncodedVector",
    "aggregate",
    "derive_generator",
    "encode",
    "ClientResult",
    "combine",
    "extract_psi",
    "RandomSource",
    "SecureRandomSource",
    "SeededRandomSource",
    "RunOutcome",
    "execute_run",
    "make_backend",
    "simulate_protocol",
]
