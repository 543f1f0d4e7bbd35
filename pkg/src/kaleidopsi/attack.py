"""Adversarial analyses against the PSI encodings.

Three tools:
  - equality clustering of combined ciphertexts (the deterministic-encoding
    leak in the baseline scheme),
  - per-client inference of popularity facts from those equalities,
  - a two-round chosen-plaintext distinguishing game run as a repeatable
    statistical experiment.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Sequence

from .domain import DomainCatalog, Relation, holder_counts
from .errors import ParameterError
from .groups import GroupParams
from .oracle import RunConfig, Scheme, make_run_config
from .rng import RandomSource
from .runner import simulate_protocol
from .server import EncodedVector


def cluster_equal_ciphertexts(combined: EncodedVector) -> list[frozenset[int]]:
    """Group non-1 positions by exact ciphertext equality; singletons dropped."""
    groups: dict[int, list[int]] = defaultdict(list)
    for i, v in enumerate(combined.elements):
        if v != 1:
            groups[v].append(i)
    return sorted(
        (frozenset(g) for g in groups.values() if len(g) > 1),
        key=lambda g: min(g),
    )


class InferenceCase(enum.Enum):
    EQUAL = "equal-popularity"
    PLUS_ONE = "one-more-holder-of-i"
    MINUS_ONE = "one-more-holder-of-j"


@dataclass(frozen=True)
class Inference:
    client: int
    positions: tuple[int, int]
    case: InferenceCase
    statement: str


def infer_beyond_psi(
    client_vector: Sequence[int],
    combined: EncodedVector,
    client_id: int = 0,
) -> list[Inference]:
    """Facts a single client can state about equal-ciphertext position pairs.

    The facts are literally true under a fixed-generator encoding; under the
    randomized encodings they are spurious with overwhelming probability.
    """
    if len(client_vector) != len(combined):
        raise ParameterError(
            f"vector length mismatch: {len(client_vector)} != {len(combined)}"
        )
    inferences = []
    for group in cluster_equal_ciphertexts(combined):
        members = sorted(group)
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                i, j = members[a], members[b]
                vi, vj = client_vector[i], client_vector[j]
                if vi == vj:
                    case = InferenceCase.EQUAL
                    statement = (
                        f"positions {i} and {j} are equally popular across all owners"
                    )
                elif vi < vj:
                    case = InferenceCase.PLUS_ONE
                    statement = (
                        f"exactly one additional client holds position {i} rather than {j}"
                    )
                else:
                    case = InferenceCase.MINUS_ONE
                    statement = (
                        f"exactly one additional client holds position {j} rather than {i}"
                    )
                inferences.append(Inference(client_id, (i, j), case, statement))
    return inferences


def inference_holds(
    inf: Inference, client_vector: Sequence[int], counts: Sequence[int]
) -> bool:
    """Check one inference against ground-truth holder counts."""
    i, j = inf.positions
    others_i = counts[i] - client_vector[i]
    others_j = counts[j] - client_vector[j]
    if inf.case is InferenceCase.EQUAL:
        return counts[i] == counts[j]
    if inf.case is InferenceCase.PLUS_ONE:
        return others_i == others_j + 1
    return others_j == others_i + 1


@dataclass
class LeakageReport:
    equal_groups: list[frozenset[int]]
    inferences: list[Inference]
    # Test-harness only: whether the equality groups coincide with the
    # ground-truth equal-holder-count classes on non-intersection positions.
    card_correlation: bool | None = None


def clusters_match_holder_counts(
    combined: EncodedVector,
    relations: Sequence[Relation],
    catalog: DomainCatalog,
) -> bool:
    """True iff equality groups equal the non-singleton classes of positions
    with the same holder count, restricted to counts below m."""
    m = len(relations)
    counts = holder_counts(relations, catalog)
    by_count: dict[int, list[int]] = defaultdict(list)
    for i, c in enumerate(counts):
        if c < m:
            by_count[c].append(i)
    expected = sorted(
        (frozenset(g) for g in by_count.values() if len(g) > 1),
        key=lambda g: min(g),
    )
    return cluster_equal_ciphertexts(combined) == expected


def build_leakage_report(
    combined: EncodedVector,
    client_vectors: Sequence[Sequence[int]],
    relations: Sequence[Relation] | None = None,
    catalog: DomainCatalog | None = None,
) -> LeakageReport:
    groups = cluster_equal_ciphertexts(combined)
    inferences = []
    for k, vec in enumerate(client_vectors):
        inferences.extend(infer_beyond_psi(vec, combined, client_id=k))
    correlation = None
    if relations is not None and catalog is not None:
        correlation = clusters_match_holder_counts(combined, relations, catalog)
    return LeakageReport(equal_groups=groups, inferences=inferences,
                         card_correlation=correlation)


@dataclass
class CpaGameOutcome:
    trials: int
    successes: int
    scheme: Scheme

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials


_BASE_VALUES = ("a0", "a1", "a2")
_PLANT_ROUND1 = "x0"
_PLANT_A = "x1"
_PLANT_B = "x2"


def _fresh_trial_config(
    scheme: Scheme, params: GroupParams, m: int, n: int, randomness: RandomSource
) -> RunConfig:
    return make_run_config(scheme, params, m, n, randomness)


def _relations_with_plants(m: int, base_bits: list[tuple[int, ...]],
                           plants: dict[str, set[int]]) -> list[Relation]:
    relations = []
    for k in range(m):
        items = [v for v, bits in zip(_BASE_VALUES, base_bits) if bits[k]]
        items += [value for value, holders in plants.items() if k in holders]
        relations.append(Relation.from_items(k, items))
    return relations


def run_cpa_game(
    scheme: Scheme,
    params: GroupParams,
    m: int,
    trials: int,
    randomness: RandomSource,
) -> CpaGameOutcome:
    """Two-round distinguishing experiment against a live scheme instance.

    Round 1 plants a probe value held by all clients but the first and records
    its combined ciphertext.  Round 2 plants two fresh values, one held by all
    but the first client and one held by all but the first two; a hidden bit b
    decides which of the two carries which holder pattern.  The adversary
    matches the round-1 ciphertext against the two round-2 ciphertexts and
    answers at random when neither matches.  Fresh key material per trial.
    """
    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials}")
    if m < 3:
        raise ParameterError(f"the distinguishing strategy needs m >= 3, got {m}")

    all_but_first = set(range(1, m))
    all_but_two = set(range(2, m))
    successes = 0

    for _ in range(trials):
        base_bits = [
            tuple(randomness.randbelow(2) for _ in range(m)) for _ in _BASE_VALUES
        ]
        b = randomness.randbelow(2)

        # One scheme instance (one key / seed / generator) serves both rounds,
        # exactly like an adversary querying a running system twice.
        n1 = len(_BASE_VALUES) + 1
        config1 = _fresh_trial_config(scheme, params, m, n1, randomness)

        catalog1 = DomainCatalog.from_values(_BASE_VALUES + (_PLANT_ROUND1,))
        rel1 = _relations_with_plants(m, base_bits, {_PLANT_ROUND1: all_but_first})
        trace1 = simulate_protocol(rel1, catalog1, config1, [randomness] * m)
        u_probe = trace1.combined[catalog1.position(_PLANT_ROUND1)]

        catalog2 = DomainCatalog.from_values(
            _BASE_VALUES + (_PLANT_ROUND1, _PLANT_A, _PLANT_B)
        )
        plants = {
            _PLANT_ROUND1: all_but_first,
            _PLANT_A: all_but_first if b == 0 else all_but_two,
            _PLANT_B: all_but_two if b == 0 else all_but_first,
        }
        config2 = RunConfig(
            params=config1.params,
            scheme=scheme,
            m=m,
            n=catalog2.n,
            m_shares=config1.m_shares,
            protocol_iv=config1.protocol_iv,
            prf_key=config1.prf_key,
            fixed_generator=config1.fixed_generator,
            rnd_seed=config1.rnd_seed,
        )
        rel2 = _relations_with_plants(m, base_bits, plants)
        trace2 = simulate_protocol(rel2, catalog2, config2, [randomness] * m)
        u_a = trace2.combined[catalog2.position(_PLANT_A)]
        u_b = trace2.combined[catalog2.position(_PLANT_B)]

        if u_probe == u_a:
            guess = 0
        elif u_probe == u_b:
            guess = 1
        else:
            guess = randomness.randbelow(2)
        if guess == b:
            successes += 1

    return CpaGameOutcome(trials=trials, successes=successes, scheme=scheme)
