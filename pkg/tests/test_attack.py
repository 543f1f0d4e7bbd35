import math
import random

import pytest

from kaleidopsi.attack import (
    InferenceCase,
    build_leakage_report,
    cluster_equal_ciphertexts,
    clusters_match_holder_counts,
    infer_beyond_psi,
    inference_holds,
    run_cpa_game,
)
from kaleidopsi.domain import DomainCatalog, Relation, holder_counts
from kaleidopsi.errors import ParameterError
from kaleidopsi.oracle import Scheme, make_run_config
from kaleidopsi.rng import SeededRandomSource, SequenceRandomSource
from kaleidopsi.runner import simulate_protocol
from kaleidopsi.server import EncodedVector

WORKED_COMBINED = EncodedVector((9, 4, 9, 1, 4))
CASE_STUDY_COMBINED = EncodedVector((4, 4, 5, 1, 9))


def worked_example_trace(params_small, example_catalog, example_relations, forced_client_rngs):
    cfg = make_run_config(
        Scheme.PRISM, params_small, 4, 5, SequenceRandomSource([1]), fixed_generator=3
    )
    return simulate_protocol(example_relations, example_catalog, cfg, forced_client_rngs)


class TestClustering:
    def test_worked_example_groups(self):
        assert cluster_equal_ciphertexts(WORKED_COMBINED) == [
            frozenset({0, 2}),
            frozenset({1, 4}),
        ]

    def test_intersection_positions_excluded(self):
        # Position 3 carries the identity element and never joins a group.
        for group in cluster_equal_ciphertexts(WORKED_COMBINED):
            assert 3 not in group

    def test_case_study_spurious_group(self):
        # Per-position generators collapse the count structure: positions 0
        # and 1 collide even though their holder counts differ (1 vs 3).
        assert cluster_equal_ciphertexts(CASE_STUDY_COMBINED) == [frozenset({0, 1})]

    def test_all_distinct_yields_no_groups(self):
        assert cluster_equal_ciphertexts(EncodedVector((2, 3, 4, 5))) == []


class TestInference:
    def test_worked_example_client_0(self):
        # Client 0 holds positions 0, 1, 3.
        infs = infer_beyond_psi((1, 1, 0, 1, 0), WORKED_COMBINED, client_id=0)
        by_pair = {inf.positions: inf for inf in infs}
        assert set(by_pair) == {(0, 2), (1, 4)}
        assert by_pair[(0, 2)].case is InferenceCase.MINUS_ONE
        assert by_pair[(1, 4)].case is InferenceCase.MINUS_ONE

    def test_worked_example_client_2(self):
        # Client 2 holds positions 3 and 4.
        infs = infer_beyond_psi((0, 0, 0, 1, 1), WORKED_COMBINED, client_id=2)
        by_pair = {inf.positions: inf for inf in infs}
        assert by_pair[(0, 2)].case is InferenceCase.EQUAL
        assert by_pair[(1, 4)].case is InferenceCase.PLUS_ONE

    def test_length_mismatch(self):
        with pytest.raises(ParameterError):
            infer_beyond_psi((1, 0), WORKED_COMBINED)

    def test_worked_example_inferences_hold(self, example_catalog, example_relations):
        counts = holder_counts(example_relations, example_catalog)
        vectors = [
            (1, 1, 0, 1, 0),
            (0, 1, 0, 1, 1),
            (0, 0, 0, 1, 1),
            (0, 1, 1, 1, 1),
        ]
        for k, vec in enumerate(vectors):
            for inf in infer_beyond_psi(vec, WORKED_COMBINED, client_id=k):
                assert inference_holds(inf, vec, counts)


class TestFixedGeneratorLeak:
    def test_worked_example_clusters_match_counts(
        self, params_small, example_catalog, example_relations, forced_client_rngs
    ):
        trace = worked_example_trace(
            params_small, example_catalog, example_relations, forced_client_rngs
        )
        assert trace.combined.elements == WORKED_COMBINED.elements
        assert clusters_match_holder_counts(trace.combined, example_relations, example_catalog)

    def test_random_prism_instances_leak_count_classes(self, params_eval):
        rng = random.Random(77)
        for trial in range(40):
            m = rng.randrange(2, 7)
            n = rng.randrange(4, 25)
            catalog = DomainCatalog.from_values(range(n))
            relations = [
                Relation.from_items(k, rng.sample(list(catalog.values), rng.randrange(0, n + 1)))
                for k in range(m)
            ]
            cfg = make_run_config(Scheme.PRISM, params_eval, m, n, SeededRandomSource(trial))
            trace = simulate_protocol(
                relations, catalog, cfg,
                [SeededRandomSource(5000 + 10 * trial + k) for k in range(m)],
            )
            assert clusters_match_holder_counts(trace.combined, relations, catalog)
            counts = holder_counts(relations, catalog)
            for k, vec in enumerate(trace.plain_vectors):
                for inf in infer_beyond_psi(vec, trace.combined, client_id=k):
                    assert inference_holds(inf, vec, counts)

    def test_leakage_report_worked_example(
        self, params_small, example_catalog, example_relations, forced_client_rngs
    ):
        trace = worked_example_trace(
            params_small, example_catalog, example_relations, forced_client_rngs
        )
        report = build_leakage_report(
            trace.combined, trace.plain_vectors, example_relations, example_catalog
        )
        assert report.equal_groups == [frozenset({0, 2}), frozenset({1, 4})]
        assert report.card_correlation is True
        assert len(report.inferences) == 8  # 2 pairs x 4 clients


class TestRandomizedEncodings:
    @pytest.mark.parametrize("scheme", [Scheme.KALEIDO_RND, Scheme.KALEIDO_AES])
    def test_count_structure_not_preserved(self, scheme, params_eval, example_catalog,
                                           example_relations):
        # The worked-example relations have two equal-count pairs; across many
        # randomized-encoding instances those pairs must not keep colliding.
        matches = 0
        runs = 30
        for trial in range(runs):
            cfg = make_run_config(scheme, params_eval, 4, 5, SeededRandomSource(trial))
            trace = simulate_protocol(
                example_relations, example_catalog, cfg,
                [SeededRandomSource(900 + 10 * trial + k) for k in range(4)],
            )
            if clusters_match_holder_counts(trace.combined, example_relations, example_catalog):
                matches += 1
        # Each of the two expected pairs survives with probability ~1/112;
        # 30 runs all matching would be astronomically unlikely.
        assert matches < runs // 2

    def test_aes_collision_rate_matches_birthday_bound(self, params_eval):
        # Under independent per-position generators, two non-intersection
        # positions collide at birthday scale.  The exact per-pair collision
        # probability is induced by the seed-to-generator scan (a uniform seed
        # in [2, q-2] advanced until an order-p element), which is not quite
        # uniform over the 112 order-p generators, so compute the expectation
        # from that distribution directly and compare within ~3.5 sigma.
        from collections import Counter

        from kaleidopsi.groups import next_order_p_generator

        p, q = params_eval.p, params_eval.q
        seed_count = q - 3  # seeds 2 .. q-2
        gen_counts = Counter(
            next_order_p_generator(s, params_eval) for s in range(2, q - 1)
        )
        dist = {g: c / seed_count for g, c in gen_counts.items()}

        pair_prob_cache: dict[tuple[int, int], float] = {}

        def pair_prob(e1: int, e2: int) -> float:
            key = (e1, e2) if e1 <= e2 else (e2, e1)
            if key not in pair_prob_cache:
                by_ct: dict[int, float] = {}
                for g, pg in dist.items():
                    ct = pow(g, key[0], q)
                    by_ct[ct] = by_ct.get(ct, 0.0) + pg
                total = 0.0
                for g, pg in dist.items():
                    total += pg * by_ct.get(pow(g, key[1], q), 0.0)
                pair_prob_cache[key] = total
            return pair_prob_cache[key]

        n = 48
        m = 4
        runs = 200
        catalog = DomainCatalog.from_values(range(n))
        rng = random.Random(2718)
        observed = 0
        expected = 0.0
        for trial in range(runs):
            relations = [
                Relation.from_items(k, rng.sample(list(catalog.values), n // 2))
                for k in range(m)
            ]
            cfg = make_run_config(Scheme.KALEIDO_AES, params_eval, m, n,
                                  SeededRandomSource(trial))
            trace = simulate_protocol(
                relations, catalog, cfg,
                [SeededRandomSource(7000 + 10 * trial + k) for k in range(m)],
            )
            counts = holder_counts(relations, catalog)
            exponents = [e for e in ((c - m) % p for c in counts) if e != 0]
            for i in range(len(exponents)):
                for j in range(i + 1, len(exponents)):
                    expected += pair_prob(exponents[i], exponents[j])
            observed += sum(
                len(group) * (len(group) - 1) // 2
                for group in cluster_equal_ciphertexts(trace.combined)
            )
        assert abs(observed - expected) <= 3.5 * math.sqrt(expected)


class TestCpaGame:
    def test_trials_must_be_positive(self, params_eval):
        with pytest.raises(ParameterError):
            run_cpa_game(Scheme.PRISM, params_eval, 4, 0, SeededRandomSource(0))

    def test_needs_three_clients(self, params_eval):
        with pytest.raises(ParameterError):
            run_cpa_game(Scheme.PRISM, params_eval, 2, 10, SeededRandomSource(0))

    def test_prism_adversary_always_wins(self, params_eval):
        outcome = run_cpa_game(Scheme.PRISM, params_eval, 4, 25, SeededRandomSource(1))
        assert outcome.success_rate == 1.0

    @pytest.mark.parametrize("scheme,seed", [(Scheme.KALEIDO_AES, 2), (Scheme.KALEIDO_RND, 3)])
    def test_randomized_schemes_near_coin_flip(self, scheme, seed, params_eval):
        outcome = run_cpa_game(scheme, params_eval, 4, 200, SeededRandomSource(seed))
        assert 0.35 <= outcome.success_rate <= 0.65
