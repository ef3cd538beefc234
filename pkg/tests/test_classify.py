import json
import random
from fractions import Fraction

import pytest

from gasketlab.classify import (
    BIHOLDER_HOMEOMORPHIC,
    INCONCLUSIVE,
    LIPSCHITZ,
    biholder_audit,
    block_profile,
    classify_pair,
    equivalence_chain,
    final_automaton,
    holder_params,
    isometry_symbol_map,
    transport_audit,
)
from gasketlab.geometry import GasketSpec
from gasketlab.reports import ScopeError


class TestBlockProfile:
    def test_h6(self, h6):
        p = block_profile(h6)
        assert p.sizes == (4, 1, 1)
        assert p.ab_block_size == 4
        assert p.uniform_ratio == Fraction(1, 4)

    def test_g5(self, g5):
        p = block_profile(g5)
        assert p.sizes == (4, 1) and p.ab_block_size == 4

    def test_pair_1235(self, pair_1235):
        e, f = pair_1235
        assert block_profile(e).sizes == (5, 3, 2, 1)
        assert block_profile(f).sizes == (5, 3, 2, 1)
        assert block_profile(e).ab_block_size == block_profile(f).ab_block_size == 5
        assert block_profile(e).uniform_ratio == Fraction(1, 5)
        assert block_profile(f).uniform_ratio is None

    def test_absent_corner_out_of_scope(self, h6):
        with pytest.raises(ScopeError):
            block_profile(GasketSpec(h6.triangles[1:]))


class TestClassifyPair:
    def test_h6_vs_relocated_is_lipschitz(self, h6, h6_prime):
        assert classify_pair(h6, h6_prime).level == LIPSCHITZ

    def test_h6_vs_g5_inconclusive(self, h6, g5):
        verdict = classify_pair(h6, g5)
        assert verdict.level == INCONCLUSIVE
        assert verdict.witness is None

    def test_pair_1235_biholder(self, pair_1235):
        assert classify_pair(*pair_1235).level == BIHOLDER_HOMEOMORPHIC

    def test_sierpinski_out_of_scope(self, sier, g5):
        with pytest.raises(ScopeError):
            classify_pair(sier, g5)

    def test_symmetric_and_reflexive(self, h6, h6_prime, g5, pair_1235):
        pairs = [(h6, h6_prime), (h6, g5), pair_1235]
        for e, f in pairs:
            assert classify_pair(e, f).level == classify_pair(f, e).level
        for spec in (h6, g5, pair_1235[0]):
            level = classify_pair(spec, spec).level
            assert level in (LIPSCHITZ, BIHOLDER_HOMEOMORPHIC)

    def test_verdict_stable_under_relabeling(self, h6, h6_prime):
        rng = random.Random(8)
        order = list(range(6))
        rng.shuffle(order)
        relabeled = GasketSpec(tuple(h6_prime.triangles[i] for i in order))
        assert classify_pair(h6, relabeled).level == LIPSCHITZ


class TestIsometry:
    def test_h6_pair_is_identity(self, h6, h6_prime):
        assert isometry_symbol_map(h6, h6_prime) == {i: i for i in range(1, 7)}

    def test_relabeling_is_inverted_on_the_corner_block(self, h6):
        # renumber the maps of h6: symbol permutation sigma sends old i to
        # position sigma(i); on the corner block the isometry must undo it
        # (equal-size singleton blocks pair in deterministic sorted order,
        # which transports surviving times either way)
        perm = [3, 1, 4, 2, 6, 5]  # new index of old symbol 1..6
        triangles = [None] * 6
        for old, new in enumerate(perm, start=1):
            triangles[new - 1] = h6.triangles[old - 1]
        relabeled = GasketSpec(tuple(triangles))
        mapping = isometry_symbol_map(h6, relabeled)
        assert {s: mapping[s] for s in (1, 2, 3, 4)} == {1: 3, 2: 1, 3: 4, 4: 2}
        report = transport_audit(h6, relabeled, 3)
        assert report.ok and report.stats["structural_isomorphism"]

    def test_transport_exact_on_grid(self, h6, h6_prime):
        report = transport_audit(h6, h6_prime, 3)
        assert report.ok
        assert report.stats["structural_isomorphism"]
        assert report.stats["mismatches"] == 0

    def test_transport_pair_1235_single_tail(self, pair_1235):
        report = transport_audit(*pair_1235, depth=2, tail=1)
        assert report.ok


class TestHolder:
    def test_uniform_ratio_gives_exponent_one(self, h6):
        hp = holder_params(h6)
        assert hp.s == 1.0 and hp.xi == 0.25

    def test_sierpinski_values(self, sier):
        hp = holder_params(sier)
        assert (hp.s, hp.xi, hp.c) == (1.0, 0.5, 4.0)

    def test_mixed_ratios(self, pair_1235):
        import math

        hp = holder_params(pair_1235[1])
        assert hp.s == pytest.approx(math.sqrt(math.log(1 / 5) / math.log(1 / 10)))
        assert 0 < hp.s < 1
        assert hp.xi == pytest.approx((1 / 10) ** hp.s)


class TestBiholderAudit:
    def test_sierpinski_exhaustive(self, sier):
        report = biholder_audit(sier, 4)
        assert report.ok
        assert report.stats["mode"] == "exhaustive"
        assert report.stats["exact_coordinates"]
        assert report.stats["tightest_upper_constant"] <= 4.0
        assert report.stats["tightest_lower_constant"] <= 4.0

    def test_identification_matches_zero_distance(self, sier):
        report = biholder_audit(sier, 3)
        assert not any(v.kind == "identification" for v in report.violations)

    def test_sampled_mode(self, h6):
        report = biholder_audit(h6, 4, sample_count=500, pair_cap=1000)
        assert report.ok
        assert report.stats["mode"] == "sampled"

    def test_mixed_ratio_spec(self, pair_1235):
        report = biholder_audit(pair_1235[1], 2)
        assert report.ok


class TestEquivalenceChain:
    def test_h6_pair_certificate(self, h6, h6_prime):
        chain = equivalence_chain(h6, h6_prime, audit_depth=3, transport_depth=3)
        assert chain.ok
        assert chain.verdict.level == LIPSCHITZ
        assert len(chain.step_audits) == 4  # two steps on each side
        assert chain.composed_exponent == 20
        assert all(a["max_abs_diff"] <= 5 for a in chain.step_audits)

    def test_self_certificate_is_trivial_isometry(self, h6):
        chain = equivalence_chain(h6, h6, audit_depth=2, transport_depth=2)
        assert chain.ok
        assert chain.isometry == [[i, i] for i in range(1, 7)]

    def test_gamma_absent_variant_has_zero_steps(self, g5, g5_prime):
        chain = equivalence_chain(g5, g5_prime, audit_depth=2, transport_depth=2)
        assert chain.ok
        assert chain.composed_exponent == 0
        assert chain.step_audits == []

    def test_inconclusive_pair_has_no_certificate(self, h6, g5):
        with pytest.raises(ScopeError):
            equivalence_chain(h6, g5)

    def test_certificate_is_reproducible(self, h6, h6_prime):
        a = equivalence_chain(h6, h6_prime, audit_depth=2, transport_depth=2)
        b = equivalence_chain(h6, h6_prime, audit_depth=2, transport_depth=2)
        assert json.dumps(a.to_json(), sort_keys=True) == json.dumps(b.to_json(), sort_keys=True)

    def test_final_automata_have_no_vertical_edges(self, h6, pair_1235):
        for spec in (h6, *pair_1235):
            star, _ = final_automaton(spec)
            assert star.p_ag == star.p_bg == frozenset()
