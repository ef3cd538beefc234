import random

import pytest
from hypothesis import given, settings, strategies as st

from gasketlab.geometry import topology_automaton
from gasketlab.simplify import one_step
from gasketlab.transducer import (
    DecompParams,
    Segment,
    SegmentKind,
    derived_transducer,
    distortion_audit,
    m_decompose,
    map_backward,
    map_forward,
    mp_decompose,
    run_transducer,
    segment_map,
    segment_unmap,
)
from gasketlab.words import canonicalize, common_prefix_len, parse_seq

from genutils import random_gasket_automaton

P = DecompParams(n=4, tau=1, kappa=2, alpha=3, gamma=4)


def kinds_and_words(dec):
    return [(s.kind, s.word) for s in dec.segments]


class TestParams:
    def test_distinctness_enforced(self):
        with pytest.raises(ValueError):
            DecompParams(n=4, tau=1, kappa=1, alpha=3, gamma=4)
        with pytest.raises(ValueError):
            DecompParams(n=4, tau=4, kappa=2, alpha=3, gamma=4)

    def test_tau_may_equal_alpha(self):
        DecompParams(n=4, tau=3, kappa=2, alpha=3, gamma=4)

    def test_small_alphabet_rejected(self):
        with pytest.raises(ValueError):
            DecompParams(n=3, tau=1, kappa=2, alpha=3, gamma=4)

    def test_three_symbols_with_shared_tau_alpha_warns(self):
        with pytest.warns(UserWarning):
            DecompParams(n=3, tau=1, kappa=2, alpha=1, gamma=3)

    def test_from_step_uses_the_side_corner(self, m_h6):
        _, step = one_step(m_h6)
        params = DecompParams.from_step(m_h6, step)
        assert (params.tau, params.kappa, params.alpha, params.gamma) == (1, 5, 1, 6)
        assert not params.mirror


class TestDecompose:
    def test_longest_top_run(self):
        dec = m_decompose(parse_seq("1.4.4.4.(2)^inf"), P)
        assert kinds_and_words(dec) == [(SegmentKind.TG_K, (1, 4, 4, 4))]
        assert dec.tail == 2

    def test_top_run_then_hook(self):
        dec = m_decompose(parse_seq("1.4.4.4.2.2.4.(2)^inf"), P)
        assert kinds_and_words(dec) == [
            (SegmentKind.TG_K, (1, 4, 4, 4)),
            (SegmentKind.KAK_G, (2, 2, 4)),
        ]

    def test_letters_only(self):
        dec = m_decompose(parse_seq("3.3.(2)^inf"), P)
        assert kinds_and_words(dec) == [
            (SegmentKind.LETTER, (3,)),
            (SegmentKind.LETTER, (3,)),
        ]

    def test_short_top_run_is_letters(self):
        dec = m_decompose(parse_seq("1.4.(2)^inf"), P)
        assert [s.kind for s in dec.segments] == [SegmentKind.LETTER] * 2

    def test_image_side_prefers_double_top(self):
        dec = mp_decompose(parse_seq("2.3.2.4.4.(2)^inf"), P)
        assert kinds_and_words(dec) == [(SegmentKind.KAK_GG, (2, 3, 2, 4, 4))]

    def test_image_side_single_top(self):
        dec = mp_decompose(parse_seq("2.3.2.4.(2)^inf"), P)
        assert kinds_and_words(dec) == [(SegmentKind.KAK_G, (2, 3, 2, 4))]

    def test_image_side_top_pair(self):
        dec = mp_decompose(parse_seq("1.4.4.(2)^inf"), P)
        assert kinds_and_words(dec) == [(SegmentKind.TGG, (1, 4, 4))]

    def test_concatenation_reproduces_input(self):
        rng = random.Random(11)
        for _ in range(300):
            x = canonicalize([rng.randint(1, 4) for _ in range(rng.randint(0, 10))], 2)
            for decomposer in (m_decompose, mp_decompose):
                dec = decomposer(x, P)
                assert canonicalize(dec.head_word(), dec.tail) == x

    def test_greedy_no_segment_extends(self):
        # appending the next symbol to any matched segment leaves the family
        rng = random.Random(12)
        for _ in range(200):
            x = canonicalize([rng.randint(1, 4) for _ in range(rng.randint(0, 9))], 2)
            dec = m_decompose(x, P)
            pos = 1
            for seg in dec.segments:
                nxt = x[pos + len(seg.word)]
                if seg.kind is SegmentKind.TG_K:
                    assert nxt != 4
                elif seg.kind is SegmentKind.LETTER and seg.word == (1,):
                    run = 0
                    while x[pos + 1 + run] == 4:
                        run += 1
                    assert run < 2
                pos += len(seg.word)

    def test_endless_top_run_has_no_longest_prefix(self):
        x = canonicalize((1,), 4)  # tau then the top symbol forever
        with pytest.raises(ValueError):
            m_decompose(x, P)


class TestSegmentBijection:
    def test_top_run_to_hook(self):
        out = segment_map(Segment(SegmentKind.TG_K, (1, 4, 4, 4)), P)
        assert (out.kind, out.word) == (SegmentKind.KAK_G, (2, 3, 2, 4))

    def test_shortest_hook_to_top_pair(self):
        out = segment_map(Segment(SegmentKind.KAK_G, (2, 2, 4)), P)
        assert (out.kind, out.word) == (SegmentKind.TGG, (1, 4, 4))

    def test_letter_fixed(self):
        seg = Segment(SegmentKind.LETTER, (3,))
        assert segment_map(seg, P) == seg
        assert segment_unmap(seg, P) == seg

    def test_round_trip_over_small_runs(self):
        for k in range(2, 8):
            seg = Segment(SegmentKind.TG_K, (1,) + (4,) * k)
            assert segment_unmap(segment_map(seg, P), P) == seg
        for k in range(0, 6):
            seg = Segment(SegmentKind.KAK_G, (2,) + (3,) * k + (2, 4))
            assert segment_unmap(segment_map(seg, P), P) == seg

    def test_class_mismatch_raises(self):
        with pytest.raises(ValueError):
            segment_map(Segment(SegmentKind.TGG, (1, 4, 4)), P)
        with pytest.raises(ValueError):
            segment_unmap(Segment(SegmentKind.TG_K, (1, 4, 4)), P)

    def test_lengths_preserved(self):
        for k in range(2, 9):
            seg = Segment(SegmentKind.TG_K, (1,) + (4,) * k)
            assert len(segment_map(seg, P)) == len(seg)
        for k in range(0, 7):
            seg = Segment(SegmentKind.KAK_G, (2,) + (3,) * k + (2, 4))
            assert len(segment_map(seg, P)) == len(seg)


class TestMap:
    def test_examples(self):
        assert str(map_forward(parse_seq("1.4.4.(2)^inf"), P)) == "2.2.4.(2)^inf"
        assert str(map_backward(parse_seq("2.2.4.(2)^inf"), P)) == "1.4.4.(2)^inf"
        assert str(map_forward(parse_seq("3.3.(2)^inf"), P)) == "3.3.(2)^inf"
        assert str(map_forward(parse_seq("2.3.2.4.(2)^inf"), P)) == "2.2.4.4.(2)^inf"

    def test_top_run_family(self):
        for k in range(2, 7):
            x = canonicalize((1,) + (4,) * k, 2)
            expected = canonicalize((2,) + (3,) * (k - 2) + (2, 4), 2)
            assert map_forward(x, P) == expected

    @given(st.lists(st.integers(1, 4), max_size=12))
    @settings(max_examples=300)
    def test_round_trip(self, prefix):
        x = canonicalize(prefix, 2)
        assert map_backward(map_forward(x, P), P) == x

    @given(st.lists(st.integers(1, 4), max_size=12))
    @settings(max_examples=200)
    def test_image_decomposition_is_segmentwise(self, prefix):
        # the image's factorization is exactly the mapped factorization
        x = canonicalize(prefix, 2)
        dec = m_decompose(x, P)
        image = map_forward(x, P)
        expected = tuple(segment_map(s, P) for s in dec.segments)
        got = mp_decompose(image, P).segments

        def strip(segs):
            segs = list(segs)
            while segs and segs[-1] == Segment(SegmentKind.LETTER, (2,)):
                segs.pop()
            return tuple(segs)

        assert strip(got) == strip(expected)

    def test_prefix_contraction_example(self):
        x, y = parse_seq("1.4.4.4.(2)^inf"), parse_seq("1.4.4.(2)^inf")
        assert common_prefix_len(x, y) == 3
        assert common_prefix_len(map_forward(x, P), map_forward(y, P)) == 1

    def test_prefix_bound_holds_exhaustively(self):
        from itertools import product

        grid = [canonicalize(p, 2) for p in product(*([range(1, 5)] * 4))]
        images = {x: map_forward(x, P) for x in grid}
        for x in grid:
            for y in grid:
                if x == y:
                    continue
                assert (
                    common_prefix_len(images[x], images[y])
                    >= common_prefix_len(x, y) - 2
                )


class TestPatternAnchors:
    @pytest.mark.parametrize(
        "params",
        [P, DecompParams(n=6, tau=1, kappa=5, alpha=1, gamma=6)],
    )
    def test_class_words_start_with_an_anchor_2gram(self, params):
        t, k, a, g = params.tau, params.kappa, params.alpha, params.gamma
        anchors = {(k, a), (k, k), (t, g)}
        words = []
        for run in range(2, 7):
            words.append((t,) + (g,) * run)
        for run in range(0, 5):
            words.append((k,) + (a,) * run + (k, g))
            words.append((k,) + (a,) * run + (k, g, g))
        words.append((t, g, g))
        for w in words:
            assert w[:2] in anchors
            for i in range(1, len(w) - 1):
                assert (w[i], w[i + 1]) not in anchors


class TestDistortionAudit:
    def test_h6_first_step(self, m_h6):
        nxt, step = one_step(m_h6)
        report = distortion_audit(m_h6, nxt, step, 4)
        assert report.ok
        assert report.stats["max_abs_diff"] <= 5
        assert report.stats["prefix_bound_ok"]
        assert report.stats["prefix_equality_witness"] is not None
        assert report.stats["roundtrip_failures"] == 0

    def test_mirror_step(self, m_h6):
        mid, _ = one_step(m_h6)
        nxt, step = one_step(mid)
        assert step.side == "BG"
        report = distortion_audit(mid, nxt, step, 4)
        assert report.ok

    def test_randomized_steps(self):
        rng = random.Random(31)
        done = 0
        while done < 6:
            aut = random_gasket_automaton(rng, n=rng.choice([4, 5]),
                                          gamma_isolated=True, min_vertical=1)
            nxt, step = one_step(aut)
            report = distortion_audit(aut, nxt, step, 3)
            assert report.ok, report.to_json()
            done += 1


class TestStreamingForm:
    @pytest.mark.parametrize(
        "params,n",
        [
            (P, 4),
            (DecompParams(n=6, tau=1, kappa=5, alpha=1, gamma=6), 6),
            (DecompParams(n=5, tau=2, kappa=4, alpha=1, gamma=5, mirror=True), 5),
        ],
    )
    def test_matches_decomposition_map(self, params, n):
        rng = random.Random(n)
        for _ in range(1500):
            prefix = [rng.randint(1, n) for _ in range(rng.randint(0, 10))]
            x = canonicalize(prefix, params.kappa)
            fed = list(x.head(len(x.prefix) + 8))
            out = run_transducer(params, fed)
            want = list(map_forward(x, params).head(len(fed) - 2))
            assert out[: len(fed) - 2] == want

    def test_export_shape(self):
        data = derived_transducer(P)
        assert data["initial"] == "Id"
        assert len(data["edges"]) == len(data["states"]) * P.n
        outputs = {tuple(e["output"]) for e in data["edges"]}
        assert (P.tau, P.gamma, P.gamma) in outputs  # the short top pair
