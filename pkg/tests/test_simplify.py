import random

import pytest

from gasketlab.automaton import TriangleAutomaton, check_gamma_isolated, validate_triangle_gasket
from gasketlab.geometry import topology_automaton
from gasketlab.simplify import (
    SimplStep,
    final_simplification,
    one_step,
    select_terminal_edge,
    step_invariant_audit,
)

from genutils import random_gasket_automaton


@pytest.fixture(scope="module")
def family_ag():
    # full gathering family with the left-vertical edge lexicographically first
    return TriangleAutomaton(
        n=5, alpha=1, beta=2, gamma=5,
        p_ab=frozenset({(4, 3)}), p_ag=frozenset({(1, 3)}), p_bg=frozenset({(1, 4)}),
    )


@pytest.fixture(scope="module")
def family_bg():
    return TriangleAutomaton(
        n=5, alpha=1, beta=2, gamma=5,
        p_ab=frozenset({(3, 4)}), p_ag=frozenset({(1, 4)}), p_bg=frozenset({(1, 3)}),
    )


class TestSelection:
    def test_h6(self, m_h6):
        assert select_terminal_edge(m_h6) == (1, 5, "AG")

    def test_h6_after_first_deletion(self, m_h6):
        reduced = m_h6.with_edges(p_ag=frozenset())
        assert select_terminal_edge(reduced) == (2, 5, "BG")

    def test_walk_follows_successors(self):
        aut = TriangleAutomaton(
            n=5, alpha=4, beta=5, gamma=-3,
            p_ab=frozenset(), p_ag=frozenset({(1, 2), (2, 3)}), p_bg=frozenset(),
        )
        assert select_terminal_edge(aut) == (2, 3, "AG")

    def test_empty_union_is_an_error(self, m_h6):
        final, _ = final_simplification(m_h6)
        with pytest.raises(ValueError):
            select_terminal_edge(final)


class TestOneStep:
    def test_h6_first_step_drops_left_edge(self, m_h6):
        out, step = one_step(m_h6)
        assert step == SimplStep("TK", "AG", 1, 5)
        assert out.p_ag == frozenset() and out.p_bg == frozenset({(2, 5)})

    def test_h6_second_step_is_mirror(self, m_h6):
        mid, _ = one_step(m_h6)
        out, step = one_step(mid)
        assert step == SimplStep("TK", "BG", 2, 5)
        assert out.p_bg == frozenset()

    def test_gathering_family_removed_in_one_step(self, family_ag):
        out, step = one_step(family_ag)
        assert step == SimplStep("TKL", "AG", 1, 3, 4)
        assert out.p_ag == frozenset() and out.p_bg == frozenset()
        assert out.p_ab == frozenset({(4, 3)})  # horizontal edge survives

    def test_mirror_family(self, family_bg):
        out, step = one_step(family_bg)
        assert step == SimplStep("TKL", "BG", 1, 3, 4)
        assert out.p_ag == frozenset() and out.p_bg == frozenset()

    def test_missing_companion_edge_is_inconsistent(self, family_ag):
        broken = family_ag.with_edges(p_bg=frozenset())
        with pytest.raises(ValueError):
            one_step(broken)


class TestFinalSimplification:
    def test_h6(self, m_h6):
        star, steps = final_simplification(m_h6)
        assert len(steps) == 2
        assert star.p_ag == star.p_bg == frozenset()
        assert star.p_ab == m_h6.p_ab

    def test_h6_prime(self, h6_prime):
        aut = topology_automaton(h6_prime)
        star, steps = final_simplification(aut)
        assert len(steps) == 2
        assert star.p_ab == frozenset({(1, 2), (2, 3), (3, 4)})

    def test_already_final_is_a_fixed_point(self, g5):
        aut = topology_automaton(g5)
        star, steps = final_simplification(aut)
        assert steps == ()
        assert star == aut

    def test_chain_length_bounded_by_vertical_count(self, pair_1235):
        for spec in pair_1235:
            aut = topology_automaton(spec)
            star, steps = final_simplification(aut)
            assert len(steps) <= len(aut.p_ag) + len(aut.p_bg)
            assert star.p_ab == aut.p_ab

    def test_rejects_non_isolated_inputs(self, m_sier):
        with pytest.raises(ValueError):
            final_simplification(m_sier)


class TestStepAudit:
    def test_h6_chain_steps_pass(self, m_h6):
        current = m_h6
        while current.vertical_union():
            nxt, step = one_step(current)
            assert step_invariant_audit(current, nxt, step).ok
            current = nxt

    def test_randomized_chains_pass(self):
        rng = random.Random(2024)
        audited = 0
        for _ in range(100):
            aut = random_gasket_automaton(
                rng, n=rng.randint(4, 6), gamma_isolated=True, min_vertical=1
            )
            current = aut
            while current.vertical_union():
                nxt, step = one_step(current)
                report = step_invariant_audit(current, nxt, step)
                assert report.ok, report.to_json()
                assert validate_triangle_gasket(nxt).ok
                assert check_gamma_isolated(nxt).ok
                current = nxt
                audited += 1
        assert audited >= 100

    def test_mutated_result_fails_with_witness(self, m_h6):
        nxt, step = one_step(m_h6)
        tampered = nxt.with_edges(p_ag=nxt.p_ag | {(5, 3)})
        report = step_invariant_audit(m_h6, tampered, step)
        assert not report.ok
        assert any(v.kind == "kappa-isolated" for v in report.violations)


def test_families_are_edge_disjoint():
    # two distinct gathering families in a valid automaton never share an edge
    rng = random.Random(77)
    checked = 0
    for _ in range(120):
        aut = random_gasket_automaton(rng, n=rng.randint(4, 6))
        families = []
        for a in range(1, aut.n + 1):
            for b in range(1, aut.n + 1):
                for c in range(1, aut.n + 1):
                    if (a, c) in aut.p_ag and (a, b) in aut.p_bg and (b, c) in aut.p_ab:
                        families.append({("ag", a, c), ("bg", a, b), ("ab", b, c)})
        for i in range(len(families)):
            for j in range(i + 1, len(families)):
                assert not (families[i] & families[j])
        checked += len(families)
    assert checked > 0
