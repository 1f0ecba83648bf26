import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bruteforce import d_multiplicity_oracle, lebesgue_oracle, multiplicity_oracle
from strategies import random_cover
from wreathcoarse.errors import BudgetExceeded, PreconditionError
from wreathcoarse.group import IntegerLattice, Lamplighter, WreathElement
from wreathcoarse.metric import (
    CoarseEnvelope,
    FiniteMetricSpace,
    Staircase,
    ball_space,
    closed_ball,
    covers,
    d_multiplicity,
    diam,
    enlarge,
    family_diam,
    fits_all_sets,
    grid_space,
    interval_space,
    is_r_disjoint,
    lebesgue_exceeds,
    lebesgue_number,
    metric_violations,
    multiplicity,
    product_space,
    random_metric_space,
    sample_map_pairs,
    set_distance,
    uncovered_points,
    unfit_clique,
    verify_coarse_map,
    weighted_direct_sum_space,
    weighted_sum_distance,
)
from wreathcoarse.wordmetric import word_distance, word_length

Z20 = interval_space(0, 20)


def seg(a, b):
    return frozenset(range(a, b + 1))


class TestSpace:
    def test_rejects_bad_tables(self):
        with pytest.raises(ValueError):
            FiniteMetricSpace([0, 1], [[0, 1], [2, 0]])
        with pytest.raises(ValueError):
            FiniteMetricSpace([0, 1], [[0, 0], [0, 0]])
        with pytest.raises(ValueError):
            FiniteMetricSpace([0, 1], [[1, 1], [1, 0]])
        with pytest.raises(ValueError):
            FiniteMetricSpace([0, 1], [[0, 1]])

    def test_triangle_violation_found(self):
        s = FiniteMetricSpace("abc", [[0, 1, 5], [1, 0, 1], [5, 1, 0]])
        assert (0, 1, 2) in metric_violations(s)

    def test_sampled_violation_check(self):
        s = interval_space(0, 250)
        assert metric_violations(s, exhaustive_limit=100, samples=2000) == []

    def test_json_round_trip(self):
        s = FiniteMetricSpace(["p", "q"], [[0, Fraction(3, 2)], [Fraction(3, 2), 0]])
        obj = s.to_json()
        assert obj == {"points": ["p", "q"], "dist": [["0", "3/2"], ["3/2", "0"]]}
        back = FiniteMetricSpace.from_json(obj)
        assert back.points == s.points and back.dist == s.dist

    def test_json_round_trip_group_labels(self):
        s = ball_space(Lamplighter(), 2)
        back = FiniteMetricSpace.from_json(s.to_json())
        assert back.points == s.points and back.dist == s.dist

    def test_json_rejects_extra_keys(self):
        with pytest.raises(ValueError):
            FiniteMetricSpace.from_json({"points": [], "dist": [], "x": 1})

    def test_subspace(self):
        sub = Z20.subspace([3, 7, 9])
        assert sub.points == (3, 7, 9)
        assert sub.dist[0][2] == 6


class TestStatistics:
    def test_diam(self):
        assert diam(Z20, {4}) == 0
        assert diam(Z20, seg(0, 2)) == 2
        s = FiniteMetricSpace([(0, 0), (3, 4)], [[0, 5], [5, 0]])
        assert diam(s, {0, 1}) == 5
        with pytest.raises(ValueError):
            diam(Z20, set())

    def test_set_distance(self):
        assert set_distance(Z20, seg(0, 3), seg(2, 5)) == 0
        assert set_distance(Z20, {0}, {5}) == 5
        assert set_distance(Z20, {0, 1}, {4, 9}) == 3

    def test_r_disjoint(self):
        fam = [seg(0, 1), seg(4, 5)]
        assert is_r_disjoint(Z20, [seg(0, 20)], 100)
        assert is_r_disjoint(Z20, fam, 3)
        assert not is_r_disjoint(Z20, fam, 4)

    def test_multiplicity(self):
        assert multiplicity(Z20, [seg(0, 9), seg(10, 20)]) == 1
        assert multiplicity(Z20, [seg(0, 2), seg(2, 4)]) == 2
        assert multiplicity(Z20, [seg(0, 3), seg(1, 4), seg(2, 5)]) == 3

    def test_d_multiplicity(self):
        cover = [seg(0, 1), seg(4, 5)]
        assert d_multiplicity(Z20, cover, 2) == 2
        assert d_multiplicity(Z20, cover, 1) == 1
        overlapping = [seg(0, 3), seg(1, 4), seg(2, 5)]
        assert d_multiplicity(Z20, overlapping, 0) == multiplicity(Z20, overlapping)

    def test_family_diam_and_cover(self):
        assert family_diam(Z20, []) == 0
        assert family_diam(Z20, [seg(0, 3), seg(5, 6)]) == 3
        assert not covers(Z20, [seg(0, 10)])
        assert uncovered_points(Z20, [seg(0, 18)]) == [19, 20]

    def test_lebesgue_whole_piece(self):
        assert lebesgue_number(Z20, [Z20.everything]) == math.inf

    def test_lebesgue_small_examples(self):
        s4 = interval_space(0, 4)
        cover4 = [seg(0, 2), seg(2, 4)]
        assert lebesgue_number(s4, cover4) == 1 == lebesgue_oracle(s4.dist, cover4)
        s5 = interval_space(0, 5)
        cover5 = [seg(0, 3), seg(2, 5)]
        assert lebesgue_number(s5, cover5) == 2 == lebesgue_oracle(s5.dist, cover5)

    def test_lebesgue_needs_cover(self):
        with pytest.raises(PreconditionError):
            lebesgue_number(Z20, [seg(0, 3)])

    def test_unfit_clique_reports_a_witness(self):
        cover = [seg(0, 2), seg(2, 4)]
        s4 = interval_space(0, 4)
        bad = unfit_clique(s4, cover, 2)
        assert bad is not None and diam(s4, bad) <= 2
        assert not any(bad <= p for p in cover)
        assert fits_all_sets(s4, cover, 1)

    def test_lebesgue_exceeds_matches_number(self):
        rng = random.Random(4)
        for _ in range(40):
            s = random_metric_space(rng.randint(3, 9), rng)
            cover = random_cover(len(s), rng)
            leb = lebesgue_number(s, cover)
            for lam in s.distances():
                assert lebesgue_exceeds(s, cover, lam) == (leb > lam)

    @pytest.mark.parametrize("seed", range(25))
    def test_against_subset_oracle(self, seed):
        rng = random.Random(seed)
        s = random_metric_space(rng.randint(2, 10), rng)
        cover = random_cover(len(s), rng)
        assert multiplicity(s, cover) == multiplicity_oracle(len(s), cover)
        for d in s.distances()[:4]:
            assert d_multiplicity(s, cover, d) == d_multiplicity_oracle(s.dist, cover, d)
        assert lebesgue_number(s, cover) == lebesgue_oracle(s.dist, cover)


class TestEnlarge:
    def test_examples(self):
        v = seg(2, 3)
        assert enlarge(Z20, v, 0) == v
        assert enlarge(Z20, v, 2) == seg(1, 4)
        assert enlarge(Z20, v, 2, strict=False) == seg(0, 5)
        assert enlarge(Z20, v, 0, strict=False) == v
        with pytest.raises(ValueError):
            enlarge(Z20, set(), 1)

    @given(st.integers(0, 20), st.integers(0, 20), st.fractions(0, 10), st.fractions(0, 10))
    def test_monotone(self, a, b, r1, r2):
        v = seg(min(a, b), max(a, b))
        lo, hi = sorted((r1, r2))
        assert enlarge(Z20, v, lo) <= enlarge(Z20, v, hi)
        assert enlarge(Z20, v, lo) <= enlarge(Z20, v, lo, strict=False)

    def test_closed_ball(self):
        assert closed_ball(Z20, 5, 2) == seg(3, 7)

    def test_disjoint_families_have_small_d_multiplicity(self):
        rng = random.Random(8)
        for _ in range(30):
            d = rng.randint(1, 3)
            r = 2 * d + 1
            f0 = [seg(a, min(20, a + rng.randint(0, 2))) for a in range(0, 21, 2 * r + 4)]
            f1 = [seg(a, min(20, a + 1)) for a in range(r + 3, 21, 2 * r + 4)]
            cover = f0 + f1
            assert is_r_disjoint(Z20, f0, r) and is_r_disjoint(Z20, f1, r)
            assert d_multiplicity(Z20, cover, d) <= 2


class TestCoarseMaps:
    def test_staircase(self):
        f = Staircase((0, 2, 5), (0, 1, 3), Fraction(1, 2))
        assert [f(t) for t in (0, 1, 2, 4, 5, 7)] == [0, 0, 1, 1, 3, 4]
        assert not Staircase().proper and Staircase.linear().proper
        with pytest.raises(ValueError):
            Staircase((0, 1), (2, 1))
        with pytest.raises(ValueError):
            Staircase((1,), (0,))
        with pytest.raises(ValueError):
            CoarseEnvelope(Staircase.linear(), Staircase())

    def test_identity_map(self):
        env = CoarseEnvelope(Staircase.linear(), Staircase.linear())
        pairs = sample_map_pairs(list(range(10)), lambda x: x, lambda a, b: abs(a - b), lambda a, b: abs(a - b))
        assert verify_coarse_map(pairs, env).passed

    def test_base_inclusion_is_isometric(self):
        zwz = Lamplighter()
        env = CoarseEnvelope(Staircase.linear(), Staircase.linear())
        pairs = sample_map_pairs(list(range(-6, 7)), lambda n: WreathElement(shift=n),
                                 lambda a, b: abs(a - b), lambda g, h: word_distance(zwz, g, h))
        assert verify_coarse_map(pairs, env).passed

    def test_doubling_fails_upper(self):
        env = CoarseEnvelope(Staircase.linear(), Staircase.linear())
        pairs = sample_map_pairs(list(range(5)), lambda x: 2 * x, lambda a, b: abs(a - b), lambda a, b: abs(a - b))
        rep = verify_coarse_map(pairs, env)
        assert not rep.passed and len(rep.upper_failures) == len(pairs)
        assert rep.lower_failures == []


class TestConstructions:
    def test_weighted_sum_small(self):
        s = weighted_direct_sum_space(1, 1)
        assert s.points == ((-1,), (0,), (1,))
        assert s.dist[0][2] == 2
        assert weighted_sum_distance((1, 0), (0, 1)) == 3
        assert weighted_sum_distance((4, -2), (4, -2)) == 0
        assert len(weighted_direct_sum_space(2, 1)) == 9

    def test_weighted_sum_bounds(self):
        with pytest.raises(ValueError):
            weighted_direct_sum_space(0, 1)
        with pytest.raises(BudgetExceeded):
            weighted_direct_sum_space(5, 5, max_size=100)

    def test_ball_space(self):
        assert len(ball_space(Lamplighter(), 0)) == 1
        z = ball_space(IntegerLattice(1), 3)
        assert len(z) == 7 and diam(z, z.everything) == 6
        s = ball_space(Lamplighter(), 2)
        assert len(s) == 17
        assert metric_violations(s) == []
        for i, j in itertools.combinations(range(len(s)), 2):
            assert s.dist[i][j] == word_length(s.points[i].inverse() * s.points[j])
        # the induced metric can exceed the ball's diameter bound of 2 * radius
        assert max(max(row) for row in s.dist) <= 4

    def test_grid_and_product(self):
        g = grid_space(3, 4)
        assert len(g) == 12 and metric_violations(g) == []
        p = product_space(interval_space(0, 2), interval_space(0, 3))
        assert p.dist == g.dist

    @settings(max_examples=30)
    @given(st.integers(0, 10_000), st.integers(2, 12))
    def test_random_spaces_are_metric(self, seed, n):
        s = random_metric_space(n, random.Random(seed))
        assert len(s) == n and metric_violations(s) == []
