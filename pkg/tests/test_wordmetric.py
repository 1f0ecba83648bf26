import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bruteforce import tour_by_permutations
from strategies import elements, random_elements
from wreathcoarse.errors import BudgetExceeded
from wreathcoarse.group import (
    IDENTITY,
    IntegerLattice,
    Lamplighter,
    LamplighterPower,
    NestedLamplighter,
    ProductElement,
    WreathElement,
    delta,
    invert,
)
from wreathcoarse.wordmetric import (
    LineTour,
    bfs_oracle,
    growth_series,
    line_loop_length,
    line_path_length,
    word_distance,
    word_length,
    word_length_product,
)

ZWZ = Lamplighter()
visits = st.lists(st.integers(-10, 10), max_size=6)


class TestLineTours:
    @pytest.mark.parametrize("visit, end, expected", [
        ([], 5, 5),
        ([-2, 1], 1, 5),
        ([2], 0, 4),
        ([], 0, 0),
        ([-3], -3, 3),
    ])
    def test_path_examples(self, visit, end, expected):
        assert line_path_length(visit, end) == expected
        assert tour_by_permutations(visit, end) == expected

    @pytest.mark.parametrize("visit, expected", [([], 0), ([2], 4), ([-1, 3], 8)])
    def test_loop_examples(self, visit, expected):
        assert line_loop_length(visit) == expected

    @given(visits, st.integers(-10, 10))
    def test_path_matches_permutation_search(self, visit, end):
        assert line_path_length(visit, end) == tour_by_permutations(visit, end)

    @given(visits)
    def test_loop_is_path_home(self, visit):
        assert line_loop_length(visit) == line_path_length(visit, 0)

    @given(visits, st.integers(-10, 10))
    def test_tour_at_least_displacement(self, visit, end):
        assert LineTour(frozenset(visit), end).length >= abs(end)


class TestWordLength:
    def test_identity(self):
        assert word_length(IDENTITY) == 0

    def test_single_lamp(self):
        assert word_length(delta(2, 3)) == 7

    def test_two_lamps_and_shift(self):
        x = WreathElement.make({-2: 1, 1: 1}, 1)
        assert word_length(x) == 7

    @pytest.mark.parametrize("x, expected", [
        (ProductElement((IDENTITY, IDENTITY)), 0),
        (ProductElement((WreathElement(shift=3), WreathElement(shift=-2))), 5),
        (ProductElement((delta(0, 1), WreathElement(shift=1))), 2),
    ])
    def test_product(self, x, expected):
        assert word_length_product(x) == expected == word_length(x)

    def test_lattice(self):
        assert word_length((3, -4)) == 7
        assert word_length(-5) == 5

    def test_cancelling_deltas_leave_no_stop(self):
        # δ_5^1 δ_5^-1 is the identity lamp; the tour must not detour to 5
        x = delta(5, 1) * delta(5, -1) * WreathElement(shift=1)
        assert x == WreathElement(shift=1)
        assert word_length(x) == 1 == bfs_oracle(ZWZ, 1).lengths[x]

    def test_nested_single_lamp(self):
        # lamp value (δ_0^1, 1) has length 2; tour to 3 and back is 6
        x = delta(3, delta(0, 1, 1))
        assert word_length(x) == 8

    def test_radius_two_table_matches(self):
        for x, n in bfs_oracle(ZWZ, 2).lengths.items():
            assert word_length(x) == n

    def test_nested_radius_three_matches(self):
        for x, n in bfs_oracle(NestedLamplighter(), 3).lengths.items():
            assert word_length(x) == n

    def test_power_radius_three_matches(self):
        for x, n in bfs_oracle(LamplighterPower(2), 3).lengths.items():
            assert word_length(x) == n


class TestMetricAxioms:
    @given(elements, elements)
    def test_symmetric(self, g, h):
        assert word_distance(ZWZ, g, h) == word_distance(ZWZ, h, g)

    @given(elements, elements, elements)
    def test_triangle(self, g, h, k):
        assert word_distance(ZWZ, g, k) <= word_distance(ZWZ, g, h) + word_distance(ZWZ, h, k)

    @given(elements, elements)
    def test_indiscernibles(self, g, h):
        assert (word_distance(ZWZ, g, h) == 0) == (g == h)

    def test_left_invariant(self):
        xs = random_elements(600, 8, seed=3)
        for k, g, h in zip(xs[::3], xs[1::3], xs[2::3]):
            assert word_distance(ZWZ, k * g, k * h) == word_distance(ZWZ, g, h)

    @given(elements)
    def test_inverse_same_length(self, x):
        assert word_length(invert(x)) == word_length(x)


class TestBall:
    def test_radius_zero(self):
        assert bfs_oracle(ZWZ, 0).lengths == {IDENTITY: 0}

    def test_radius_one(self):
        ball = bfs_oracle(ZWZ, 1).lengths
        assert set(ball) == {IDENTITY, delta(0, 1), delta(0, -1),
                             WreathElement(shift=1), WreathElement(shift=-1)}

    def test_table_consistent(self):
        table = bfs_oracle(ZWZ, 4)
        ball = table.lengths
        rng = random.Random(5)
        keys = list(ball)
        for _ in range(2000):
            x, y = rng.choice(keys), rng.choice(keys)
            if x * y in ball:
                assert ball[x * y] <= ball[x] + ball[y]
            assert ball[invert(x)] == ball[x]
        assert table.elements()[0] == IDENTITY
        assert sum(table.sphere_sizes()) == len(table)

    def test_negative_radius(self):
        with pytest.raises(ValueError):
            bfs_oracle(ZWZ, -1)

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            bfs_oracle(ZWZ, 6, max_size=100)

    def test_budget_from_environment(self, monkeypatch):
        monkeypatch.setenv("WREATHCOARSE_MAX_BALL", "10")
        with pytest.raises(BudgetExceeded):
            growth_series(ZWZ, 3)


class TestGrowth:
    def test_trivial(self):
        assert growth_series(ZWZ, 0) == [1]
        assert growth_series(ZWZ, 1) == [1, 5]
        assert growth_series(IntegerLattice(1), 1) == [1, 3]

    def test_frozen_lamplighter_series(self):
        # frozen from the breadth-first search
        assert growth_series(ZWZ, 6) == [1, 5, 17, 53, 153, 421, 1125]

    @pytest.mark.parametrize("group", [IntegerLattice(2), ZWZ, NestedLamplighter(), LamplighterPower(2)])
    def test_strictly_increasing(self, group):
        s = growth_series(group, 4)
        assert all(a < b for a, b in zip(s, s[1:]))
