import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bruteforce import tree_ok, witness_ok
from strategies import rebuild_tree, single_point_mutant, tree_levels
from wreathcoarse.decomposition import (
    DecompositionWitness,
    Leaf,
    MetricFamily,
    Node,
    coordinate,
    depth,
    leaf_bound,
    strategy_axes_tree,
    strategy_product,
    strategy_Z,
    strategy_Z_tree,
    translate_family,
    translated_space,
    tree_from_json,
    tree_to_json,
    verify_tree,
    verify_witness,
    witness_from_json,
    witness_to_json,
)
from wreathcoarse.group import Lamplighter, WreathElement, delta
from wreathcoarse.metric import (
    ball_space,
    diam,
    grid_space,
    interval_space,
    set_distance,
)

Z20 = interval_space(0, 20)
ZWZ = Lamplighter()


def seg(a, b):
    return frozenset(range(a, b + 1))


class TestVerifyWitness:
    def test_whole_space_one_piece(self):
        w = DecompositionWitness(1000, (Z20.everything,))
        assert verify_witness(Z20, w).verdict

    def test_strategy_passes(self):
        assert verify_witness(Z20, strategy_Z(Z20, Z20.everything, 3)).verdict

    def test_widened_piece_reports_pair(self):
        w = strategy_Z(Z20, Z20.everything, 3)
        # widen [0,6) by the first point of [12,18) minus one: touches it
        wider = (w.family0[0] | {11},) + w.family0[1:]
        rep = verify_witness(Z20, DecompositionWitness(3, wider, w.family1))
        assert not rep.verdict
        (fail,) = rep.failures
        assert fail.name == "family0-disjoint"
        assert "pieces 0 and 1 at distance 1 < 3" in fail.detail

    def test_uncovered_point_reported(self):
        w = strategy_Z(Z20, Z20.everything, 3)
        rep = verify_witness(Z20, DecompositionWitness(3, (w.family0[0] - {4},) + w.family0[1:], w.family1))
        assert [c.detail for c in rep.failures] == ["point 4 is uncovered"]

    def test_dangling_index(self):
        with pytest.raises(ValueError):
            verify_witness(Z20, DecompositionWitness(1, ({0, 99},)))

    def test_empty_family_allowed(self):
        assert verify_witness(Z20, DecompositionWitness(5, (seg(0, 20),), ())).verdict

    def test_empty_piece_rejected(self):
        rep = verify_witness(Z20, DecompositionWitness(1, (seg(0, 20), frozenset())))
        assert not rep.verdict

    @given(st.integers(1, 12), st.fractions(0, 12))
    def test_monotone_in_scale(self, r, smaller):
        w = strategy_Z(Z20, Z20.everything, r)
        if smaller <= r:
            assert verify_witness(Z20, w.at_scale(smaller)).verdict


class TestStrategyZ:
    def test_single_point(self):
        s = interval_space(0, 0)
        w = strategy_Z(s, s.everything, 7)
        assert w.family0 == (frozenset({0}),) and w.family1 == ()

    def test_blocks(self):
        w = strategy_Z(Z20, Z20.everything, 3)
        assert w.family0 == (seg(0, 5), seg(12, 17))
        assert w.family1 == (seg(6, 11), seg(18, 20))

    @pytest.mark.parametrize("r", [1, 2, 3, 5, Fraction(5, 2)])
    def test_gaps_and_diameters(self, r):
        s = interval_space(0, 60)
        w = strategy_Z(s, s.everything, r)
        for fam in (w.family0, w.family1):
            for a, b in zip(fam, fam[1:]):
                gap = set_distance(s, a, b)
                assert gap >= r
                if (2 * r).denominator == 1:
                    # integer blocks of 2r points; the next same-family block starts 2r + 1 later
                    assert gap == 2 * r + 1
        assert max(diam(s, p) for p in w.pieces) <= 2 * r

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            strategy_Z(Z20, Z20.everything, 0)

    @pytest.mark.parametrize("r", [1, 4, 17, 64])
    def test_tree_on_hundred(self, r):
        s = interval_space(0, 100)
        assert verify_tree(MetricFamily.whole(s), strategy_Z_tree(s, r)).verdict

    def test_coordinate(self):
        assert coordinate(4) == 4
        assert coordinate((1, 9), 1) == 9
        assert coordinate(WreathElement(shift=-3)) == -3
        with pytest.raises(TypeError):
            coordinate(True)
        with pytest.raises(TypeError):
            coordinate("x")


class TestTrees:
    def test_singletons_leaf_zero(self):
        fam = MetricFamily(Z20, tuple(frozenset({i}) for i in range(21)))
        assert verify_tree(fam, Leaf(0)).verdict

    def test_leaf_bound_violation(self):
        rep = verify_tree(MetricFamily.whole(Z20), Node(3, (strategy_Z(Z20, Z20.everything, 3),), Leaf(4)))
        assert not rep.verdict
        assert rep.failures[0].name == "level1/bounded"

    def test_arity_mismatch(self):
        w = strategy_Z(Z20, Z20.everything, 3)
        tree = Node(3, (w,), Node(1, (w,), Leaf(10)))
        rep = verify_tree(MetricFamily.whole(Z20), tree)
        assert not rep.verdict and rep.failures[-1].name == "level1/arity"

    def test_min_scale(self):
        tree = strategy_Z_tree(Z20, 3)
        assert verify_tree(MetricFamily.whole(Z20), tree, min_scale=3).verdict
        assert not verify_tree(MetricFamily.whole(Z20), tree, min_scale=4).verdict

    def test_product_tree_square(self):
        a = interval_space(0, 30)
        ta = strategy_Z_tree(a, 4)
        prod, tree = strategy_product(a, ta, a, ta)
        assert depth(tree) == 2 and leaf_bound(tree) == 16
        assert verify_tree(MetricFamily.whole(prod), tree).verdict

    def test_product_with_leaves(self):
        a, b = interval_space(0, 3), interval_space(0, 2)
        prod, tree = strategy_product(a, Leaf(3), b, Leaf(2))
        assert tree == Leaf(5)
        assert verify_tree(MetricFamily.whole(prod), tree).verdict

    def test_product_with_point(self):
        a, pt = interval_space(0, 20), interval_space(0, 0)
        ta = strategy_Z_tree(a, 3)
        prod, tree = strategy_product(a, ta, pt, Leaf(0))
        assert depth(tree) == depth(ta) and leaf_bound(tree) == leaf_bound(ta)
        assert [sorted(p) for p in tree.witnesses[0].pieces] == [sorted(p) for p in ta.witnesses[0].pieces]
        assert verify_tree(MetricFamily.whole(prod), tree).verdict

    def test_product_depths_add(self):
        a = interval_space(0, 12)
        ta = strategy_Z_tree(a, 2)
        _, t2 = strategy_product(a, ta, a, ta)
        prod3, t3 = strategy_product(a, ta, *strategy_product(a, ta, a, ta))
        assert depth(t3) == 3 == depth(ta) + depth(t2)
        assert verify_tree(MetricFamily.whole(prod3), t3).verdict

    def test_axes_tree(self):
        g = grid_space(15, 15)
        tree = strategy_axes_tree(g, 3, 2)
        assert depth(tree) == 2 and leaf_bound(tree) == 12
        assert verify_tree(MetricFamily.whole(g), tree).verdict

    def test_mutants_agree_with_oracle(self):
        s = interval_space(0, 40)
        tree = strategy_Z_tree(s, 3)
        rng = random.Random(17)
        killed = 0
        for _ in range(60):
            levels, bound = single_point_mutant(tree, len(s), rng)
            truth = tree_ok(s.dist, levels, bound, s.everything)
            got = verify_tree(MetricFamily.whole(s), rebuild_tree(levels, bound)).verdict
            assert got == truth
            killed += not got
        assert killed > 30

    def test_oracle_accepts_originals(self):
        s = interval_space(0, 40)
        levels, bound = tree_levels(strategy_Z_tree(s, 3))
        assert tree_ok(s.dist, levels, bound, s.everything)
        (_, ((f0, f1),)), = levels
        assert witness_ok(s.dist, s.everything, f0, f1, 3)


class TestJson:
    def test_tree_round_trip(self):
        a = interval_space(0, 10)
        _, tree = strategy_product(a, strategy_Z_tree(a, Fraction(3, 2)), a, strategy_Z_tree(a, 2))
        text = json.dumps(tree_to_json(tree))
        assert tree_from_json(json.loads(text)) == tree

    def test_witness_file_shape(self):
        w = strategy_Z(Z20, Z20.everything, Fraction(5, 2))
        obj = witness_to_json(w, Leaf(5))
        assert obj["scale"] == "5/2" and obj["child"] == {"leaf": "5"}
        back, child = witness_from_json(json.loads(json.dumps(obj)))
        assert back == w and child == Leaf(5)
        assert tree_from_json(obj) == Node(w.scale, (w,), Leaf(5))

    def test_scale_required(self):
        with pytest.raises(ValueError):
            witness_from_json({"family0": [[0]]})
        with pytest.raises(ValueError):
            tree_from_json({"family0": [[0]], "family1": []})

    def test_child_required_for_trees(self):
        with pytest.raises(ValueError):
            tree_from_json({"scale": "1", "family0": [[0]]})


class TestTranslation:
    def test_identity_translation(self):
        members = [[WreathElement(shift=i) for i in range(3)]]
        assert translate_family(ZWZ, ZWZ.identity(), members) == members

    def test_base_interval_shift(self):
        pts = [WreathElement(shift=i) for i in range(6)]
        moved = translate_family(ZWZ, WreathElement(shift=5), [pts])[0]
        assert moved == [WreathElement(shift=i + 5) for i in range(6)]

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10_000))
    def test_distances_preserved(self, seed):
        rng = random.Random(seed)
        s = ball_space(ZWZ, 2)
        g = WreathElement.make({rng.randint(-3, 3): rng.randint(-3, 3)}, rng.randint(-4, 4))
        t = translated_space(ZWZ, g, s)
        assert t.dist == s.dist
        w = strategy_Z(s, s.everything, rng.randint(1, 3))
        assert verify_witness(s, w).verdict == verify_witness(t, w).verdict

    def test_diameter_preserved_exactly(self):
        s = ball_space(ZWZ, 2)
        t = translated_space(ZWZ, delta(1, 2, 5), s)
        for piece in strategy_Z(s, s.everything, 1).pieces:
            assert diam(s, piece) == diam(t, piece)
