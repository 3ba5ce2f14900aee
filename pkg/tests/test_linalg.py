import random
from fractions import Fraction

import pytest

from gustrata import make_context
from gustrata._linalg import (PrecisionError, charpoly, charpoly_slope_pairs,
                              lower_hull, mat_mul, ops_for, twisted_product)

from _oracles import leibniz_charpoly_int, leibniz_charpoly_scalar


class TestCharpolyAgainstLeibniz:
    @pytest.mark.parametrize("r", [1, 2, 3, 4, 5, 6])
    def test_random_integer_matrices(self, r):
        ctx = make_context(3, 1, 10)
        ops = ops_for(ctx)
        rng = random.Random(1000 + r)
        for _ in range(6):
            rows = [[rng.randrange(ctx.q) for _ in range(r)]
                    for _ in range(r)]
            assert charpoly(ops, rows) == leibniz_charpoly_int(rows, ctx.q)

    def test_power_of_two_modulus(self):
        ctx = make_context(2, 1, 12)
        ops = ops_for(ctx)
        rng = random.Random(7)
        for r in (2, 4, 5):
            rows = [[rng.randrange(ctx.q) for _ in range(r)]
                    for _ in range(r)]
            assert charpoly(ops, rows) == leibniz_charpoly_int(rows, ctx.q)

    @pytest.mark.parametrize("r", [2, 3, 4])
    def test_extension_ring_matrices(self, r):
        ctx = make_context(3, 2, 6)
        ops = ops_for(ctx)
        rng = random.Random(42 + r)
        rows = [[ctx.scalar((rng.randrange(ctx.q), rng.randrange(ctx.q)))
                 for _ in range(r)] for _ in range(r)]
        raw = [[ops.unwrap(e) for e in row] for row in rows]
        got = [ops.wrap(c) for c in charpoly(ops, raw)]
        assert got == leibniz_charpoly_scalar(rows, ctx)

    def test_monic_and_degree(self):
        ctx = make_context(5, 1, 8)
        ops = ops_for(ctx)
        rows = [[1, 2], [3, 4]]
        cp = charpoly(ops, rows)
        assert len(cp) == 3 and cp[-1] == 1
        # trace and determinant of [[1,2],[3,4]] mod 5^8
        assert cp[1] == (-5) % ctx.q
        assert cp[0] == (-2) % ctx.q


class TestTwistedProduct:
    def test_trivial_for_d_one(self):
        ctx = make_context(3, 1, 8)
        ops = ops_for(ctx)
        rows = [[1, 2], [3, 4]]
        assert twisted_product(ops, rows, 1) == rows

    def test_matches_manual_twist(self):
        ctx = make_context(3, 2, 6)
        ops = ops_for(ctx)
        rng = random.Random(5)
        rows = [[(rng.randrange(ctx.q), rng.randrange(ctx.q))
                 for _ in range(3)] for _ in range(3)]
        twisted = [[ops.frob(e, 1) for e in row] for row in rows]
        assert twisted_product(ops, rows, 2) == mat_mul(ops, rows, twisted)


class TestLowerHull:
    def test_basic(self):
        pts = [(0, 2), (1, 5), (2, 0), (3, 5), (4, 0)]
        assert lower_hull(pts) == [(0, 2), (2, 0), (4, 0)]

    def test_collinear_points_collapse(self):
        pts = [(0, 4), (1, 3), (2, 2), (3, 1), (4, 0)]
        assert lower_hull(pts) == [(0, 4), (4, 0)]

    def test_single_point(self):
        assert lower_hull([(0, 1)]) == [(0, 1)]


class TestSlopePairs:
    def test_x_squared_plus_p(self):
        ctx = make_context(3, 1, 8)
        ops = ops_for(ctx)
        # x^2 + 3: both roots have valuation 1/2
        pairs = charpoly_slope_pairs(ops, [3, 0, 1], 1)
        assert pairs == [(Fraction(1, 2), 2)]

    def test_split_slopes(self):
        ctx = make_context(3, 1, 8)
        ops = ops_for(ctx)
        # (x^2 - 1)(x^2 - 9) = x^4 - 10x^2 + 9
        cp = [9, 0, (-10) % ctx.q, 0, 1]
        pairs = charpoly_slope_pairs(ops, cp, 1)
        assert sorted(pairs) == [(Fraction(0), 2), (Fraction(1), 2)]

    def test_twist_divides_slopes(self):
        ctx = make_context(3, 1, 8)
        ops = ops_for(ctx)
        pairs = charpoly_slope_pairs(ops, [9, 0, 1], 2)
        assert pairs == [(Fraction(1, 2), 2)]

    def test_insufficient_precision(self):
        ctx = make_context(3, 1, 2)
        ops = ops_for(ctx)
        # constant term indistinguishable from 0 at N = 2
        with pytest.raises(PrecisionError, match="insufficient precision"):
            charpoly_slope_pairs(ops, [9, 0, 1], 1)
