import numpy as np
import pytest
import scipy.optimize
from hypothesis import given, settings
from hypothesis import strategies as st

from polycount import (
    InfeasibleError,
    Polytope,
    UnboundedError,
    chebyshev_center,
    get_rect,
    maximize,
    parse_polytope,
    rect_lattice_count,
)
from polycount.simplex import Rectangle, bounds_real

from conftest import box_polytope


class TestMaximize:
    def test_box_corner(self):
        P = parse_polytope("4 2\n1 0 5\n0 1 5\n-1 0 0\n0 -1 0")
        res = maximize(np.array([1.0, 0.0]), P)
        assert res.status == "optimal"
        assert res.value == pytest.approx(5.0, abs=1e-9)

    def test_unbounded(self):
        P = parse_polytope("1 1\n-1 0")
        assert maximize(np.array([1.0]), P).status == "unbounded"

    def test_simplex_diagonal(self):
        P = parse_polytope("3 2\n1 1 2\n-1 0 0\n0 -1 0")
        res = maximize(np.array([1.0, 1.0]), P)
        assert res.status == "optimal"
        assert res.value == pytest.approx(2.0, abs=1e-9)

    def test_infeasible(self):
        P = parse_polytope("2 1\n1 0\n-1 -1")
        assert maximize(np.array([1.0]), P).status == "infeasible"

    def test_optimal_point_feasible_and_consistent(self):
        P = parse_polytope("3 2\n2 1 4\n-1 1 1\n0 -1 0")
        c = np.array([1.0, 3.0])
        res = maximize(c, P)
        assert res.status == "optimal"
        assert np.all(P.A @ res.argmax <= P.b + 1e-7 * (1 + np.abs(P.b)))
        assert c @ res.argmax == pytest.approx(res.value, abs=1e-9)

    @given(seed=st.integers(0, 199))
    @settings(max_examples=60)
    def test_matches_scipy_on_random_bounded_lps(self, seed):
        rng = np.random.default_rng(seed)
        m, n = int(rng.integers(1, 7)), int(rng.integers(1, 5))
        A = rng.integers(-9, 10, size=(m, n)).astype(float)
        A = A[np.any(A != 0, axis=1)]
        box = np.vstack([np.eye(n), -np.eye(n)])
        A_all = np.vstack([A, box]) if A.size else box
        b = np.concatenate(
            [rng.integers(-5, 11, size=A_all.shape[0] - 2 * n), np.full(2 * n, 7.0)]
        )
        c = rng.integers(-9, 10, size=n).astype(float)
        P = Polytope.from_arrays(A_all, b)
        mine = maximize(c, P)
        ref = scipy.optimize.linprog(
            -c, A_ub=A_all, b_ub=b, bounds=(None, None), method="highs"
        )
        if ref.status == 2:
            assert mine.status == "infeasible"
        else:
            assert ref.status == 0
            assert mine.status == "optimal"
            assert mine.value == pytest.approx(-ref.fun, rel=1e-7, abs=1e-7)

    def test_no_feasible_point_beats_optimum(self):
        rng = np.random.default_rng(7)
        P = parse_polytope("3 2\n1 2 4\n2 -1 3\n-1 -1 1")
        lo, hi = bounds_real(P)
        c = np.array([2.0, 1.0])
        best = maximize(c, P).value
        pts = rng.uniform(lo, hi, size=(10_000, 2))
        feas = pts[np.all(pts @ P.A.T <= P.b, axis=1)]
        assert feas.size
        assert np.all(feas @ c <= best + 1e-6 * (1 + abs(best)))


class TestGetRect:
    def test_triangle(self, triangle):
        R = get_rect(
            parse_polytope("3 2\n1 1 1\n-1 0 0\n0 -1 0")
        )
        assert np.array_equal(R.lo, [0, 0])
        assert np.array_equal(R.hi, [1, 1])

    def test_real_bounds_floor_ceil(self):
        R = get_rect(parse_polytope("2 1\n1 2.5\n-1 0.5"))
        assert np.array_equal(R.lo, [0])
        assert np.array_equal(R.hi, [2])

    def test_unbounded_raises(self):
        with pytest.raises(UnboundedError):
            get_rect(parse_polytope("1 1\n-1 0"))

    def test_infeasible_raises(self):
        with pytest.raises(InfeasibleError):
            get_rect(parse_polytope("2 1\n1 0\n-1 -1"))

    def test_empty_lattice_slab(self):
        R = get_rect(parse_polytope("2 1\n1 0.4\n-1 -0.3"))
        assert rect_lattice_count(R) == 0

    def test_matches_analytic_box(self):
        P = box_polytope([-3, 2], [5, 9])
        R = get_rect(P)
        assert np.array_equal(R.lo, [-3, 2])
        assert np.array_equal(R.hi, [5, 9])

    def test_rect_contains_every_lattice_point_of_p(self):
        from polycount import contains_lattice

        P = parse_polytope("3 2\n3 1 7\n-2 1 3\n0 -1 0")
        R = get_rect(P)
        for x in range(-10, 11):
            for y in range(-10, 11):
                if contains_lattice(P, (x, y)):
                    assert R.lo[0] <= x <= R.hi[0]
                    assert R.lo[1] <= y <= R.hi[1]


class TestRectCount:
    def test_unit_square(self):
        assert rect_lattice_count(Rectangle(np.zeros(2), np.ones(2))) == 4

    def test_cube(self):
        assert rect_lattice_count(Rectangle(np.zeros(3), np.full(3, 9))) == 1000

    def test_degenerate_axis(self):
        assert rect_lattice_count(Rectangle(np.array([3]), np.array([3]))) == 1

    def test_bigint(self):
        R = Rectangle(np.zeros(8), np.full(8, 10**4))
        assert rect_lattice_count(R) == (10**4 + 1) ** 8


class TestChebyshev:
    def test_square_center(self):
        P = box_polytope([0, 0], [4, 4])
        center, radius = chebyshev_center(P)
        assert center == pytest.approx([2.0, 2.0], abs=1e-7)
        assert radius == pytest.approx(2.0, abs=1e-7)

    def test_unbounded(self):
        with pytest.raises(UnboundedError):
            chebyshev_center(parse_polytope("1 2\n1 0 3"))
