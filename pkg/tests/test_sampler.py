import collections

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from polycount import (
    Polytope,
    contains_lattice,
    contains_real,
    exact_count,
    hit_and_run_step,
    parse_polytope,
    sample_lattice,
    shift_facets,
    walk,
)
from polycount.rng import Rng
from polycount.sampler import _reject_chunk, _reject_chunk_fast

from conftest import box_polytope


class _FixedRng:
    """Stub: fixed coordinate picks, uniforms cycling through given values."""

    def __init__(self, coord=0, uniforms=(0.5,)):
        self.coord = coord
        self.uniforms = list(uniforms)
        self.i = 0

    def pick_coord(self, n):
        return self.coord

    def uniform(self):
        u = self.uniforms[self.i % len(self.uniforms)]
        self.i += 1
        return u


class TestShiftFacets:
    def test_row_shift_values(self):
        A = [[1.0, 1.0], [3.0, -4.0], [-1.0, 0.0], [0.0, -1.0]]
        P = Polytope.from_arrays(A, [2.0, 0.0, 1.0, 1.0])
        sp = shift_facets(P)
        assert sp.shifts == pytest.approx([1.0, 3.5, 0.5, 0.5])
        assert sp.enlarged.b == pytest.approx([3.0, 3.5, 1.5, 1.5])

    def test_box_shifts_all_half(self):
        P = box_polytope([0, 0, 0], [4, 4, 4])
        sp = shift_facets(P)
        assert np.allclose(sp.shifts, 0.5)
        assert np.allclose(sp.enlarged.b, [4.5, 4.5, 4.5, 0.5, 0.5, 0.5])

    @given(seed=st.integers(0, 50))
    @settings(max_examples=25)
    def test_lp_route_agrees_with_closed_form(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 5))
        A = rng.uniform(-10, 10, (4, n))
        A[np.all(np.abs(A) < 1e-12, axis=1)] += 1.0
        A = np.vstack([A, np.eye(n), -np.eye(n)])
        b = np.concatenate([rng.uniform(1, 5, 4), np.full(2 * n, 3.0)])
        P = Polytope.from_arrays(A, b)
        assert shift_facets(P).shifts == pytest.approx(
            shift_facets(P, via_lp=True).shifts, abs=1e-9
        )

    def test_corner_coverage_small_polytopes(self, triangle):
        # every unit-cube corner of every lattice point of P sits in P'
        sp = shift_facets(triangle)
        pts = exact_count(triangle, want_points=True).points
        corners = np.array([[dx, dy] for dx in (-0.5, 0.5) for dy in (-0.5, 0.5)])
        for p in pts:
            for c in corners:
                assert contains_real(sp.enlarged, p + c, 1e-9)


class TestHitAndRunStep:
    def test_axis_box_chord(self):
        Q = box_polytope([0, 0], [1, 1])
        out = hit_and_run_step(Q, np.array([0.5, 0.5]), _FixedRng(0, (0.25,)))
        assert out[1] == 0.5
        assert out[0] == pytest.approx(0.25)  # chord [0,1], u=0.25
        assert contains_real(Q, out, 1e-9)

    def test_1d_chord_is_full_interval(self):
        Q = parse_polytope("2 1\n1 1\n-1 0")
        out_lo = hit_and_run_step(Q, np.array([0.2]), _FixedRng(0, (0.0,)))
        out_hi = hit_and_run_step(Q, np.array([0.2]), _FixedRng(0, (1.0 - 1e-16,)))
        assert out_lo[0] == pytest.approx(0.0, abs=1e-12)
        assert out_hi[0] == pytest.approx(1.0, abs=1e-12)

    def test_membership_preserved_over_many_steps(self):
        rng_np = np.random.default_rng(3)
        A = np.vstack([rng_np.standard_normal((7, 3)), np.eye(3), -np.eye(3)])
        b = np.concatenate([rng_np.uniform(0.5, 3.0, 7), np.full(6, 4.0)])
        Q = Polytope.from_arrays(A, b)
        rng = Rng(12)
        from polycount.sampler import _Chords

        chords = _Chords(Q)
        p = np.zeros(3)
        slack = Q.b - Q.A @ p
        for i in range(100_000):
            chords.step(p, slack, rng)
            if i % 1000 == 0:
                slack = Q.b - Q.A @ p
        assert contains_real(Q, p, 1e-9)
        assert np.all(slack >= -1e-9 * (1 + np.abs(Q.b)))

    def test_outside_start_rejected(self):
        Q = box_polytope([0, 0], [1, 1])
        with pytest.raises(ValueError):
            hit_and_run_step(Q, np.array([5.0, 5.0]), Rng(0))


class TestWalk:
    def test_w1_equals_single_step(self):
        Q = box_polytope([0, 0], [1, 1])
        p0 = np.array([0.5, 0.5])
        assert np.array_equal(
            walk(Q, p0, 1, Rng(77)), hit_and_run_step(Q, p0, Rng(77))
        )

    def test_stays_inside(self):
        Q = box_polytope([0] * 4, [1] * 4)
        out = walk(Q, np.full(4, 0.5), 4, Rng(5))
        assert contains_real(Q, out, 1e-9)

    def test_golden_reproducible(self):
        # frozen from the reference run; guards cross-platform determinism
        Q = box_polytope([0, 0], [1, 1])
        out = walk(Q, np.array([0.5, 0.5]), 5, Rng(2024))
        assert out.tolist() == [0.05193362463309881, 0.39140381857637485]


class TestSampleLattice:
    def test_box_acceptance_is_one(self, box09_2d):
        sp = shift_facets(box09_2d)
        S = sample_lattice(sp, 2000, Rng(1), w=2)
        assert S.attempts == S.accepted == 2000

    def test_triangle_acceptance_near_analytic(self, triangle):
        # P' is the triangle with legs 4: area 8; 6 lattice points in P
        sp = shift_facets(triangle)
        S = sample_lattice(sp, 7000, Rng(3), w=2)
        rate = S.accepted / S.attempts
        assert rate == pytest.approx(6 / 8, abs=0.05)

    def test_soundness_every_point_in_p(self, triangle):
        sp = shift_facets(triangle)
        S = sample_lattice(sp, 3000, Rng(9), w=2)
        for p in S.points:
            assert contains_lattice(triangle, p)

    def test_s_zero_rejected(self, triangle):
        with pytest.raises(ValueError):
            sample_lattice(shift_facets(triangle), 0, Rng(0), w=2)

    def test_uniformity_chi_square_light(self, triangle):
        sp = shift_facets(triangle)
        S = sample_lattice(sp, 20_000, Rng(17), w=2)
        counts = collections.Counter(map(tuple, S.points.tolist()))
        assert len(counts) == 6
        observed = np.array(sorted(counts.values()))
        expected = S.accepted / 6
        chi2 = float(((observed - expected) ** 2 / expected).sum())
        assert chi2 < scipy.stats.chi2.ppf(1 - 1e-4, df=5)

    def test_kernel_matches_pure_python(self, triangle):
        # the jitted kernel and its plain-Python source must agree bit-for-bit
        if _reject_chunk_fast is _reject_chunk:
            pytest.skip("numba unavailable; single implementation")
        import polycount.sampler as sampler_mod

        sp = shift_facets(triangle)
        fast = sample_lattice(sp, 500, Rng(31), w=2)
        orig = sampler_mod._reject_chunk_fast
        sampler_mod._reject_chunk_fast = _reject_chunk
        try:
            slow = sample_lattice(sp, 500, Rng(31), w=2)
        finally:
            sampler_mod._reject_chunk_fast = orig
        assert fast.attempts == slow.attempts
        assert np.array_equal(fast.points, slow.points)

    def test_same_seed_same_samples(self, triangle):
        sp = shift_facets(triangle)
        a = sample_lattice(sp, 800, Rng(5), w=2)
        b = sample_lattice(sp, 800, Rng(5), w=2)
        assert a.attempts == b.attempts
        assert np.array_equal(a.points, b.points)

    def test_rejection_cap(self):
        # a sliver with no lattice points: the cap must fire
        P = Polytope.from_arrays([[1.0], [-1.0]], [0.4, -0.3])
        from polycount import ResourceCapError

        sp = shift_facets(P)
        with pytest.raises(ResourceCapError) as err:
            sample_lattice(sp, 10, Rng(0), w=1, max_attempts=2000)
        assert err.value.cap == "attempts"
