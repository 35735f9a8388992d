"""Near-uniform lattice sampling by rejection over an enlarged body.

Enlarging first: every facet bound b_i is raised by half the l1 norm of its
normal, which is exactly the optimum of max a_i.x over the unit cube at the
origin. The enlarged body then contains the unit cube around every lattice
point of the base polytope, so rounding a uniform real point of it hits
each lattice point with equal probability; points whose rounding falls
outside the base polytope are rejected.

Real points come from a coordinate-directions hit-and-run walk run on the
affinely rounded copy of the enlarged body. The walk position persists
across rejections and accepted samples within one sample_lattice call; a
fresh call restarts from the image of the origin ball.

The rejection loop consumes randomness in chunks (one coordinate pick and
one uniform per chord try) and runs through a single kernel that numba
compiles when available; without numba the same function executes as plain
Python with bit-identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBodyError, ResourceCapError, UnboundedError
from .polytope import Polytope, contains_real, round_real
from .rng import Rng
from .rounding import AffineMap, apply, apply_inv, round_body, transform_polytope
from .simplex import chebyshev_center, maximize

_COEF_TOL = 1e-12  # |a_ij| below this: row is parallel to the direction
_CHUNK = 8192


@dataclass(frozen=True)
class ShiftedPolytope:
    """Base polytope with its enlarged, rounded, and transformed companions."""

    base: Polytope
    shifts: np.ndarray
    enlarged: Polytope
    map: AffineMap
    transformed: Polytope
    start: np.ndarray


@dataclass(frozen=True)
class SampleSet:
    """Accepted lattice points plus the walk-attempt count that produced them."""

    points: np.ndarray  # (k, n) int64
    attempts: int

    def __post_init__(self):
        if self.attempts < self.accepted:
            raise ValueError("attempts < accepted")

    @property
    def accepted(self) -> int:
        return self.points.shape[0]


def shift_facets(P: Polytope, via_lp: bool = False) -> ShiftedPolytope:
    """Enlarge P so every unit cube around a lattice point of P fits inside.

    The per-row shift is 0.5 * ||a_i||_1, the closed form of the
    box-constrained LP; via_lp=True solves the LP instead (debug
    cross-check, equal to 1e-9).
    """
    if via_lp:
        cube = _unit_cube(P.n)
        v = np.array([maximize(r.a, cube).value for r in P.rows])
    else:
        v = 0.5 * np.abs(P.A).sum(axis=1)
    enlarged = Polytope.from_arrays(P.A, P.b + v)
    T = round_body(enlarged)
    Q = transform_polytope(T, enlarged)
    start = np.zeros(P.n)
    if T.weak or not contains_real(Q, start, 1e-9):
        center, _ = chebyshev_center(enlarged)
        start = apply(T, center)
    return ShiftedPolytope(P, v, enlarged, T, Q, start)


def _unit_cube(n: int) -> Polytope:
    A = np.vstack([np.eye(n), -np.eye(n)])
    return Polytope.from_arrays(A, np.full(2 * n, 0.5))


class _Chords:
    """Per-coordinate ratio-test data for a fixed halfspace system."""

    __slots__ = ("A", "b", "n", "pos", "neg")

    def __init__(self, Q: Polytope):
        self.A = Q.A
        self.b = Q.b
        self.n = Q.n
        self.pos = []
        self.neg = []
        for j in range(Q.n):
            col = Q.A[:, j]
            pi = np.nonzero(col > _COEF_TOL)[0]
            ni = np.nonzero(col < -_COEF_TOL)[0]
            self.pos.append((pi, col[pi]))
            self.neg.append((ni, col[ni]))

    def step(self, p: np.ndarray, slack: np.ndarray, rng: Rng):
        """One hit-and-run move; mutates p and slack in place."""
        for _ in range(self.n + 1):
            j = rng.pick_coord(self.n)
            pi, pc = self.pos[j]
            ni, nc = self.neg[j]
            hi = (slack[pi] / pc).min() if pi.size else np.inf
            lo = (slack[ni] / nc).max() if ni.size else -np.inf
            if not np.isfinite(hi) or not np.isfinite(lo):
                raise UnboundedError("unbounded chord: body is not bounded")
            if lo > 0.0:
                lo = 0.0
            if hi < 0.0:
                hi = 0.0
            if hi - lo >= 1e-12:
                lam = lo + (hi - lo) * rng.uniform()
                p[j] += lam
                slack -= lam * self.A[:, j]
                return
        raise DegenerateBodyError("chord below 1e-12 in every coordinate")


def hit_and_run_step(Q: Polytope, p, rng: Rng) -> np.ndarray:
    """Single coordinate-directions hit-and-run move from p inside Q."""
    p = np.asarray(p, dtype=float).copy()
    if not contains_real(Q, p, 1e-9):
        raise ValueError("start point is outside the body")
    chords = _Chords(Q)
    slack = Q.b - Q.A @ p
    chords.step(p, slack, rng)
    return p


def walk(Q: Polytope, p, w: int, rng: Rng) -> np.ndarray:
    """w composed hit-and-run moves."""
    if w < 1:
        raise ValueError("w must be >= 1")
    p = np.asarray(p, dtype=float).copy()
    if not contains_real(Q, p, 1e-9):
        raise ValueError("start point is outside the body")
    chords = _Chords(Q)
    slack = Q.b - Q.A @ p
    for _ in range(w):
        chords.step(p, slack, rng)
    return p


def _reject_chunk(
    A, b, L_inv, t_off, Ab, bb, p, slack, q, out, coords, unifs, w, accepted, attempts, s, cap
):
    """Rejection loop over one randomness chunk.

    Each chord try consumes one (coordinate, uniform) pair, wasted or not.
    Returns (accepted, attempts, flag): flag 1 = degenerate chord in every
    coordinate, flag 2 = unbounded chord.
    """
    m, n = A.shape
    mb = Ab.shape[0]
    budget = w * (n + 1)
    pos = 0
    npairs = coords.shape[0]
    while accepted < s and attempts < cap and pos + budget <= npairs:
        for _step in range(w):
            moved = False
            for _try in range(n + 1):
                j = coords[pos]
                u = unifs[pos]
                pos += 1
                hi = np.inf
                lo = -np.inf
                for i in range(m):
                    aij = A[i, j]
                    if aij > _COEF_TOL:
                        tt = slack[i] / aij
                        if tt < hi:
                            hi = tt
                    elif aij < -_COEF_TOL:
                        tt = slack[i] / aij
                        if tt > lo:
                            lo = tt
                if hi == np.inf or lo == -np.inf:
                    return accepted, attempts, 2
                if lo > 0.0:
                    lo = 0.0
                if hi < 0.0:
                    hi = 0.0
                if hi - lo >= 1e-12:
                    lam = lo + (hi - lo) * u
                    p[j] += lam
                    for i in range(m):
                        slack[i] -= lam * A[i, j]
                    moved = True
                    break
            if not moved:
                return accepted, attempts, 1
        attempts += 1
        for k in range(n):
            xv = 0.0
            for k2 in range(n):
                xv += L_inv[k, k2] * (p[k2] - t_off[k2])
            qv = math.floor(abs(xv) + 0.5)
            q[k] = -qv if xv < 0.0 else qv
        ok = True
        for r in range(mb):
            acc = 0.0
            for k in range(n):
                acc += Ab[r, k] * q[k]
            if acc > bb[r]:
                ok = False
                break
        if ok:
            for k in range(n):
                out[accepted, k] = int(q[k])
            accepted += 1
    return accepted, attempts, 0


try:  # pragma: no cover - exercised implicitly everywhere
    from numba import njit

    _reject_chunk_fast = njit(cache=True)(_reject_chunk)
except ImportError:  # pragma: no cover
    _reject_chunk_fast = _reject_chunk


def sample_lattice(
    SP: ShiftedPolytope,
    s: int,
    rng: Rng,
    w: int,
    start: np.ndarray | None = None,
    max_attempts: int | None = None,
) -> SampleSet:
    """Draw exactly s lattice points of SP.base, near-uniformly.

    Each attempt advances the walk w steps in the transformed body, pulls
    the point back, rounds it, and accepts iff the lattice point lies in the
    base polytope. The walk is not restarted after rejections or accepts.

    Raises ResourceCapError("attempts") after max(1e5, 1e4*s) attempts
    without reaching s accepts (the acceptance rate is then
    indistinguishable from zero).
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    if w < 1:
        raise ValueError("w must be >= 1")
    cap = max_attempts if max_attempts is not None else max(100_000, 10_000 * s)

    base = SP.base
    Q = SP.transformed
    p = np.array(SP.start if start is None else start, dtype=float)
    slack = Q.b - Q.A @ p
    if slack.min() < -1e-9 * (1.0 + np.abs(Q.b).max()):
        raise ValueError("start point is outside the transformed body")

    out = np.empty((s, base.n), dtype=np.int64)
    q = np.empty(base.n)
    bband = base.b + base._lattice_tol
    accepted = 0
    attempts = 0
    while accepted < s:
        if attempts >= cap:
            raise ResourceCapError(
                "attempts", f"{attempts} walk attempts yielded {accepted}/{s} accepts"
            )
        coords = rng.coord_chunk(base.n, _CHUNK)
        unifs = rng.uniform_chunk(_CHUNK)
        accepted, attempts, flag = _reject_chunk_fast(
            Q.A, Q.b, SP.map.L_inv, SP.map.t, base.A, bband,
            p, slack, q, out, coords, unifs,
            w, accepted, attempts, s, cap,
        )
        if flag == 1:
            raise DegenerateBodyError("chord below 1e-12 in every coordinate")
        if flag == 2:
            raise UnboundedError("unbounded chord: body is not bounded")
        slack = Q.b - Q.A @ p  # periodic refresh against drift
    return SampleSet(out, attempts)


def pull_back(SP: ShiftedPolytope, p) -> np.ndarray:
    """Round the pre-image of a transformed-space point to the lattice."""
    return round_real(apply_inv(SP.map, p))
