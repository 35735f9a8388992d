"""Affine rounding: sandwich a body between a unit ball and B(0, 2n).

The map T is found by a shallow-cut ellipsoid iteration: maintain an
ellipsoid E = {x : (x-z)' M^-1 (x-z) <= 1} containing the body, and cut
with any facet whose halfspace the beta-shrunken copy of E pokes out of
(beta = 1/(2n)). On termination the shrunken ellipsoid sits inside every
facet, so mapping it to the unit ball gives B(0,1) inside T(body), while
E itself maps to B(0, 2n) and contains T(body) by invariant.

If the iteration cap (50 n^2) is hit, we fall back to the affine map that
sends the bounding box to [-1,1]^n and mark the result weak: rejection
sampling stays exact, only walk mixing suffers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBodyError
from .polytope import Halfspace, Polytope
from .simplex import bounds_real

_MIN_WIDTH = 1e-10


@dataclass(frozen=True)
class AffineMap:
    """y = L x + t with cached inverse and log|det L|."""

    L: np.ndarray
    L_inv: np.ndarray
    t: np.ndarray
    log_det: float
    weak: bool = False

    def __post_init__(self):
        for arr in (self.L, self.L_inv, self.t):
            arr.setflags(write=False)
        n = self.t.size
        resid = np.max(np.abs(self.L @ self.L_inv - np.eye(n)))
        if resid > 1e-8:
            raise DegenerateBodyError(f"map inverse residual {resid:.2e}")
        sign, logdet = np.linalg.slogdet(self.L)
        if sign == 0 or abs(logdet - self.log_det) > 1e-8:
            raise DegenerateBodyError("inconsistent determinant")

    @classmethod
    def from_matrix(cls, L: np.ndarray, t: np.ndarray, weak: bool = False):
        L = np.asarray(L, dtype=float)
        t = np.asarray(t, dtype=float)
        _, logdet = np.linalg.slogdet(L)
        return cls(L, np.linalg.inv(L), t, float(logdet), weak)

    @classmethod
    def identity(cls, n: int):
        return cls.from_matrix(np.eye(n), np.zeros(n))


def apply(T: AffineMap, x) -> np.ndarray:
    return T.L @ np.asarray(x, dtype=float) + T.t


def apply_inv(T: AffineMap, y) -> np.ndarray:
    return T.L_inv @ (np.asarray(y, dtype=float) - T.t)


def transform_polytope(T: AffineMap, P: Polytope) -> Polytope:
    """Rows of T(P): membership of T(x) in the result equals membership of x in P."""
    A2 = P.A @ T.L_inv
    b2 = P.b + A2 @ T.t
    return Polytope.from_arrays(A2, b2)


def _box_map(lo: np.ndarray, hi: np.ndarray, weak: bool) -> AffineMap:
    width = hi - lo
    L = np.diag(2.0 / width)
    t = -L @ ((lo + hi) / 2.0)
    return AffineMap.from_matrix(L, t, weak=weak)


def round_body(P: Polytope, max_iter: int | None = None) -> AffineMap:
    """Affine map with B(0,1) inside T(P) and T(P) inside B(0, 2n).

    Raises DegenerateBodyError when the body's interior width falls below
    1e-10 in some direction. A weak (bounding-box) map is returned when the
    shallow-cut iteration fails to converge within the cap.
    """
    n = P.n
    lo, hi = bounds_real(P)
    if np.any(hi - lo < _MIN_WIDTH):
        raise DegenerateBodyError("interior width below 1e-10")

    if n == 1:
        # an interval maps exactly onto [-1, 1] = B(0,1)
        return _box_map(lo, hi, weak=False)

    ident = AffineMap.identity(n)
    if _inner_ok(ident, P) and _corner_norm(lo, hi) <= 2.0 * n:
        return ident

    if max_iter is None:
        max_iter = 50 * n * n
    beta = 1.0 / (2.0 * n)
    z = (lo + hi) / 2.0
    M = n * np.diag(((hi - lo) / 2.0) ** 2)

    A, b = P.A, P.b
    for _ in range(max_iter):
        MA = M @ A.T  # (n, m)
        alpha = np.sqrt(np.maximum(np.einsum("ij,ji->i", A, MA), 1e-300))
        depth = (A @ z + beta * alpha - b) / alpha
        i = int(np.argmax(depth))
        if depth[i] <= 1e-12 * (1.0 + abs(b[i])):
            T = _ellipsoid_map(M, z, beta)
            if T is not None and _inner_ok(T, P):
                return T
            break  # numerically unable to certify; fall back
        acut = (A[i] @ z - b[i]) / alpha[i]
        if acut >= 1.0 - 1e-12:
            raise DegenerateBodyError("body has (numerically) empty interior")
        g = MA[:, i] / alpha[i]
        tau = (1.0 + n * acut) / (n + 1.0)
        delta = (n * n / (n * n - 1.0)) * (1.0 - acut * acut)
        sigma = 2.0 * (1.0 + n * acut) / ((n + 1.0) * (1.0 + acut))
        z = z - tau * g
        M = delta * (M - sigma * np.outer(g, g))
        M = (M + M.T) / 2.0

    return _box_map(lo, hi, weak=True)


def _ellipsoid_map(M: np.ndarray, z: np.ndarray, beta: float) -> AffineMap | None:
    try:
        Lc = np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        return None
    L = np.linalg.inv(Lc) / beta
    return AffineMap.from_matrix(L, -L @ z)


def _inner_ok(T: AffineMap, P: Polytope, slack: float = 1e-6) -> bool:
    """Does B(0,1) fit inside T(P)? Checks each transformed row's distance."""
    Q = transform_polytope(T, P)
    dist = Q.b / np.linalg.norm(Q.A, axis=1)
    return bool(np.all(dist >= 1.0 - slack))


def _corner_norm(lo: np.ndarray, hi: np.ndarray) -> float:
    return float(np.linalg.norm(np.maximum(np.abs(lo), np.abs(hi))))


def outer_box_radius(T: AffineMap, P: Polytope) -> float:
    """Diagnostic: corner norm of the bounding box of T(P).

    A surrogate for max ||y|| over T(P); values up to 2n*sqrt(n) are
    consistent with the B(0, 2n) sandwich.
    """
    lo, hi = bounds_real(transform_polytope(T, P))
    return _corner_norm(lo, hi)
