"""Dense two-phase simplex for bounded LPs over halfspace systems.

Solves max c.x subject to A x <= b with free variables (split x = u - v
internally). Pivoting uses Dantzig's rule with a switch to Bland's rule
after 500 consecutive degenerate pivots, and a hard iteration cap of
50*(m + 2n) per phase; hitting the cap signals numerical trouble and is
reported distinctly from unboundedness.

Also provides the integer bounding rectangle of a polytope (the chain's
outermost level) and its exact lattice count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    InfeasibleError,
    ResourceCapError,
    UnboundedError,
)
from .polytope import Halfspace, Polytope

_PIV_TOL = 1e-9
_OPT_TOL = 1e-9
_BLAND_AFTER = 500


@dataclass(frozen=True)
class LpResult:
    status: str  # "optimal" | "unbounded" | "infeasible"
    value: float = np.nan
    argmax: np.ndarray | None = None


class _Tableau:
    """Canonical-form tableau: basis columns are an identity, rhs >= 0."""

    def __init__(self, T: np.ndarray, basis: np.ndarray):
        self.T = T
        self.basis = basis
        self.m = T.shape[0]
        self.ncols = T.shape[1] - 1
        self.degenerate_run = 0

    def run(self, cost: np.ndarray, max_iter: int) -> str:
        """Maximize cost over the current feasible basis. Returns
        'optimal' or 'unbounded'; raises on the iteration cap."""
        T, basis = self.T, self.basis
        for _ in range(max_iter):
            red = cost - cost[basis] @ T[:, :-1]
            red[basis] = 0.0
            use_bland = self.degenerate_run >= _BLAND_AFTER
            if use_bland:
                cand = np.nonzero(red > _OPT_TOL)[0]
                if cand.size == 0:
                    return "optimal"
                j = int(cand[0])
            else:
                j = int(np.argmax(red))
                if red[j] <= _OPT_TOL:
                    return "optimal"
            col = T[:, j]
            pos = np.nonzero(col > _PIV_TOL)[0]
            if pos.size == 0:
                return "unbounded"
            ratios = T[pos, -1] / col[pos]
            rmin = ratios.min()
            tied = pos[ratios <= rmin + _PIV_TOL * (1.0 + abs(rmin))]
            # smallest basis index among ties (Bland-compatible, anti-cycling)
            r = int(tied[np.argmin(basis[tied])])
            self.degenerate_run = self.degenerate_run + 1 if rmin <= _PIV_TOL else 0
            self._pivot(r, j)
        raise ResourceCapError("lp-iterations", f"no optimum within {max_iter} pivots")

    def _pivot(self, r: int, j: int):
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        T -= col[:, None] * T[r][None, :]
        self.basis[r] = j

    def solution(self, nvars: int) -> np.ndarray:
        x = np.zeros(self.ncols)
        x[self.basis] = self.T[:, -1]
        return x[:nvars]


def maximize(c, P: Polytope) -> LpResult:
    """max c.x over P. Free variables; two-phase; dense."""
    c = np.asarray(c, dtype=float)
    if c.shape != (P.n,):
        raise DimensionMismatchError(f"objective has dim {c.shape}, expected ({P.n},)")
    m, n = P.m, P.n
    max_iter = 50 * (m + 2 * n)

    # columns: u (n) | v (n) | slack (m) [| artificials]
    A2 = np.hstack([P.A, -P.A, np.eye(m)])
    rhs = P.b.copy()
    flip = rhs < 0
    A2[flip] *= -1.0
    rhs[flip] *= -1.0

    nart = int(flip.sum())
    ncols = 2 * n + m + nart
    T = np.zeros((m, ncols + 1))
    T[:, : 2 * n + m] = A2
    T[:, -1] = rhs
    basis = np.empty(m, dtype=np.int64)
    art_cols = []
    k = 2 * n + m
    for i in range(m):
        if flip[i]:
            T[i, k] = 1.0
            basis[i] = k
            art_cols.append(k)
            k += 1
        else:
            basis[i] = 2 * n + i

    tab = _Tableau(T, basis)

    if nart:
        cost1 = np.zeros(ncols)
        cost1[art_cols] = -1.0
        tab.run(cost1, max_iter)
        if -(cost1[tab.basis] @ tab.T[:, -1]) > 1e-7:
            return LpResult("infeasible")
        _drive_out_artificials(tab, 2 * n + m)
        tab.T = np.delete(tab.T, art_cols, axis=1)
        tab.ncols -= nart
        tab.degenerate_run = 0

    cost2 = np.concatenate([c, -c, np.zeros(m)])
    status = tab.run(cost2, max_iter)
    if status == "unbounded":
        return LpResult("unbounded")
    uv = tab.solution(2 * n)
    x = uv[:n] - uv[n:]
    return LpResult("optimal", float(c @ x), x)


def _drive_out_artificials(tab: _Tableau, nreal: int):
    """Pivot zero-valued artificials out of the basis; drop redundant rows."""
    drop = []
    for i in range(tab.m):
        if tab.basis[i] >= nreal:
            row = tab.T[i, :nreal]
            j = int(np.argmax(np.abs(row)))
            if abs(row[j]) > _PIV_TOL:
                tab._pivot(i, j)
            else:
                drop.append(i)
    if drop:
        tab.T = np.delete(tab.T, drop, axis=0)
        tab.basis = np.delete(tab.basis, drop)
        tab.m -= len(drop)


@dataclass(frozen=True)
class Rectangle:
    """Integer axis box [lo, hi]. An empty box is encoded as hi_j = lo_j - 1."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=np.int64)
        hi = np.asarray(self.hi, dtype=np.int64)
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise DimensionMismatchError("lo/hi shape mismatch")
        if np.any(hi < lo - 1):
            raise ValueError("hi may not drop below lo - 1")

    @property
    def n(self) -> int:
        return self.lo.size

    def to_polytope(self) -> Polytope:
        rows = []
        for j in range(self.n):
            e = np.zeros(self.n)
            e[j] = 1.0
            rows.append(Halfspace(e, float(self.hi[j])))
            rows.append(Halfspace(-e, float(-self.lo[j])))
        return Polytope(rows)


def rect_lattice_count(R: Rectangle) -> int:
    """Exact number of lattice points in the box (arbitrary precision)."""
    total = 1
    for l, h in zip(R.lo.tolist(), R.hi.tolist()):
        total *= max(0, h - l + 1)
    return total


def bounds_real(P: Polytope) -> tuple[np.ndarray, np.ndarray]:
    """Per-coordinate real extrema of P via 2n LPs."""
    lo = np.empty(P.n)
    hi = np.empty(P.n)
    for j in range(P.n):
        e = np.zeros(P.n)
        e[j] = 1.0
        up = maximize(e, P)
        if up.status == "infeasible":
            raise InfeasibleError("polytope is infeasible")
        if up.status == "unbounded":
            raise UnboundedError(f"polytope is unbounded in +x{j + 1}")
        down = maximize(-e, P)
        if down.status == "unbounded":
            raise UnboundedError(f"polytope is unbounded in -x{j + 1}")
        hi[j] = up.value
        lo[j] = -down.value
    return lo, hi


def get_rect(P: Polytope) -> Rectangle:
    """Smallest integer box certain to contain every lattice point of P."""
    lo, hi = bounds_real(P)
    ilo = np.ceil(lo - 1e-7).astype(np.int64)
    ihi = np.floor(hi + 1e-7).astype(np.int64)
    # a slab holding no integer hyperplane in coordinate j gives ihi = ilo - 1
    ihi = np.maximum(ihi, ilo - 1)
    return Rectangle(ilo, ihi)


def chebyshev_center(P: Polytope) -> tuple[np.ndarray, float]:
    """Center and radius of a largest inscribed ball (via one LP)."""
    norms = np.linalg.norm(P.A, axis=1)
    rows = [
        Halfspace(np.concatenate([P.A[i], [norms[i]]]), P.b[i]) for i in range(P.m)
    ]
    e = np.zeros(P.n + 1)
    e[-1] = -1.0
    rows.append(Halfspace(e, 0.0))  # r >= 0
    obj = np.zeros(P.n + 1)
    obj[-1] = 1.0
    res = maximize(obj, Polytope(rows))
    if res.status == "unbounded":
        raise UnboundedError("polytope is unbounded")
    if res.status != "optimal":
        raise InfeasibleError("polytope is infeasible")
    return res.argmax[:-1], float(res.value)
