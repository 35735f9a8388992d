"""Halving chain construction: nested polytopes from the bounding box to P.

Starting from the integer bounding rectangle, each level greedily appends
original constraints while the sampled fraction of surviving points stays
above r_max. A constraint that would drop the fraction below r_min is
replaced by a relaxed parallel copy whose bound comes from an order-
statistics scan over the sample dot products; when no bound lands the
fraction inside [r_min, r_max] (a lattice jump), the normal is disturbed
by a small uniform perturbation and the scan retried. Original constraints
are never skipped: a relaxed cut leaves its constraint pending for a later
level, so the final level contains all m original rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleError, ResourceCapError
from .polytope import LATTICE_TOL, Halfspace, Polytope
from .rng import Rng
from .sampler import SampleSet, ShiftedPolytope, sample_lattice, shift_facets
from .simplex import get_rect, rect_lattice_count


@dataclass
class ChainLevel:
    polytope: Polytope
    cut_rows: list[Halfspace]  # rows whose addition forms the next level
    samples: SampleSet
    shifted: ShiftedPolytope | None = None
    rng: Rng | None = None
    disturb_rounds: int = 0


@dataclass
class Chain:
    levels: list[ChainLevel]
    rect_count: int = 0

    @property
    def l(self) -> int:
        return len(self.levels) - 1


def disturb(a: np.ndarray, mu: float, rng: Rng) -> np.ndarray:
    """Uniform perturbation of each coefficient within +-mu."""
    if mu <= 0:
        raise ValueError("mu must be > 0")
    for _ in range(2):
        out = a + mu * (2.0 * rng.uniform_vec(a.size) - 1.0)
        if np.any(out != 0.0):
            return out
    raise ValueError("disturb produced a zero vector twice")


def _sat(points: np.ndarray, h: Halfspace) -> np.ndarray:
    """Row membership with the same relative band as contains_lattice."""
    return points.astype(float) @ h.a <= h.b + LATTICE_TOL * (1.0 + abs(h.b))


def find_threshold(
    S: SampleSet,
    H: list[Halfspace],
    a_k: np.ndarray,
    b_k: float,
    r_min: float,
    r_max: float,
) -> float | None:
    """Smallest b' >= b_k putting the sampled fraction of a_k.x <= b' at or
    above r_min, provided that fraction does not overshoot r_max (else None).

    Fractions are relative to the full sample set; the scan runs over the
    dot products of the samples that satisfy every active cut in H.
    """
    if S.accepted < 1:
        raise ValueError("need at least one sample")
    mask = np.ones(S.accepted, dtype=bool)
    for h in H:
        mask &= _sat(S.points, h)
    dots = S.points[mask].astype(float) @ np.asarray(a_k, dtype=float)
    return _scan_threshold(dots, S.accepted, b_k, r_min, r_max)


def _scan_threshold(dots, total, b_k, r_min, r_max) -> float | None:
    dots = np.sort(dots)
    need = math.ceil(r_min * total - 1e-9)
    cnt = int(np.searchsorted(dots, b_k, side="right"))
    if cnt >= need:
        bp = float(b_k)
    else:
        if need > dots.size:
            return None  # even keeping every survivor stays under r_min
        bp = float(dots[need - 1])
        cnt = int(np.searchsorted(dots, bp, side="right"))
    if cnt > r_max * total + 1e-9:
        return None  # the jump case: minimal feasible fraction overshoots
    return bp


def _sample_with_reuse(
    shifted: ShiftedPolytope,
    s: int,
    rng: Rng,
    w: int,
    carried: np.ndarray | None,
    max_attempts: int | None,
) -> SampleSet:
    """One batch of s points, reusing carried points from the coarser level.

    Reused points count toward the quota (and toward `attempts`, as they
    were walk endpoints at the previous level); only the shortfall walks.
    """
    if carried is not None and carried.shape[0] > 0:
        k = min(carried.shape[0], s)
        head = carried[:k]
    else:
        k = 0
        head = np.empty((0, shifted.base.n), dtype=np.int64)
    if s - k > 0:
        fresh = sample_lattice(shifted, s - k, rng, w, max_attempts=max_attempts)
        return SampleSet(np.vstack([head, fresh.points]), k + fresh.attempts)
    return SampleSet(head.copy(), k)


def chain_length_cap(rect_count: int) -> int:
    return 64 + 2 * math.ceil(math.log2(rect_count)) if rect_count > 1 else 64


def subdivision(P: Polytope, s: int, cfg, rng: Rng) -> Chain:
    """Build the nested chain, sampling s points per level (Algorithm-style
    greedy cuts; cfg supplies r_min, r_max, mu, walk length and caps)."""
    if s < 10 * cfg.gamma:
        raise ValueError("s must be at least 10*gamma")
    rect = get_rect(P)
    rect_n = rect_lattice_count(rect)
    if rect_n == 0:
        raise InfeasibleError("bounding box holds no lattice points")
    cap_l = chain_length_cap(rect_n)
    w = cfg.walk_len if cfg.walk_len is not None else P.n

    levels: list[ChainLevel] = []
    current = rect.to_polytope()
    carried: np.ndarray | None = None
    j = 0  # index of the next original row to incorporate
    i = 0
    while j < P.m:
        if i >= cap_l:
            raise ResourceCapError(
                "chain-length", f"level {i} exceeds 64 + 2*log2|P_0|"
            )
        lrng = rng.child(i)
        shifted = shift_facets(current)
        S_i = _sample_with_reuse(shifted, s, lrng, w, carried, cfg.max_attempts)
        pts = S_i.points
        inside = np.ones(s, dtype=bool)
        cut_rows: list[Halfspace] = []
        disturbs = 0

        while j < P.m:
            nxt = inside & _sat(pts, P.rows[j])
            if nxt.sum() / s > cfg.r_max:
                cut_rows.append(P.rows[j])
                inside = nxt
                j += 1
            else:
                break

        if j < P.m:
            row = P.rows[j]
            nxt = inside & _sat(pts, row)
            if nxt.sum() / s >= cfg.r_min:
                cut_rows.append(row)
                inside = nxt
                j += 1
            else:
                relaxed = None
                for trial in range(cfg.max_disturbs + 1):
                    a_try = row.a if trial == 0 else disturb(row.a, cfg.mu, lrng)
                    disturbs = trial
                    dots = pts[inside].astype(float) @ a_try
                    bp = _scan_threshold(dots, s, row.b, cfg.r_min, cfg.r_max)
                    if bp is not None:
                        relaxed = Halfspace(a_try, bp)
                        break
                if relaxed is None:
                    raise ResourceCapError(
                        "disturbs", f"{cfg.max_disturbs} disturb rounds at level {i}"
                    )
                cut_rows.append(relaxed)
                inside &= _sat(pts, relaxed)
                # j stays: the original row is re-tried on the shrunken level

        levels.append(ChainLevel(current, cut_rows, S_i, shifted, lrng, disturbs))
        carried = pts[inside]
        current = current.with_rows(cut_rows)
        i += 1

    final = ChainLevel(
        current, [], SampleSet(np.empty((0, P.n), dtype=np.int64), 0), None, rng.child(i)
    )
    levels.append(final)
    return Chain(levels, rect_n)
