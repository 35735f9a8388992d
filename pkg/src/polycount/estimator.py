"""Outer counting loop: per-level ratios, grouped variance, dynamic stop.

The count factorizes as |box| * prod_i (fraction of level-i samples that
survive level i+1). Each level's fraction estimate r_i carries a grouped
variance estimate v_i (split the sample set into N equal groups in arrival
order; v_i is the variance of the group means divided by N). Sampling
rounds continue until

    prod_i (v_i + r_i^2) - r^2  <=  delta * epsilon^2 * r^2,

the Chebyshev condition for the product estimate to sit within a relative
error epsilon with probability at least 1 - delta.

Group size is pinned to s/gamma: after the chain's initial batch plus k
rounds, every level holds (k+1)*s points split into (k+1)*gamma groups.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .chain import Chain, _sample_with_reuse, subdivision
from .errors import ResourceCapError
from .polytope import Polytope, contains_lattice_many
from .rng import Rng
from .sampler import SampleSet
from .simplex import get_rect, rect_lattice_count

_LOG_SPACE_LEVELS = 30


@dataclass(frozen=True)
class RunConfig:
    """Every tunable of the counting pipeline.

    s defaults to 2/(delta*epsilon^2) rounded up to a multiple of gamma,
    the sample count per level and round. walk_len None means the ambient
    dimension of the instance.
    """

    epsilon: float = 0.2
    delta: float = 0.1
    s: int | None = None
    gamma: int = 10
    walk_len: int | None = None
    r_min: float = 0.4
    r_max: float = 0.6
    mu: float = 0.005
    seed: int = 0
    max_rounds: int = 64
    max_attempts: int | None = None
    max_disturbs: int = 100

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must be in (0, 1)")
        if not 0 < self.delta < 1:
            raise ValueError("delta must be in (0, 1)")
        if self.gamma < 2:
            raise ValueError("gamma must be >= 2")
        if not self.r_min < 0.5 < self.r_max:
            raise ValueError("need r_min < 0.5 < r_max")
        if self.mu <= 0:
            raise ValueError("mu must be > 0")
        if self.s is None:
            object.__setattr__(self, "s", default_s(self.epsilon, self.delta, self.gamma))
        if self.s < self.gamma or self.s % self.gamma:
            raise ValueError("s must be a positive multiple of gamma")


def default_s(epsilon: float, delta: float, gamma: int) -> int:
    """2/(delta*epsilon^2), rounded up to a multiple of gamma."""
    raw = 2.0 / (delta * epsilon * epsilon)
    return int(math.ceil(raw / gamma - 1e-9)) * gamma


@dataclass(frozen=True)
class RatioStats:
    r_i: float
    v_i: float
    group_ratios: np.ndarray
    N: int


@dataclass(frozen=True)
class StopDecision:
    stop: bool
    r: float
    v: float


@dataclass
class CountEstimate:
    count: float
    r: float
    v: float
    levels: list[RatioStats]
    rounds: int
    total_samples: int
    rect_count: int
    chain_length: int
    metadata: dict = field(default_factory=dict)


def ratio_stats(S: SampleSet, P_next: Polytope, N: int) -> RatioStats:
    """Survival fraction of S in P_next with its N-group variance estimate."""
    if N < 2:
        raise ValueError("N must be >= 2")
    k = S.accepted
    if k == 0 or k % N:
        raise ValueError(f"cannot split {k} samples into {N} equal groups")
    member = contains_lattice_many(P_next, S.points).astype(float)
    groups = member.reshape(N, k // N).mean(axis=1)
    r_i = float(member.mean())
    v_i = float(np.sum((groups - r_i) ** 2) / (N * (N - 1)))
    return RatioStats(r_i, v_i, groups, N)


def stopping_satisfied(
    levels: list[RatioStats], epsilon: float, delta: float
) -> StopDecision:
    """Evaluate the variance product against the Chebyshev bound.

    Requires every r_i > 0 (a zero ratio makes the criterion vacuous); the
    caller is expected to keep sampling instead of asking in that case.
    Products switch to log space beyond 30 levels to dodge underflow.
    """
    r_is = np.array([st.r_i for st in levels])
    v_is = np.array([st.v_i for st in levels])
    if np.any(r_is <= 0):
        raise ValueError("stopping criterion undefined with a zero ratio")
    if len(levels) <= _LOG_SPACE_LEVELS:
        r = float(np.prod(r_is))
        v = float(np.prod(v_is + r_is**2) - r * r)
        stop = v <= delta * epsilon * epsilon * r * r
        return StopDecision(stop, r, v)
    log_r = float(np.sum(np.log(r_is)))
    excess = math.expm1(float(np.sum(np.log1p(v_is / r_is**2))))
    stop = excess <= delta * epsilon * epsilon
    r = math.exp(log_r)
    return StopDecision(stop, r, excess * math.exp(2 * log_r))


def estimate(P: Polytope, cfg: RunConfig) -> CountEstimate:
    """Approximate |P intersect Z^n| with the (epsilon, delta) guarantee."""
    rect = get_rect(P)
    rect_n = rect_lattice_count(rect)
    if rect_n == 0:
        return CountEstimate(
            0.0, 0.0, 0.0, [], 0, 0, 0, 0, {"empty_bounding_box": True}
        )

    root = Rng(cfg.seed)
    chain = subdivision(P, cfg.s, cfg, root)
    l = chain.l
    w = cfg.walk_len if cfg.walk_len is not None else P.n

    pools = [chain.levels[i].samples.points for i in range(l)]
    attempts = [chain.levels[i].samples.attempts for i in range(l)]

    for rounds in range(1, cfg.max_rounds + 1):
        carried = None
        for i in range(l):
            lev = chain.levels[i]
            try:
                batch = _sample_with_reuse(
                    lev.shifted, cfg.s, lev.rng, w, carried, cfg.max_attempts
                )
            except ResourceCapError as e:
                if e.cap == "attempts":
                    raise ResourceCapError(
                        "attempts",
                        f"level {i}: count indistinguishable from zero ({e})",
                    ) from e
                raise
            pools[i] = np.vstack([pools[i], batch.points])
            attempts[i] += batch.attempts
            nxt = chain.levels[i + 1].polytope
            carried = batch.points[contains_lattice_many(nxt, batch.points)]

        N = (rounds + 1) * cfg.gamma
        stats = [
            ratio_stats(
                SampleSet(pools[i], attempts[i]),
                chain.levels[i + 1].polytope,
                N,
            )
            for i in range(l)
        ]
        if all(st.r_i > 0 for st in stats):
            dec = stopping_satisfied(stats, cfg.epsilon, cfg.delta)
            if dec.stop:
                return _finish(chain, stats, dec, rounds, pools, attempts, cfg)
    raise ResourceCapError(
        "rounds", f"criterion not met within {cfg.max_rounds} rounds"
    )


def _finish(chain, stats, dec, rounds, pools, attempts, cfg) -> CountEstimate:
    rect_n = chain.rect_count
    if rect_n < 2**52:
        count = rect_n * dec.r
    else:
        log_r = sum(math.log(st.r_i) for st in stats)
        count = math.exp(math.log(rect_n) + log_r) if dec.r >= 0 else 0.0
    total = int(sum(p.shape[0] for p in pools))
    att = int(sum(attempts))
    meta = {
        "acceptance_rate": (total / att) if att else 1.0,
        "weak_rounding": any(
            lev.shifted is not None and lev.shifted.map.weak for lev in chain.levels
        ),
        "disturb_rounds": int(sum(lev.disturb_rounds for lev in chain.levels)),
        "walk_attempts": att,
    }
    return CountEstimate(
        float(count), dec.r, dec.v, stats, rounds, total, rect_n, chain.l, meta
    )
