"""Benchmark instance generators and the (epsilon, delta)-bound experiment.

Two families: random integer-coefficient polytopes clipped to a box, and
long thin boxes under a random (Haar) rotation. Both are reproducible from
(family, parameters, seed). The bound experiment runs the estimator
repeatedly against oracle counts and reports per-run relative errors plus
within-bound frequencies as CSV or JSON.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .errors import ResourceCapError
from .estimator import CountEstimate, RunConfig, estimate
from .oracle import exact_count
from .polytope import Halfspace, Polytope, contains_lattice, round_real
from .rng import Rng
from .simplex import chebyshev_center, get_rect, rect_lattice_count

_COEF_RANGE = 10  # random row coefficients are integers in [-10, 10]


def gen_random(m: int, n: int, lam: int, rng: Rng) -> Polytope:
    """m random integer rows plus the box -lam <= x_i <= lam.

    Draws are rejected until the polytope is LP-feasible and provably holds
    a lattice point (rounded Chebyshev center, or oracle when the box is
    small); gives up after 100 infeasible draws.
    """
    if m < 1 or n < 1 or lam < 1:
        raise ValueError("m, n, lambda must all be >= 1")
    gen = rng._gen
    box_A = np.vstack([np.eye(n), -np.eye(n)])
    box_b = np.full(2 * n, float(lam))
    for _ in range(100):
        A = gen.integers(-_COEF_RANGE, _COEF_RANGE + 1, size=(m, n)).astype(float)
        for i in range(m):
            while not np.any(A[i]):
                A[i] = gen.integers(-_COEF_RANGE, _COEF_RANGE + 1, size=n)
        b = gen.integers(-lam, lam + 1, size=m).astype(float)
        P = Polytope.from_arrays(np.vstack([A, box_A]), np.concatenate([b, box_b]))
        if _has_lattice_point(P):
            return P
    raise ResourceCapError("redraws", "100 infeasible random draws")


def _has_lattice_point(P: Polytope) -> bool:
    try:
        center, radius = chebyshev_center(P)
    except Exception:
        return False
    if radius <= 0:
        return False
    if contains_lattice(P, round_real(center)):
        return True
    if rect_lattice_count(get_rect(P)) <= 10**6:
        return exact_count(P).count > 0
    return False


def gen_thin_rect(n: int, tau: float, rng: Rng, rotate: bool = True) -> Polytope:
    """Box [-1000, 1000] x [-tau, tau]^(n-1), randomly rotated.

    rotate=False keeps the axis alignment (debug; the count is then the
    closed form 2001 * (2*floor(tau)+1)^(n-1) for integer-free bounds).
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if tau <= 0:
        raise ValueError("tau must be > 0")
    if rotate:
        G = rng._gen.standard_normal((n, n))
        Q, R = np.linalg.qr(G)
        Q = Q * np.sign(np.diag(R))
    else:
        Q = np.eye(n)
    bounds = np.full(n, float(tau))
    bounds[0] = 1000.0
    rows = []
    for k in range(n):
        axis = Q[:, k]
        rows.append(Halfspace(axis, bounds[k]))
        rows.append(Halfspace(-axis, bounds[k]))
    return Polytope(rows)


@dataclass(frozen=True)
class BenchInstance:
    instance_id: str
    polytope: Polytope
    exact: int


@dataclass
class RunRecord:
    instance_id: str
    seed: int
    run_idx: int
    exact_count: int
    estimate: float
    rel_error: float
    within_bound: bool
    rounds: int
    total_samples: int
    chain_length: int
    wall_ms: float


@dataclass
class BoundReport:
    epsilon: float
    delta: float
    rows: list[RunRecord] = field(default_factory=list)

    @property
    def aggregate_frequency(self) -> float:
        if not self.rows:
            return float("nan")
        return sum(r.within_bound for r in self.rows) / len(self.rows)

    def instance_frequencies(self) -> dict[str, float]:
        byid: dict[str, list[bool]] = {}
        for r in self.rows:
            byid.setdefault(r.instance_id, []).append(r.within_bound)
        return {k: sum(v) / len(v) for k, v in byid.items()}

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            [
                "instance_id",
                "seed",
                "run_idx",
                "exact_count",
                "estimate",
                "rel_error",
                "within_bound",
                "rounds",
                "total_samples",
                "chain_length",
                "wall_ms",
            ]
        )
        for r in self.rows:
            writer.writerow(
                [
                    r.instance_id,
                    r.seed,
                    r.run_idx,
                    r.exact_count,
                    repr(r.estimate),
                    repr(r.rel_error),
                    int(r.within_bound),
                    r.rounds,
                    r.total_samples,
                    r.chain_length,
                    repr(r.wall_ms),
                ]
            )
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {
                "epsilon": self.epsilon,
                "delta": self.delta,
                "aggregate_frequency": self.aggregate_frequency,
                "instance_frequencies": self.instance_frequencies(),
                "runs": [asdict(r) for r in self.rows],
            },
            indent=2,
        )


def run_seed(base_seed: int, instance_idx: int, run_idx: int) -> int:
    """Stable per-run seed derived from the experiment seed."""
    ss = np.random.SeedSequence([base_seed, instance_idx, run_idx])
    return int(ss.generate_state(1)[0])


def bound_experiment(
    instances: list[BenchInstance], cfg: RunConfig, repeats: int
) -> BoundReport:
    """Run the estimator `repeats` times per instance against oracle counts."""
    report = BoundReport(cfg.epsilon, cfg.delta)
    for idx, inst in enumerate(instances):
        for run_idx in range(repeats):
            seed = run_seed(cfg.seed, idx, run_idx)
            run_cfg = replace(cfg, seed=seed)
            t0 = time.perf_counter()
            est: CountEstimate = estimate(inst.polytope, run_cfg)
            wall = (time.perf_counter() - t0) * 1000.0
            rel = est.count / inst.exact if inst.exact else float("inf")
            report.rows.append(
                RunRecord(
                    inst.instance_id,
                    seed,
                    run_idx,
                    inst.exact,
                    est.count,
                    rel,
                    bool(1 - cfg.epsilon <= rel <= 1 + cfg.epsilon),
                    est.rounds,
                    est.total_samples,
                    est.chain_length,
                    wall,
                )
            )
    return report


def suite_instances(
    family: str, base_seed: int = 0, oracle_limit: int = 2 * 10**14
) -> list[BenchInstance]:
    """Built-in reproducible suites with oracle counts <= 1e6.

    'random': n in 3..6, lambda in {2,4,8}, m = n, two instances each.
    'thinrect': n in {3,4}, tau in {1,2,3}, two rotations each.
    'mixed': both.
    For each parameter combination the generator scans seeds deterministically
    and keeps the first instances whose oracle count is in [1, 1e6].
    """
    out: list[BenchInstance] = []
    if family in ("random", "mixed"):
        for n in (3, 4, 5, 6):
            for lam in (2, 4, 8):
                out.extend(
                    _scan_family(
                        f"rand-n{n}-l{lam}",
                        lambda seed: gen_random(n, n, lam, Rng(seed, (9, n, lam))),
                        base_seed,
                        2,
                        oracle_limit,
                    )
                )
    if family in ("thinrect", "mixed"):
        for n in (3, 4):
            for tau in (1, 2, 3):
                out.extend(
                    _scan_family(
                        f"thin-n{n}-t{tau}",
                        lambda seed: gen_thin_rect(n, float(tau), Rng(seed, (7, n, tau))),
                        base_seed,
                        2,
                        oracle_limit,
                    )
                )
    if not out:
        raise ValueError(f"unknown family {family!r}")
    return out


def _scan_family(prefix, build, base_seed, want, oracle_limit):
    found = []
    seed = base_seed
    while len(found) < want and seed < base_seed + 50:
        P = build(seed)
        res = exact_count(P, limit=oracle_limit)
        if 1 <= res.count <= 10**6:
            found.append(BenchInstance(f"{prefix}-s{seed}", P, res.count))
        seed += 1
    if len(found) < want:
        raise ResourceCapError("redraws", f"could not build suite for {prefix}")
    return found
