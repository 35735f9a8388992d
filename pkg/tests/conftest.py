from datetime import timedelta

import numpy as np
import pytest
from hypothesis import settings

from polycount import Polytope, contains_lattice, parse_polytope

settings.register_profile(
    "default",
    max_examples=40,
    deadline=timedelta(seconds=30),
    derandomize=True,
)
settings.load_profile("default")


TRIANGLE_TEXT = "3 2\n-1 0 0\n0 -1 0\n1 1 2"  # 6 lattice points


@pytest.fixture
def triangle() -> Polytope:
    return parse_polytope(TRIANGLE_TEXT)


def box_polytope(lo, hi) -> Polytope:
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    n = lo.size
    A = np.vstack([np.eye(n), -np.eye(n)])
    b = np.concatenate([hi, -lo])
    return Polytope.from_arrays(A, b)


@pytest.fixture
def box09_2d() -> Polytope:
    return box_polytope([0, 0], [9, 9])


def brute_force_count(P: Polytope, lo, hi) -> int:
    """Reference lattice counter: test every box point with contains_lattice."""
    ranges = [np.arange(l, h + 1) for l, h in zip(lo, hi)]
    grid = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, P.n)
    return int(sum(contains_lattice(P, p) for p in grid))
