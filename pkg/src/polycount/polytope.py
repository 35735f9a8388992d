"""Core geometric types: halfspace systems, membership tests, lattice rounding.

A constraint system ``A x <= b`` is held as an ordered list of halfspace
rows. Row order is preserved exactly as parsed: the chain construction
consumes constraints in file order, so order is semantically relevant.

Membership tests come in two flavours. ``contains_real`` takes an explicit
tolerance; ``contains_lattice`` uses a fixed relative band of 1e-9 per row,
wide enough to absorb the affine round-trip error introduced by the sampler
but far too narrow to admit a wrong lattice point for sanely scaled input.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, ParseError

LATTICE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Halfspace:
    """One row ``a . x <= b``."""

    a: np.ndarray
    b: float

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        a.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", float(self.b))
        if a.ndim != 1 or a.size == 0:
            raise DimensionMismatchError("halfspace normal must be a nonempty vector")
        if not np.any(a != 0.0):
            raise ValueError("zero coefficient row")


class Polytope:
    """H-representation {x : A x <= b} with m rows in fixed order."""

    def __init__(self, rows: list[Halfspace]):
        if not rows:
            raise ValueError("polytope needs at least one row")
        n = rows[0].a.size
        for r in rows:
            if r.a.size != n:
                raise DimensionMismatchError(
                    f"row dimension {r.a.size} != {n}"
                )
        self.rows = list(rows)
        self.m = len(rows)
        self.n = n
        self.A = np.array([r.a for r in rows], dtype=float)
        self.b = np.array([r.b for r in rows], dtype=float)
        self.A.setflags(write=False)
        self.b.setflags(write=False)
        # fixed per-row band for lattice membership
        self._lattice_tol = LATTICE_TOL * (1.0 + np.abs(self.b))

    @classmethod
    def from_arrays(cls, A, b) -> "Polytope":
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        return cls([Halfspace(A[i], b[i]) for i in range(A.shape[0])])

    def with_rows(self, extra: list[Halfspace]) -> "Polytope":
        """New polytope with ``extra`` appended after the existing rows."""
        return Polytope(self.rows + list(extra))

    def __repr__(self):
        return f"Polytope(m={self.m}, n={self.n})"


def contains_real(P: Polytope, x, tol: float = 0.0) -> bool:
    """True iff a_i.x <= b_i + tol*(1+|b_i|) for every row."""
    x = np.asarray(x, dtype=float)
    if x.shape != (P.n,):
        raise DimensionMismatchError(f"point has dim {x.shape}, expected ({P.n},)")
    if tol < 0:
        raise ValueError("tol must be >= 0")
    return bool(np.all(P.A @ x <= P.b + tol * (1.0 + np.abs(P.b))))


def contains_lattice(P: Polytope, p) -> bool:
    """Lattice membership with the fixed 1e-9 relative band per row."""
    p = np.asarray(p)
    if p.shape != (P.n,):
        raise DimensionMismatchError(f"point has dim {p.shape}, expected ({P.n},)")
    return bool(np.all(P.A @ p.astype(float) <= P.b + P._lattice_tol))


def contains_lattice_many(P: Polytope, pts: np.ndarray) -> np.ndarray:
    """Vectorized contains_lattice over an (k, n) array of points."""
    if pts.size == 0:
        return np.zeros(0, dtype=bool)
    vals = pts.astype(float) @ P.A.T
    return np.all(vals <= P.b + P._lattice_tol, axis=1)


def round_real(x) -> np.ndarray:
    """Coordinate-wise nearest integer; exact halves round away from zero."""
    x = np.asarray(x, dtype=float)
    return np.copysign(np.floor(np.abs(x) + 0.5), x).astype(np.int64)


# ---------------------------------------------------------------------------
# text format
#
# native:        first data line "m n", then m lines "a_1 ... a_n b".
# dense-matrix:  no header; every data line "a_1 ... a_n b", shape inferred.
# '#' starts a comment (to end of line); blank lines ignored; LF or CRLF.
# ---------------------------------------------------------------------------


def _data_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _parse_row(tokens: list[str], n: int, lineno: int) -> Halfspace:
    if len(tokens) != n + 1:
        raise ParseError(
            f"expected {n + 1} numbers, got {len(tokens)}", lineno
        )
    try:
        vals = [float(t) for t in tokens]
    except ValueError:
        raise ParseError("malformed number", lineno) from None
    a = np.array(vals[:-1])
    if not np.any(a != 0.0):
        raise ParseError("zero coefficient row", lineno)
    if not np.all(np.isfinite(vals)):
        raise ParseError("non-finite coefficient", lineno)
    return Halfspace(a, vals[-1])


def parse_polytope(text: str, format: str = "native") -> Polytope:
    """Parse a halfspace system from text. format is 'native' or 'dense-matrix'."""
    if format not in ("native", "dense-matrix"):
        raise ValueError(f"unknown format {format!r}")
    lines = list(_data_lines(text))
    if not lines:
        raise ParseError("empty input")

    if format == "native":
        lineno, header = lines[0]
        tokens = header.split()
        if len(tokens) != 2:
            raise ParseError("header must be 'm n'", lineno)
        try:
            m, n = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise ParseError("header must be 'm n'", lineno) from None
        if m < 1 or n < 1:
            raise ParseError("m and n must be positive", lineno)
        body = lines[1:]
        if len(body) < m:
            raise ParseError(f"expected {m} rows, found {len(body)}")
        if len(body) > m:
            raise ParseError("trailing data", body[m][0])
        rows = [_parse_row(l.split(), n, ln) for ln, l in body]
    else:
        first_ln, first = lines[0]
        n = len(first.split()) - 1
        if n < 1:
            raise ParseError("row needs at least one coefficient and a bound", first_ln)
        rows = [_parse_row(l.split(), n, ln) for ln, l in lines]
    return Polytope(rows)


def serialize_polytope(P: Polytope) -> str:
    """Native-format text; floats use repr so parse(serialize(P)) == P exactly."""
    out = [f"{P.m} {P.n}"]
    for r in P.rows:
        out.append(" ".join(repr(float(v)) for v in r.a) + " " + repr(float(r.b)))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# front-end loader with relational operators
#
# Rows may carry an explicit operator: "a_1 ... a_n OP b" with
# OP in {<=, <, >=, >, =}. Everything is rewritten to <= rows:
# >=, > flip sign; = splits into two rows; strict inequalities over integer
# rows tighten the bound by 1, otherwise they are kept non-strict with a
# warning (recorded in the returned metadata).
# ---------------------------------------------------------------------------

_OPS = ("<=", ">=", "=", "<", ">")


@dataclass
class LoadResult:
    polytope: Polytope
    warnings: list[str] = field(default_factory=list)
    strict_tightened_rows: list[int] = field(default_factory=list)
    equality_split_rows: list[int] = field(default_factory=list)


def _is_integral(vals) -> bool:
    return all(float(v).is_integer() for v in vals)


def load_constraints(text: str, format: str = "native") -> LoadResult:
    """Parse text that may contain relational operators into <=-only rows."""
    lines = list(_data_lines(text))
    if not lines:
        raise ParseError("empty input")

    if format == "native":
        lineno, header = lines[0]
        tokens = header.split()
        if len(tokens) != 2:
            raise ParseError("header must be 'm n'", lineno)
        m, n = int(tokens[0]), int(tokens[1])
        body = lines[1:]
        if len(body) != m:
            raise ParseError(f"expected {m} rows, found {len(body)}")
    else:
        body = lines
        toks0 = body[0][1].split()
        n = len(toks0) - (2 if any(t in _OPS for t in toks0) else 1)

    warnings: list[str] = []
    strict_tightened: list[int] = []
    equality_split: list[int] = []
    rows: list[Halfspace] = []
    for idx, (ln, line) in enumerate(body, start=1):
        tokens = line.split()
        op = "<="
        if len(tokens) >= 2 and tokens[-2] in _OPS:
            op = tokens[-2]
            tokens = tokens[:-2] + tokens[-1:]
        if len(tokens) != n + 1:
            raise ParseError(f"expected {n + 1} numbers, got {len(tokens)}", ln)
        try:
            vals = [float(t) for t in tokens]
        except ValueError:
            raise ParseError("malformed number", ln) from None
        a = np.array(vals[:-1])
        b = vals[-1]
        if not np.any(a != 0.0):
            raise ParseError("zero coefficient row", ln)

        if op in (">=", ">"):
            a, b = -a, -b
            op = "<=" if op == ">=" else "<"
        if op == "<":
            if _is_integral(a) and _is_integral([b]):
                b -= 1.0
                strict_tightened.append(idx)
            else:
                warnings.append(
                    f"row {idx}: strict inequality with non-integer data "
                    "treated as non-strict"
                )
            op = "<="
        if op == "=":
            rows.append(Halfspace(a, b))
            rows.append(Halfspace(-a, -b))
            equality_split.append(idx)
        else:
            rows.append(Halfspace(a, b))
    return LoadResult(
        polytope=Polytope(rows),
        warnings=warnings,
        strict_tightened_rows=strict_tightened,
        equality_split_rows=equality_split,
    )
