import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from polycount import (
    DimensionMismatchError,
    ParseError,
    Polytope,
    contains_lattice,
    contains_real,
    load_constraints,
    parse_polytope,
    round_real,
    serialize_polytope,
)


class TestParse:
    def test_two_by_two(self):
        P = parse_polytope("2 2\n1 0 5\n0 1 5")
        assert (P.m, P.n) == (2, 2)
        assert np.array_equal(P.A, [[1, 0], [0, 1]])
        assert np.array_equal(P.b, [5, 5])

    def test_smallest(self):
        P = parse_polytope("1 1\n1 1")
        assert (P.m, P.n) == (1, 1)

    def test_zero_row_rejected(self):
        with pytest.raises(ParseError, match="zero coefficient row at line 2"):
            parse_polytope("1 2\n0 0 3")

    def test_syntax_error_carries_line(self):
        with pytest.raises(ParseError, match="line 3"):
            parse_polytope("2 2\n1 0 5\n0 1")

    def test_comments_and_crlf(self):
        P = parse_polytope("# heading\r\n2 2 # m n\r\n1 0 5\r\n0 1 5 # row\r\n")
        assert (P.m, P.n) == (2, 2)

    def test_missing_rows(self):
        with pytest.raises(ParseError, match="expected 2 rows"):
            parse_polytope("2 2\n1 0 5")

    def test_trailing_data(self):
        with pytest.raises(ParseError, match="trailing"):
            parse_polytope("1 2\n1 0 5\n0 1 5")

    def test_dense_matrix_headerless(self):
        P = parse_polytope("1 0 5\n0 1 5", format="dense-matrix")
        assert (P.m, P.n) == (2, 2)

    def test_row_dimension_mismatch_in_dense(self):
        with pytest.raises(ParseError, match="line 2"):
            parse_polytope("1 0 5\n0 1", format="dense-matrix")


class TestMembership:
    def test_boundary_inclusive(self):
        P = parse_polytope("2 2\n1 0 5\n0 1 5")
        assert contains_real(P, (5.0, 5.0), 0.0)

    def test_outside_beyond_tolerance(self):
        P = parse_polytope("2 2\n1 0 5\n0 1 5")
        assert not contains_real(P, (5.0000001, 0.0), 1e-9)

    def test_inside_tolerance_band(self):
        P = parse_polytope("2 2\n1 0 5\n0 1 5")
        assert contains_real(P, (5 + 1e-12, 0.0), 1e-9)

    def test_lattice_examples(self, triangle):
        assert contains_lattice(triangle, (1, 1))
        assert not contains_lattice(triangle, (2, 1))
        assert contains_lattice(triangle, (0, 0))

    def test_dim_mismatch(self, triangle):
        with pytest.raises(DimensionMismatchError):
            contains_real(triangle, (1.0, 2.0, 3.0), 0.0)

    @given(
        A=hnp.arrays(np.int64, (4, 3), elements=st.integers(-9, 9)),
        b=hnp.arrays(np.int64, (4,), elements=st.integers(-20, 20)),
        p=hnp.arrays(np.int64, (3,), elements=st.integers(-6, 6)),
    )
    def test_real_and_lattice_agree_on_integer_data(self, A, b, p):
        # away from (here: exactly on) boundaries the two tests coincide
        if not np.all(np.any(A != 0, axis=1)):
            return
        P = Polytope.from_arrays(A.astype(float), b.astype(float))
        assert contains_real(P, p.astype(float), 0.0) == contains_lattice(P, p)


class TestRounding:
    def test_toward_nearest(self):
        assert np.array_equal(round_real((0.4, -0.4)), (0, 0))

    def test_half_away_from_zero(self):
        assert np.array_equal(round_real((0.5, -0.5)), (1, -1))

    def test_identity_on_integers(self):
        assert np.array_equal(round_real((2.0, 3.0)), (2, 3))

    @given(hnp.arrays(np.float64, (4,), elements=st.floats(-1e9, 1e9)))
    def test_idempotent(self, x):
        q = round_real(x)
        assert np.array_equal(round_real(q.astype(float)), q)


class TestSerialize:
    @given(
        A=hnp.arrays(
            np.float64,
            (3, 2),
            elements=st.floats(-100, 100, allow_subnormal=False),
        ),
        b=hnp.arrays(np.float64, (3,), elements=st.floats(-100, 100)),
    )
    def test_parse_serialize_parse_identity(self, A, b):
        if not np.all(np.any(A != 0, axis=1)):
            return
        P = Polytope.from_arrays(A, b)
        Q = parse_polytope(serialize_polytope(P))
        assert np.array_equal(P.A, Q.A)
        assert np.array_equal(P.b, Q.b)


class TestOperatorRewrite:
    def test_ge_flips(self):
        res = load_constraints("1 2\n1 1 >= 3")
        P = res.polytope
        assert np.array_equal(P.A, [[-1, -1]])
        assert P.b[0] == -3

    def test_equality_splits(self):
        res = load_constraints("1 2\n2 1 = 4")
        assert res.polytope.m == 2
        assert res.equality_split_rows == [1]

    def test_strict_integer_tightens(self):
        res = load_constraints("1 2\n1 1 < 3")
        assert res.polytope.b[0] == 2
        assert res.strict_tightened_rows == [1]

    def test_strict_nonint_warns(self):
        res = load_constraints("1 2\n1 1 < 2.5")
        assert res.polytope.b[0] == 2.5
        assert res.warnings

    def test_strict_gt_tightens_after_flip(self):
        # x1 > 1 over Z becomes -x1 <= -2
        res = load_constraints("1 1\n1 > 1")
        assert np.array_equal(res.polytope.A, [[-1]])
        assert res.polytope.b[0] == -2

    def test_plain_rows_untouched(self):
        res = load_constraints("2 2\n1 0 5\n0 1 5")
        assert res.polytope.m == 2
        assert not res.warnings
