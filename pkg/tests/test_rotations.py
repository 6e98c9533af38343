import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qambss.rotations import (
    PlaneRotation,
    apply_normalization,
    apply_rotation_pair,
    classify_pair,
    complex_givens,
    complex_hyperbolic,
    complex_to_separator,
    enforce_structure,
    identity_separator,
    make_pair,
    partner_rows,
    separator_to_complex,
    stack,
    structure_residual,
    unstack,
)

N = 3
params = st.floats(-1.0, 1.0, allow_nan=False)
streams = st.tuples(st.integers(0, N - 1), st.integers(0, N - 1)).filter(lambda t: t[0] != t[1])


def pair_matrix(kind, family, p, q, x, n=N):
    c, s = (np.cos(x), np.sin(x)) if kind == "givens" else (np.cosh(x), np.sinh(x))
    a, b = make_pair(kind, family, p, q, n, c, s)
    if family == "phase":
        return a.matrix(2 * n)
    return b.matrix(2 * n) @ a.matrix(2 * n)


class TestStacking:
    def test_round_trip(self, rng):
        z = rng.standard_normal((3, 7)) + 1j * rng.standard_normal((3, 7))
        assert np.array_equal(unstack(stack(z)), z)

    def test_layout(self):
        z = np.array([[1 + 2j, 3 - 1j], [0.5j, -2.0]])
        assert np.array_equal(stack(z), [[1, 3], [0, -2], [2, -1], [0.5, 0]])

    def test_separator_round_trip(self, rng):
        v = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        sep = complex_to_separator(v)
        assert structure_residual(sep) == 0.0
        assert np.array_equal(separator_to_complex(sep), v)

    def test_separator_acts_like_complex_matrix(self, rng):
        v = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        y = rng.standard_normal((3, 5)) + 1j * rng.standard_normal((3, 5))
        assert np.allclose(complex_to_separator(v) @ stack(y), stack(v @ y))

    def test_enforce_structure_projects(self, rng):
        sep = complex_to_separator(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
        noisy = sep + 1e-3 * rng.standard_normal(sep.shape)
        enforce_structure(noisy)
        assert structure_residual(noisy) == 0.0
        assert np.abs(noisy - sep).max() < 1e-2


class TestPlaneRotation:
    def test_identity_is_noop(self, rng):
        x = rng.standard_normal((6, 10))
        y = x.copy()
        PlaneRotation.givens(0, 1, 0.0).apply(y)
        PlaneRotation.hyperbolic(2, 4, 0.0).apply(y)
        assert np.array_equal(x, y)

    @given(theta=params)
    def test_apply_matches_matrix(self, theta):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((6, 4))
        for rot in (PlaneRotation.givens(1, 4, theta), PlaneRotation.hyperbolic(0, 5, theta)):
            y = x.copy()
            rot.apply(y)
            assert np.allclose(y, rot.matrix(6) @ x, atol=1e-12)

    @given(x=params)
    def test_parameter_round_trip(self, x):
        assert PlaneRotation.givens(0, 1, x).parameter == pytest.approx(x, abs=1e-12)
        assert PlaneRotation.hyperbolic(0, 1, x).parameter == pytest.approx(x, abs=1e-12)

    @pytest.mark.parametrize(
        "kind, c, s",
        [("givens", 1.0, 0.1), ("hyperbolic", 1.0, 0.5), ("normalization", -1.0, 0.0), ("shear", 1.0, 0.0)],
    )
    def test_inconsistent_parameters(self, kind, c, s):
        with pytest.raises(ValueError):
            PlaneRotation(kind, 0, 1, c, s)

    def test_same_rows_rejected(self):
        with pytest.raises(ValueError):
            PlaneRotation.givens(2, 2, 0.1)


class TestPairs:
    @settings(max_examples=50, deadline=None)
    @given(pq=streams, x=params, kind=st.sampled_from(["givens", "hyperbolic"]), family=st.sampled_from(["direct", "cross"]))
    def test_structure_preserved(self, pq, x, kind, family):
        m = pair_matrix(kind, family, *pq, x)
        assert structure_residual(m) <= 1e-10

    @given(p=st.integers(0, N - 1), x=params)
    def test_phase_structure(self, p, x):
        assert structure_residual(pair_matrix("givens", "phase", p, p, x)) <= 1e-10

    @given(pq=streams, theta=params)
    def test_direct_givens_is_real_complex_givens(self, pq, theta):
        expected = complex_to_separator(complex_givens(N, *pq, theta, 0.0))
        assert np.abs(pair_matrix("givens", "direct", *pq, theta) - expected).max() <= 1e-12

    @given(pq=streams, theta=params)
    def test_cross_givens_is_quarter_phase_givens(self, pq, theta):
        expected = complex_to_separator(complex_givens(N, *pq, theta, -np.pi / 2))
        assert np.abs(pair_matrix("givens", "cross", *pq, theta) - expected).max() <= 1e-12

    @given(pq=streams, gamma=params)
    def test_direct_hyperbolic_is_real_complex_hyperbolic(self, pq, gamma):
        expected = complex_to_separator(complex_hyperbolic(N, *pq, gamma, 0.0))
        assert np.abs(pair_matrix("hyperbolic", "direct", *pq, gamma) - expected).max() <= 1e-12

    @given(pq=streams, gamma=params)
    def test_cross_hyperbolic_is_quarter_phase_hyperbolic(self, pq, gamma):
        expected = complex_to_separator(complex_hyperbolic(N, *pq, gamma, -np.pi / 2))
        assert np.abs(pair_matrix("hyperbolic", "cross", *pq, gamma) - expected).max() <= 1e-12

    @given(p=st.integers(0, N - 1), theta=params)
    def test_phase_rotation_is_complex_phase(self, p, theta):
        v = np.eye(N, dtype=complex)
        v[p, p] = np.exp(-1j * theta)
        assert np.abs(pair_matrix("givens", "phase", p, p, theta) - complex_to_separator(v)).max() <= 1e-12

    @given(pq=streams, theta=params, family=st.sampled_from(["direct", "cross"]))
    def test_givens_pair_preserves_norm(self, pq, theta, family):
        x = np.random.default_rng(1).standard_normal((2 * N, 20))
        y = pair_matrix("givens", family, *pq, theta) @ x
        assert np.linalg.norm(y) == pytest.approx(np.linalg.norm(x), rel=1e-12)

    @given(pq=streams, gamma=params, family=st.sampled_from(["direct", "cross"]))
    def test_hyperbolic_preserves_row_difference(self, pq, gamma, family):
        x = np.random.default_rng(2).standard_normal((2 * N, 20))
        y = x.copy()
        c, s = np.cosh(gamma), np.sinh(gamma)
        for rot in make_pair("hyperbolic", family, *pq, N, c, s):
            before = x[rot.p] ** 2 - x[rot.q] ** 2
            y = x.copy()
            rot.apply(y)
            assert np.allclose(y[rot.p] ** 2 - y[rot.q] ** 2, before, rtol=1e-9, atol=1e-9)

    def test_partner_rows(self):
        assert partner_rows(0, 2, 3) == (3, 5)
        assert partner_rows(0, 5, 3) == (2, 3)
        assert partner_rows(1, 4, 3) is None
        with pytest.raises(ValueError):
            partner_rows(3, 4, 3)

    def test_classify(self):
        for family in ("direct", "cross"):
            for kind in ("givens", "hyperbolic"):
                a, b = make_pair(kind, family, 0, 2, N, np.cosh(0.3) if kind == "hyperbolic" else np.cos(0.3),
                                 np.sinh(0.3) if kind == "hyperbolic" else np.sin(0.3))
                assert classify_pair(a, b, N) == family

    @pytest.mark.parametrize(
        "a, b",
        [
            (PlaneRotation.givens(0, 1, 0.2), PlaneRotation.givens(3, 5, 0.2)),  # wrong companion rows
            (PlaneRotation.givens(0, 1, 0.2), PlaneRotation.givens(3, 4, 0.3)),  # mismatched angle
            (PlaneRotation.hyperbolic(0, 4, 0.2), PlaneRotation.hyperbolic(1, 3, 0.2)),  # cross needs -gamma
            (PlaneRotation.givens(0, 1, 0.2), PlaneRotation.hyperbolic(3, 4, 0.2)),  # mixed kinds
            (PlaneRotation.hyperbolic(0, 3, 0.2), PlaneRotation.hyperbolic(0, 3, 0.2)),  # hyperbolic phase
        ],
    )
    def test_invalid_pair_rejected(self, a, b):
        data, sep = np.zeros((6, 4)), identity_separator(3)
        with pytest.raises(ValueError):
            apply_rotation_pair(data, sep, a, b)

    def test_apply_pair_updates_data_and_separator(self, rng):
        x = rng.standard_normal((6, 10))
        data, sep = x.copy(), identity_separator(3)
        a, b = make_pair("givens", "cross", 0, 2, 3, np.cos(0.4), np.sin(0.4))
        apply_rotation_pair(data, sep, a, b)
        assert np.allclose(data, sep @ x)
        assert structure_residual(sep) <= 1e-12


class TestNormalization:
    def test_scales_row_pairs(self):
        data = np.ones((4, 3))
        sep = identity_separator(2)
        apply_normalization(data, sep, [2.0, 0.5])
        assert np.array_equal(data[:, 0], [2.0, 0.5, 2.0, 0.5])
        assert np.array_equal(np.diag(sep), [2.0, 0.5, 2.0, 0.5])
        assert structure_residual(sep) == 0.0

    @pytest.mark.parametrize("lam", [[1.0], [1.0, 0.0], [1.0, -2.0], [1.0, np.inf]])
    def test_rejects_bad_factors(self, lam):
        with pytest.raises(ValueError):
            apply_normalization(np.ones((4, 3)), identity_separator(2), lam)
