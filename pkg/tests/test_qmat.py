import json

import numpy as np
import pytest

from qspectra.qmat import (
    ComplexAdjoint,
    QMatrix,
    adjoint,
    build_Delta,
    build_T_lambda,
    complex_adjoint,
    flatten,
    qmatrix_from_dict,
    qmatrix_to_dict,
    random_qmatrix,
    real_embed,
    right_mult_embed,
    unflatten,
)
from qspectra.quat import Quaternion, mul

Q0 = Quaternion()
ONE = Quaternion(1)
I = Quaternion(0, 1)
J = Quaternion(0, 0, 1)
K = Quaternion(0, 0, 0, 1)


def basis_action_matrix(action) -> np.ndarray:
    """4x4 matrix of a quaternion map from its action on the basis."""
    cols = [action(Quaternion.from_array(np.eye(4)[b])).as_array() for b in range(4)]
    return np.column_stack(cols)


class TestMatvec:
    def test_identity(self):
        T = QMatrix.identity(3)
        x = [Quaternion(1, 2), Quaternion(0, 0, 1), Quaternion(-1, 0, 0, 4)]
        assert T.matvec(x) == x

    def test_diag_single_product(self):
        T = QMatrix.diag([I])
        assert T.matvec([J]) == [K]

    def test_right_linearity(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            n = int(rng.integers(1, 5))
            T = random_qmatrix(n, rng)
            x = rng.normal(size=(n, 4))
            alpha = Quaternion.from_array(rng.normal(size=4))
            xs = [Quaternion.from_array(r) for r in x]
            lhs = T.matvec([mul(q, alpha) for q in xs])
            rhs = [mul(q, alpha) for q in T.matvec(xs)]
            for a, b in zip(lhs, rhs):
                assert (a - b).norm() <= 1e-12 * max(1.0, b.norm())

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            QMatrix.identity(2).matvec([ONE])


class TestRealEmbed:
    def test_identity(self):
        assert np.array_equal(real_embed(QMatrix.identity(2)).m, np.eye(8))

    def test_left_mult_by_i(self):
        want = basis_action_matrix(lambda b: mul(I, b))
        got = real_embed(QMatrix.diag([I])).m
        assert np.array_equal(got, want)

    def test_homomorphism(self):
        rng = np.random.default_rng(5)
        S, T = random_qmatrix(3, rng), random_qmatrix(3, rng)
        lhs = real_embed(S @ T).m
        rhs = real_embed(S).m @ real_embed(T).m
        assert np.linalg.norm(lhs - rhs) < 1e-10 * max(1.0, np.linalg.norm(rhs))

    def test_consistent_with_matvec(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            n = int(rng.integers(1, 6))
            T = random_qmatrix(n, rng)
            x = rng.normal(size=(n, 4))
            lhs = unflatten(real_embed(T).m @ flatten(x))
            rhs = T.matvec(x)
            assert np.max(np.abs(lhs - rhs)) < 1e-12 * max(1.0, np.max(np.abs(rhs)))


class TestRightMultEmbed:
    def test_lambda_one(self):
        assert np.array_equal(right_mult_embed(ONE, 3).m, np.eye(12))

    def test_real_scalar(self):
        assert np.array_equal(right_mult_embed(Quaternion(2.5), 2).m, 2.5 * np.eye(8))

    def test_right_mult_by_i(self):
        want = basis_action_matrix(lambda b: mul(b, I))
        got = right_mult_embed(I, 1).m
        assert np.array_equal(got, want)
        # spot values: 1 -> i, i -> -1, j -> -k, k -> j
        assert np.array_equal(got[:, 0], [0, 1, 0, 0])
        assert np.array_equal(got[:, 1], [-1, 0, 0, 0])
        assert np.array_equal(got[:, 2], [0, 0, 0, -1])
        assert np.array_equal(got[:, 3], [0, 0, 1, 0])

    def test_contravariant_composition(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            lam = Quaternion.from_array(rng.normal(size=4))
            mu = Quaternion.from_array(rng.normal(size=4))
            lhs = right_mult_embed(lam, 2).m @ right_mult_embed(mu, 2).m
            rhs = right_mult_embed(mul(mu, lam), 2).m
            assert np.allclose(lhs, rhs, atol=1e-12 * max(1.0, abs(lam) * abs(mu)))

    def test_commutes_with_left_action(self):
        rng = np.random.default_rng(8)
        T = random_qmatrix(3, rng)
        lam = Quaternion.from_array(rng.normal(size=4))
        a = real_embed(T).m @ right_mult_embed(lam, 3).m
        b = right_mult_embed(lam, 3).m @ real_embed(T).m
        assert np.allclose(a, b, atol=1e-12 * max(1.0, np.abs(a).max()))


class TestBuildTLambda:
    def test_zero_matrix_lambda_one(self):
        assert np.array_equal(build_T_lambda(QMatrix.zeros(1), ONE).m, np.eye(4))

    def test_identity_lambda_one_vanishes(self):
        got = build_T_lambda(QMatrix.identity(1), ONE).m
        assert np.array_equal(got, np.zeros((4, 4)))

    def test_zero_matrix_lambda_i(self):
        want = basis_action_matrix(lambda b: mul(b, I))
        assert np.array_equal(build_T_lambda(QMatrix.zeros(1), I).m, want)

    def test_action(self):
        rng = np.random.default_rng(9)
        T = random_qmatrix(2, rng)
        lam = Quaternion.from_array(rng.normal(size=4))
        x = rng.normal(size=(2, 4))
        from qspectra.qmat import _hamilton

        want = _hamilton(x, lam.as_array()[None, :]) - T.matvec(x)
        got = build_T_lambda(T, lam).apply(x)
        assert np.allclose(got, want, atol=1e-12 * max(1.0, np.abs(want).max()))


class TestComplexAdjoint:
    def test_j_entry(self):
        got = complex_adjoint(QMatrix.diag([J])).m
        assert np.array_equal(got, np.array([[0, 1], [-1, 0]], dtype=complex))

    def test_i_entry(self):
        got = complex_adjoint(QMatrix.diag([I])).m
        assert np.array_equal(got, np.array([[1j, 0], [0, -1j]]))

    def test_multiplicative(self):
        rng = np.random.default_rng(10)
        S, T = random_qmatrix(2, rng), random_qmatrix(2, rng)
        lhs = complex_adjoint(S @ T).m
        rhs = complex_adjoint(S).m @ complex_adjoint(T).m
        assert np.linalg.norm(lhs - rhs) < 1e-10 * max(1.0, np.linalg.norm(rhs))

    def test_block_structure_enforced(self):
        bad = np.array([[1j, 0.5], [0.5, 1j]])  # bottom-right must be conj(A)
        with pytest.raises(ValueError):
            ComplexAdjoint(1, bad)

    def test_norm_preserving(self):
        rng = np.random.default_rng(11)
        T = random_qmatrix(3, rng)
        s_adj = np.linalg.svd(complex_adjoint(T).m, compute_uv=False)[0]
        s_real = np.linalg.svd(real_embed(T).m, compute_uv=False)[0]
        assert s_adj == pytest.approx(s_real, rel=1e-10)


class TestBuildDelta:
    def test_i_entry_lambda_i(self):
        got = build_Delta(QMatrix.diag([I]), I)
        assert got.isclose(QMatrix.zeros(1), atol=1e-15)

    def test_zero_matrix(self):
        q = Quaternion(1, 2, 3, 4)
        got = build_Delta(QMatrix.zeros(3), q)
        want = abs(q) ** 2 * QMatrix.identity(3)
        assert got.isclose(want, atol=1e-12 * abs(q) ** 2)

    def test_nilpotent_real(self):
        T = QMatrix.from_real([[0, 1], [0, 0]])
        got = build_Delta(T, ONE)
        want = QMatrix.from_real([[1, -2], [0, 1]])
        assert got.isclose(want, atol=1e-14)

    def test_square_reuse(self):
        rng = np.random.default_rng(12)
        T = random_qmatrix(3, rng)
        lam = Quaternion.from_array(rng.normal(size=4))
        a = build_Delta(T, lam)
        b = build_Delta(T, lam, square=T @ T)
        assert a.isclose(b, atol=0.0)

    def test_factorization_identity(self):
        # realization of the quadratic operator equals both compositions
        rng = np.random.default_rng(13)
        for _ in range(10):
            n = int(rng.integers(1, 6))
            T = random_qmatrix(n, rng)
            lam = Quaternion.from_array(rng.normal(size=4))
            d = real_embed(build_Delta(T, lam)).m
            tl = build_T_lambda(T, lam).m
            tlc = build_T_lambda(T, lam.conjugate()).m
            scale = max(1.0, np.linalg.norm(d))
            assert np.linalg.norm(d - tl @ tlc) < 1e-10 * scale
            assert np.linalg.norm(d - tlc @ tl) < 1e-10 * scale


class TestAdjoint:
    def test_real_diagonal_fixed(self):
        T = QMatrix.from_real([[1, 0], [0, -2]])
        assert adjoint(T) == T

    def test_i_entry(self):
        assert adjoint(QMatrix.diag([I])).entry(0, 0) == Quaternion(0, -1)

    def test_product_reverses(self):
        rng = np.random.default_rng(14)
        S, T = random_qmatrix(4, rng), random_qmatrix(4, rng)
        lhs = adjoint(S @ T)
        rhs = adjoint(T) @ adjoint(S)
        assert np.max(np.abs(lhs.data - rhs.data)) < 1e-12 * max(1.0, np.abs(rhs.data).max())


class TestImmutability:
    def test_data_read_only(self):
        T = QMatrix.identity(2)
        with pytest.raises(ValueError):
            T.data[0, 0, 0] = 5.0
        with pytest.raises(AttributeError):
            T.n = 3


class TestSerialization:
    def test_round_trip(self):
        rng = np.random.default_rng(15)
        T = random_qmatrix(3, rng)
        obj = json.loads(json.dumps(qmatrix_to_dict(T)))
        assert qmatrix_from_dict(obj) == T

    def test_rejects_non_square(self):
        with pytest.raises(ValueError, match="square"):
            qmatrix_from_dict(
                {"n": 1, "entries": [[[1, 0, 0, 0], [0, 0, 0, 0]]]}
            )

    def test_rejects_wrong_component_count(self):
        with pytest.raises(ValueError):
            qmatrix_from_dict({"n": 1, "entries": [[[1, 0, 0]]]})

    def test_rejects_mismatched_n(self):
        with pytest.raises(ValueError, match="declared"):
            qmatrix_from_dict({"n": 3, "entries": [[[1, 0, 0, 0]]]})
