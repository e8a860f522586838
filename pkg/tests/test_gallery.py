import math

import numpy as np
import pytest

from qspectra.gallery import (
    OperatorSpec,
    TrendReport,
    eigenwitness_backward_shift,
    materialize,
    trend,
)
from qspectra.numerics import sigma_max, sigma_min, singular_values
from qspectra.qmat import build_T_lambda, real_embed
from qspectra.quat import Quaternion, UnitQuaternion, conjugate_by

I = Quaternion(0, 1)
J = Quaternion(0, 0, 1)
K = Quaternion(0, 0, 0, 1)


def shift_spec(n, kind="right_shift"):
    return OperatorSpec(kind=kind, truncation=n)


class TestMaterialize:
    def test_right_shift_3(self):
        got = materialize(shift_spec(3))
        want = np.zeros((3, 3, 4))
        want[1, 0, 0] = want[2, 1, 0] = 1.0
        assert np.array_equal(got.data, want)

    def test_diagonal_list(self):
        spec = OperatorSpec(kind="diagonal_sequence", truncation=3,
                            params={"preset": "list",
                                    "values": [[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]})
        got = materialize(spec)
        assert got.entry(0, 0) == I and got.entry(1, 1) == J and got.entry(2, 2) == K
        assert got.entry(0, 1) == Quaternion()

    def test_backward_is_adjoint_of_right(self):
        for n in (2, 5, 9):
            fwd = materialize(shift_spec(n))
            bwd = materialize(shift_spec(n, "backward_shift"))
            assert bwd == fwd.adjoint()

    def test_shift_norm_is_one_exactly(self):
        for n in (2, 8, 64):
            s = materialize(shift_spec(n))
            assert sigma_max(real_embed(s).m).value == 1.0

    def test_truncation_too_small(self):
        with pytest.raises(ValueError):
            OperatorSpec(kind="right_shift", truncation=1)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            OperatorSpec(kind="weighted_shift", truncation=4)

    def test_list_shorter_than_truncation(self):
        spec = OperatorSpec(kind="diagonal_sequence", truncation=4,
                            params={"preset": "list", "values": [[1, 0, 0, 0]]})
        with pytest.raises(ValueError, match="exceeds"):
            materialize(spec)

    def test_unbounded_rejected(self):
        spec = OperatorSpec(kind="diagonal_sequence", truncation=2,
                            params={"preset": "list",
                                    "values": [[1, 0, 0, 0], [math.inf, 0, 0, 0]]})
        with pytest.raises(ValueError):
            materialize(spec)

    def test_round_trip(self):
        spec = OperatorSpec(kind="diagonal_sequence", truncation=5,
                            params={"preset": "convergent", "value": [0, 1, 0, 0]})
        assert OperatorSpec.from_dict(spec.to_dict()) == spec


class TestEigenwitness:
    def test_lambda_zero_gives_e1(self):
        x, res = eigenwitness_backward_shift(Quaternion(), 6)
        assert res == 0.0
        want = np.zeros((6, 4))
        want[0, 0] = 1.0
        assert np.array_equal(x, want)

    def test_j_half_n20(self):
        x, res = eigenwitness_backward_shift(J * 0.5, 20)
        assert res <= 0.5**20
        assert np.linalg.norm(x.reshape(-1)) == pytest.approx(1.0)
        # witness satisfies S* x = x*lam up to the tail, checked directly
        bwd = materialize(shift_spec(20, "backward_shift"))
        from qspectra.qmat import _hamilton

        err = bwd.matvec(x) - _hamilton(x, (J * 0.5).as_array()[None, :])
        assert np.linalg.norm(err.reshape(-1)) <= 0.5**20

    def test_i_plus_j_half_n40(self):
        lam = Quaternion(0, 0.5, 0.5)
        x, res = eigenwitness_backward_shift(lam, 40)
        assert res <= (1 / math.sqrt(2)) ** 40

    def test_rejects_modulus_one_or_more(self):
        with pytest.raises(ValueError):
            eigenwitness_backward_shift(I, 8)
        with pytest.raises(ValueError):
            eigenwitness_backward_shift(Quaternion(2), 8)


class TestTrend:
    def test_lambda_zero_vanishing(self):
        rep = trend(shift_spec(64), Quaternion(), (64, 128, 256))
        assert rep.verdict == "vanishing"
        assert all(v == 0.0 for v in rep.sigma_min_values)

    def test_modulus_two_bounded_away(self):
        rep = trend(shift_spec(64), J * 2.0, (64, 128, 256))
        assert rep.verdict == "bounded_away"
        for v in rep.sigma_min_values:
            assert v >= 2.0 - 1.0 - 1e-8  # Neumann floor |lam| - 1

    @pytest.mark.parametrize("mod", [1.25, 1.5, 3.0, 10.0])
    def test_outside_disk_bounded_away_floor(self, mod):
        lam = Quaternion(0, mod / math.sqrt(2), 0, mod / math.sqrt(2))
        rep = trend(shift_spec(16), lam, (16, 32, 64, 128))
        assert rep.verdict == "bounded_away"
        for v in rep.sigma_min_values:
            assert v >= mod - 1.0 - 1e-8

    @pytest.mark.parametrize("lam,n", [
        (Quaternion(0, 0, 0.5), 10),
        (Quaternion(0, 0, 0.5), 30),
        (Quaternion(0, 0.5, 0.5), 40),
        (Quaternion(0.3, 0.2, -0.4, 0.1), 25),
        (Quaternion(-0.9), 15),
    ])
    def test_eigenwitness_tail_bound_sweep(self, lam, n):
        _, res = eigenwitness_backward_shift(lam, n)
        assert res <= abs(lam) ** n

    def test_half_modulus_geometric_decay(self):
        rep = trend(shift_spec(64), J * 0.5, (16, 32, 64))
        v = rep.sigma_min_values
        # at least geometric: each doubling multiplies by < (0.6)^N
        assert v[1] / v[0] <= 0.6**16
        assert v[2] / v[1] <= 0.6**32

    def test_diagonal_convergent_vanishing(self):
        spec = OperatorSpec(kind="diagonal_sequence", truncation=8,
                            params={"preset": "convergent", "value": [0, 1, 0, 0]})
        rep = trend(spec, I, (8, 512, 16384))
        assert rep.verdict == "vanishing"
        # approach distance is 1/N exactly for this sequence
        for n, v in zip(rep.sizes, rep.sigma_min_values):
            assert v == pytest.approx(1.0 / n, rel=1e-9)

    def test_shift_reduction_matches_dense_route(self):
        # structural bidiagonal route vs the generic dense realization,
        # in the regime the dense route resolves
        for kind in ("right_shift", "backward_shift"):
            for lam in (J * 0.5, Quaternion(0.3, 0.4, 0.1, -0.2), Quaternion(0, 2)):
                for n in (4, 9, 17):
                    dense = sigma_min(
                        build_T_lambda(materialize(shift_spec(n, kind)), lam).m).value
                    rep = trend(shift_spec(4, kind), lam, (n, n + 1, n + 2))
                    assert rep.sigma_min_values[0] == pytest.approx(
                        dense, rel=1e-6, abs=1e-12)

    def test_diagonal_reduction_matches_dense_route(self):
        spec = OperatorSpec(kind="diagonal_sequence", truncation=6,
                            params={"preset": "convergent", "value": [0.2, 0.5, -1, 0.1]})
        lam = Quaternion(0.1, 0.4, 0.0, 0.3)
        rep = trend(spec, lam, (4, 5, 6))
        for n, got in zip(rep.sizes, rep.sigma_min_values):
            t = materialize(spec.with_truncation(n))
            dense = singular_values(build_T_lambda(t, lam).m)[-1]
            assert got == pytest.approx(dense, rel=1e-9)

    def test_circular_verdicts(self):
        rng = np.random.default_rng(55)
        for lam in (J * 0.5, Quaternion(0, 2), Quaternion(0.1, 0.3, 0.2, 0.1)):
            s = UnitQuaternion(Quaternion.from_array(rng.normal(size=4)))
            mu = conjugate_by(lam, s)
            a = trend(shift_spec(8), lam, (8, 16, 32))
            b = trend(shift_spec(8), mu, (8, 16, 32))
            assert a.verdict == b.verdict
            for x, y in zip(a.sigma_min_values, b.sigma_min_values):
                assert x == pytest.approx(y, rel=1e-9, abs=1e-30)

    def test_input_validation(self):
        with pytest.raises(ValueError, match="increasing"):
            trend(shift_spec(4), I, (8, 8, 16))
        with pytest.raises(ValueError, match="3 sizes"):
            trend(shift_spec(4), I, (8, 16))
        with pytest.raises(ValueError, match="truncated"):
            trend(OperatorSpec(kind="finite_matrix"), I, (2, 3, 4))

    def test_report_round_trip(self):
        rep = trend(shift_spec(8), J * 0.5, (8, 16, 32))
        assert TrendReport.from_dict(rep.to_dict()) == rep
