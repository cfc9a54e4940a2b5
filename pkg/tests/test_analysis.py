import numpy as np
import pytest

from conftest import C_AT_PHI, GS_EXACT, L_AT_PHI, PC_EXACT, SIDE_CAP
from uew import (
    ConstraintSpec,
    DensityMatrix,
    DimensionMismatch,
    HalfSpaceSide,
    Ket,
    MINUS_INF,
    Witness,
    alpha_sweep,
    build_minus_inf,
    build_v_alpha,
    noisy_member,
    plane_samples,
    tensor_product,
    threshold_scan,
)

L_AT_MIXED = 1.0 / 9.0
C_AT_MIXED = 1.0 / 9.0


def affine_root(bound, w_c_coeff, w_l_coeff):
    """Noise level where bound = w_c_coeff*<C>_p + w_l_coeff*<L>_p."""
    v0 = bound - w_c_coeff * C_AT_PHI - w_l_coeff * L_AT_PHI
    slope = -w_c_coeff * (C_AT_MIXED - C_AT_PHI) - w_l_coeff * (L_AT_MIXED - L_AT_PHI)
    return -v0 / slope


class TestThresholdScan:
    def test_rejects_coarse_resolution(self, example, pc_result):
        w = build_v_alpha(example["spec"], example["L"], pc_result.value, 0.0).witness
        with pytest.raises(ValueError):
            threshold_scan(example["family"], w, example["spec"], HalfSpaceSide.LEQ, resolution=1e-2)

    def test_never_firing_witness_returns_none(self, example):
        w = Witness(bound=GS_EXACT, test=example["L"])  # valid everywhere
        out = threshold_scan(example["family"], w, example["spec"], HalfSpaceSide.LEQ)
        assert out is None

    def test_side_cap_for_plain_constrained_witness(self, example, pc_result):
        # the witness fires on every state of the <= region, so the reported
        # threshold is where the family crosses onto the other side
        w = build_v_alpha(example["spec"], example["L"], pc_result.value, 0.0).witness
        out = threshold_scan(example["family"], w, example["spec"], HalfSpaceSide.LEQ)
        assert out == pytest.approx(SIDE_CAP, abs=1e-4)

    def test_interior_root_matches_affine_formula(self, example):
        # bound tuned so the witness stops firing before the side boundary
        target = 0.03
        bound = L_AT_PHI + target * (L_AT_MIXED - L_AT_PHI)
        w = Witness(bound=bound, test=example["L"])
        out = threshold_scan(example["family"], w, example["spec"], HalfSpaceSide.LEQ)
        assert out == pytest.approx(target, abs=1e-4)

    def test_full_interval(self, example):
        # a witness firing on the whole family, scanned on its own side
        w = Witness(bound=-1.0, test=example["L"])
        spec = ConstraintSpec(C=example["C"], c=10.0)  # everything on the <= side
        out = threshold_scan(example["family"], w, spec, HalfSpaceSide.LEQ)
        assert out == 1.0


class TestAlphaSweep:
    def test_rows_and_bounds(self, example, cfg):
        alphas = [0.0, -1.0, -10.0, -100.0, MINUS_INF]
        rows = alpha_sweep(example["L"], example["spec"], alphas, example["family"], cfg)
        assert [r.alpha for r in rows] == alphas
        for row, alpha in zip(rows[:-1], alphas):
            assert row.bound == pytest.approx(alpha * 0.01 + (1 - alpha) * PC_EXACT, abs=1e-9)
        assert rows[-1].bound == pytest.approx(PC_EXACT - 0.01, abs=1e-9)

    def test_thresholds_monotone_as_alpha_decreases(self, example, cfg):
        alphas = [0.0, -1.0, -10.0, -100.0, MINUS_INF]
        rows = alpha_sweep(example["L"], example["spec"], alphas, example["family"], cfg)
        thresholds = [r.threshold_p for r in rows]
        assert all(t is not None for t in thresholds)
        for earlier, later in zip(thresholds, thresholds[1:]):
            assert later >= earlier - 1e-9

    def test_single_alpha_matches_direct_scan(self, example, cfg, pc_result):
        rows = alpha_sweep(example["L"], example["spec"], [0.0], example["family"], cfg)
        w = build_v_alpha(example["spec"], example["L"], pc_result.value, 0.0).witness
        direct = threshold_scan(example["family"], w, example["spec"], HalfSpaceSide.LEQ)
        assert rows[0].threshold_p == pytest.approx(direct, abs=1e-12)
        assert rows[0].detected_at_zero

    def test_minus_inf_row_uses_limit_witness(self, example, cfg, pc_result):
        rows = alpha_sweep(example["L"], example["spec"], [MINUS_INF], example["family"], cfg)
        w = build_minus_inf(example["spec"], example["L"], pc_result.value)
        assert rows[0].bound == pytest.approx(w.bound, abs=1e-9)

    def test_rejects_alpha_ge_one(self, example, cfg):
        with pytest.raises(ValueError):
            alpha_sweep(example["L"], example["spec"], [2.0], example["family"], cfg)


class TestPlaneSamples:
    def test_maximally_mixed_point(self, example):
        rho = DensityMatrix.maximally_mixed((2, 2))
        out = plane_samples([("mixed", rho)], example["spec"], example["L"])
        assert out[0].label == "mixed"
        assert out[0].x == pytest.approx(1.0 / 9.0, abs=1e-12)
        assert out[0].y == pytest.approx(1.0 / 9.0, abs=1e-12)

    def test_boundary_state_x_equals_c(self, example):
        rho = noisy_member(example["family"], SIDE_CAP)
        out = plane_samples([("edge", rho)], example["spec"], example["L"])
        assert out[0].x == pytest.approx(example["spec"].c, abs=1e-12)

    def test_optimal_product_point(self, example):
        xi_hat = Ket.unit([np.sqrt(1.0 / 6.0), np.sqrt(0.5)])
        rho = DensityMatrix.from_ket(tensor_product(xi_hat, xi_hat), dims=(2, 2))
        out = plane_samples([("opt", rho)], example["spec"], example["L"])
        assert out[0].x == pytest.approx(0.25, abs=1e-12)
        assert out[0].y == pytest.approx(GS_EXACT, abs=1e-12)

    def test_dimension_mismatch(self, example):
        rho = DensityMatrix.maximally_mixed((2, 3))
        with pytest.raises(DimensionMismatch):
            plane_samples([("bad", rho)], example["spec"], example["L"])


class TestAffineConsistency:
    def test_scan_agrees_with_analytic_root(self, example, cfg, pc_result):
        # alpha = -1: value(p) = -(c - <C>_p) + 2 (p_c - <L>_p); its root lies
        # past the side cap, so the scan must stop at the cap instead
        root = affine_root(-0.01 + 2 * pc_result.value, -1.0, 2.0)
        assert root > SIDE_CAP
        rows = alpha_sweep(example["L"], example["spec"], [-1.0], example["family"], cfg)
        assert rows[0].threshold_p == pytest.approx(SIDE_CAP, abs=1e-4)
