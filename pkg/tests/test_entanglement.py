import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import integrate_covariance
from optoent.dynamics import build_diffusion, build_drift
from optoent.entanglement import (
    Covariance,
    LyapunovError,
    PhysicalityError,
    UnstableDriftError,
    is_physical,
    log_negativity,
    solve_lyapunov,
)
from optoent.pipeline import EN_ZERO, StageError, entanglement_at
from optoent.steady_state import MultistabilityWarning


def tmsv(r):
    """Two-mode squeezed vacuum covariance, vacuum variance 1/2."""
    c, s = math.cosh(2 * r) / 2, math.sinh(2 * r) / 2
    V = np.zeros((4, 4))
    V[:2, :2] = V[2:, 2:] = c * np.eye(2)
    V[:2, 2:] = V[2:, :2] = s * np.diag([1.0, -1.0])
    return V


def rotate_optical(V, theta):
    S = np.eye(4)
    S[2:, 2:] = [[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]]
    return S @ V @ S.T


class TestLyapunov:
    def test_diagonal_balance(self):
        cov = solve_lyapunov(-np.eye(4), 2 * np.eye(4))
        assert np.allclose(cov.matrix, np.eye(4), atol=1e-15)

    def test_decoupled_cavity_is_vacuum(self, ref, ref_rates):
        k, d = ref_rates.kappa, ref.detuning_s
        M = np.array([[-k, d], [-d, -k]])
        cov = solve_lyapunov(M, k * np.eye(2))
        assert np.abs(cov.matrix - 0.5 * np.eye(2)).max() < 1e-13

    def test_reference_point(self, ref_rates, ref_steady):
        M = build_drift(ref_rates, ref_steady)
        N = build_diffusion(ref_rates, ref_steady)
        cov = solve_lyapunov(M, N, ref_rates.omega_m)
        assert cov.residual < 1e-10
        assert np.array_equal(cov.matrix, cov.matrix.T)
        assert np.all(np.diag(cov.matrix) >= 0.5 - 1e-12)
        V_ref, _ = integrate_covariance(M, N, ref_rates.omega_m)
        assert np.abs(cov.matrix - V_ref).max() / np.abs(V_ref).max() < 1e-6

    @pytest.mark.parametrize("c", [1e-6, 1.0, 1e6])
    def test_scale_invariance(self, ref_rates, ref_steady, c):
        M = build_drift(ref_rates, ref_steady)
        N = build_diffusion(ref_rates, ref_steady)
        V0 = solve_lyapunov(M, N, ref_rates.omega_m).matrix
        V1 = solve_lyapunov(c * M, c * N, c * ref_rates.omega_m).matrix
        assert np.abs(V1 - V0).max() / np.abs(V0).max() < 1e-10

    def test_default_scale_matches(self, ref_rates, ref_steady):
        M = build_drift(ref_rates, ref_steady)
        N = build_diffusion(ref_rates, ref_steady)
        a = solve_lyapunov(M, N).matrix
        b = solve_lyapunov(M, N, ref_rates.omega_m).matrix
        assert np.abs(a - b).max() / np.abs(b).max() < 1e-10

    def test_unstable_rejected(self):
        with pytest.raises(UnstableDriftError):
            solve_lyapunov(np.diag([1.0, -1, -1, -1]), np.eye(4))

    def test_ill_conditioned_rejected(self):
        M = np.diag([-1.0, -1.0, -1.0, -1e-16])
        with pytest.raises(LyapunovError):
            solve_lyapunov(M, np.eye(4), check_stable=False)


class TestLogNegativity:
    @pytest.mark.parametrize("r", [0.1, 0.5, 1.0])
    def test_two_mode_squeezed(self, r):
        res = log_negativity(tmsv(r))
        assert res.E_N == pytest.approx(2 * r, abs=1e-10)
        assert res.nu_minus == pytest.approx(math.exp(-2 * r) / 2, rel=1e-10)

    def test_vacuum(self):
        res = log_negativity(0.5 * np.eye(4))
        assert res.E_N == 0.0
        assert res.nu_minus == pytest.approx(0.5)

    def test_thermal_product(self):
        assert log_negativity(3.5 * np.eye(4)).E_N == 0.0

    @given(r=st.floats(0.0, 2.0), theta=st.floats(0.0, 2 * math.pi))
    def test_optical_phase_invariance(self, r, theta):
        V = tmsv(r)
        a = log_negativity(V).E_N
        b = log_negativity(rotate_optical(V, theta)).E_N
        assert abs(a - b) < 1e-12

    @given(r=st.floats(0.0, 2.0), n=st.floats(0.0, 5.0))
    def test_ppt_consistency(self, r, n):
        V = tmsv(r) + n * np.eye(4)
        res = log_negativity(V)
        assert (res.E_N > 0) == (res.nu_minus < 0.5)
        if res.E_N > 0:
            assert res.E_N == pytest.approx(-math.log(2 * res.nu_minus))

    def test_sigma_definition(self):
        V = tmsv(0.3) + 0.2 * np.eye(4)
        cov = Covariance(V)
        res = log_negativity(cov)
        expected = (np.linalg.det(cov.A) + np.linalg.det(cov.B)
                    - 2 * np.linalg.det(cov.C))
        assert res.sigma == pytest.approx(expected)

    def test_closed_form_matches_direct_expression(self, ref_rates, ref_steady):
        M = build_drift(ref_rates, ref_steady)
        N = build_diffusion(ref_rates, ref_steady)
        res = log_negativity(solve_lyapunov(M, N, ref_rates.omega_m))
        direct = -0.5 * math.log(2 * (res.sigma - math.sqrt(res.sigma**2 - 4 * res.det_V)))
        assert res.E_N == pytest.approx(max(0.0, direct), rel=1e-6)

    def test_unphysical_rejected(self):
        V = np.diag([0.1, 0.1, 0.5, 0.5])
        assert not is_physical(V)
        with pytest.raises(PhysicalityError):
            log_negativity(V, check_physical=True)

    def test_imaginary_eigenvalue_rejected(self):
        V = np.diag([1.0, -1.0, 1.0, 1.0])
        with pytest.raises(PhysicalityError):
            log_negativity(V)

    def test_unique_entries(self):
        entries = Covariance(tmsv(0.2)).unique_entries()
        assert len(entries) == 10
        assert entries["V_qX"] == pytest.approx(math.sinh(0.4) / 2)
        assert entries["V_pY"] == pytest.approx(-math.sinh(0.4) / 2)


class TestPipeline:
    def test_reference_point_entangled(self, ref):
        res = entanglement_at(ref)
        assert res.stable and res.E_N > EN_ZERO and res.entangled
        assert res.covariance.residual < 1e-10

    def test_reactive_only_nominal_is_zero(self, ref):
        res = entanglement_at(ref.replace(dc_scale=0.0, rc_scale=1.0))
        assert res.stable
        assert res.E_N < EN_ZERO

    def test_enhanced_reactive_entangles(self, ref):
        found = []
        for rc in (20.0, 40.0, 60.0):
            best = 0.0
            for ratio in np.linspace(0.0, 3.0, 61):
                res = entanglement_at(ref.replace(dc_scale=0.0, rc_scale=rc)
                                      .with_detuning_ratio(float(ratio)))
                if res.stable:
                    best = max(best, res.E_N)
            found.append(best)
        assert max(found) > EN_ZERO

    def test_unstable_point_reported_not_zeroed(self, ref):
        res = entanglement_at(ref.with_detuning_ratio(-1.0))
        assert res.status == "unstable"
        assert math.isnan(res.E_N)
        assert not res.entangled
        rec = res.to_record()
        assert rec["status"] == "unstable" and math.isnan(rec["E_N"])

    def test_record_is_flat(self, ref):
        rec = entanglement_at(ref).to_record()
        assert all(isinstance(v, (int, float, str, bool)) for v in rec.values())
        assert sum(k.startswith("V_") for k in rec) == 10

    def test_stage_tagging(self, ref, monkeypatch):
        import optoent.pipeline as pl

        def boom(*a, **k):
            raise LyapunovError("forced")
        monkeypatch.setattr(pl, "solve_lyapunov", boom)
        with pytest.raises(StageError) as info:
            entanglement_at(ref)
        assert info.value.stage == "lyapunov"

    def test_continuity_along_detuning(self, ref):
        grid = np.linspace(1.0, 2.6, 161)
        en, ok = [], []
        for x in grid:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", MultistabilityWarning)
                r = entanglement_at(ref.with_detuning_ratio(float(x)))
            en.append(r.E_N)
            ok.append(r.stable)
        en = np.array(en)
        assert all(ok)
        jumps = np.abs(np.diff(en))
        # central-difference slope estimate times the step
        est = np.abs(np.gradient(en))
        for i, j in enumerate(jumps):
            bound = 10 * max(est[i], est[i + 1]) + 1e-12
            assert j < bound


@given(r=st.floats(0.05, 2.0), n=st.floats(0.0, 3.0), m=st.floats(0.0, 3.0))
def test_eigen_route_matches_closed_form(r, n, m):
    V = tmsv(r) + np.diag([n, n, m, m])
    res = log_negativity(V)
    disc = res.sigma**2 - 4 * res.det_V
    closed = math.sqrt((res.sigma - math.sqrt(max(disc, 0.0))) / 2)
    assert res.nu_minus == pytest.approx(closed, rel=1e-7)
