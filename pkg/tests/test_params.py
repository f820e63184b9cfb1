import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from optoent.params import (
    HBAR,
    K_B,
    C_LIGHT,
    ParameterError,
    PhysicalParams,
    derive_rates,
    evanescent_profile,
    evanescent_slope,
    default_params,
    thermal_occupation,
)

# mpmath (40 digits), exact SI constants: hbar = h / 2 pi, h = 6.62607015e-34
OMEGA_C_850NM = 2.216060667422180e15
KAPPA0_REF = 2.770075834277725e8
NBAR_15MHZ_50MK = 68.95659688438170
NBAR_15MHZ_300K = 416731.88246675143
X_ZPF_REF = 2.365307010543527e-14
DRIVE_E_REF = 6.541405875200913e8


def test_ref_rates_match_high_precision(ref_rates):
    r = ref_rates
    assert r.omega_c == pytest.approx(OMEGA_C_850NM, rel=1e-14)
    assert r.kappa0 == pytest.approx(KAPPA0_REF, rel=1e-14)
    assert r.nbar == pytest.approx(NBAR_15MHZ_50MK, rel=1e-12)
    assert r.x_zpf_norm == pytest.approx(X_ZPF_REF, rel=1e-14)
    assert r.drive_E == pytest.approx(DRIVE_E_REF, rel=1e-14)


def test_rate_relations(ref, ref_rates):
    r = ref_rates
    assert r.kappa == r.kappa0 + r.kappa1
    assert r.kappa1 == pytest.approx(0.3 * r.kappa0)
    assert r.gamma_m == pytest.approx(ref.mech_freq_omega_m / 1e6)
    assert r.r_reactive == pytest.approx(2 * r.kappa1 / 100e-9)
    assert r.D_norm == pytest.approx(ref.disp_coupling_d * r.x_zpf_norm)
    assert r.R_norm == pytest.approx(r.r_reactive * r.x_zpf_norm)


def test_room_temperature_occupation():
    n = thermal_occupation(2 * math.pi * 15e6, 300.0)
    assert n == pytest.approx(NBAR_15MHZ_300K, rel=1e-12)


def test_zero_temperature_occupation():
    assert thermal_occupation(1e8, 0.0) == 0.0
    assert thermal_occupation(1e8, 1e-6) < 1e-300


@given(st.floats(1e-3, 1e4), st.floats(1e-3, 1e4))
def test_occupation_monotone_in_temperature(t1, t2):
    w = 2 * math.pi * 15e6
    lo, hi = sorted((t1, t2))
    assert thermal_occupation(w, lo) <= thermal_occupation(w, hi)


@given(st.floats(100.5, 1e6))
def test_occupation_high_temperature_asymptote(ratio):
    w = 2 * math.pi * 15e6
    T = ratio * HBAR * w / K_B
    n = thermal_occupation(w, T)
    assert abs(n - ratio + 0.5) / n < 1e-3


@given(st.floats(0, 50), st.floats(0, 50))
def test_couplings_scale_linearly(dc, rc):
    base = derive_rates(default_params())
    r = derive_rates(default_params().replace(dc_scale=dc, rc_scale=rc))
    assert r.D_norm == pytest.approx(dc * base.D_norm, rel=1e-14, abs=0)
    assert r.R_norm == pytest.approx(rc * base.R_norm, rel=1e-14, abs=0)


def test_derive_rates_is_pure(ref):
    assert derive_rates(ref) == derive_rates(ref)


def test_unit_system_invariance(ref):
    """Recompute with lengths in micrometres and constants rescaled to match."""
    um = 1e6
    p_um = ref.replace(
        wavelength_lambda=ref.wavelength_lambda * um,
        eff_mass_m=ref.eff_mass_m,
        input_power_P=ref.input_power_P * um**2,  # kg um^2 / s^3
        disp_coupling_d=ref.disp_coupling_d / um,
        decay_length_l0=ref.decay_length_l0 * um,
    )
    si = derive_rates(ref)
    alt = derive_rates(p_um, hbar=HBAR * um**2, k_b=K_B * um**2, c=C_LIGHT * um)
    for name in ("omega_c", "kappa0", "kappa1", "kappa", "gamma_m", "D_norm", "R_norm",
                 "drive_E", "nbar"):
        assert getattr(alt, name) == pytest.approx(getattr(si, name), rel=1e-13), name
    assert alt.x_zpf_norm == pytest.approx(si.x_zpf_norm * um, rel=1e-13)
    assert alt.r_reactive == pytest.approx(si.r_reactive / um, rel=1e-13)


@pytest.mark.parametrize("field,value", [
    ("mech_Q", -1.0),
    ("optical_Q", 0.0),
    ("coupling_ratio", 0.0),
    ("input_power_P", float("nan")),
    ("wavelength_lambda", float("inf")),
    ("rc_scale", -0.1),
    ("dc_scale", -1.0),
    ("temperature_T", -1.0),
    ("detuning_s", float("nan")),
])
def test_domain_errors_name_the_field(field, value):
    with pytest.raises(ParameterError) as info:
        PhysicalParams(**{field: value})
    assert info.value.field == field


def test_negative_detuning_allowed():
    assert PhysicalParams(detuning_s=-1e8).detuning_s == -1e8


def test_angular_quotes_drop_two_pi():
    ordinary = default_params()
    angular = default_params(angular_quotes=True)
    assert ordinary.mech_freq_omega_m == pytest.approx(2 * math.pi * angular.mech_freq_omega_m)
    assert ordinary.disp_coupling_d == pytest.approx(2 * math.pi * angular.disp_coupling_d)
    assert angular.detuning_ratio == pytest.approx(1.8)


class TestEvanescentProfile:
    def test_contact_is_identity(self):
        assert evanescent_profile(0.0, 3.0, 1e-7, delta_omega_at_contact=5.0) == (5.0, 3.0)

    def test_half_decay_length(self):
        dw, k1 = evanescent_profile(50e-9, 3.0, 100e-9, delta_omega_at_contact=5.0)
        assert dw == pytest.approx(5.0 / math.e)
        assert k1 == pytest.approx(3.0 / math.e)

    @given(st.floats(1e-10, 5e-7))
    def test_finite_difference_slope(self, x0):
        l0 = 100e-9
        h = l0 * 1e-6
        k0 = 2.77e8
        lo = evanescent_profile(x0 - h, k0, l0)[1]
        hi = evanescent_profile(x0 + h, k0, l0)[1]
        fd = (hi - lo) / (2 * h)
        value = evanescent_profile(x0, k0, l0)[1]
        assert fd == pytest.approx(evanescent_slope(value, l0), rel=1e-6)

    def test_reactive_slope_matches_rate(self, ref_rates):
        # kappa1 grows as the gap closes: d kappa1/d(-x) = 2 kappa1 / l0 = r
        assert -evanescent_slope(ref_rates.kappa1, 100e-9) == pytest.approx(
            ref_rates.r_reactive)

    def test_negative_gap_rejected(self):
        with pytest.raises(ParameterError):
            evanescent_profile(-1e-9, 1.0, 1e-7)
