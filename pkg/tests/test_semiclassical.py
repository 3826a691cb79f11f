import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaugelab.fields import Constants
from gaugelab.semiclassical import (MIN_ORACLE_STEPS, SlitSetup, ab_phase_electric,
                                    ab_phase_magnetic, fringe_shift_electric,
                                    fringe_shift_magnetic, semi_phase, summary_row,
                                    trajectory_oracle)

UNIT = Constants.with_planck(1.0)   # c = h = e = q = 1


def setup(**kw):
    base = dict(L=10.0, d=0.1, v=100.0, m=1.0, con=UNIT)
    base.update(kw)
    return SlitSetup.from_kinematics(**base)


def test_de_broglie_invariant():
    with pytest.raises(ValueError):
        SlitSetup(L=1, d=0.1, lambda_dB=0.5, v=1.0, m=1.0, con=UNIT)
    s = SlitSetup(L=1, d=0.1, lambda_dB=1.0, v=1.0, m=1.0, con=UNIT)
    assert s.lambda_dB == 1.0


@pytest.mark.parametrize("kw", [{"L": 0.0}, {"d": -1.0}, {"v": 0.0}, {"W": -0.1}])
def test_invalid_geometry(kw):
    with pytest.raises(ValueError):
        setup(**kw)


def test_magnetic_closed_forms():
    s = setup(W=0.05, B=2.0)
    assert ab_phase_magnetic(s) == pytest.approx(2 * math.pi * 2.0 * 0.05 * 0.1)
    assert fringe_shift_magnetic(s) == pytest.approx(-2.0 * 0.05 * 10.0 * 0.01)
    assert semi_phase(s, fringe_shift_magnetic(s)) == pytest.approx(-ab_phase_magnetic(s))


def test_electric_closed_forms():
    s = setup(T=0.005, E=3.0)
    assert ab_phase_electric(s) == pytest.approx(-2 * math.pi * 0.005 * 3.0 * 0.1)
    assert fringe_shift_electric(s) == pytest.approx(3.0 * 0.005 * 10.0 * 0.01)


def test_regime_warning_attached():
    assert ab_phase_magnetic(setup(W=0.6, B=1.0)).regime_warnings
    assert not ab_phase_magnetic(setup(W=0.01, B=1.0)).regime_warnings
    assert summary_row(setup(T=0.01, E=1.0), "electric")["warnings"]


def test_negative_charge_flips_deflection():
    pos = trajectory_oracle(setup(W=0.05, B=2.0), "magnetic")[0]
    neg = trajectory_oracle(setup(W=0.05, B=2.0, q=-1.0), "magnetic")[0]
    assert pos < 0 < neg and neg == pytest.approx(-pos, rel=1e-9)


def test_zero_field_no_deflection():
    assert trajectory_oracle(setup(W=0.05), "magnetic") == (0.0, 0.0)
    assert trajectory_oracle(setup(T=0.01), "electric") == (0.0, 0.0)


def test_oracle_step_floor():
    with pytest.raises(ValueError):
        trajectory_oracle(setup(W=0.05, B=1.0), "magnetic", steps=MIN_ORACLE_STEPS - 1)
    with pytest.raises(ValueError):
        trajectory_oracle(setup(W=0.05, B=1.0), "sideways")


def test_oracle_velocity_kick():
    _, dv = trajectory_oracle(setup(W=0.05, B=2.0), "magnetic")
    assert dv == pytest.approx(-2.0 * 0.05 / UNIT.c, rel=1e-6)
    _, dv = trajectory_oracle(setup(T=0.005, E=3.0), "electric")
    assert dv == pytest.approx(3.0 * 0.005, rel=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.floats(1, 100), st.floats(1e-3, 0.5), st.floats(1, 1e3), st.floats(0.1, 10),
       st.floats(0.1, 5) | st.floats(-5, -0.1), st.floats(1e-4, 0.05), st.floats(0.1, 10))
def test_sign_theorem_property(L, dfrac, v, m, q, ratio, field):
    con = Constants.with_planck(1.0)
    mag = SlitSetup.from_kinematics(L=L, d=dfrac * L, v=v, m=m, q=q, con=con, W=ratio * L, B=field)
    ele = SlitSetup.from_kinematics(L=L, d=dfrac * L, v=v, m=m, q=q, con=con,
                                    T=ratio * L / v, E=field)
    assert semi_phase(mag, fringe_shift_magnetic(mag)) / ab_phase_magnetic(mag) == \
        pytest.approx(-1.0, rel=1e-9)
    assert semi_phase(ele, fringe_shift_electric(ele)) / ab_phase_electric(ele) == \
        pytest.approx(-1.0, rel=1e-9)


def test_sign_theorem_in_gaussian_units():
    con = Constants(c=2.99792458e10, hbar=1.0545718e-27, q=-4.80320e-10, e=4.80320e-10,
                    m=9.109e-28)
    s = SlitSetup.from_kinematics(L=100.0, d=1e-3, v=1e8, m=con.m, q=con.q, con=con,
                                  W=1e-2, B=1e-4)
    ratio = semi_phase(s, fringe_shift_magnetic(s)) / ab_phase_magnetic(s)
    assert ratio == pytest.approx(-1.0, rel=1e-9)


def test_oracle_matches_closed_form_electric_exactly():
    s = setup(T=0.005, E=3.0)
    assert trajectory_oracle(s, "electric")[0] == pytest.approx(fringe_shift_electric(s), rel=1e-9)


def test_summary_row_values():
    row = summary_row(setup(W=0.05, B=2.0), "magnetic")
    assert row["ratio"] == pytest.approx(-1.0) and row["variant"] == "magnetic"
    assert np.isfinite(row["ab_phase"])


def test_half_flux_quantum_gives_pi():
    s = setup(W=0.05, B=1.0 / (2 * 0.05 * 0.1))      # B W d = 1/2 = Phi_0 / 2
    assert ab_phase_magnetic(s) == pytest.approx(math.pi, rel=1e-12)
    e = setup(T=0.005, E=1.0 / (2 * 0.005 * 0.1))
    assert ab_phase_electric(e) == pytest.approx(-math.pi, rel=1e-12)


def test_reference_displacements():
    # BW = 0.1, ET = 0.1, L = 10, lambda = 0.01 in units with h = c = e = q = 1
    mag = setup(W=0.05, B=2.0)
    ele = setup(T=0.005, E=20.0)
    assert fringe_shift_magnetic(mag) == pytest.approx(-0.01, rel=1e-12)
    assert fringe_shift_electric(ele) == pytest.approx(0.01, rel=1e-12)
    assert trajectory_oracle(mag, "magnetic")[0] == pytest.approx(-0.01, abs=1e-4)
    assert trajectory_oracle(ele, "electric")[0] == pytest.approx(0.01, abs=1e-4)


def test_oracle_converges_under_step_refinement():
    s = setup(W=0.5, B=0.2)
    coarse = trajectory_oracle(s, "magnetic", steps=10_000)[0]
    fine = trajectory_oracle(s, "magnetic", steps=40_000)[0]
    assert coarse == pytest.approx(fine, rel=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 5), st.floats(0.1, 5), st.floats(0.5, 4))
def test_odd_in_charge_and_field_and_linear_in_L(q, field, alpha):
    mag = setup(W=0.05, B=field, q=q)
    for flipped in (setup(W=0.05, B=field, q=-q), setup(W=0.05, B=-field, q=q)):
        assert ab_phase_magnetic(flipped) == -ab_phase_magnetic(mag)
        assert fringe_shift_magnetic(flipped) == -fringe_shift_magnetic(mag)
    longer = setup(W=0.05, B=field, q=q, L=10.0 * alpha)
    assert fringe_shift_magnetic(longer) == pytest.approx(alpha * fringe_shift_magnetic(mag))
    assert semi_phase(longer, fringe_shift_magnetic(longer)) == \
        pytest.approx(semi_phase(mag, fringe_shift_magnetic(mag)), rel=1e-12)


def test_zero_fields_give_zero_phases():
    s = setup()
    assert ab_phase_magnetic(s) == 0.0 and ab_phase_electric(s) == 0.0
    assert fringe_shift_electric(s) == 0.0 and semi_phase(s, 0.0) == 0.0
