import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from swipt_twr import analytic, specfun
from swipt_twr.analytic import (analytic_outage, cdf_Y, energy_efficiency, exact_outage,
                                inverse_energy_success, outage_pu, outage_su, p_pu1_phase3,
                                p_pu2_phase3, p_su1_phase1, p_su1_phase2, p_su2_phase1,
                                p_su2_phase2, p_su2_phase3, pdf_Y, phase_probabilities,
                                spectrum_efficiency)
from swipt_twr.model import LineLayout, SystemConfig, derive

ORACLE = specfun.QuadratureSpec(rel_tol=1e-11, abs_tol=0.0)


def test_su1_phase1_default(cfg):
    assert p_su1_phase1(derive(cfg), cfg) == pytest.approx(math.exp(-0.003), rel=1e-15)


def test_su1_phase1_zero_rate(cfg):
    c = replace(cfg, Rp=0.0)
    assert p_su1_phase1(derive(c), c) == 1.0


def test_su1_phase1_vanishes_as_rho_to_one(cfg):
    c = replace(cfg, rho1=1 - 1e-12)
    assert p_su1_phase1(derive(c), c) < 1e-300


def test_su1_phase2_mirrors_phase1(cfg):
    dc = derive(cfg)
    assert p_su1_phase2(dc, cfg) == p_su1_phase1(dc, cfg)


def test_su1_phase2_rate_scaling(cfg):
    c2 = replace(cfg, lambda2=2.0)
    base = p_su1_phase2(derive(cfg), cfg)
    assert p_su1_phase2(derive(c2), c2) == pytest.approx(base ** 2, rel=1e-14)


def test_su1_phase2_infinite_power(cfg):
    c = replace(cfg, Pp2=1e300)
    assert p_su1_phase2(derive(c), c) == 1.0


def test_su2_phases_default(cfg):
    dc = derive(cfg)
    expected = math.exp(-15 * 2 * math.sqrt(2) / 1e4)  # 0.99576634659844720...
    assert p_su2_phase1(dc, cfg) == pytest.approx(expected, rel=1e-14)
    assert p_su2_phase2(dc, cfg) == pytest.approx(expected, rel=1e-14)


def test_su2_phase1_ignores_rho(cfg):
    c = cfg.with_rho(0.9)
    assert p_su2_phase1(derive(c), c) == p_su2_phase1(derive(cfg), cfg)


# --- density of the harvested energy ----------------------------------------

def test_pdf_at_origin():
    assert pdf_Y(0.0, 1.0, 2.0, 1.0, 1.0) == 0.0


def test_pdf_distinct_rates():
    assert pdf_Y(1.0, 1.0, 2.0, 1.0, 1.0) == pytest.approx(math.exp(-0.5) - math.exp(-1.0),
                                                          rel=1e-14)


def test_pdf_equal_rates():
    # convolution of two Exp(1) densities evaluated by quadrature
    conv, _ = integrate.quad(lambda u: math.exp(-u) * math.exp(-(1.0 - u)), 0.0, 1.0)
    assert pdf_Y(1.0, 1.0, 1.0, 1.0, 1.0) == pytest.approx(conv, rel=1e-13)
    assert conv == pytest.approx(math.exp(-1.0), rel=1e-14)


@settings(max_examples=100)
@given(st.floats(1e-2, 1e4), st.floats(1e-2, 1e4), st.floats(0.1, 10), st.floats(0.1, 10))
def test_cdf_is_integral_of_pdf(a, b, l1, l2):
    y = 1.3 * max(a / l1, b / l2)
    # the density rises on the fast scale and decays on the slow one
    points = np.geomspace(min(a / l1, b / l2), y, 12)[:-1]
    area, _ = integrate.quad(pdf_Y, 0.0, y, args=(a, b, l1, l2), epsabs=1e-13, epsrel=1e-11,
                             points=points, limit=400)
    assert cdf_Y(y, a, b, l1, l2) == pytest.approx(area, rel=1e-8, abs=1e-12)


# --- phase-3 closed forms vs quadrature --------------------------------------

def test_general_branch_matches_oracle():
    # a = 1, b = 2, unit rates, k = 1
    b1, b2 = 1.0, 0.5
    closed, degenerate = inverse_energy_success(1.0, b1, b2)
    oracle = specfun.exp_ratio_integral(1.0, b1, b2, A=b1 * b2 / (b2 - b1), spec=ORACLE)
    assert not degenerate
    assert closed == pytest.approx(oracle, rel=1e-8)


def test_pu1_phase3_default_uses_erlang_limit(cfg):
    dc = derive(cfg)
    k = dc.gamma_p2 / (dc.a_p - dc.gamma_p2 * dc.b_p)
    beta = cfg.lambda1 / dc.a
    oracle = specfun.erlang_weighted_integral(cfg.lambda6 * k, beta, spec=ORACLE)
    assert p_pu1_phase3(dc, cfg) == pytest.approx(oracle, rel=1e-8)
    assert analytic_outage(cfg).degenerate_branch_used


def test_ceiling_kills_pu_phase3(cfg):
    c = replace(cfg, alpha=0.5)  # ceiling alpha / (1 - alpha) = 1 < gamma_p2 = 3
    dc = derive(c)
    assert p_pu1_phase3(dc, c) == 0.0
    assert p_pu2_phase3(dc, c) == 0.0


def test_pu2_phase3_symmetric(cfg):
    dc = derive(cfg)
    assert p_pu2_phase3(dc, cfg) == p_pu1_phase3(dc, cfg)


def test_pu2_phase3_asymmetric_matches_oracle(cfg):
    c = replace(cfg, geometry=LineLayout(2.0, 0.5, 1.0))
    dc = derive(c)
    b1, b2 = c.lambda1 / dc.a, c.lambda2 / dc.b
    k2 = dc.gamma_p2 / (dc.a_pp - dc.gamma_p2 * dc.b_pp)
    oracle = specfun.exp_ratio_integral(c.lambda7 * k2, b1, b2, A=b1 * b2 / (b2 - b1), spec=ORACLE)
    assert p_pu2_phase3(dc, c) == pytest.approx(oracle, rel=1e-8)


def test_su2_phase3_matches_oracle():
    b1, b2 = 1.0, 0.5  # a = 1, b = 2, unit rates, gamma_s / c = 1
    oracle = specfun.exp_ratio_integral(1.0, b1, b2, A=b1 * b2 / (b2 - b1), spec=ORACLE)
    assert inverse_energy_success(1.0, b1, b2)[0] == pytest.approx(oracle, rel=1e-8)


def test_su2_phase3_zero_rate_and_infinite_gain(cfg):
    c = replace(cfg, Rs=0.0)
    assert p_su2_phase3(derive(c), c) == 1.0
    c = replace(cfg, sigma2_su2=1e-300)  # c -> inf
    assert p_su2_phase3(derive(c), c) == pytest.approx(1.0, abs=1e-12)


def test_continuity_across_degenerate_switch(cfg):
    g = analytic.DEGENERATE_REL_GAP
    # b grows with Pp2: the relative rate gap straddles the switch
    near = [replace(cfg, Pp2=cfg.Pp2 * (1 + f * g)) for f in (1.98, 2.02)]
    (pb, db), (pa, da) = (phase_probabilities(c) for c in near)
    assert db and not da
    for name in ("p_pu1_ph3", "p_pu2_ph3", "p_su2_ph3"):
        assert abs(getattr(pb, name) - getattr(pa, name)) < 1e-6


# --- outage ---------------------------------------------------------------

def test_outage_pu_ceiling_exactly_one(cfg):
    assert outage_pu(replace(cfg, alpha=0.5)) == 1.0
    # gamma_p2 == alpha / (1 - alpha) exactly
    assert outage_pu(replace(cfg, alpha=0.75)) == 1.0


def test_outage_pu_tends_to_one_below_ceiling(cfg):
    values = [outage_pu(replace(cfg, alpha=0.75 + eps)) for eps in (1e-2, 1e-4, 1e-6, 1e-9)]
    assert all(b >= a for a, b in zip(values, values[1:]))
    assert values[0] < 0.1
    assert values[-1] > 1 - 1e-9


def test_outage_no_power(cfg):
    c = replace(cfg, Pp1=1e-12, Pp2=1e-12)
    assert outage_pu(c) == pytest.approx(1.0, abs=1e-12)
    assert outage_su(c) == pytest.approx(1.0, abs=1e-12)


def test_outage_su_huge_rate(cfg):
    assert outage_su(replace(cfg, Rs=40.0)) == pytest.approx(1.0, abs=1e-12)


def test_outage_tiny_rates_vanish(cfg):
    c = replace(cfg, Rp=1e-12, Rs=1e-12)
    assert outage_pu(c) < 1e-9
    assert outage_su(c) < 1e-9


def test_factorisation(cfg):
    for c in (cfg, cfg.with_rho(0.2), cfg.with_power_db(25.0)):
        dc = derive(c)
        prod = (p_su1_phase1(dc, c) * p_su1_phase2(dc, c) * p_pu1_phase3(dc, c)
                * p_pu2_phase3(dc, c))
        assert abs(outage_pu(c) - (1 - prod)) <= 4 * math.ulp(1.0)


def test_log_space_product():
    assert analytic.product([1e-200, 1e-200, 1e-200]) == 0.0  # underflows honestly
    assert analytic.product([1e-150, 1e-150]) == pytest.approx(1e-300, rel=1e-12)
    assert analytic.product([0.5, 0.0]) == 0.0


@st.composite
def configs(draw):
    return SystemConfig(
        Pp1=draw(st.floats(1.0, 1e7)), Pp2=draw(st.floats(1.0, 1e7)),
        eta=draw(st.floats(0.05, 1.0)), alpha=draw(st.floats(0.01, 0.99)),
        rho1=draw(st.floats(0.01, 0.99)), rho2=draw(st.floats(0.01, 0.99)),
        m=draw(st.floats(2.0, 4.0)), Rp=draw(st.floats(0.05, 3.0)), Rs=draw(st.floats(0.05, 3.0)),
        lambda1=draw(st.floats(0.1, 10.0)), lambda2=draw(st.floats(0.1, 10.0)),
        lambda5=draw(st.floats(0.1, 10.0)), lambda6=draw(st.floats(0.1, 10.0)),
        lambda7=draw(st.floats(0.1, 10.0)),
        geometry=LineLayout(2.0, draw(st.floats(0.05, 1.95)), draw(st.floats(0.1, 3.0))),
    )


@settings(max_examples=300)
@given(configs())
def test_probabilities_in_range(c):
    pp, _ = phase_probabilities(c)
    for v in vars(pp).values():
        assert 0.0 <= v <= 1.0
    out = analytic_outage(c)
    assert 0.0 <= out.p_out_pu <= 1.0
    assert 0.0 <= out.p_out_su <= 1.0


@settings(max_examples=50, deadline=None)
@given(configs())
def test_monotone_in_joint_power(c):
    grid = np.linspace(0.0, 50.0, 20)
    pu = [outage_pu(replace(c, Pp1=c.Pp1 * 10 ** (g / 10), Pp2=c.Pp2 * 10 ** (g / 10)))
          for g in grid]
    su = [outage_su(replace(c, Pp1=c.Pp1 * 10 ** (g / 10), Pp2=c.Pp2 * 10 ** (g / 10)))
          for g in grid]
    assert all(b <= a + 1e-12 for a, b in zip(pu, pu[1:]))
    assert all(b <= a + 1e-12 for a, b in zip(su, su[1:]))


# --- SE / EE --------------------------------------------------------------

def test_se_limits(cfg):
    assert analytic.spectrum_efficiency_from(cfg, 0.0, 0.0) == 1.5
    assert analytic.spectrum_efficiency_from(cfg, 1.0, 1.0) == 0.0


def test_ee_is_se_per_total_power(cfg):
    assert energy_efficiency(cfg) == pytest.approx(spectrum_efficiency(cfg) / 2e4, rel=1e-15)


# --- exact joint outage ---------------------------------------------------

def _joint_by_double_quad(c):
    """PU/SU outage from a 2-D integral over (X1, X2): no factorisation at all."""
    dc = derive(c)
    t1 = analytic._decode_threshold_su1(dc, c, 1)
    t2 = analytic._decode_threshold_su1(dc, c, 2)
    k1, k2 = analytic.pu_phase3_k(dc)
    K_pu = c.lambda6 * k1 + c.lambda7 * k2
    K_su = c.lambda5 * dc.gamma_s / dc.c

    def inner(K):
        f = lambda x2, x1: (c.lambda1 * c.lambda2 * math.exp(-c.lambda1 * x1 - c.lambda2 * x2)
                            * math.exp(-K / (dc.a * x1 + dc.b * x2)))
        return integrate.dblquad(f, t1, np.inf, t2, np.inf, epsabs=1e-13, epsrel=1e-10)[0]

    su2 = p_su2_phase1(dc, c) * p_su2_phase2(dc, c)
    return 1 - inner(K_pu), 1 - su2 * inner(K_su)


@pytest.mark.parametrize("rho,power_db", [(0.5, 40.0), (0.3, 30.0), (0.8, 22.0)])
def test_exact_outage_matches_double_integral(cfg, rho, power_db):
    c = cfg.with_rho(rho).with_power_db(power_db)
    pu, su = exact_outage(c)
    ref_pu, ref_su = _joint_by_double_quad(c)
    assert pu == pytest.approx(ref_pu, rel=1e-7)
    assert su == pytest.approx(ref_su, rel=1e-7)


def test_closed_form_overstates_outage(cfg):
    # the factorised closed form treats correlated events as independent
    c = cfg.with_power_db(30.0)
    exact_pu, exact_su = exact_outage(c)
    out = analytic_outage(c)
    assert out.p_out_pu > exact_pu
    assert out.p_out_su > exact_su
