"""Closed-form outage probabilities, SE and EE.

Every phase-3 success probability has the form E[exp(-K / Y)] where
Y = a X1 + b X2 is the (scaled) harvested energy, a hypoexponential variable
with rates beta1 = lambda1 / a and beta2 = lambda2 / b.  Using

    int_0^inf exp(-K/y - beta y) dy = 2 sqrt(K / beta) K_1(2 sqrt(K beta))

gives the two-term K_1 expression; at beta1 == beta2 it is 0/0 and the
Erlang-2 limit 2 beta K K_2(2 sqrt(beta K)) is used instead.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy import integrate

from . import specfun
from .model import DerivedConstants, SystemConfig, derive, validate

# relative rate gap below which Y is treated as Erlang-2
DEGENERATE_REL_GAP = 1e-6
_LOG_SPACE_BELOW = 1e-12


@dataclass(frozen=True)
class PhaseProbabilities:
    p_su1_ph1: float
    p_su1_ph2: float
    p_su2_ph1: float
    p_su2_ph2: float
    p_pu1_ph3: float
    p_pu2_ph3: float
    p_su2_ph3: float


@dataclass(frozen=True)
class AnalyticOutage:
    p_out_pu: float
    p_out_su: float
    degenerate_branch_used: bool


def _clip01(p: float) -> float:
    return min(1.0, max(0.0, p))


def is_degenerate(beta1: float, beta2: float) -> bool:
    return abs(beta1 - beta2) / (beta1 + beta2) < DEGENERATE_REL_GAP


def _g(K: float, beta: float) -> float:
    """int_0^inf exp(-K/y - beta y) dy."""
    return 2.0 * math.sqrt(K / beta) * specfun.bessel_k(1, 2.0 * math.sqrt(K * beta))


def inverse_energy_success(K: float, beta1: float, beta2: float) -> tuple[float, bool]:
    """E[exp(-K / Y)] for Y = sum of Exp(beta1) and Exp(beta2).

    Returns ``(probability, degenerate_branch_used)``.
    """
    if K <= 0.0:
        return 1.0, False
    if is_degenerate(beta1, beta2):
        # midpoint rate keeps the branch switch continuous to O(gap^2)
        beta = 0.5 * (beta1 + beta2)
        z = 2.0 * math.sqrt(K * beta)
        p = beta1 * beta2 * 2.0 * (K / beta) * specfun.bessel_k(2, z)
        return _clip01(p), True
    p = beta1 * beta2 / (beta2 - beta1) * (_g(K, beta1) - _g(K, beta2))
    return _clip01(p), False


def pdf_Y(y: float, a: float, b: float, lambda1: float, lambda2: float) -> float:
    """Density of Y = a X1 + b X2 with X_i ~ Exp(lambda_i)."""
    if y <= 0.0:
        return 0.0
    b1, b2 = lambda1 / a, lambda2 / b
    if is_degenerate(b1, b2):
        beta = 0.5 * (b1 + b2)
        return b1 * b2 * y * math.exp(-beta * y)
    # b1 b2 / (b2 - b1) * (e^{-b1 y} - e^{-b2 y}) is symmetric in (b1, b2);
    # factoring out the slower exponential avoids cancellation and overflow
    lo, gap = min(b1, b2), abs(b2 - b1)
    return -b1 * b2 * math.exp(-lo * y) * math.expm1(-gap * y) / gap


def cdf_Y(y: float, a: float, b: float, lambda1: float, lambda2: float) -> float:
    if y <= 0.0:
        return 0.0
    b1, b2 = lambda1 / a, lambda2 / b
    if is_degenerate(b1, b2):
        beta = 0.5 * (b1 + b2)
        return -math.expm1(-beta * y) - beta * y * math.exp(-beta * y)
    return 1.0 - (b2 * math.exp(-b1 * y) - b1 * math.exp(-b2 * y)) / (b2 - b1)


# ---------------------------------------------------------------------------
# per-phase success probabilities

def _decode_threshold_su1(dc: DerivedConstants, cfg: SystemConfig, phase: int) -> float:
    if phase == 1:
        return dc.gamma_p1 * dc.d[0] ** cfg.m * dc.sigma2_eff1 / ((1.0 - cfg.rho1) * cfg.Pp1)
    return dc.gamma_p1 * dc.d[1] ** cfg.m * dc.sigma2_eff2 / ((1.0 - cfg.rho2) * cfg.Pp2)


def _decode_threshold_su2(dc: DerivedConstants, cfg: SystemConfig, phase: int) -> float:
    if phase == 1:
        return dc.gamma_p1 * dc.d[2] ** cfg.m * cfg.sigma2_su2 / cfg.Pp1
    return dc.gamma_p1 * dc.d[3] ** cfg.m * cfg.sigma2_su2 / cfg.Pp2


def p_su1_phase1(dc: DerivedConstants, cfg: SystemConfig) -> float:
    return math.exp(-cfg.lambda1 * _decode_threshold_su1(dc, cfg, 1))


def p_su1_phase2(dc: DerivedConstants, cfg: SystemConfig) -> float:
    return math.exp(-cfg.lambda2 * _decode_threshold_su1(dc, cfg, 2))


def p_su2_phase1(dc: DerivedConstants, cfg: SystemConfig) -> float:
    return math.exp(-cfg.lambda3 * _decode_threshold_su2(dc, cfg, 1))


def p_su2_phase2(dc: DerivedConstants, cfg: SystemConfig) -> float:
    return math.exp(-cfg.lambda4 * _decode_threshold_su2(dc, cfg, 2))


def energy_rates(dc: DerivedConstants, cfg: SystemConfig) -> tuple[float, float]:
    """Exponential rates (lambda1 / a, lambda2 / b) of the two energy terms."""
    return cfg.lambda1 / dc.a, cfg.lambda2 / dc.b


def pu_phase3_k(dc: DerivedConstants) -> tuple[float, float]:
    """SINR-inversion constants k for PU1 and PU2; inf when the ceiling is hit."""
    if dc.ceiling_hit:
        return math.inf, math.inf
    g = dc.gamma_p2
    k1 = g / (dc.a_p - g * dc.b_p)
    k2 = g / (dc.a_pp - g * dc.b_pp)
    # rounding can leave a_p - g b_p tiny or negative right at the ceiling
    return (k1 if k1 > 0 else math.inf), (k2 if k2 > 0 else math.inf)


def _p_pu_phase3(dc, cfg, which: int) -> tuple[float, bool]:
    k = pu_phase3_k(dc)[which]
    if math.isinf(k):
        return 0.0, False
    lam = cfg.lambda6 if which == 0 else cfg.lambda7
    return inverse_energy_success(lam * k, *energy_rates(dc, cfg))


def p_pu1_phase3(dc: DerivedConstants, cfg: SystemConfig) -> float:
    return _p_pu_phase3(dc, cfg, 0)[0]


def p_pu2_phase3(dc: DerivedConstants, cfg: SystemConfig) -> float:
    return _p_pu_phase3(dc, cfg, 1)[0]


def _p_su2_phase3(dc, cfg) -> tuple[float, bool]:
    return inverse_energy_success(cfg.lambda5 * dc.gamma_s / dc.c, *energy_rates(dc, cfg))


def p_su2_phase3(dc: DerivedConstants, cfg: SystemConfig) -> float:
    return _p_su2_phase3(dc, cfg)[0]


# ---------------------------------------------------------------------------
# outage, SE, EE

def product(factors) -> float:
    """Product of probabilities, in log space once any factor is tiny."""
    factors = list(factors)
    if any(f == 0.0 for f in factors):
        return 0.0
    if min(factors) < _LOG_SPACE_BELOW:
        return math.exp(math.fsum(math.log(f) for f in factors))
    out = 1.0
    for f in factors:
        out *= f
    return out


def phase_probabilities(cfg: SystemConfig, dc: DerivedConstants | None = None
                        ) -> tuple[PhaseProbabilities, bool]:
    dc = dc or derive(cfg)
    pu1, deg1 = _p_pu_phase3(dc, cfg, 0)
    pu2, deg2 = _p_pu_phase3(dc, cfg, 1)
    su3, deg3 = _p_su2_phase3(dc, cfg)
    probs = PhaseProbabilities(
        p_su1_ph1=p_su1_phase1(dc, cfg),
        p_su1_ph2=p_su1_phase2(dc, cfg),
        p_su2_ph1=p_su2_phase1(dc, cfg),
        p_su2_ph2=p_su2_phase2(dc, cfg),
        p_pu1_ph3=pu1,
        p_pu2_ph3=pu2,
        p_su2_ph3=su3,
    )
    return probs, deg1 or deg2 or deg3


def _outage_pu(pp: PhaseProbabilities) -> float:
    return 1.0 - product((pp.p_su1_ph1, pp.p_su1_ph2, pp.p_pu1_ph3, pp.p_pu2_ph3))


def _outage_su(pp: PhaseProbabilities) -> float:
    return 1.0 - product((pp.p_su1_ph1, pp.p_su2_ph1, pp.p_su1_ph2, pp.p_su2_ph2,
                          pp.p_su2_ph3))


def analytic_outage(cfg: SystemConfig) -> AnalyticOutage:
    validate(cfg)
    pp, degenerate = phase_probabilities(cfg)
    return AnalyticOutage(_outage_pu(pp), _outage_su(pp), degenerate)


def outage_pu(cfg: SystemConfig) -> float:
    return analytic_outage(cfg).p_out_pu


def outage_su(cfg: SystemConfig) -> float:
    return analytic_outage(cfg).p_out_su


def spectrum_efficiency_from(cfg: SystemConfig, p_out_pu: float, p_out_su: float) -> float:
    # two PU messages share the 2T frame; SU data only rides on the T/2 broadcast share
    return cfg.Rp * (1.0 - p_out_pu) + 0.5 * cfg.Rs * (1.0 - p_out_su)


def spectrum_efficiency(cfg: SystemConfig) -> float:
    out = analytic_outage(cfg)
    return spectrum_efficiency_from(cfg, out.p_out_pu, out.p_out_su)


def energy_efficiency(cfg: SystemConfig) -> float:
    return spectrum_efficiency(cfg) / (cfg.Pp1 + cfg.Pp2)


# ---------------------------------------------------------------------------
# exact joint probabilities (no independence assumption between phases)

def _shifted_inverse_energy(K: float, y0: float, beta1: float, beta2: float,
                            a: float, b: float, lambda1: float, lambda2: float) -> float:
    """E[exp(-K / (y0 + Y))] by quadrature over the density of Y."""
    if K <= 0.0:
        return 1.0
    if math.isinf(K):
        return 0.0

    def fn(u):
        y = math.exp(u)
        return math.exp(-K / (y0 + y)) * pdf_Y(y, a, b, lambda1, lambda2) * y

    scale_lo = 1.0 / max(beta1, beta2)
    scale_hi = 1.0 / min(beta1, beta2)
    lo = math.log(scale_lo) - 60.0
    hi = math.log(scale_hi) + math.log(800.0)
    pts = sorted({math.log(scale_lo), math.log(scale_hi)}
                 | ({0.5 * math.log(K / beta1), 0.5 * math.log(K / beta2)}
                    if y0 == 0.0 else {math.log(y0)} if y0 > 0 else set()))
    pts = [p for p in pts if lo < p < hi]
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        val, _ = integrate.quad(fn, lo, hi, points=pts or None,
                                epsabs=1e-14, epsrel=1e-11, limit=400)
    return _clip01(val)


def exact_outage(cfg: SystemConfig) -> tuple[float, float]:
    """PU and SU outage of the protocol without factorising over shared fading.

    The SU1 decode events (X1, X2 above thresholds) and the phase-3 events
    share X1 and X2 through the harvested energy, and both PU phase-3 events
    share it too.  Conditioning on the decode events shifts the energy by the
    memoryless excess, which leaves a single one-dimensional integral.
    """
    validate(cfg)
    dc = derive(cfg)
    t1 = _decode_threshold_su1(dc, cfg, 1)
    t2 = _decode_threshold_su1(dc, cfg, 2)
    t3 = _decode_threshold_su2(dc, cfg, 1)
    t4 = _decode_threshold_su2(dc, cfg, 2)
    beta1, beta2 = energy_rates(dc, cfg)
    y0 = dc.a * t1 + dc.b * t2
    decode = math.exp(-cfg.lambda1 * t1 - cfg.lambda2 * t2)
    args = (y0, beta1, beta2, dc.a, dc.b, cfg.lambda1, cfg.lambda2)

    k1, k2 = pu_phase3_k(dc)
    K_pu = cfg.lambda6 * k1 + cfg.lambda7 * k2
    pu_ok = decode * _shifted_inverse_energy(K_pu, *args)

    K_su = cfg.lambda5 * dc.gamma_s / dc.c
    su_ok = (decode * math.exp(-cfg.lambda3 * t3 - cfg.lambda4 * t4)
             * _shifted_inverse_energy(K_su, *args))
    return 1.0 - pu_ok, 1.0 - su_ok
