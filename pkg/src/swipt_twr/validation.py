"""Self-checks run by ``swipt-twr validate``.

Each check returns a :class:`Check`; nothing raises on a numerical mismatch so
that one broken routine cannot hide the others.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate

from . import analytic, specfun
from .model import default_config
from .montecarlo import estimate_outage


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def _rel(a: float, b: float) -> float:
    if a == b:
        return 0.0
    return abs(a - b) / max(abs(b), 1e-300)


def check_bessel_vs_quadrature(tol: float = 1e-10) -> Check:
    worst = 0.0
    for order in (1, 2):
        for x in (1e-6, 1e-3, 0.1, 0.5, 1.0, 1.9, 2.0, 2.1, 5.0, 20.0, 100.0, 500.0):
            worst = max(worst, _rel(specfun.bessel_k(order, x), specfun.bessel_k_quadrature(order, x)))
    return Check("bessel_k vs cosh-integral quadrature", worst <= tol, f"max rel err {worst:.2e}")


def check_closed_form_vs_oracle(tol: float = 1e-8) -> Check:
    worst = 0.0
    grid = np.logspace(-2, 2, 4)
    spec = specfun.QuadratureSpec(rel_tol=1e-11, abs_tol=0.0)
    for K in grid:
        for b1 in grid:
            for b2 in grid * 1.7:
                closed, _ = analytic.inverse_energy_success(K, b1, b2)
                oracle = specfun.exp_ratio_integral(K, b1, b2, A=b1 * b2 / (b2 - b1), spec=spec)
                worst = max(worst, _rel(closed, oracle))
            closed, _ = analytic.inverse_energy_success(K, b1, b1)
            worst = max(worst, _rel(closed, specfun.erlang_weighted_integral(K, b1, spec=spec)))
    return Check("phase-3 closed form vs quadrature oracles", bool(worst <= tol),
                 f"max rel err {worst:.2e}")


def check_pdf_normalisation(tol: float = 1e-9) -> Check:
    worst = 0.0
    for a, b, l1, l2 in [(1, 2, 1, 1), (1, 1, 1, 1), (3e3, 5e3, 0.5, 2.0),
                         (1.0, 1.0 + 1e-7, 1.0, 1.0), (0.01, 100.0, 1.0, 3.0)]:
        scale = max(a / l1, b / l2)
        total, _ = integrate.quad(analytic.pdf_Y, 0.0, 80.0 * scale, args=(a, b, l1, l2),
                                  epsabs=1e-13, epsrel=1e-12, limit=200,
                                  points=[min(a / l1, b / l2), scale])
        worst = max(worst, abs(total - 1.0))
    return Check("pdf_Y integrates to one", worst <= tol, f"max |mass - 1| {worst:.2e}")


def check_degenerate_continuity(tol: float = 1e-6) -> Check:
    cfg = default_config()
    d2 = cfg.distances[1]
    worst = 0.0
    # move b = rho2 Pp2 / d2^m just across the switch on either side
    g = analytic.DEGENERATE_REL_GAP
    below = replace(cfg, Pp2=cfg.Pp2 * (1.0 + 1.9 * g))
    above = replace(cfg, Pp2=cfg.Pp2 * (1.0 + 2.1 * g))
    pb, deg_b = analytic.phase_probabilities(below)
    pa, deg_a = analytic.phase_probabilities(above)
    for name in ("p_pu1_ph3", "p_pu2_ph3", "p_su2_ph3"):
        worst = max(worst, abs(getattr(pb, name) - getattr(pa, name)))
    switched = deg_b and not deg_a
    return Check("degenerate-branch continuity", switched and worst < tol,
                 f"branches {'switched' if switched else 'did not switch'}, max jump {worst:.2e}"
                 f" (d2 = {d2})")


def check_mc_smoke(n_trials: int = 100_000, seed: int = 2024) -> Check:
    cfg = default_config()
    out = analytic.analytic_outage(cfg)
    pu, su = estimate_outage(cfg, n_trials, seed)
    z_pu, z_su = pu.z_score(out.p_out_pu), su.z_score(out.p_out_su)
    ok = abs(z_pu) <= 3.0 and abs(z_su) <= 3.0
    return Check(f"Monte Carlo smoke test ({n_trials} trials)", ok,
                 f"z_pu = {z_pu:+.2f}, z_su = {z_su:+.2f}")


def run_checks(fast: bool = False) -> list[Check]:
    checks = [check_bessel_vs_quadrature, check_closed_form_vs_oracle,
              check_pdf_normalisation, check_degenerate_continuity]
    if not fast:
        checks.append(check_mc_smoke)
    results = []
    for fn in checks:
        try:
            results.append(fn())
        except Exception as exc:  # a crashing check is a failed check
            results.append(Check(fn.__name__, False, f"raised {type(exc).__name__}: {exc}"))
    return results
