r"""Modified Bessel functions K_1, K_2 and quadrature oracles.

``bessel_k`` uses the ascending series for x <= 2 and the trapezoidal rule on

.. math::
    K_\nu(x) = \int_0^\infty e^{-x\cosh t}\cosh(\nu t)\,dt

for x > 2. The integrand is analytic in a strip around the real axis and
decays doubly exponentially, so the trapezoidal rule converges geometrically
in the step size.

The two integral oracles are evaluated with adaptive quadrature after the
substitution y = e^u; they exist to check closed forms, not to replace them.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

EULER_GAMMA = 0.57721566490153286061
SERIES_SWITCH = 2.0
# exp(-x) underflows to 0 past this point
UNDERFLOW_X = 745.2

_TRAP_STEP = 0.1


class DomainError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol >= 0):
            raise DomainError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")


# ---------------------------------------------------------------------------
# K_nu

def _series_k0_k1(x: float) -> tuple[float, float]:
    """K_0 and K_1 from their ascending series; accurate for 0 < x <= 2."""
    q = 0.25 * x * x
    log_half = math.log(0.5 * x)

    # I_0, I_1 and the digamma-weighted sums
    i0 = i1 = 0.0
    s0 = s1 = 0.0
    term0 = 1.0            # q^k / (k!)^2
    term1 = 1.0            # q^k / (k! (k+1)!)
    psi_k1 = -EULER_GAMMA  # psi(k + 1)
    psi_k2 = 1.0 - EULER_GAMMA  # psi(k + 2)
    k = 0
    while True:
        i0 += term0
        i1 += term1
        s0 += psi_k1 * term0
        s1 += (psi_k1 + psi_k2) * term1
        k += 1
        term0 *= q / (k * k)
        term1 *= q / (k * (k + 1))
        psi_k1 += 1.0 / k
        psi_k2 += 1.0 / (k + 1)
        if term0 < 1e-18 * i0 and term1 < 1e-18 * i1:
            break
    i1 *= 0.5 * x
    k0 = -log_half * i0 + s0
    k1 = 1.0 / x + log_half * i1 - 0.25 * x * s1
    return k0, k1


def _trapezoid_k_scaled(order: int, x: float) -> float:
    """exp(x) * K_order(x) by the trapezoidal rule; x > 2."""
    # cut where x (cosh t - 1) - order * t exceeds ~46, i.e. < 1e-20 relative
    t_max = math.acosh(1.0 + (46.0 + 3.0 * order) / x) + 0.5
    # the peak narrows like 1/sqrt(x); the step has to follow it
    h = min(_TRAP_STEP, 0.6 / math.sqrt(x))
    n = int(math.ceil(t_max / h))
    t = np.arange(n + 1) * h
    # cosh(t) - 1 = 2 sinh(t/2)^2 keeps the exponent exact for large x
    f = np.exp(-2.0 * x * np.sinh(0.5 * t) ** 2) * np.cosh(order * t)
    return h * (float(np.sum(f[1:])) + 0.5 * float(f[0]))


def bessel_k_scaled(order: int, x: float) -> float:
    """exp(x) * K_order(x) for order in {0, 1, 2} and x > 0."""
    if order not in (0, 1, 2):
        raise DomainError(f"unsupported order {order}")
    if not (x > 0 and math.isfinite(x)):
        raise DomainError(f"x must be positive and finite, got {x}")
    if x > SERIES_SWITCH:
        return _trapezoid_k_scaled(order, x)
    k0, k1 = _series_k0_k1(x)
    val = (k0, k1, k0 + 2.0 * k1 / x)[order]
    return val * math.exp(x)


def bessel_k(order: int, x: float, *, with_flag: bool = False):
    """Modified Bessel function of the second kind, K_1 or K_2, for x > 0.

    Past the double-precision underflow point the result is exactly 0.0. With
    ``with_flag=True`` returns ``(value, underflowed)``.
    """
    if order not in (1, 2):
        raise DomainError(f"unsupported order {order}; only 1 and 2 are provided")
    if not (x > 0):
        raise DomainError(f"x must be positive, got {x}")
    if math.isinf(x) or x >= UNDERFLOW_X:
        return (0.0, True) if with_flag else 0.0
    if x > SERIES_SWITCH:
        val = _trapezoid_k_scaled(order, x) * math.exp(-x)
    else:
        k0, k1 = _series_k0_k1(x)
        val = k1 if order == 1 else k0 + 2.0 * k1 / x
    return (val, val == 0.0) if with_flag else val


def _bessel_k0(x: float) -> float:
    if x > SERIES_SWITCH:
        return _trapezoid_k_scaled(0, x) * math.exp(-x)
    return _series_k0_k1(x)[0]


# ---------------------------------------------------------------------------
# quadrature oracles

def _quad_log(fn, lo: float, hi: float, points, spec: QuadratureSpec) -> tuple[float, float]:
    pts = sorted(p for p in set(points) if lo < p < hi)
    if len(pts) >= spec.max_subdivisions:
        # QUADPACK needs more intervals than breakpoints
        pts = []
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(fn, lo, hi, points=pts or None,
                                      epsabs=spec.abs_tol, epsrel=spec.rel_tol,
                                      limit=spec.max_subdivisions)
        except integrate.IntegrationWarning as exc:
            raise ConvergenceError(str(exc)) from exc
    if err > max(spec.abs_tol, spec.rel_tol * abs(val)) * 10:
        raise ConvergenceError(f"quadrature error {err:.3g} exceeds tolerance for value {val:.3g}")
    return val, err


def _log_bounds(k: float, betas) -> tuple[float, float, list[float]]:
    bmin, bmax = min(betas), max(betas)
    hi = math.log(750.0 / bmin)
    lo = max(math.log(k / 750.0), -350.0) if k > 0 else -350.0
    lo = min(lo, hi - 1.0)
    peaks = [0.5 * math.log(k / b) for b in betas] if k > 0 else []
    return lo, hi, peaks + [-math.log(bmax), -math.log(bmin)]


def exp_ratio_integral(k: float, beta1: float, beta2: float, A: float = 1.0,
                       spec: QuadratureSpec = QuadratureSpec()) -> float:
    """A * int_0^inf exp(-k/y) (exp(-beta1 y) - exp(-beta2 y)) dy by quadrature."""
    if not (k > 0 and beta1 > 0 and beta2 > 0):
        raise DomainError("k, beta1, beta2 must be positive")
    if beta1 == beta2 or A == 0:
        return 0.0
    slow, gap = min(beta1, beta2), abs(beta2 - beta1)
    sign = 1.0 if beta1 < beta2 else -1.0

    def fn(u):
        y = math.exp(u)
        # e^{-b1 y} - e^{-b2 y} via the slower exponential: no cancellation when b1 ~ b2
        return -sign * math.exp(-k / y - slow * y) * math.expm1(-gap * y) * y

    lo, hi, pts = _log_bounds(k, (beta1, beta2))
    val, _ = _quad_log(fn, lo, hi, pts, spec)
    return A * val


def erlang_weighted_integral(k: float, beta: float,
                             spec: QuadratureSpec = QuadratureSpec()) -> float:
    """beta^2 * int_0^inf y exp(-k/y - beta y) dy by quadrature."""
    if not (k > 0 and beta > 0):
        raise DomainError("k and beta must be positive")

    def fn(u):
        y = math.exp(u)
        return beta * beta * y * y * math.exp(-k / y - beta * y)

    lo, hi, pts = _log_bounds(k, (beta,))
    return _quad_log(fn, lo, hi, pts, spec)[0]


def bessel_k_quadrature(order: int, x: float,
                        spec: QuadratureSpec = QuadratureSpec(rel_tol=1e-12, abs_tol=0.0)
                        ) -> float:
    """K_order(x) from its cosh integral by adaptive quadrature (test oracle)."""
    if not x > 0:
        raise DomainError("x must be positive")
    # scaled integrand; truncate where it drops below 1e-300 of the t=0 value
    t_max = math.acosh(1.0 + 700.0 / x) + 1.0

    def fn(t):
        return math.exp(-2.0 * x * math.sinh(0.5 * t) ** 2) * math.cosh(order * t)

    val, _ = _quad_log(fn, 0.0, t_max, [], spec)
    return val * math.exp(-x)
