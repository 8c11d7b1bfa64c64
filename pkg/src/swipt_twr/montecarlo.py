"""Monte Carlo simulation of the three-phase protocol.

Randomness is counter based: trial ``i`` of a run with seed ``s`` takes its
seven variates from the Philox stream keyed by ``(s, i // BLOCK)`` at offset
``i % BLOCK``.  Which worker evaluates a block therefore never changes the
variates, and outage counts are integers, so results are identical for any
worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .model import DerivedConstants, SystemConfig, derive, validate

BLOCK = 1 << 16
_SEED_LIMIT = 1 << 64


@dataclass(frozen=True)
class FadingDraw:
    x1: float
    x2: float
    x3: float
    x4: float
    x5: float
    x6: float
    x7: float


@dataclass(frozen=True)
class TrialOutcome:
    r_su1_ph1: float
    r_su1_ph2: float
    r_su2_ph1: float
    r_su2_ph2: float
    r_pu1_ph3: float
    r_pu2_ph3: float
    r_su2_ph3: float
    harvested_power: float
    pu_outage: bool
    su_outage: bool


@dataclass(frozen=True)
class OutageEstimate:
    p_hat: float
    stderr: float
    n_trials: int
    seed: int
    wilson: tuple[float, float] | None = None

    def z_score(self, reference: float) -> float:
        if self.stderr == 0.0:
            return 0.0 if self.p_hat == reference else math.copysign(math.inf, self.p_hat - reference)
        return (self.p_hat - reference) / self.stderr


def wilson_interval(successes: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    p = successes / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def make_estimate(count: int, n: int, seed: int) -> OutageEstimate:
    p = count / n
    stderr = math.sqrt(p * (1.0 - p) / n)
    wilson = wilson_interval(count, n) if p * n < 10 else None
    return OutageEstimate(p, stderr, n, seed, wilson)


# ---------------------------------------------------------------------------
# sampling

def block_generator(seed: int, block: int) -> np.random.Generator:
    if not 0 <= seed < _SEED_LIMIT:
        raise ValueError(f"seed must be in [0, 2**64), got {seed}")
    return np.random.Generator(np.random.Philox(key=seed + (block << 64)))


def draw_block(seed: int, block: int, n: int, lambdas) -> np.ndarray:
    """(n, 7) array of squared channel gains for trials block*BLOCK ... +n."""
    u = block_generator(seed, block).random((n, 7))
    return -np.log1p(-u) / np.asarray(lambdas, dtype=float)


def trial_draw(seed: int, index: int, lambdas) -> FadingDraw:
    """The draw that trial ``index`` of a ``seed`` run sees."""
    block, offset = divmod(index, BLOCK)
    row = draw_block(seed, block, offset + 1, lambdas)[offset]
    return FadingDraw(*map(float, row))


def sample_draw(rng: np.random.Generator, lambdas) -> FadingDraw:
    """Seven independent exponential variates by inverse transform."""
    u = rng.random(7)
    return FadingDraw(*map(float, -np.log1p(-u) / np.asarray(lambdas, dtype=float)))


# ---------------------------------------------------------------------------
# one trial / one block

def _link_gains(cfg: SystemConfig, dc: DerivedConstants) -> dict[str, float]:
    d1, d2, d3, d4, _ = dc.d
    m = cfg.m
    return {
        "su1_1": (1.0 - cfg.rho1) * cfg.Pp1 / (d1 ** m * dc.sigma2_eff1),
        "su1_2": (1.0 - cfg.rho2) * cfg.Pp2 / (d2 ** m * dc.sigma2_eff2),
        "su2_1": cfg.Pp1 / (d3 ** m * cfg.sigma2_su2),
        "su2_2": cfg.Pp2 / (d4 ** m * cfg.sigma2_su2),
        # (a' - gamma b') and (a'' - gamma b''), written through the ceiling margin
        "pu1_net": cfg.eta * dc.ceiling_margin / (2.0 * d1 ** m * cfg.sigma2_pu1),
        "pu2_net": cfg.eta * dc.ceiling_margin / (2.0 * d2 ** m * cfg.sigma2_pu2),
    }


def _rate(prelog: float, sinr):
    return prelog * np.log2(1.0 + sinr)


def run_trial(cfg: SystemConfig, dc: DerivedConstants, draw: FadingDraw) -> TrialOutcome:
    g = _link_gains(cfg, dc)
    x1, x2, x3, x4, x5, x6, x7 = (draw.x1, draw.x2, draw.x3, draw.x4,
                                  draw.x5, draw.x6, draw.x7)
    snr_su1_1, snr_su1_2 = g["su1_1"] * x1, g["su1_2"] * x2
    snr_su2_1, snr_su2_2 = g["su2_1"] * x3, g["su2_2"] * x4
    y = dc.a * x1 + dc.b * x2
    sinr_pu1 = dc.a_p * y * x6 / (dc.b_p * y * x6 + 1.0)
    sinr_pu2 = dc.a_pp * y * x7 / (dc.b_pp * y * x7 + 1.0)
    snr_su2_3 = dc.c * y * x5

    ok_su1 = snr_su1_1 > dc.gamma_p1 and snr_su1_2 > dc.gamma_p1
    ok_su2 = snr_su2_1 > dc.gamma_p1 and snr_su2_2 > dc.gamma_p1
    ok_pu3 = (not dc.ceiling_hit and g["pu1_net"] * y * x6 > dc.gamma_p2
              and g["pu2_net"] * y * x7 > dc.gamma_p2)
    ok_su3 = snr_su2_3 > dc.gamma_s
    return TrialOutcome(
        r_su1_ph1=float(_rate(0.25, snr_su1_1)),
        r_su1_ph2=float(_rate(0.25, snr_su1_2)),
        r_su2_ph1=float(_rate(0.25, snr_su2_1)),
        r_su2_ph2=float(_rate(0.25, snr_su2_2)),
        r_pu1_ph3=float(_rate(0.5, sinr_pu1)),
        r_pu2_ph3=float(_rate(0.5, sinr_pu2)),
        r_su2_ph3=float(_rate(0.5, snr_su2_3)),
        harvested_power=0.5 * cfg.eta * y,
        pu_outage=not (ok_su1 and ok_pu3),
        su_outage=not (ok_su1 and ok_su2 and ok_su3),
    )


def count_outages(cfg: SystemConfig, dc: DerivedConstants, x: np.ndarray) -> tuple[int, int]:
    """Vectorised :func:`run_trial` over rows of ``x``; returns (PU, SU) outage counts."""
    g = _link_gains(cfg, dc)
    x1, x2, x3, x4, x5, x6, x7 = x.T
    y = dc.a * x1 + dc.b * x2
    ok_su1 = (g["su1_1"] * x1 > dc.gamma_p1) & (g["su1_2"] * x2 > dc.gamma_p1)
    ok_su2 = (g["su2_1"] * x3 > dc.gamma_p1) & (g["su2_2"] * x4 > dc.gamma_p1)
    if dc.ceiling_hit:
        ok_pu3 = np.zeros(len(x), dtype=bool)
    else:
        ok_pu3 = (g["pu1_net"] * y * x6 > dc.gamma_p2) & (g["pu2_net"] * y * x7 > dc.gamma_p2)
    ok_su3 = dc.c * y * x5 > dc.gamma_s
    pu_out = ~(ok_su1 & ok_pu3)
    su_out = ~(ok_su1 & ok_su2 & ok_su3)
    return int(pu_out.sum()), int(su_out.sum())


def _run_block(args) -> tuple[int, int]:
    cfg, seed, block, n = args
    dc = derive(cfg)
    return count_outages(cfg, dc, draw_block(seed, block, n, cfg.lambdas))


def estimate_outage(cfg: SystemConfig, n_trials: int, seed: int = 0, workers: int = 1
                    ) -> tuple[OutageEstimate, OutageEstimate]:
    """Monte Carlo PU and SU outage estimates with normal-approximation stderr."""
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    validate(cfg)
    n_blocks = -(-n_trials // BLOCK)
    jobs = [(cfg, seed, j, min(BLOCK, n_trials - j * BLOCK)) for j in range(n_blocks)]
    if workers > 1 and n_blocks > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(_run_block, jobs))
    else:
        counts = [_run_block(job) for job in jobs]
    pu = sum(c[0] for c in counts)
    su = sum(c[1] for c in counts)
    return make_estimate(pu, n_trials, seed), make_estimate(su, n_trials, seed)
