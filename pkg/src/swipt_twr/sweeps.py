"""Parameter sweeps over rho, relay position and PU power, with CSV/JSON output."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import analytic
from .model import ConfigError, SystemConfig, validate
from .montecarlo import estimate_outage

PARAMETERS = ("rho", "d1", "power_db", "total_power_db")
COLUMNS = ("param", "pu_analytic", "su_analytic", "pu_mc", "pu_mc_stderr",
           "su_mc", "su_mc_stderr", "se", "ee")
_MAXIMISE = {"se", "ee"}
_TOTAL_OFFSET_DB = 10.0 * math.log10(2.0)


class SweepError(ValueError):
    pass


class EmptySweep(SweepError):
    pass


class GridMismatch(SweepError):
    pass


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    start: float
    stop: float
    steps: int
    mc_trials: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.parameter not in PARAMETERS:
            raise SweepError(f"unknown sweep parameter {self.parameter!r}; pick one of {PARAMETERS}")
        if not self.start < self.stop:
            raise SweepError("start must be below stop")
        if self.steps < 2:
            raise SweepError("steps must be >= 2")
        if self.mc_trials < 0:
            raise SweepError("mc_trials must be >= 0")
        if self.parameter == "rho" and not (0.0 < self.start and self.stop < 1.0):
            raise SweepError("rho grid must lie inside (0, 1)")

    def grid(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class SweepRow:
    param: float
    pu_analytic: float
    su_analytic: float
    pu_mc: float | None
    pu_mc_stderr: float | None
    su_mc: float | None
    su_mc_stderr: float | None
    se: float
    ee: float


@dataclass
class SweepResult:
    spec: SweepSpec
    base: SystemConfig
    rows: list[SweepRow] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        if name not in COLUMNS:
            raise KeyError(name)
        return np.array([np.nan if getattr(r, name) is None else getattr(r, name)
                         for r in self.rows], dtype=float)

    @property
    def params(self) -> np.ndarray:
        return self.column("param")


def apply_parameter(base: SystemConfig, parameter: str, value: float) -> SystemConfig:
    if parameter == "rho":
        return base.with_rho(value)
    if parameter == "d1":
        return base.with_relay_position(value)
    if parameter == "power_db":
        return base.with_power_db(value)
    if parameter == "total_power_db":
        # Pp1 = Pp2, so each PU carries half of the total
        return base.with_power_db(value - _TOTAL_OFFSET_DB)
    raise SweepError(f"unknown sweep parameter {parameter!r}")


def evaluate_point(cfg: SystemConfig, param: float, mc_trials: int = 0, seed: int = 0,
                   workers: int = 1) -> SweepRow:
    out = analytic.analytic_outage(cfg)
    se = analytic.spectrum_efficiency_from(cfg, out.p_out_pu, out.p_out_su)
    mc = [None] * 4
    if mc_trials:
        pu, su = estimate_outage(cfg, mc_trials, seed, workers=workers)
        mc = [pu.p_hat, pu.stderr, su.p_hat, su.stderr]
    return SweepRow(float(param), out.p_out_pu, out.p_out_su, *mc,
                    se=se, ee=se / (cfg.Pp1 + cfg.Pp2))


def run_sweep(base: SystemConfig, spec: SweepSpec, workers: int = 1) -> SweepResult:
    result = SweepResult(spec, base)
    for i, x in enumerate(spec.grid()):
        cfg = apply_parameter(base, spec.parameter, float(x))
        try:
            validate(cfg)
        except ConfigError as exc:
            raise SweepError(f"grid point {i} ({spec.parameter} = {float(x)!r}): {exc}") from exc
        result.rows.append(evaluate_point(cfg, x, spec.mc_trials, spec.seed, workers))
    return result


def _extremum_index(values: np.ndarray, maximise: bool) -> int:
    if np.all(np.isnan(values)):
        raise EmptySweep("column has no values")
    # argmin/argmax return the first occurrence on ties
    return int(np.nanargmax(values) if maximise else np.nanargmin(values))


def find_optimum(result: SweepResult, column: str, refine: bool = True) -> tuple[float, float]:
    """Grid argmin (argmax for se/ee), then one 10x finer re-sweep around it."""
    if not result.rows:
        raise EmptySweep("sweep has no rows")
    maximise = column in _MAXIMISE
    values = result.column(column)
    i = _extremum_index(values, maximise)
    x, best = float(result.params[i]), float(values[i])
    if not refine:
        return x, best

    params = result.params
    lo = params[max(i - 1, 0)]
    hi = params[min(i + 1, len(params) - 1)]
    n_intervals = (min(i + 1, len(params) - 1) - max(i - 1, 0)) * 10
    fine_spec = replace(result.spec, start=float(lo), stop=float(hi), steps=n_intervals + 1)
    fine = run_sweep(result.base, fine_spec)
    fvals = fine.column(column)
    j = _extremum_index(fvals, maximise)
    return float(fine.params[j]), float(fvals[j])


def improvement_ratio(result_a: SweepResult, result_b: SweepResult, column: str,
                      mode: str = "min") -> float:
    """Percentage reduction of the column's min (or worst-case max) from a to b."""
    pa, pb = result_a.params, result_b.params
    if pa.shape != pb.shape or not np.allclose(pa, pb, rtol=0, atol=1e-12):
        raise GridMismatch("sweeps are not on the same grid")
    if mode not in ("min", "max"):
        raise ValueError("mode must be 'min' or 'max'")
    reduce = np.nanmax if mode == "max" else np.nanmin
    ref = float(reduce(result_a.column(column)))
    new = float(reduce(result_b.column(column)))
    if ref == new:
        return 0.0
    return 100.0 * (1.0 - new / ref)


# ---------------------------------------------------------------------------
# output

def _fmt(x: float | None) -> str:
    return "" if x is None else format(x, ".17g")


def to_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in result.rows:
        w.writerow([_fmt(getattr(r, c)) for c in COLUMNS])
    return buf.getvalue()


def to_json(result: SweepResult) -> str:
    rows = [{c: getattr(r, c) for c in COLUMNS} for r in result.rows]
    return json.dumps(rows, indent=2) + "\n"


def read_csv(text: str) -> list[dict[str, float | None]]:
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        rows.append({k: (float(v) if v != "" else None) for k, v in rec.items()})
    return rows


def gnuplot_script(csv_path: str, parameter: str) -> str:
    xlabel = {"rho": "power splitting factor rho", "d1": "relay distance from PU1 d1 (m)",
              "power_db": "per-PU normalized transmit power (dB)",
              "total_power_db": "total normalized transmit power (dB)"}[parameter]
    return f"""set datafile separator ','
set key autotitle columnhead
set xlabel '{xlabel}'
set ylabel 'outage probability'
set logscale y
set y2label 'SE (bps/Hz)'
set y2tics
plot '{csv_path}' using 1:2 with lines title 'PU analytic', \\
     '' using 1:3 with lines title 'SU analytic', \\
     '' using 1:4 with points title 'PU simulation', \\
     '' using 1:6 with points title 'SU simulation', \\
     '' using 1:8 axes x1y2 with lines dashtype 2 title 'SE'
"""
