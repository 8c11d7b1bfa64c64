"""Spectrum and energy efficiency versus total transmit power (Pp1 = Pp2)."""

from __future__ import annotations

import argparse
from dataclasses import dataclass
from pathlib import Path

from swipt_twr import sweeps
from swipt_twr.model import default_config


@dataclass(frozen=True)
class Experiment:
    total_from_db: float = 0.0
    total_to_db: float = 45.0
    steps: int = 46
    rho: float = 0.5
    mc_trials: int = 0
    seed: int = 0
    out_dir: Path = Path("results")


def run(exp: Experiment) -> sweeps.SweepResult:
    exp.out_dir.mkdir(parents=True, exist_ok=True)
    spec = sweeps.SweepSpec("total_power_db", exp.total_from_db, exp.total_to_db, exp.steps,
                            exp.mc_trials, exp.seed)
    res = sweeps.run_sweep(default_config().with_rho(exp.rho), spec)
    path = exp.out_dir / "power_sweep.csv"
    path.write_text(sweeps.to_csv(res))
    (exp.out_dir / "power_sweep.gp").write_text(sweeps.gnuplot_script(str(path), "total_power_db"))
    print(f"{'total dB':>8} {'SE':>8} {'EE':>12}")
    for r in res.rows[::5]:
        print(f"{r.param:8.1f} {r.se:8.4f} {r.ee:12.4e}")
    x, ee = sweeps.find_optimum(res, "ee", refine=False)
    print(f"SE at {res.rows[-1].param:g} dB = {res.rows[-1].se:.4f}; EE peaks at {x:g} dB ({ee:.3e})")
    return res


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rho", type=float, default=0.5)
    ap.add_argument("--trials", type=int, default=0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("results"))
    a = ap.parse_args()
    run(Experiment(rho=a.rho, mc_trials=a.trials, seed=a.seed, out_dir=a.out))


if __name__ == "__main__":
    main()
