"""System parameters, network geometry and derived constants.

Powers and noise variances are stored linear. dB values are converted only
at the config-file / CLI boundary (see :func:`parse_config_text`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Union


@dataclass(frozen=True)
class Combined:
    """Fixed SU1 information-receiver noise variance (the default reading)."""

    sigma2: float = 1.0


@dataclass(frozen=True)
class Split:
    """SU1 noise built from antenna and conversion noise: (1 - rho) * s_su1 + s_c."""

    sigma2_su1: float = 1.0
    sigma2_c: float = 1.0


NoiseMode = Union[Combined, Split]


@dataclass(frozen=True)
class Explicit:
    d1: float
    d2: float
    d3: float
    d4: float
    d5: float


@dataclass(frozen=True)
class LineLayout:
    """PU1 at (0, 0), PU2 at (L, 0), SU1 at (d1, 0), SU2 at (L/2, su2_offset)."""

    L: float = 2.0
    d1: float = 1.0
    su2_offset: float = 1.0


Geometry = Union[Explicit, LineLayout]


@dataclass(frozen=True)
class SystemConfig:
    Pp1: float = 1e4
    Pp2: float = 1e4
    eta: float = 0.9
    alpha: float = 0.9
    rho1: float = 0.5
    rho2: float = 0.5
    m: float = 3.0
    Rp: float = 1.0
    Rs: float = 1.0
    sigma2_pu1: float = 1.0
    sigma2_pu2: float = 1.0
    sigma2_su2: float = 1.0
    noise_mode: NoiseMode = field(default_factory=Combined)
    lambda1: float = 1.0
    lambda2: float = 1.0
    lambda3: float = 1.0
    lambda4: float = 1.0
    lambda5: float = 1.0
    lambda6: float = 1.0
    lambda7: float = 1.0
    geometry: Geometry = field(default_factory=LineLayout)

    @property
    def lambdas(self) -> tuple[float, ...]:
        return (self.lambda1, self.lambda2, self.lambda3, self.lambda4,
                self.lambda5, self.lambda6, self.lambda7)

    @property
    def distances(self) -> tuple[float, float, float, float, float]:
        g = self.geometry
        if isinstance(g, Explicit):
            return (g.d1, g.d2, g.d3, g.d4, g.d5)
        return layout_distances(g.L, g.d1, g.su2_offset, check=False)

    def with_rho(self, rho: float) -> "SystemConfig":
        return replace(self, rho1=rho, rho2=rho)

    def with_power_db(self, power_db: float) -> "SystemConfig":
        p = db_to_linear(power_db)
        return replace(self, Pp1=p, Pp2=p)

    def with_relay_position(self, d1: float) -> "SystemConfig":
        g = self.geometry
        if not isinstance(g, LineLayout):
            raise ConfigError([RangeViolation("geometry", type(g).__name__, "LineLayout")])
        return replace(self, geometry=replace(g, d1=d1))


def default_config() -> SystemConfig:
    """Default scenario: L = 2 m, 40 dB per PU, eta = alpha = 0.9, rho = 0.5, m = 3."""
    return SystemConfig()


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


# ---------------------------------------------------------------------------
# validation

@dataclass(frozen=True)
class RangeViolation:
    field: str
    value: object
    allowed: str

    def __str__(self) -> str:
        return f"{self.field} = {self.value!r} violates {self.allowed}"


class ConfigError(ValueError):
    """Raised with every violated invariant attached as ``violations``."""

    def __init__(self, violations: list[RangeViolation]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


def _positive(name: str, value: float, out: list[RangeViolation]) -> None:
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        out.append(RangeViolation(name, value, "(0, inf)"))


def _open_unit(name: str, value: float, out: list[RangeViolation]) -> None:
    if not (isinstance(value, (int, float)) and 0.0 < value < 1.0):
        out.append(RangeViolation(name, value, "(0, 1)"))


def check(cfg: SystemConfig) -> list[RangeViolation]:
    """Return every invariant violation of ``cfg`` (empty list when valid)."""
    out: list[RangeViolation] = []
    _open_unit("rho1", cfg.rho1, out)
    _open_unit("rho2", cfg.rho2, out)
    _open_unit("alpha", cfg.alpha, out)
    if not (isinstance(cfg.eta, (int, float)) and 0.0 < cfg.eta <= 1.0):
        out.append(RangeViolation("eta", cfg.eta, "(0, 1]"))
    for name in ("Pp1", "Pp2", "m", "Rp", "Rs", "sigma2_pu1", "sigma2_pu2", "sigma2_su2",
                 "lambda1", "lambda2", "lambda3", "lambda4", "lambda5", "lambda6", "lambda7"):
        _positive(name, getattr(cfg, name), out)

    nm = cfg.noise_mode
    if isinstance(nm, Combined):
        _positive("sigma2", nm.sigma2, out)
    elif isinstance(nm, Split):
        _positive("sigma2_su1", nm.sigma2_su1, out)
        _positive("sigma2_c", nm.sigma2_c, out)
    else:
        out.append(RangeViolation("noise_mode", nm, "Combined | Split"))

    g = cfg.geometry
    if isinstance(g, Explicit):
        for i, d in enumerate((g.d1, g.d2, g.d3, g.d4, g.d5), start=1):
            _positive(f"d{i}", d, out)
    elif isinstance(g, LineLayout):
        _positive("L", g.L, out)
        _positive("su2_offset", g.su2_offset, out)
        if not (isinstance(g.d1, (int, float)) and 0.0 < g.d1 < g.L):
            out.append(RangeViolation("d1", g.d1, f"(0, L={g.L})"))
    else:
        out.append(RangeViolation("geometry", g, "Explicit | LineLayout"))
    return out


def validate(cfg: SystemConfig) -> SystemConfig:
    """Return ``cfg`` unchanged if it satisfies every invariant, else raise ConfigError."""
    violations = check(cfg)
    if violations:
        raise ConfigError(violations)
    return cfg


# ---------------------------------------------------------------------------
# geometry and derived constants

def layout_distances(L: float, d1: float, su2_offset: float, *, check: bool = True
                     ) -> tuple[float, float, float, float, float]:
    """Distances (d1..d5) for the collinear PU1-SU1-PU2 layout with SU2 off-axis."""
    if check:
        bad = []
        _positive("L", L, bad)
        _positive("su2_offset", su2_offset, bad)
        if not 0.0 < d1 < L:
            bad.append(RangeViolation("d1", d1, f"(0, L={L})"))
        if bad:
            raise ConfigError(bad)
    half = 0.5 * L
    d2 = L - d1
    d3 = math.hypot(half, su2_offset)
    d4 = math.hypot(L - half, su2_offset)
    d5 = math.hypot(d1 - half, su2_offset)
    return (d1, d2, d3, d4, d5)


@dataclass(frozen=True)
class DerivedConstants:
    a: float
    b: float
    a_p: float
    b_p: float
    a_pp: float
    b_pp: float
    c: float
    gamma_p1: float
    gamma_p2: float
    gamma_s: float
    sigma2_eff1: float
    sigma2_eff2: float
    # alpha - gamma_p2 * (1 - alpha); phase-3 PU decoding is possible iff > 0
    ceiling_margin: float
    d: tuple[float, float, float, float, float]

    @property
    def ceiling_hit(self) -> bool:
        return self.ceiling_margin <= 0.0


def derive(cfg: SystemConfig) -> DerivedConstants:
    d1, d2, d3, d4, d5 = d = cfg.distances
    m = cfg.m
    d1m, d2m, d5m = d1 ** m, d2 ** m, d5 ** m
    eta, alpha = cfg.eta, cfg.alpha

    nm = cfg.noise_mode
    if isinstance(nm, Split):
        s1 = (1.0 - cfg.rho1) * nm.sigma2_su1 + nm.sigma2_c
        s2 = (1.0 - cfg.rho2) * nm.sigma2_su1 + nm.sigma2_c
    else:
        s1 = s2 = nm.sigma2

    gamma_p2 = 2.0 ** (2.0 * cfg.Rp) - 1.0
    return DerivedConstants(
        a=cfg.rho1 * cfg.Pp1 / d1m,
        b=cfg.rho2 * cfg.Pp2 / d2m,
        a_p=alpha * eta / (2.0 * d1m * cfg.sigma2_pu1),
        b_p=(1.0 - alpha) * eta / (2.0 * d1m * cfg.sigma2_pu1),
        a_pp=alpha * eta / (2.0 * d2m * cfg.sigma2_pu2),
        b_pp=(1.0 - alpha) * eta / (2.0 * d2m * cfg.sigma2_pu2),
        c=(1.0 - alpha) * eta / (2.0 * d5m * cfg.sigma2_su2),
        gamma_p1=2.0 ** (4.0 * cfg.Rp) - 1.0,
        gamma_p2=gamma_p2,
        gamma_s=2.0 ** (2.0 * cfg.Rs) - 1.0,
        sigma2_eff1=s1,
        sigma2_eff2=s2,
        ceiling_margin=alpha - gamma_p2 * (1.0 - alpha),
        d=d,
    )


# ---------------------------------------------------------------------------
# key-value config files

_SCALAR_KEYS = {f.name.lower(): f.name for f in fields(SystemConfig)
                if f.name not in ("noise_mode", "geometry")}
_DB_KEYS = {"pp1", "pp2", "sigma2_pu1", "sigma2_pu2", "sigma2_su2",
            "sigma2", "sigma2_su1", "sigma2_c"}
_GEOMETRY_KEYS = {"l", "d1", "d2", "d3", "d4", "d5", "su2_offset"}
_NOISE_KEYS = {"sigma2", "sigma2_su1", "sigma2_c"}

CONFIG_KEYS = sorted(set(_SCALAR_KEYS) | _GEOMETRY_KEYS | _NOISE_KEYS
                     | {"rho", "pp", "geometry", "noise_mode"}
                     | {k + "_db" for k in _DB_KEYS | {"pp"}})


def _parse_pairs(text: str, origin: str) -> list[tuple[str, str]]:
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError([RangeViolation(f"{origin}:{lineno}", raw, "name = value")])
        key, value = (s.strip() for s in line.split("=", 1))
        pairs.append((key, value))
    return pairs


def apply_settings(base: SystemConfig, pairs: list[tuple[str, str]]) -> SystemConfig:
    """Apply ``(key, value)`` string pairs in order; later keys win.

    Keys are case-insensitive SystemConfig field names, plus ``rho`` (both
    splitting factors), ``pp`` (both PU powers), ``geometry = line|explicit``,
    ``noise_mode = combined|split``, the geometry/noise sub-fields, and
    ``<key>_db`` variants of every power and variance.
    """
    scalars: dict[str, float] = {}
    geo: dict[str, float] = {}
    noise: dict[str, float] = {}
    geo_kind = "explicit" if isinstance(base.geometry, Explicit) else "line"
    noise_kind = "split" if isinstance(base.noise_mode, Split) else "combined"
    bad: list[RangeViolation] = []

    for key, value in pairs:
        k = key.strip().lower()
        if k == "geometry":
            if value.lower() not in ("line", "explicit"):
                bad.append(RangeViolation(key, value, "line | explicit"))
            geo_kind = value.lower()
            continue
        if k == "noise_mode":
            if value.lower() not in ("combined", "split"):
                bad.append(RangeViolation(key, value, "combined | split"))
            noise_kind = value.lower()
            continue
        to_linear = False
        if k.endswith("_db") and k[:-3] in _DB_KEYS | {"pp"}:
            k, to_linear = k[:-3], True
        try:
            x = float(value)
        except ValueError:
            bad.append(RangeViolation(key, value, "a number"))
            continue
        if to_linear:
            x = db_to_linear(x)
        if k == "rho":
            scalars["rho1"] = scalars["rho2"] = x
        elif k == "pp":
            scalars["Pp1"] = scalars["Pp2"] = x
        elif k in _GEOMETRY_KEYS:
            geo["L" if k == "l" else k] = x
        elif k in _NOISE_KEYS:
            noise[k] = x
        elif k in _SCALAR_KEYS:
            scalars[_SCALAR_KEYS[k]] = x
        else:
            bad.append(RangeViolation(key, value, "a known config key"))
    if bad:
        raise ConfigError(bad)

    g = base.geometry
    if geo_kind == "line":
        start = g if isinstance(g, LineLayout) else LineLayout()
        unknown = set(geo) - {"L", "d1", "su2_offset"}
        if unknown:
            raise ConfigError([RangeViolation(k, geo[k], "explicit geometry only")
                               for k in sorted(unknown)])
        geometry: Geometry = replace(start, **geo)
    else:
        start_d = dict(zip(("d1", "d2", "d3", "d4", "d5"), base.distances))
        if "L" in geo or "su2_offset" in geo:
            raise ConfigError([RangeViolation("geometry", "explicit", "no L / su2_offset")])
        start_d.update(geo)
        geometry = Explicit(**start_d)

    nm = base.noise_mode
    if noise_kind == "combined":
        start_n = nm if isinstance(nm, Combined) else Combined()
        if set(noise) - {"sigma2"}:
            raise ConfigError([RangeViolation(k, noise[k], "split noise mode only")
                               for k in sorted(set(noise) - {"sigma2"})])
        noise_mode: NoiseMode = replace(start_n, **noise)
    else:
        start_s = nm if isinstance(nm, Split) else Split()
        if "sigma2" in noise:
            raise ConfigError([RangeViolation("sigma2", noise["sigma2"], "combined noise mode only")])
        noise_mode = replace(start_s, **noise)

    return replace(base, geometry=geometry, noise_mode=noise_mode, **scalars)


def parse_config_text(text: str, base: SystemConfig | None = None, origin: str = "<text>"
                      ) -> SystemConfig:
    return apply_settings(base or default_config(), _parse_pairs(text, origin))


def load_config(path: str | Path, base: SystemConfig | None = None) -> SystemConfig:
    path = Path(path)
    return parse_config_text(path.read_text(encoding="utf-8"), base, origin=str(path))


def dump_config(cfg: SystemConfig) -> str:
    """Serialise to the key-value format; ``load`` of the result reproduces ``cfg``."""
    lines = []
    for f in fields(SystemConfig):
        if f.name in ("noise_mode", "geometry"):
            continue
        lines.append(f"{f.name} = {getattr(cfg, f.name)!r}")
    nm = cfg.noise_mode
    if isinstance(nm, Split):
        lines += ["noise_mode = split", f"sigma2_su1 = {nm.sigma2_su1!r}",
                  f"sigma2_c = {nm.sigma2_c!r}"]
    else:
        lines += ["noise_mode = combined", f"sigma2 = {nm.sigma2!r}"]
    g = cfg.geometry
    if isinstance(g, Explicit):
        lines.append("geometry = explicit")
        lines += [f"d{i} = {v!r}" for i, v in enumerate(cfg.distances, start=1)]
    else:
        lines += ["geometry = line", f"L = {g.L!r}", f"d1 = {g.d1!r}",
                  f"su2_offset = {g.su2_offset!r}"]
    return "\n".join(lines) + "\n"
