"""Run configuration: flat ``key = value`` files, named presets and overrides.

Lines are ``key = value``; ``#`` starts a comment.  Unknown keys are an
error.  A config file may start from a preset with ``preset = <name>``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigError

SCENARIOS = ("shear-flow", "explosion", "beam", "beam-varying-eps", "custom")


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str = "custom"
    solver: str = "dlr"  # "dlr" or "fluid" (MacCormack reference)
    nx: int = 32
    ny: int = 32
    nv: int = 32
    ax: float = 0.0
    bx: float = 1.0
    ay: float = 0.0
    by: float = 1.0
    av: float = -6.0
    bv: float = 6.0
    rank: int = 3
    dt: float = 1e-3
    t_end: float = 0.1
    # Knudsen number: "constant" uses eps, "reynolds" uses v0 / Re, "varying" the tanh profile
    eps_mode: str = "constant"
    eps: float = 1e-2
    Re: float = 1000.0
    eps0: float = 1e-4
    disc: str = "spectral"
    limiter: str = "van-leer"
    # scenario parameters
    v0: float = 0.1
    Delta: float = 1.0 / 30.0
    delta: float = 5e-3
    R: float = 1e-2
    n_b: float = 1e-3
    v_b: float = 4.0
    w_b: float = 2.0
    T_b: float = 0.1
    amplitude: float = 0.1  # density perturbation of the custom scenario
    # output
    output_dir: str = "output"
    diag_every: int = 10
    snapshot_times: tuple = ()
    reference: str = ""
    stress_diag: bool = False
    figures: bool = True

    def __post_init__(self):
        validate(self)

    def with_overrides(self, overrides: dict) -> "ScenarioConfig":
        return dataclasses.replace(self, **_coerce_all(overrides))

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ",".join(repr(float(t)) for t in v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"

    @property
    def n_steps(self):
        return max(1, int(round(self.t_end / self.dt)))


def validate(c: ScenarioConfig):
    if c.scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {c.scenario!r}; expected one of {', '.join(SCENARIOS)}")
    if c.solver not in ("dlr", "fluid"):
        raise ConfigError(f"solver must be 'dlr' or 'fluid', got {c.solver!r}")
    if c.eps_mode not in ("constant", "reynolds", "varying"):
        raise ConfigError(f"eps_mode must be constant, reynolds or varying, got {c.eps_mode!r}")
    if c.disc not in ("spectral", "scfd"):
        raise ConfigError(f"disc must be spectral or scfd, got {c.disc!r}")
    if c.limiter not in ("upwind", "lax-wendroff", "van-leer"):
        raise ConfigError(f"unknown limiter {c.limiter!r}")
    for name in ("nx", "ny"):
        n = getattr(c, name)
        if n < 4 or n % 2:
            raise ConfigError(f"{name} must be an even integer >= 4, got {n}")
    if c.nv < 4:
        raise ConfigError(f"nv must be >= 4, got {c.nv}")
    if c.rank < 1:
        raise ConfigError(f"rank must be >= 1, got {c.rank}")
    if not (c.dt > 0 and c.t_end > 0):
        raise ConfigError("dt and t_end must be positive")
    if c.eps <= 0 or c.Re <= 0 or c.eps0 <= 0:
        raise ConfigError("eps, Re and eps0 must be positive")
    if c.diag_every < 1:
        raise ConfigError("diag_every must be >= 1")
    if not (c.ax < c.bx and c.ay < c.by and c.av < c.bv):
        raise ConfigError("domain bounds must be increasing")


PRESETS: dict[str, dict] = {
    "shear-flow": dict(
        scenario="shear-flow", nx=64, ny=64, nv=32, av=-6.0, bv=6.0, rank=3, dt=2e-4, t_end=2.0,
        eps_mode="reynolds", Re=1000.0, disc="spectral", diag_every=100, snapshot_times=(1.0, 2.0),
    ),
    "explosion": dict(
        scenario="explosion", nx=128, ny=128, nv=32, ax=-1.5, bx=1.5, ay=-1.5, by=1.5, av=-6.0, bv=6.0,
        rank=3, dt=1e-3, t_end=0.8, eps_mode="constant", eps=1e-5, disc="scfd", diag_every=20,
        snapshot_times=(0.4, 0.8),
    ),
    "beam": dict(
        scenario="beam", nx=16, ny=16, nv=128, av=-8.0, bv=8.0, rank=2, dt=1e-3, t_end=2.0,
        eps_mode="constant", eps=0.1, disc="spectral", diag_every=20, snapshot_times=(1.0, 2.0),
    ),
    "beam-varying-eps": dict(
        scenario="beam-varying-eps", nx=40, ny=4, nv=60, ax=-1.0, bx=1.0, ay=0.0, by=1.0, av=-8.0, bv=8.0,
        rank=10, dt=5e-5, t_end=0.5, eps_mode="varying", eps0=1e-4, disc="scfd", diag_every=200,
        snapshot_times=(0.25, 0.5),
    ),
    "custom": dict(scenario="custom"),
}


def preset(name: str) -> ScenarioConfig:
    try:
        return ScenarioConfig(**PRESETS[name])
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}") from None


_TYPES = {f.name: f.type for f in fields(ScenarioConfig)}


def _coerce(key: str, raw):
    if key not in _TYPES:
        raise ConfigError(f"unknown config key {key!r}")
    if not isinstance(raw, str):
        return raw
    typ = _TYPES[key]
    raw = raw.strip()
    try:
        if typ == "int":
            return int(float(raw)) if float(raw).is_integer() else _bad(key, raw)
        if typ == "float":
            return float(raw)
        if typ == "bool":
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            return _bad(key, raw)
        if typ == "tuple":
            return tuple(float(t) for t in raw.split(",") if t.strip())
    except ValueError:
        _bad(key, raw)
    return raw


def _bad(key, raw):
    raise ConfigError(f"invalid value {raw!r} for {key!r}")


def _coerce_all(d: dict) -> dict:
    return {k: _coerce(k, v) for k, v in d.items()}


def parse_text(text: str, source="<config>") -> dict:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        k, v = (s.strip() for s in line.split("=", 1))
        if not k:
            raise ConfigError(f"{source}:{lineno}: empty key")
        out[k] = v
    return out


def parse_overrides(items) -> dict:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        k, v = item.split("=", 1)
        out[k.strip()] = v
    return out


def load(source: str, overrides=None) -> ScenarioConfig:
    """Resolve a preset name or config-file path and apply ``key=value`` overrides."""
    if source in PRESETS:
        base, values = dict(PRESETS[source]), {}
    else:
        path = Path(source)
        if not path.is_file():
            raise ConfigError(f"{source!r} is neither a preset ({', '.join(PRESETS)}) nor a readable file")
        values = parse_text(path.read_text(), str(path))
        name = values.pop("preset", None)
        if name is not None and name not in PRESETS:
            raise ConfigError(f"unknown preset {name!r} in {source}")
        base = dict(PRESETS[name]) if name else {}
    values.update(parse_overrides(overrides))
    base.update(_coerce_all(values))
    try:
        return ScenarioConfig(**base)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
