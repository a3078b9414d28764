"""Run-configuration files: parsing, validation, canonical serialization.

The format is flat sectioned key-value text.  A value may carry a unit
suffix (``tau_o = 8 dt``); internally everything is dimensionless, with
time in bin widths and rates in inverse bin widths, so units are only
checked, never converted.  The writer emits a canonical form whose
round-trip through the parser reproduces the configuration exactly
(floats are printed with ``repr`` and therefore survive bit-for-bit).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError
from .medium import LONGITUDINAL, TRANSVERSE, MediumConfig
from .dynamics import ProtocolSchedule
from .qubit import TimeBinQubit, make_qubit

__all__ = [
    "QubitSpec",
    "MediumSpec",
    "ScheduleSpec",
    "SweepAxis",
    "SweepSpec",
    "OutputSpec",
    "RunConfig",
    "parse_config",
    "parse_config_file",
    "write_config",
    "SWEEP_PARAMETERS",
]


@dataclass(frozen=True)
class QubitSpec:
    alpha: float
    beta: float
    phi: float = 0.0
    tau_o: float = 8.0
    omega_eg_tau_o: float = 0.0

    def build(self) -> TimeBinQubit:
        return make_qubit(
            self.alpha, self.beta, self.phi, self.tau_o, self.omega_eg_tau_o
        )


@dataclass(frozen=True)
class MediumSpec:
    kind: str
    delta_inh: float
    alpha_o_L: float | None = None
    zeta_over_chi: float | None = None
    gamma_eg: float = 0.0
    delta_k_L: float = 0.0

    def build(self) -> MediumConfig:
        extra = (
            {"alpha_o_L": self.alpha_o_L}
            if self.kind == TRANSVERSE
            else {"zeta_over_chi": self.zeta_over_chi}
        )
        return MediumConfig(
            kind=self.kind,
            delta_inh=self.delta_inh,
            gamma_eg=self.gamma_eg,
            delta_k_L=self.delta_k_L,
            **extra,
        )


@dataclass(frozen=True)
class ScheduleSpec:
    t1: float
    eta: float
    t_max: float | None = None
    nt: int = 4096
    nz: int = 256
    n_nodes: int = 201
    span_factor: float = 50.0
    carrier_detuning: float = 0.0

    def build(self) -> ProtocolSchedule:
        return ProtocolSchedule(
            t1=self.t1,
            eta=self.eta,
            t_max=self.t_max,
            nt=self.nt,
            nz=self.nz,
            n_nodes=self.n_nodes,
            span_factor=self.span_factor,
            carrier_detuning=self.carrier_detuning,
        )


@dataclass(frozen=True)
class SweepAxis:
    name: str
    lo: float
    hi: float
    count: int
    scale: str = "linear"

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.lo])
        if self.scale == "log":
            return np.geomspace(self.lo, self.hi, self.count)
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class SweepSpec:
    axis1: SweepAxis
    axis2: SweepAxis | None = None
    metric: str = "efficiency"


@dataclass(frozen=True)
class OutputSpec:
    path: str = "out"
    format: str = "csv"


@dataclass(frozen=True)
class RunConfig:
    qubit: QubitSpec
    medium: MediumSpec
    schedule: ScheduleSpec
    sweep: SweepSpec | None = None
    output: OutputSpec = field(default_factory=OutputSpec)

    def with_parameter(self, name: str, value: float) -> "RunConfig":
        """Copy of this config with one sweepable parameter replaced."""
        target = SWEEP_PARAMETERS.get(name)
        if target is None:
            raise ConfigError(f"unknown sweep axis parameter {name!r}")
        block, attr = target
        if block == "schedule":
            return replace(self, schedule=replace(self.schedule, **{attr: value}))
        if block == "medium":
            return replace(self, medium=replace(self.medium, **{attr: value}))
        return replace(self, qubit=replace(self.qubit, **{attr: value}))


# Sweepable parameter name -> (config block, attribute).
SWEEP_PARAMETERS = {
    "eta": ("schedule", "eta"),
    "t1": ("schedule", "t1"),
    "tau_o": ("qubit", "tau_o"),
    "alpha_o_L": ("medium", "alpha_o_L"),
    "zeta_over_chi": ("medium", "zeta_over_chi"),
    "gamma_eg": ("medium", "gamma_eg"),
    "delta_k_L": ("medium", "delta_k_L"),
    "delta_inh": ("medium", "delta_inh"),
}

_METRICS = ("efficiency", "gain", "phase_diff")

# Expected unit suffix per key (None means plain dimensionless number).
_UNITS = {
    "phi": "rad",
    "omega_eg_tau_o": "rad",
    "tau_o": "dt",
    "t1": "dt",
    "t_max": "dt",
    "delta_inh": "/dt",
    "gamma_eg": "/dt",
    "carrier_detuning": "/dt",
}

_SECTIONS = {
    "qubit": ("alpha", "beta", "phi", "tau_o", "omega_eg_tau_o"),
    "medium": (
        "kind",
        "delta_inh",
        "alpha_o_L",
        "zeta_over_chi",
        "gamma_eg",
        "delta_k_L",
    ),
    "schedule": (
        "t1",
        "eta",
        "t_max",
        "nt",
        "nz",
        "n_nodes",
        "span_factor",
        "carrier_detuning",
    ),
    "sweep": ("axis1", "axis2", "metric"),
    "output": ("path", "format"),
}

_INT_KEYS = {"nt", "nz", "n_nodes"}
_STR_KEYS = {"kind", "metric", "path", "format"}


def _fail(line_no: int | None, message: str) -> ConfigError:
    return ConfigError(message, line=line_no)


def _parse_number(token: str, line_no: int, key: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise _fail(line_no, f"{key}: expected a number, got {token!r}") from None


def _parse_value(key: str, raw: str, line_no: int):
    tokens = raw.split()
    if not tokens:
        raise _fail(line_no, f"{key}: missing value")
    if key in _STR_KEYS:
        if len(tokens) != 1:
            raise _fail(line_no, f"{key}: expected a single word, got {raw!r}")
        return tokens[0]
    unit = _UNITS.get(key)
    if len(tokens) == 2:
        if unit is None:
            raise _fail(
                line_no, f"{key}: is dimensionless, unexpected unit {tokens[1]!r}"
            )
        if tokens[1] != unit:
            raise _fail(
                line_no, f"{key}: expected unit {unit!r}, got {tokens[1]!r}"
            )
    elif len(tokens) != 1:
        raise _fail(line_no, f"{key}: too many tokens in {raw!r}")
    value = _parse_number(tokens[0], line_no, key)
    if key in _INT_KEYS:
        if value != int(value):
            raise _fail(line_no, f"{key}: expected an integer, got {raw!r}")
        return int(value)
    return value


def _parse_axis(key: str, raw: str, line_no: int) -> SweepAxis:
    tokens = raw.split()
    if len(tokens) != 5:
        raise _fail(
            line_no,
            f"{key}: expected '<name> <min> <max> <count> <linear|log>', got {raw!r}",
        )
    name, lo_s, hi_s, count_s, scale = tokens
    if name not in SWEEP_PARAMETERS:
        known = ", ".join(sorted(SWEEP_PARAMETERS))
        raise _fail(
            line_no, f"{key}: unknown sweep axis parameter {name!r} (known: {known})"
        )
    lo = _parse_number(lo_s, line_no, key)
    hi = _parse_number(hi_s, line_no, key)
    try:
        count = int(count_s)
    except ValueError:
        raise _fail(line_no, f"{key}: count must be an integer, got {count_s!r}")
    if count < 1:
        raise _fail(line_no, f"{key}: count must be >= 1, got {count}")
    if scale not in ("linear", "log"):
        raise _fail(line_no, f"{key}: scale must be linear or log, got {scale!r}")
    if scale == "log" and (lo <= 0 or hi <= 0):
        raise _fail(line_no, f"{key}: log scale requires positive endpoints")
    return SweepAxis(name=name, lo=lo, hi=hi, count=count, scale=scale)


def parse_config(text: str) -> RunConfig:
    """Parse configuration text into a validated :class:`RunConfig`."""
    sections: dict[str, dict[str, tuple[object, int]]] = {}
    current: str | None = None
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in _SECTIONS:
                known = ", ".join(sorted(_SECTIONS))
                raise _fail(line_no, f"unknown section [{name}] (known: {known})")
            if name in sections:
                raise _fail(line_no, f"duplicate section [{name}]")
            sections[name] = {}
            current = name
            continue
        if "=" not in line:
            raise _fail(line_no, f"expected 'key = value', got {line!r}")
        if current is None:
            raise _fail(line_no, "key outside of any [section]")
        key, _, raw_value = line.partition("=")
        key = key.strip()
        raw_value = raw_value.strip()
        if key not in _SECTIONS[current]:
            known = ", ".join(_SECTIONS[current])
            raise _fail(line_no, f"unknown key {key!r} in [{current}] (known: {known})")
        if key in sections[current]:
            raise _fail(line_no, f"duplicate key {key!r} in [{current}]")
        if current == "sweep" and key in ("axis1", "axis2"):
            value: object = _parse_axis(key, raw_value, line_no)
        else:
            value = _parse_value(key, raw_value, line_no)
        sections[current][key] = (value, line_no)
    return _assemble(sections)


def parse_config_file(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config(handle.read())


def _take(block: dict, key: str, default=None):
    if key in block:
        return block[key][0]
    return default


def _require(block: dict, section: str, key: str):
    if key not in block:
        raise ConfigError(f"[{section}] is missing required key {key!r}")
    return block[key][0]


def _assemble(sections: dict) -> RunConfig:
    for name in ("qubit", "medium", "schedule"):
        if name not in sections:
            raise ConfigError(f"missing required section [{name}]")

    qb = sections["qubit"]
    qubit = QubitSpec(
        alpha=_require(qb, "qubit", "alpha"),
        beta=_require(qb, "qubit", "beta"),
        phi=_take(qb, "phi", 0.0),
        tau_o=_take(qb, "tau_o", 8.0),
        omega_eg_tau_o=_take(qb, "omega_eg_tau_o", 0.0),
    )

    mb = sections["medium"]
    kind = _require(mb, "medium", "kind")
    if kind not in (TRANSVERSE, LONGITUDINAL):
        line = mb["kind"][1]
        raise _fail(line, f"kind must be {TRANSVERSE} or {LONGITUDINAL}, got {kind!r}")
    depth_key = "alpha_o_L" if kind == TRANSVERSE else "zeta_over_chi"
    other_key = "zeta_over_chi" if kind == TRANSVERSE else "alpha_o_L"
    if other_key in mb:
        raise _fail(mb[other_key][1], f"{other_key!r} does not apply to {kind} media")
    medium = MediumSpec(
        kind=kind,
        delta_inh=_require(mb, "medium", "delta_inh"),
        gamma_eg=_take(mb, "gamma_eg", 0.0),
        delta_k_L=_take(mb, "delta_k_L", 0.0),
        **{depth_key: _require(mb, "medium", depth_key)},
    )

    sb = sections["schedule"]
    schedule = ScheduleSpec(
        t1=_require(sb, "schedule", "t1"),
        eta=_require(sb, "schedule", "eta"),
        t_max=_take(sb, "t_max"),
        nt=_take(sb, "nt", 4096),
        nz=_take(sb, "nz", 256),
        n_nodes=_take(sb, "n_nodes", 201),
        span_factor=_take(sb, "span_factor", 50.0),
        carrier_detuning=_take(sb, "carrier_detuning", 0.0),
    )

    sweep = None
    if "sweep" in sections:
        wb = sections["sweep"]
        axis1 = _require(wb, "sweep", "axis1")
        axis2 = _take(wb, "axis2")
        metric = _take(wb, "metric", "efficiency")
        if metric not in _METRICS:
            line = wb["metric"][1] if "metric" in wb else None
            raise _fail(line, f"metric must be one of {_METRICS}, got {metric!r}")
        for axis in filter(None, (axis1, axis2)):
            block, attr = SWEEP_PARAMETERS[axis.name]
            if block == "medium" and getattr(medium, attr) is None:
                raise ConfigError(
                    f"sweep axis {axis.name!r} does not apply to {medium.kind} media"
                )
        if metric == "phase_diff" and medium.kind != LONGITUDINAL:
            raise ConfigError("metric phase_diff requires a longitudinal medium")
        sweep = SweepSpec(axis1=axis1, axis2=axis2, metric=metric)

    ob = sections.get("output", {})
    fmt = _take(ob, "format", "csv")
    if fmt != "csv":
        raise _fail(ob["format"][1], f"format must be csv, got {fmt!r}")
    output = OutputSpec(path=_take(ob, "path", "out"), format=fmt)

    return RunConfig(
        qubit=qubit, medium=medium, schedule=schedule, sweep=sweep, output=output
    )


def _format_value(key: str, value) -> str:
    if key in _STR_KEYS:
        return str(value)
    if key in _INT_KEYS:
        return str(int(value))
    body = repr(float(value))
    unit = _UNITS.get(key)
    return f"{body} {unit}" if unit else body


def _axis_line(axis: SweepAxis) -> str:
    return f"{axis.name} {axis.lo!r} {axis.hi!r} {axis.count} {axis.scale}"


def write_config(config: RunConfig) -> str:
    """Serialize to canonical text; ``parse_config`` inverts it exactly."""
    lines = ["[qubit]"]
    for key in ("alpha", "beta", "phi", "tau_o", "omega_eg_tau_o"):
        lines.append(f"{key} = {_format_value(key, getattr(config.qubit, key))}")
    lines.append("")
    lines.append("[medium]")
    lines.append(f"kind = {config.medium.kind}")
    lines.append(f"delta_inh = {_format_value('delta_inh', config.medium.delta_inh)}")
    depth_key = "alpha_o_L" if config.medium.kind == TRANSVERSE else "zeta_over_chi"
    lines.append(
        f"{depth_key} = {_format_value(depth_key, getattr(config.medium, depth_key))}"
    )
    lines.append(f"gamma_eg = {_format_value('gamma_eg', config.medium.gamma_eg)}")
    lines.append(f"delta_k_L = {_format_value('delta_k_L', config.medium.delta_k_L)}")
    lines.append("")
    lines.append("[schedule]")
    lines.append(f"t1 = {_format_value('t1', config.schedule.t1)}")
    lines.append(f"eta = {_format_value('eta', config.schedule.eta)}")
    if config.schedule.t_max is not None:
        lines.append(f"t_max = {_format_value('t_max', config.schedule.t_max)}")
    for key in ("nt", "nz", "n_nodes"):
        lines.append(f"{key} = {_format_value(key, getattr(config.schedule, key))}")
    lines.append(
        f"span_factor = {_format_value('span_factor', config.schedule.span_factor)}"
    )
    lines.append(
        "carrier_detuning = "
        + _format_value("carrier_detuning", config.schedule.carrier_detuning)
    )
    if config.sweep is not None:
        lines.append("")
        lines.append("[sweep]")
        lines.append(f"axis1 = {_axis_line(config.sweep.axis1)}")
        if config.sweep.axis2 is not None:
            lines.append(f"axis2 = {_axis_line(config.sweep.axis2)}")
        lines.append(f"metric = {config.sweep.metric}")
    lines.append("")
    lines.append("[output]")
    lines.append(f"path = {config.output.path}")
    lines.append(f"format = {config.output.format}")
    lines.append("")
    return "\n".join(lines)
