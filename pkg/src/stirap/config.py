"""JSON run configuration.

Schema::

    {
      "protocol": {"type": "linear_sine" | "gaussian", "omega0": float, "t0": float,
                   "tau": float?, "t_width": float?, "free_width": bool?},
      "gamma": float,
      "delta": float?,
      "integrator": {"dt": float?, "sample_stride": int?}?,
      "engines": [str, ...]?,
      "sweep": {"axis": "gamma" | "omega0" | "t0" | "tau", "values": [float, ...]}?
    }

Unknown keys anywhere are rejected.
"""

import json
import math
from dataclasses import dataclass
from typing import Optional, Tuple

from .errors import ConfigError, StirapError
from .lindblad import SimConfig
from .protocols import GAUSSIAN, KINDS, LINEAR_SINE, Protocol

ENGINES = ("bare", "full8", "adiabatic", "reduced", "analytic", "classical")
AXES = ("gamma", "omega0", "t0", "tau")
DEFAULT_ENGINES = ("bare",)

_TOP_KEYS = {"protocol", "gamma", "delta", "integrator", "engines", "sweep"}
_PROTOCOL_KEYS = {"type", "omega0", "t0", "tau", "t_width", "free_width"}
_INTEGRATOR_KEYS = {"dt", "sample_stride"}
_SWEEP_KEYS = {"axis", "values"}


@dataclass(frozen=True)
class SweepSpec:
    base: SimConfig
    axis: str
    values: Tuple[float, ...]
    engines: Tuple[str, ...]

    def __post_init__(self):
        if self.axis not in AXES:
            raise ConfigError(f"sweep axis must be one of {AXES}, got {self.axis!r}")
        if not self.values:
            raise ConfigError("sweep values must be non-empty")
        if not all(math.isfinite(v) for v in self.values):
            raise ConfigError("sweep values must be finite")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ConfigError("sweep values must be strictly increasing")
        if self.axis == "tau" and self.base.protocol.kind != GAUSSIAN:
            raise ConfigError("the tau axis needs the gaussian protocol")
        check_engines(self.engines, self.base.protocol)

    def point(self, value):
        """SimConfig for one value on the sweep axis."""
        try:
            if self.axis == "gamma":
                return self.base.replace(gamma=float(value))
            return self.base.replace(protocol=self.base.protocol.replace(**{self.axis: float(value)}))
        except StirapError as exc:
            raise ConfigError(f"sweep {self.axis}={value}: {exc}") from exc


@dataclass(frozen=True)
class RunConfig:
    sim: SimConfig
    engines: Tuple[str, ...] = DEFAULT_ENGINES
    sweep_axis: Optional[str] = None
    sweep_values: Optional[Tuple[float, ...]] = None

    def sweep(self):
        if self.sweep_axis is None:
            raise ConfigError("configuration has no sweep section")
        return SweepSpec(self.sim, self.sweep_axis, self.sweep_values, self.engines)


def check_engines(engines, protocol):
    if not engines:
        raise ConfigError("at least one engine is required")
    for e in engines:
        if e not in ENGINES:
            raise ConfigError(f"unknown engine {e!r}; choose from {ENGINES}")
    if len(set(engines)) != len(engines):
        raise ConfigError("engines listed more than once")
    if "analytic" in engines and protocol.kind != LINEAR_SINE:
        raise ConfigError("the analytic engine only applies to the linear_sine protocol")


def canonical_engines(engines):
    return tuple(e for e in ENGINES if e in engines)


def _reject_unknown(d, allowed, where):
    if not isinstance(d, dict):
        raise ConfigError(f"{where} must be an object")
    extra = set(d) - allowed
    if extra:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(sorted(extra))}")


def _number(d, key, where, required=True, default=None):
    if key not in d:
        if required:
            raise ConfigError(f"missing {where}.{key}")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}.{key} must be a number")
    return float(v)


def parse_config(data):
    """Build a :class:`RunConfig` from a decoded JSON object."""
    _reject_unknown(data, _TOP_KEYS, "config")
    if "protocol" not in data:
        raise ConfigError("missing protocol")
    p = data["protocol"]
    _reject_unknown(p, _PROTOCOL_KEYS, "protocol")
    kind = p.get("type")
    if kind not in KINDS:
        raise ConfigError(f"protocol.type must be one of {KINDS}")
    try:
        omega0 = _number(p, "omega0", "protocol")
        t0 = _number(p, "t0", "protocol")
        free = p.get("free_width", False)
        if not isinstance(free, bool):
            raise ConfigError("protocol.free_width must be a boolean")
        if kind == GAUSSIAN:
            protocol = Protocol.gaussian(omega0, t0, tau=_number(p, "tau", "protocol", False, 1.0),
                                         t_width=_number(p, "t_width", "protocol", False),
                                         free_width=free)
        else:
            if {"tau", "t_width", "free_width"} & set(p):
                raise ConfigError("tau/t_width/free_width only apply to the gaussian protocol")
            protocol = Protocol.linear_sine(omega0, t0)

        integ = data.get("integrator", {})
        _reject_unknown(integ, _INTEGRATOR_KEYS, "integrator")
        stride = integ.get("sample_stride", 1)
        if isinstance(stride, bool) or not isinstance(stride, int):
            raise ConfigError("integrator.sample_stride must be an integer")
        sim = SimConfig(protocol, _number(data, "gamma", "config"),
                        delta=_number(data, "delta", "config", False, 0.0),
                        dt=_number(integ, "dt", "integrator", False), sample_stride=stride)
    except ConfigError:
        raise
    except StirapError as exc:
        raise ConfigError(str(exc)) from exc

    engines = data.get("engines", list(DEFAULT_ENGINES))
    if not isinstance(engines, list) or not all(isinstance(e, str) for e in engines):
        raise ConfigError("engines must be a list of strings")
    engines = tuple(engines)
    check_engines(engines, protocol)

    run = RunConfig(sim, engines)
    if "sweep" in data:
        s = data["sweep"]
        _reject_unknown(s, _SWEEP_KEYS, "sweep")
        values = s.get("values")
        if not isinstance(values, list) or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
            raise ConfigError("sweep.values must be a list of numbers")
        run = RunConfig(sim, engines, s.get("axis"), tuple(float(v) for v in values))
        run.sweep()
    return run


def serialize_config(run):
    """Inverse of :func:`parse_config`."""
    p = run.sim.protocol
    proto = {"type": p.kind, "omega0": p.omega0, "t0": p.t0}
    if p.kind == GAUSSIAN:
        proto["tau"] = p.tau
        proto["t_width"] = p.t_width
        if p.free_width:
            proto["free_width"] = True
    out = {"protocol": proto, "gamma": run.sim.gamma, "delta": run.sim.delta}
    integ = {"sample_stride": run.sim.sample_stride}
    if run.sim.dt is not None:
        integ["dt"] = run.sim.dt
    out["integrator"] = integ
    out["engines"] = list(run.engines)
    if run.sweep_axis is not None:
        out["sweep"] = {"axis": run.sweep_axis, "values": list(run.sweep_values)}
    return out


def load_config(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    return parse_config(data)
