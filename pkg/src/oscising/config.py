"""Flat ``key = value`` run configuration shared by config files and CLI flags.

Keys are the long CLI flag names with dashes replaced by underscores. Lines
starting with ``#`` are comments. Precedence: preset defaults < config file
< command-line flags.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

from .dynamics import Schedule, SimConfig, Waveform
from .graph import ProblemGraph, named_graph, parse_edge_list


class ConfigError(ValueError):
    """Invalid configuration; reported as a usage error."""


def _onoff(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("on", "true", "yes", "1"):
        return True
    if t in ("off", "false", "no", "0"):
        return False
    raise ValueError(f"expected on/off, got {text!r}")


def _opt_int(text):
    t = str(text).strip().lower()
    return None if t in ("", "none") else int(t)


def _opt_str(text):
    t = str(text).strip()
    return None if t.lower() in ("", "none") else t


def _waveform(text):
    return str(Waveform.parse(str(text)))


def _floats(text):
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    vals = [float(x) for x in str(text).replace(" ", "").split(",") if x]
    if not vals:
        raise ValueError("empty list")
    return vals


def _choice(*options):
    def conv(text):
        t = str(text).strip().lower()
        if t not in options:
            raise ValueError(f"expected one of {'/'.join(options)}, got {text!r}")
        return t
    return conv


def _finite(text):
    v = float(text)
    if not math.isfinite(v):
        raise ValueError("must be finite")
    return v


# key -> (parser, default)
KEYS = {
    "graph": (_opt_str, None),
    "graph_file": (_opt_str, None),
    "preset": (_choice("default", "anneal"), "default"),
    "seed": (int, 0),
    "trials": (int, 100),
    "c": (_finite, 0.2),
    "coupling_ramp": (_finite, 0.0),
    "shil": (_onoff, True),
    "shil_gain": (_finite, 0.5),
    "shil_ramp": (_finite, 150.0),
    "shil_start": (_finite, 0.0),
    "shil_waveform": (_waveform, "rect"),
    "shil_harmonic": (int, 2),
    "shil_phase": (_finite, 0.0),
    "shil_detuning": (_finite, 0.0),
    "noise": (_finite, 0.0),
    "noise_ramp": (_finite, 0.0),
    "sigma_omega": (_finite, 0.01),
    "dt": (_finite, 1e-2),
    "t_end": (_finite, 200.0),
    "integrator": (_choice("auto", "rk4", "euler_maruyama"), "auto"),
    "stride": (int, 10),
    "early_stop": (_onoff, False),
    "weight_bits": (_opt_int, None),
    "tol": (_finite, 0.3),
    "unresolved": (_choice("reject", "keep"), "reject"),
    "threads": (_opt_int, None),
    "format": (_choice("json", "csv", "text"), "text"),
    "out": (_opt_str, None),
    "dump_trace": (_opt_str, None),
    "c_values": (_floats, [0.1, 0.2]),
    "permutations": (int, 4),
}

PRESETS = {
    "default": {},
    "anneal": {"noise": 0.1, "noise_ramp": 150.0, "shil_start": 150.0,
               "shil_ramp": 150.0, "t_end": 350.0, "integrator": "euler_maruyama"},
}

_SHIL_KEYS = ("shil_gain", "shil_ramp", "shil_start", "shil_waveform", "shil_harmonic",
              "shil_phase", "shil_detuning")


def convert(key: str, raw) -> object:
    if key not in KEYS:
        raise ConfigError(f"unknown config key {key!r}")
    parser, _ = KEYS[key]
    try:
        return parser(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key!r}: {raw!r} ({exc})") from None


def parse_config_text(text: str) -> dict:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, raw = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key = key.strip().replace("-", "_")
        values[key] = convert(key, raw.strip())
    return values


def load_config(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read())


@dataclass
class CliConfig:
    """Merged configuration for one CLI command."""

    command: str
    values: dict
    explicit: set = field(default_factory=set)

    @classmethod
    def merge(cls, command: str, file_values: dict | None, flag_values: dict | None) -> "CliConfig":
        file_values = dict(file_values or {})
        flag_values = {k: v for k, v in (flag_values or {}).items() if v is not None}
        for k in list(file_values) + list(flag_values):
            if k not in KEYS:
                raise ConfigError(f"unknown config key {k!r}")
        preset = flag_values.get("preset", file_values.get("preset", "default"))
        values = {k: d for k, (_, d) in KEYS.items()}
        values.update(PRESETS[preset])
        values.update(file_values)
        values.update(flag_values)
        values["preset"] = preset
        explicit = set(file_values) | set(flag_values)
        cfg = cls(command, values, explicit)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        v = self.values
        if v["graph"] is not None and v["graph_file"] is not None:
            raise ConfigError("give either a graph file or a named graph, not both")
        if not v["shil"]:
            given = [k for k in _SHIL_KEYS if k in self.explicit]
            if given:
                raise ConfigError(f"{', '.join(given)} given with shil off")
        if v["integrator"] == "rk4" and v["noise"] > 0:
            raise ConfigError("noise requires the euler_maruyama integrator")
        if v["trials"] < 1:
            raise ConfigError("trials must be >= 1")
        if v["permutations"] < 1:
            raise ConfigError("permutations must be >= 1")
        if v["threads"] is not None and v["threads"] < 1:
            raise ConfigError("threads must be >= 1")
        try:
            self.sim_config()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def effective(self) -> dict:
        """Every key with its resolved value, in a stable order."""
        out = dict(self.values)
        out["integrator"] = self.sim_config().integrator
        if out["threads"] is None:
            out["threads"] = max(1, os.cpu_count() or 1)
        if not out["shil"]:
            for k in _SHIL_KEYS:
                out.pop(k)
        return out

    def sim_config(self) -> SimConfig:
        v = self.values
        integ = v["integrator"]
        if integ == "auto":
            integ = "euler_maruyama" if v["noise"] > 0 else "rk4"
        if v["coupling_ramp"] > 0:
            coupling = Schedule.linear_ramp(0.0, v["c"], v["coupling_ramp"])
        else:
            coupling = Schedule.constant(v["c"])
        if v["shil"]:
            shil = Schedule.linear_ramp(0.0, v["shil_gain"], v["shil_ramp"], v["shil_start"])
        else:
            shil = Schedule.constant(0.0)
        if v["noise_ramp"] > 0:
            noise = Schedule.linear_ramp(v["noise"], 0.0, v["noise_ramp"])
        else:
            noise = Schedule.constant(v["noise"])
        return SimConfig(
            coupling=coupling,
            shil_gain=shil,
            shil_harmonic=v["shil_harmonic"],
            shil_waveform=Waveform.parse(v["shil_waveform"]),
            shil_phase_offset=v["shil_phase"],
            shil_detuning=v["shil_detuning"],
            noise=noise,
            sigma_omega=v["sigma_omega"],
            dt=v["dt"],
            t_end=v["t_end"],
            integrator=integ,
            seed=v["seed"],
            stride=v["stride"],
            early_stop=v["early_stop"],
            weight_bits=v["weight_bits"],
            readout_tol=v["tol"],
            unresolved_policy=v["unresolved"],
        )

    def load_graph(self) -> ProblemGraph:
        """Resolve the graph source; a ``graph`` value naming an existing file is read."""
        v = self.values
        path = v["graph_file"]
        if path is None and v["graph"] is not None and os.path.isfile(v["graph"]):
            path = v["graph"]
        if path is not None:
            with open(path, encoding="ascii") as fh:
                return parse_edge_list(fh.read())
        if v["graph"] is None:
            raise ConfigError("no graph given (use --graph NAME|PATH or --graph-file PATH)")
        try:
            return named_graph(v["graph"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


def format_config(values: dict) -> str:
    """Render values in the config-file syntax (loadable by ``load_config``)."""
    lines = []
    for k in KEYS:
        if k not in values:
            continue
        val = values[k]
        if isinstance(val, bool):
            val = "on" if val else "off"
        elif isinstance(val, list):
            val = ",".join(f"{x:g}" for x in val)
        elif val is None:
            val = "none"
        elif isinstance(val, float):
            val = repr(val)
        lines.append(f"{k} = {val}")
    return "\n".join(lines)
