"""Scenario files: INI documents describing one deployment plus numerics.

Sections are ``[link_ho]``, ``[link_robot]``, ``[bs_server]``,
``[robot_server]``, ``[compression]``, ``[data]`` and ``[numerics]``.  Keys
ending in ``_db``/``_dbm`` are logarithmic and converted once to linear
units when building :class:`~edgeloop.loop.ScenarioParams`.  Unknown keys,
missing keys and conflicting unit variants are hard errors.
"""

from __future__ import annotations

import configparser
import io
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .compute import CompressionParams, ServerParams
from .loop import ScenarioParams
from .radio import LinkParams, db_to_linear

__all__ = [
    "ScenarioError",
    "Numerics",
    "ScenarioFile",
    "load_scenario",
    "parse_scenario",
    "REFERENCE_SCENARIO",
    "CALIBRATED_SCENARIO",
    "SEED_ENV_VAR",
]

SEED_ENV_VAR = "EDGELOOP_SEED"
REFERENCE_SCENARIO = Path(__file__).resolve().parent / "scenarios" / "paper_sec6.cfg"
# link gain and edge cycles/bit fitted to two reference latencies; see README
CALIBRATED_SCENARIO = REFERENCE_SCENARIO.with_name("paper_sec6_calibrated.cfg")


class ScenarioError(ValueError):
    """Malformed or inconsistent scenario file."""


def _bool(text: str) -> bool:
    v = text.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _int(text: str) -> int:
    try:
        return int(text)  # exact, even beyond 2**53
    except ValueError:
        pass
    v = float(text)  # accepts forms like 1e6
    if v != int(v):
        raise ValueError(f"not an integer: {text!r}")
    return int(v)


def _pair(text: str) -> tuple[int, int] | None:
    text = text.strip()
    if text.lower() in ("", "none"):
        return None
    a, b = (p.strip() for p in text.split(","))
    return _int(a), _int(b)


_LINK_KEYS = {
    "tx_power_watts": float, "distance_m": float, "bandwidth_hz": float,
    "friss_k0": float, "friss_k0_db": float, "path_loss_exp": float,
    "noise_n0": float, "noise_n0_db": float, "noise_n0_dbm": float,
    "noise_is_total_power": _bool, "packet_bits": _int, "fixed_packet_time": float,
}
_SERVER_KEYS = {"shape": float, "freq_hz": float, "comp_scale": float}

SCHEMA: dict[str, dict[str, Any]] = {
    "link_ho": _LINK_KEYS,
    "link_robot": _LINK_KEYS,
    "bs_server": _SERVER_KEYS,
    "robot_server": _SERVER_KEYS,
    "compression": {"psi": float, "zeta": float},
    "data": {"command_bits": float, "sensing_bits": float},
    "numerics": {
        "step_s": float, "tail": float, "q_max": float, "q_step": float,
        "coarse_q_step": float, "seed": _int, "n_samples": _int, "n_workers": _int,
        "tx_mode": str, "nf_counts_compressed": _bool, "low_level_packets": _pair,
    },
}

REQUIRED = {
    "link_ho": ("tx_power_watts", "distance_m", "bandwidth_hz", "path_loss_exp"),
    "link_robot": ("tx_power_watts", "distance_m", "bandwidth_hz", "path_loss_exp"),
    "bs_server": ("shape", "freq_hz", "comp_scale"),
    "robot_server": ("shape", "freq_hz"),
    "compression": ("psi", "zeta"),
    "data": ("command_bits", "sensing_bits"),
    "numerics": (),
}

# exactly one spelling of each of these must be present
_ONE_OF = {
    "link_ho": (("friss_k0", "friss_k0_db"), ("noise_n0", "noise_n0_db", "noise_n0_dbm")),
    "link_robot": (("friss_k0", "friss_k0_db"), ("noise_n0", "noise_n0_db", "noise_n0_dbm")),
}


@dataclass(frozen=True)
class Numerics:
    step_s: float = 1e-3
    tail: float = 1e-9
    q_max: float = 3.0
    q_step: float = 0.01
    coarse_q_step: float = 0.05
    seed: int = 20230101
    n_samples: int = 1_000_000
    n_workers: int = 1
    tx_mode: str = "exact_negbin"
    nf_counts_compressed: bool = True
    low_level_packets: tuple[int, int] | None = None


def _format(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    if value is None:
        return "none"
    return repr(value) if isinstance(value, float) else str(value)


@dataclass(frozen=True)
class ScenarioFile:
    """Parsed scenario document, kept in its on-disk units for round-tripping."""

    sections: Mapping[str, Mapping[str, Any]]
    comments: tuple[str, ...] = field(default=(), compare=False)

    def get(self, section: str, key: str, default: Any = None) -> Any:
        return self.sections.get(section, {}).get(key, default)

    def with_value(self, section: str, key: str, value: Any, drop: tuple[str, ...] = ()) -> "ScenarioFile":
        """Copy with one key set (and any alternative unit spellings in ``drop`` removed)."""
        new = {s: dict(v) for s, v in self.sections.items()}
        for k in drop:
            new[section].pop(k, None)
        new[section][key] = value
        return ScenarioFile(new, self.comments)

    def with_comments(self, comments) -> "ScenarioFile":
        return ScenarioFile(self.sections, tuple(comments))

    # -- conversion ------------------------------------------------------

    def _link(self, name: str) -> LinkParams:
        sec = self.sections[name]
        bandwidth = sec["bandwidth_hz"]
        k0 = sec["friss_k0"] if "friss_k0" in sec else db_to_linear(sec["friss_k0_db"])
        if "noise_n0" in sec:
            n0 = sec["noise_n0"]
        elif "noise_n0_db" in sec:
            n0 = db_to_linear(sec["noise_n0_db"])
        else:
            n0 = db_to_linear(sec["noise_n0_dbm"]) * 1e-3
        if sec.get("noise_is_total_power", False):
            n0 = n0 / bandwidth
        kwargs = {}
        if "packet_bits" in sec:
            kwargs["packet_bits"] = sec["packet_bits"]
        if "fixed_packet_time" in sec:
            kwargs["fixed_packet_time"] = sec["fixed_packet_time"]
        return LinkParams(
            tx_power_watts=sec["tx_power_watts"], distance_m=sec["distance_m"],
            bandwidth_hz=bandwidth, friss_k0=k0, path_loss_exp=sec["path_loss_exp"],
            noise_n0=n0, **kwargs,
        )

    def _server(self, name: str) -> ServerParams:
        sec = self.sections[name]
        kwargs = {"comp_scale": sec["comp_scale"]} if "comp_scale" in sec else {}
        return ServerParams(shape=sec["shape"], freq_hz=sec["freq_hz"], **kwargs)

    @property
    def numerics(self) -> Numerics:
        values = dict(self.sections.get("numerics", {}))
        env_seed = os.environ.get(SEED_ENV_VAR)
        if env_seed:
            values["seed"] = _int(env_seed)
        return Numerics(**values)

    def to_params(self) -> ScenarioParams:
        try:
            num = self.numerics
            data = self.sections["data"]
            comp = self.sections["compression"]
            return ScenarioParams(
                command_bits=data["command_bits"],
                sensing_bits=data["sensing_bits"],
                link_ho=self._link("link_ho"),
                link_robot=self._link("link_robot"),
                bs_server=self._server("bs_server"),
                robot_server=self._server("robot_server"),
                comp=CompressionParams(psi=comp["psi"], zeta=comp["zeta"]),
                nf_counts_compressed=num.nf_counts_compressed,
                low_level_packets=num.low_level_packets,
            )
        except (ValueError, TypeError) as exc:
            raise ScenarioError(str(exc)) from exc

    # -- text form -------------------------------------------------------

    def dumps(self) -> str:
        out = io.StringIO()
        for line in self.comments:
            out.write(f"# {line}\n" if line else "#\n")
        if self.comments:
            out.write("\n")
        for name in SCHEMA:
            if name not in self.sections:
                continue
            out.write(f"[{name}]\n")
            for key, value in self.sections[name].items():
                out.write(f"{key} = {_format(value)}\n")
            out.write("\n")
        return out.getvalue()

    def write(self, path: str | os.PathLike) -> None:
        Path(path).write_text(self.dumps())


def parse_scenario(text: str) -> ScenarioFile:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    cp.optionxform = str  # keys are case sensitive
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ScenarioError(f"cannot parse scenario: {exc}") from exc
    comments = tuple(
        line.lstrip("#").strip() for line in text.splitlines()
        if line.startswith("#") and not line.startswith("#!")
    )
    sections: dict[str, dict[str, Any]] = {}
    for name in cp.sections():
        if name not in SCHEMA:
            raise ScenarioError(f"unknown section [{name}]")
        schema = SCHEMA[name]
        sec: dict[str, Any] = {}
        for key, raw in cp.items(name):
            if key not in schema:
                raise ScenarioError(f"unknown key {key!r} in [{name}]")
            try:
                sec[key] = schema[key](raw)
            except ValueError as exc:
                raise ScenarioError(f"bad value for {name}.{key}: {exc}") from exc
        sections[name] = sec
    for name, keys in REQUIRED.items():
        if name not in sections:
            if keys:
                raise ScenarioError(f"missing section [{name}]")
            continue
        for key in keys:
            if key not in sections[name]:
                raise ScenarioError(f"missing key {key!r} in [{name}]")
    for name, groups in _ONE_OF.items():
        for group in groups:
            present = [k for k in group if k in sections[name]]
            if len(present) != 1:
                raise ScenarioError(f"[{name}] needs exactly one of {', '.join(group)}; got {present}")
    for name in ("link_ho", "link_robot"):
        for key, value in sections[name].items():
            if key.endswith(("_db", "_dbm")) or isinstance(value, bool):
                continue
            if not (isinstance(value, (int, float)) and value > 0 and math.isfinite(value)):
                raise ScenarioError(f"{name}.{key} must be a positive finite number")
    sf = ScenarioFile(sections, comments)
    sf.to_params()  # surface unit/range errors now
    try:
        sf.numerics
    except TypeError as exc:
        raise ScenarioError(str(exc)) from exc
    if sf.numerics.tx_mode not in ("exact_negbin", "gaussian_approx"):
        raise ScenarioError("numerics.tx_mode must be exact_negbin or gaussian_approx")
    return sf


def load_scenario(path: str | os.PathLike) -> ScenarioFile:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
    return parse_scenario(text)
