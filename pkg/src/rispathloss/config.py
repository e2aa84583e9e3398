"""Scenario documents (JSON) and their conversion to :class:`~rispathloss.engine.Scenario`.

Keys carry their units (``dx_mm``, ``f_ghz``, ``pt_dbm``); everything is
converted to SI once, in :meth:`ScenarioConfig.build`.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Union

from .configuration import (
    CodingState,
    ReflectionMap,
    focusing_phases,
    quantize_1bit,
    stripe_coding,
    uniform_coding,
)
from .engine import Scenario, TerminalPlacement
from .geometry import Point3, RisGrid, spherical_to_cartesian
from .patterns import AntennaPattern
from .units import db_to_linear, dbm_to_watts

CODING_MODES = ("uniform", "stripe", "focus", "focus-1bit")


class ConfigError(ValueError):
    """Invalid scenario document; the message starts with the offending field path."""


def _get(doc: dict, key: str, path: str, kind=float, required=True, default=None):
    if key not in doc:
        if required:
            raise ConfigError(f"{path}.{key}: missing")
        return default
    value = doc[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ConfigError(f"{path}.{key}: expected a finite number, got {value!r}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}.{key}: expected an integer, got {value!r}")
        return value
    if kind is str:
        if not isinstance(value, str):
            raise ConfigError(f"{path}.{key}: expected a string, got {value!r}")
        return value
    return value


def _section(doc: dict, key: str, required=True) -> dict:
    if key not in doc:
        if required:
            raise ConfigError(f"{key}: missing section")
        return {}
    if not isinstance(doc[key], dict):
        raise ConfigError(f"{key}: expected an object")
    return doc[key]


def _check_keys(doc: dict, allowed, path: str):
    extra = sorted(set(doc) - set(allowed))
    if extra:
        raise ConfigError(f"{path}.{extra[0]}: unknown key")


def _terminal(doc: dict, path: str) -> TerminalPlacement:
    _check_keys(doc, ("d_m", "theta_deg", "phi_deg", "xyz_m", "gain_db", "isotropic"), path)
    spherical = "d_m" in doc
    cartesian = "xyz_m" in doc
    if spherical == cartesian:
        raise ConfigError(f"{path}: give exactly one of d_m/theta_deg/phi_deg or xyz_m")
    try:
        if spherical:
            d = _get(doc, "d_m", path)
            theta = _get(doc, "theta_deg", path, required=False, default=0.0)
            phi = _get(doc, "phi_deg", path, required=False, default=0.0)
            position = spherical_to_cartesian(d, math.radians(theta), math.radians(phi))
        else:
            xyz = doc["xyz_m"]
            if not (isinstance(xyz, list) and len(xyz) == 3):
                raise ConfigError(f"{path}.xyz_m: expected [x, y, z]")
            position = Point3(*(_get({"v": v}, "v", f"{path}.xyz_m") for v in xyz))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    isotropic = doc.get("isotropic", False)
    if not isinstance(isotropic, bool):
        raise ConfigError(f"{path}.isotropic: expected true/false")
    if isotropic:
        if "gain_db" in doc:
            raise ConfigError(f"{path}: isotropic terminals take no gain_db")
        pattern = AntennaPattern.isotropic()
    else:
        gain = db_to_linear(_get(doc, "gain_db", path))
        try:
            pattern = AntennaPattern.from_gain(gain)
        except ValueError as exc:
            raise ConfigError(f"{path}.gain_db: {exc}") from None
    try:
        return TerminalPlacement(position, pattern)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


@dataclass
class ScenarioConfig:
    """A validated scenario document.

    The original document is kept verbatim so serialization round-trips.
    """

    doc: dict

    @classmethod
    def from_dict(cls, doc: Any) -> "ScenarioConfig":
        if not isinstance(doc, dict):
            raise ConfigError("document: expected a JSON object")
        cfg = cls(copy.deepcopy(doc))
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"document: invalid JSON ({exc})") from None
        return cls.from_dict(doc)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ScenarioConfig":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))

    def to_dict(self) -> dict:
        return copy.deepcopy(self.doc)

    def to_json(self) -> str:
        return json.dumps(self.doc, indent=2, sort_keys=False) + "\n"

    def validate(self):
        _check_keys(self.doc, ("name", "ris", "tx", "rx", "coding", "power", "calibration"), "document")
        self.grid()
        self.states()
        self.terminals()
        self.transmit_power()
        self.g_line()
        self.reflection()

    # -- sections -----------------------------------------------------------

    def grid(self) -> RisGrid:
        ris = _section(self.doc, "ris")
        _check_keys(ris, ("N", "M", "dx_mm", "dy_mm", "f_ghz", "states"), "ris")
        n = _get(ris, "N", "ris", int)
        m = _get(ris, "M", "ris", int)
        values = {k: _get(ris, k, "ris") for k in ("dx_mm", "dy_mm", "f_ghz")}
        for k, v in values.items():
            if not v > 0:
                raise ConfigError(f"ris.{k}: must be positive")
        if n < 1 or m < 1:
            raise ConfigError(f"ris.{'N' if n < 1 else 'M'}: must be >= 1")
        return RisGrid(n, m, values["dx_mm"] * 1e-3, values["dy_mm"] * 1e-3, values["f_ghz"] * 1e9)

    def states(self) -> dict:
        ris = _section(self.doc, "ris")
        raw = ris.get("states", [])
        if not isinstance(raw, list):
            raise ConfigError("ris.states: expected a list")
        out = {}
        for i, st in enumerate(raw):
            path = f"ris.states[{i}]"
            if not isinstance(st, dict):
                raise ConfigError(f"{path}: expected an object")
            _check_keys(st, ("label", "amp", "phase_deg"), path)
            label = _get(st, "label", path, str)
            if label in out:
                raise ConfigError(f"{path}.label: duplicate label {label!r}")
            amp = _get(st, "amp", path)
            if not 0.0 <= amp <= 1.0:
                raise ConfigError(f"{path}.amp: must lie in [0, 1]")
            out[label] = CodingState.from_degrees(label, amp, _get(st, "phase_deg", path))
        return out

    def terminals(self) -> tuple:
        return (
            _terminal(_section(self.doc, "tx"), "tx"),
            _terminal(_section(self.doc, "rx"), "rx"),
        )

    def transmit_power(self) -> float:
        power = _section(self.doc, "power")
        _check_keys(power, ("pt_dbm",), "power")
        return dbm_to_watts(_get(power, "pt_dbm", "power"))

    def g_line(self) -> float:
        """Cable/calibration gain implied by the measured ``G_t G_r G_line`` (1 when absent)."""
        cal = _section(self.doc, "calibration", required=False)
        _check_keys(cal, ("gtgrgline_db",), "calibration")
        if "gtgrgline_db" not in cal:
            return 1.0
        tx, rx = self.terminals()
        return db_to_linear(_get(cal, "gtgrgline_db", "calibration")) / (tx.gain * rx.gain)

    def _state(self, coding: dict, key: str) -> CodingState:
        label = coding.get(key)
        if not isinstance(label, str):
            raise ConfigError(f"coding.{key}: expected a state label")
        states = self.states()
        if label not in states:
            raise ConfigError(f"coding.{key}: unknown state {label!r}")
        return states[label]

    def reflection(self) -> ReflectionMap:
        coding = _section(self.doc, "coding")
        mode = coding.get("mode")
        grid = self.grid()
        if mode == "uniform":
            _check_keys(coding, ("mode", "state"), "coding")
            return uniform_coding(grid, self._state(coding, "state"))
        if mode == "stripe":
            _check_keys(coding, ("mode", "period", "window", "state0", "state1"), "coding")
            period = _get(coding, "period", "coding", int)
            window = coding.get("window")
            if not (isinstance(window, list) and len(window) == 2 and all(isinstance(v, int) for v in window)):
                raise ConfigError("coding.window: expected [first, last] integers")
            try:
                return stripe_coding(grid, period, window, self._state(coding, "state0"), self._state(coding, "state1"))
            except ValueError as exc:
                raise ConfigError(f"coding: {exc}") from None
        tx, rx = self.terminals()
        if mode == "focus":
            _check_keys(coding, ("mode", "amp"), "coding")
            amp = _get(coding, "amp", "coding")
            if not 0.0 <= amp <= 1.0:
                raise ConfigError("coding.amp: must lie in [0, 1]")
            return focusing_phases(grid, tx.position, rx.position, amp)
        if mode == "focus-1bit":
            _check_keys(coding, ("mode", "state0", "state1"), "coding")
            s0, s1 = self._state(coding, "state0"), self._state(coding, "state1")
            if s0 == s1:
                raise ConfigError("coding.state1: must differ from state0")
            ideal = focusing_phases(grid, tx.position, rx.position, 1.0)
            return quantize_1bit(ideal, s0, s1)
        raise ConfigError(f"coding.mode: expected one of {', '.join(CODING_MODES)}, got {mode!r}")

    def build(self) -> Scenario:
        tx, rx = self.terminals()
        return Scenario(
            grid=self.grid(),
            reflection=self.reflection(),
            tx=tx,
            rx=rx,
            pt=self.transmit_power(),
            g_line=self.g_line(),
        )


def builtin_configs() -> list:
    return sorted(p.name[:-5] for p in resources.files("rispathloss.configs").iterdir() if p.name.endswith(".json"))


def resolve_config(name_or_path: str) -> ScenarioConfig:
    """Load a config file, or a shipped one by bare name (e.g. ``ris1``)."""
    path = Path(name_or_path)
    if path.exists():
        return ScenarioConfig.load(path)
    if name_or_path in builtin_configs():
        text = resources.files("rispathloss.configs").joinpath(f"{name_or_path}.json").read_text(encoding="utf-8")
        return ScenarioConfig.from_json(text)
    raise FileNotFoundError(f"{name_or_path}: no such file or shipped config")
