"""JSON experiment configuration.

A flat object whose keys mirror the radio / RIS field names, plus the
experiment keys ``num_ue``, ``num_uav``, ``area_m``, ``uav_altitude_m`` and
``seed``.  Noise power is given as ``N0_dbm``.  Optional keys:
``phase_mode``, solver knobs (``eta0``, ``max_iter``, ``plateau_window``,
``plateau_tol``) and fixed ``ue_positions`` / ``uav_positions``.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, replace

from risconn.channel import PhaseMode
from risconn.errors import ConfigurationError
from risconn.optimizer import SolverSettings
from risconn.scenario import (
    SPEED_OF_LIGHT,
    RadioParams,
    RisGeometry,
    Scenario,
    dbm_to_watts,
    sample_scenario,
    validate,
    watts_to_dbm,
)

_RADIO_KEYS = ("p", "P", "alpha", "fc", "beta0", "gamma0_ue", "gamma0_uav", "gamma0_ris", "D0")
_RIS_KEYS = ("Mr", "Mc", "dr", "dc")
_SOLVER_KEYS = ("eta0", "max_iter", "plateau_window", "plateau_tol")


@dataclass(frozen=True)
class ExperimentConfig:
    num_ue: int = 10
    num_uav: int = 7
    area_m: tuple[float, float] = (150.0, 150.0)
    uav_altitude_m: float = 50.0
    seed: int = 0
    ris: RisGeometry = field(default_factory=RisGeometry)
    radio: RadioParams = field(default_factory=RadioParams)
    solver: SolverSettings = field(default_factory=SolverSettings)
    phase_mode: PhaseMode = PhaseMode.PAPER
    ue_positions: tuple | None = None
    uav_positions: tuple | None = None

    def __post_init__(self):
        try:
            object.__setattr__(self, "phase_mode", PhaseMode(self.phase_mode))
        except ValueError as exc:
            raise ConfigurationError(f"phase_mode: {exc}") from exc
        object.__setattr__(self, "area_m", tuple(self.area_m))

    def with_overrides(self, **changes) -> "ExperimentConfig":
        """Replace top-level fields or radio/RIS/solver fields by name."""
        top, radio, ris, solver = {}, {}, {}, {}
        for key, value in changes.items():
            if key in _RADIO_KEYS or key == "N0":
                radio[key] = value
            elif key in _RIS_KEYS or key == "position":
                ris[key] = value
            elif key in _SOLVER_KEYS:
                solver[key] = value
            else:
                top[key] = value
        cfg = replace(self, **top)
        return replace(
            cfg,
            radio=replace(cfg.radio, **radio),
            ris=replace(cfg.ris, **ris),
            solver=replace(cfg.solver, **solver),
        )

    def scenario(self, seed: int | None = None) -> Scenario:
        """Fixed positions when configured, otherwise a seeded random placement."""
        seed = self.seed if seed is None else seed
        if self.ue_positions is not None or self.uav_positions is not None:
            if self.ue_positions is None or self.uav_positions is None:
                raise ConfigurationError("ue_positions and uav_positions must be given together")
            sc = Scenario(self.ue_positions, self.uav_positions, self.ris, self.radio, seed)
        else:
            sc = sample_scenario(
                self.num_ue, self.num_uav, self.area_m, self.uav_altitude_m, self.ris, self.radio, seed
            )
        problems = validate(sc) + self.solver.violations()
        if problems:
            raise ConfigurationError("; ".join(problems))
        return sc

    def to_dict(self) -> dict:
        out = {
            "num_ue": self.num_ue,
            "num_uav": self.num_uav,
            "area_m": list(self.area_m),
            "uav_altitude_m": self.uav_altitude_m,
            "seed": self.seed,
            "ris_position": list(self.ris.position),
            "N0_dbm": watts_to_dbm(self.radio.N0),
            "phase_mode": self.phase_mode.value,
        }
        out.update({k: getattr(self.radio, k) for k in _RADIO_KEYS})
        out.update({k: getattr(self.ris, k) for k in _RIS_KEYS})
        out.update({k: getattr(self.solver, k) for k in _SOLVER_KEYS})
        if self.ue_positions is not None:
            out["ue_positions"] = [list(p) for p in self.ue_positions]
            out["uav_positions"] = [list(p) for p in self.uav_positions]
        return out


def _number(key, value, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(f"{key}: expected a number, got {value!r}")
    if integer:
        if int(value) != value:
            raise ConfigurationError(f"{key}: expected an integer, got {value!r}")
        return int(value)
    return float(value)


def config_from_dict(data: dict) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigurationError("configuration must be a JSON object")
    data = dict(data)
    cfg = ExperimentConfig()
    radio, ris, solver, top = {}, {}, {}, {}

    if "c" in data and _number("c", data.pop("c")) != SPEED_OF_LIGHT:
        raise ConfigurationError("c: the speed of light is fixed at 3e8 m/s")
    if "N0_dbm" in data:
        radio["N0"] = dbm_to_watts(_number("N0_dbm", data.pop("N0_dbm")))
    for key in _RADIO_KEYS:
        if key in data:
            value = data.pop(key)
            radio[key] = None if (key == "D0" and value is None) else _number(key, value)
    if "ris_position" in data:
        pos = data.pop("ris_position")
        if not isinstance(pos, (list, tuple)) or len(pos) != 3:
            raise ConfigurationError(f"ris_position: expected [x, y, z], got {pos!r}")
        ris["position"] = tuple(_number("ris_position", v) for v in pos)
    for key in _RIS_KEYS:
        if key in data:
            ris[key] = _number(key, data.pop(key), integer=key in ("Mr", "Mc"))
    for key in _SOLVER_KEYS:
        if key in data:
            solver[key] = _number(key, data.pop(key), integer=key in ("max_iter", "plateau_window"))
    for key in ("num_ue", "num_uav", "seed"):
        if key in data:
            top[key] = _number(key, data.pop(key), integer=True)
    if "uav_altitude_m" in data:
        top["uav_altitude_m"] = _number("uav_altitude_m", data.pop("uav_altitude_m"))
    if "area_m" in data:
        area = data.pop("area_m")
        if isinstance(area, (list, tuple)):
            if len(area) != 2:
                raise ConfigurationError(f"area_m: expected [width, height], got {area!r}")
            top["area_m"] = tuple(_number("area_m", v) for v in area)
        else:
            side = _number("area_m", area)
            top["area_m"] = (side, side)
    if "phase_mode" in data:
        try:
            top["phase_mode"] = PhaseMode(data.pop("phase_mode"))
        except ValueError as exc:
            raise ConfigurationError(f"phase_mode: {exc}") from exc
    for key in ("ue_positions", "uav_positions"):
        if key in data:
            width = 2 if key == "ue_positions" else 3
            rows = data.pop(key)
            if not isinstance(rows, list) or any(
                not isinstance(r, (list, tuple)) or len(r) != width for r in rows
            ):
                raise ConfigurationError(f"{key}: expected a list of {width}-element points")
            top[key] = tuple(tuple(_number(key, v) for v in r) for r in rows)
    if data:
        raise ConfigurationError(f"unknown configuration keys: {sorted(data)}")

    if "ue_positions" in top:
        top["num_ue"] = len(top["ue_positions"])
    if "uav_positions" in top:
        top["num_uav"] = len(top["uav_positions"])
    cfg = replace(
        cfg,
        radio=replace(cfg.radio, **radio),
        ris=replace(cfg.ris, **ris),
        solver=replace(cfg.solver, **solver),
        **top,
    )
    problems = cfg.radio.violations() + cfg.ris.violations() + cfg.solver.violations()
    if cfg.num_ue < 1 or cfg.num_uav < 1:
        problems.append("num_ue and num_uav must be >= 1")
    if not (cfg.area_m[0] > 0 and cfg.area_m[1] > 0):
        problems.append(f"area_m: sides must be > 0 (got {cfg.area_m})")
    if not (cfg.uav_altitude_m > 0 and math.isfinite(cfg.uav_altitude_m)):
        problems.append(f"uav_altitude_m: must be > 0 (got {cfg.uav_altitude_m})")
    if not 0 <= cfg.seed < 2**64:
        problems.append(f"seed: must be an unsigned 64-bit integer (got {cfg.seed})")
    if problems:
        raise ConfigurationError("; ".join(problems))
    return cfg


def load_config(path) -> ExperimentConfig:
    """Read a JSON configuration file.  ``OSError`` propagates unchanged."""
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"{os.fspath(path)}: invalid JSON ({exc})") from exc
    return config_from_dict(data)
