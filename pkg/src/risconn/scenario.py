"""Network geometry, radio parameters and random node placement.

Node numbering used throughout the package (0-based): nodes ``0..U-1`` are
UEs in list order, nodes ``U..U+A-1`` are UAVs in list order.  External
surfaces (edge-list files, CLI, JSON output) shift to 1-based numbering.

Random placement uses numpy's ``PCG64`` generator seeded directly with the
scenario seed; UE coordinates are drawn first, UAV coordinates second.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from risconn.errors import ConfigurationError

SPEED_OF_LIGHT = 3e8


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    return 10.0 * math.log10(watts) + 30.0


@dataclass(frozen=True)
class RadioParams:
    """Transmit powers, propagation constants and link thresholds.

    Powers are in watts, thresholds in dB.  ``D0`` (UE-RIS distance limit,
    metres) is disabled when ``None``.
    """

    p: float = 1.0
    P: float = 5.0
    N0: float = dbm_to_watts(-130.0)
    alpha: float = 4.0
    fc: float = 3e9
    beta0: float = 1e-6
    gamma0_ue: float = 85.0
    gamma0_uav: float = 80.0
    gamma0_ris: float = 30.0
    D0: float | None = None

    @property
    def c(self) -> float:
        return SPEED_OF_LIGHT

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.fc

    def violations(self) -> list[str]:
        out = []
        for name in ("p", "P", "N0", "alpha", "fc", "beta0"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                out.append(f"radio.{name}: must be finite and > 0 (got {value!r})")
        for name in ("gamma0_ue", "gamma0_uav", "gamma0_ris"):
            if math.isnan(getattr(self, name)):
                out.append(f"radio.{name}: must not be NaN")
        if self.D0 is not None and not self.D0 > 0:
            out.append(f"radio.D0: must be > 0 when set (got {self.D0!r})")
        return out


@dataclass(frozen=True)
class RisGeometry:
    position: tuple[float, float, float] = (35.0, 50.0, 20.0)
    Mr: int = 10
    Mc: int = 10
    dr: float = 0.05
    dc: float = 0.05

    @property
    def M(self) -> int:
        return self.Mr * self.Mc

    def violations(self) -> list[str]:
        out = []
        if len(self.position) != 3 or not all(math.isfinite(v) for v in self.position):
            out.append(f"ris.position: must be a finite 3-D point (got {self.position!r})")
        elif not self.position[2] > 0:
            out.append(f"ris.position: altitude z_R must be > 0 (got {self.position[2]!r})")
        if self.Mr < 1 or self.Mc < 1:
            out.append(f"ris.Mr/Mc: need at least one PRU (got {self.Mr}x{self.Mc})")
        if not self.dr > 0:
            out.append(f"ris.dr: must be > 0 (got {self.dr!r})")
        if not self.dc > 0:
            out.append(f"ris.dc: must be > 0 (got {self.dc!r})")
        return out


@dataclass(frozen=True, eq=False)
class Scenario:
    ue_positions: np.ndarray  # (U, 2), ground level
    uav_positions: np.ndarray  # (A, 3)
    ris: RisGeometry = field(default_factory=RisGeometry)
    radio: RadioParams = field(default_factory=RadioParams)
    seed: int = 0

    def __post_init__(self):
        ue = np.array(self.ue_positions, dtype=float).reshape(-1, 2)
        uav = np.array(self.uav_positions, dtype=float).reshape(-1, 3)
        ue.setflags(write=False)
        uav.setflags(write=False)
        object.__setattr__(self, "ue_positions", ue)
        object.__setattr__(self, "uav_positions", uav)

    @property
    def num_ue(self) -> int:
        return len(self.ue_positions)

    @property
    def num_uav(self) -> int:
        return len(self.uav_positions)

    @property
    def num_nodes(self) -> int:
        return self.num_ue + self.num_uav

    def uav_node(self, a: int) -> int:
        """Graph node index of UAV ``a`` (both 0-based)."""
        return self.num_ue + a

    def replace(self, **changes) -> "Scenario":
        kwargs = dict(
            ue_positions=self.ue_positions,
            uav_positions=self.uav_positions,
            ris=self.ris,
            radio=self.radio,
            seed=self.seed,
        )
        kwargs.update(changes)
        return Scenario(**kwargs)


def validate(sc: Scenario) -> list[str]:
    """Return one message per violated invariant; empty when ``sc`` is valid."""
    out = []
    if sc.num_ue < 1:
        out.append("ue_positions: need at least one UE")
    if sc.num_uav < 1:
        out.append("uav_positions: need at least one UAV")
    for u, pos in enumerate(sc.ue_positions):
        if not np.all(np.isfinite(pos)):
            out.append(f"ue_positions[{u}]: non-finite coordinate {pos.tolist()}")
    for a, pos in enumerate(sc.uav_positions):
        if not np.all(np.isfinite(pos)):
            out.append(f"uav_positions[{a}]: non-finite coordinate {pos.tolist()}")
        elif not pos[2] > 0:
            out.append(f"uav_positions[{a}]: altitude must be > 0 (got {pos[2]!r})")
    out.extend(sc.ris.violations())
    out.extend(sc.radio.violations())
    return out


def sample_scenario(
    num_ue: int,
    num_uav: int,
    area: tuple[float, float],
    uav_altitude: float,
    ris: RisGeometry,
    radio: RadioParams,
    seed: int,
) -> Scenario:
    """Place UEs and UAVs uniformly over ``[0, width] x [0, height]``.

    UAVs all hover at ``uav_altitude``.  The result depends only on the
    arguments; no global RNG state is touched.
    """
    if int(num_ue) != num_ue or num_ue < 1:
        raise ConfigurationError(f"num_ue must be an integer >= 1 (got {num_ue!r})")
    if int(num_uav) != num_uav or num_uav < 1:
        raise ConfigurationError(f"num_uav must be an integer >= 1 (got {num_uav!r})")
    width, height = area
    if not (width > 0 and height > 0 and math.isfinite(width) and math.isfinite(height)):
        raise ConfigurationError(f"area sides must be positive and finite (got {area!r})")
    if not (uav_altitude > 0 and math.isfinite(uav_altitude)):
        raise ConfigurationError(f"uav_altitude must be > 0 (got {uav_altitude!r})")
    if not 0 <= seed < 2**64:
        raise ConfigurationError(f"seed must be an unsigned 64-bit integer (got {seed!r})")

    rng = np.random.Generator(np.random.PCG64(seed))
    scale = np.array([width, height])
    ue_xy = rng.uniform(size=(int(num_ue), 2)) * scale
    uav_xy = rng.uniform(size=(int(num_uav), 2)) * scale
    uav = np.column_stack([uav_xy, np.full(int(num_uav), float(uav_altitude))])
    return Scenario(ue_positions=ue_xy, uav_positions=uav, ris=ris, radio=radio, seed=int(seed))
