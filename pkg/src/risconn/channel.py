"""Link SNRs, RIS array channels and RIS phase configurations.

All SNRs are returned in dB; threshold comparisons are done in dB.
PRU ``(i, j)`` (0-based row/column) sits at flat index ``i * Mc + j``,
the ordering of ``kron(row_response, column_response)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from risconn.errors import DimensionError, GeometryError
from risconn.scenario import SPEED_OF_LIGHT, RadioParams, RisGeometry, Scenario

TWO_PI = 2.0 * math.pi
# horizontal offsets below this are treated as "on the RIS axis"
_AXIS_EPS = 1e-12


class LinkKind(str, Enum):
    UE_TO_RIS = "ue-ris"
    RIS_TO_UAV = "ris-uav"


class PhaseMode(str, Enum):
    PAPER = "paper"
    COPHASE = "cophase"


@dataclass(frozen=True, eq=False)
class ArrayChannel:
    coefficients: np.ndarray  # complex, length M
    distance: float
    link_kind: LinkKind

    def __len__(self):
        return len(self.coefficients)


@dataclass(frozen=True, eq=False)
class PhaseConfig:
    thetas: np.ndarray  # radians in [0, 2*pi)

    def __len__(self):
        return len(self.thetas)

    @property
    def reflection(self) -> np.ndarray:
        """Diagonal of the RIS reflection matrix."""
        return np.exp(1j * self.thetas)


def wrap_phase(theta):
    """Map angles into ``[0, 2*pi)``."""
    out = np.mod(np.asarray(theta, dtype=float), TWO_PI)
    # mod of a tiny negative number rounds up to exactly 2*pi
    return np.where(out >= TWO_PI, 0.0, out)


def _ue3(ue) -> np.ndarray:
    ue = np.asarray(ue, dtype=float)
    if ue.shape[-1] == 2:
        ue = np.concatenate([ue, np.zeros(ue.shape[:-1] + (1,))], axis=-1)
    return ue


def ue_uav_snr_db(ue, uav, radio: RadioParams) -> float:
    """Direct UE-UAV SNR, ``10 log10(d^-alpha p / N0)``."""
    d = float(np.linalg.norm(_ue3(ue) - np.asarray(uav, dtype=float)))
    if d <= 0:
        raise GeometryError("UE and UAV are co-located")
    return 10.0 * math.log10(radio.p / radio.N0) - 10.0 * radio.alpha * math.log10(d)


def free_space_path_loss_db(d, fc: float) -> float:
    return 20.0 * np.log10(4.0 * math.pi * fc * np.asarray(d, dtype=float) / SPEED_OF_LIGHT)


def uav_uav_snr_db(a, a2, radio: RadioParams) -> float:
    """UAV-UAV SNR under free-space path loss."""
    d = float(np.linalg.norm(np.asarray(a, dtype=float) - np.asarray(a2, dtype=float)))
    if d <= 0:
        raise GeometryError("UAVs are co-located")
    return (
        10.0 * math.log10(radio.P)
        - float(free_space_path_loss_db(d, radio.fc))
        - 10.0 * math.log10(radio.N0)
    )


def _angle_terms(src: np.ndarray, ris_pos: np.ndarray, kind: LinkKind):
    """Return (phi, varphi, psi, d) for points ``src`` (..., 3) seen from the RIS."""
    dx = src[..., 0] - ris_pos[0]
    dy = src[..., 1] - ris_pos[1]
    horiz = np.hypot(dx, dy)
    if np.any(horiz <= _AXIS_EPS):
        raise GeometryError("node lies on the RIS vertical axis; arrival/departure angles undefined")
    d = np.sqrt(horiz**2 + (src[..., 2] - ris_pos[2]) ** 2)
    if kind is LinkKind.UE_TO_RIS:
        phi = dy / horiz
        varphi = -dx / horiz
        psi = (src[..., 2] - ris_pos[2]) / d  # -z_R/d for ground UEs
    else:
        phi = -dy / horiz
        varphi = -dx / horiz
        psi = (ris_pos[2] - src[..., 2]) / d
    return phi, varphi, psi, d


def _pru_grid(ris: RisGeometry):
    rows, cols = np.divmod(np.arange(ris.M), ris.Mc)
    return rows.astype(float), cols.astype(float)


def _array_channel(point3: np.ndarray, ris: RisGeometry, radio: RadioParams, kind: LinkKind) -> ArrayChannel:
    phi, varphi, psi, d = _angle_terms(point3, np.asarray(ris.position, dtype=float), kind)
    rows, cols = _pru_grid(ris)
    k = TWO_PI / radio.wavelength
    phase = -k * (ris.dr * rows * phi * psi + ris.dc * cols * varphi * psi)
    coeffs = math.sqrt(radio.beta0) / d * np.exp(1j * phase)
    return ArrayChannel(coefficients=coeffs, distance=float(d), link_kind=kind)


def ue_ris_channel(ue, ris: RisGeometry, radio: RadioParams) -> ArrayChannel:
    """LoS UPA channel from a ground UE to the RIS (length ``M``)."""
    return _array_channel(_ue3(ue), ris, radio, LinkKind.UE_TO_RIS)


def ris_uav_channel(uav, ris: RisGeometry, radio: RadioParams) -> ArrayChannel:
    """LoS UPA channel from the RIS to a UAV (length ``M``)."""
    return _array_channel(np.asarray(uav, dtype=float), ris, radio, LinkKind.RIS_TO_UAV)


def cascaded_channel(h_ur: ArrayChannel, h_ra: ArrayChannel, theta: PhaseConfig) -> complex:
    """UE-RIS-UAV scalar channel ``h_ra^H diag(e^{j theta}) h_ur``."""
    if not len(h_ur) == len(h_ra) == len(theta):
        raise DimensionError(
            f"channel/phase lengths differ: {len(h_ur)}, {len(h_ra)}, {len(theta)}"
        )
    return complex(np.sum(np.conj(h_ra.coefficients) * theta.reflection * h_ur.coefficients))


def ris_snr_db(h_ura: complex, radio: RadioParams) -> float:
    """Reflected-link SNR; ``-inf`` for a zero channel."""
    power = abs(h_ura) ** 2
    if power == 0:
        return -math.inf
    return 10.0 * math.log10(radio.p * power / radio.N0)


def phase_shift_paper(ue, uav, ris: RisGeometry, radio: RadioParams) -> PhaseConfig:
    """Closed-form PRU phases steering a UE towards a UAV.

    Uses the ``pi * fc / c`` prefactor verbatim.  This is not the exact
    co-phasing solution for the channel model above (which carries
    ``2*pi/lambda`` and opposite signs); see :func:`phase_shift_cophase`.
    """
    pos = np.asarray(ris.position, dtype=float)
    phi_ur, varphi_ur, psi_ur, _ = _angle_terms(_ue3(ue), pos, LinkKind.UE_TO_RIS)
    phi_ra, varphi_ra, psi_ra, _ = _angle_terms(np.asarray(uav, dtype=float), pos, LinkKind.RIS_TO_UAV)
    rows, cols = _pru_grid(ris)
    theta = (math.pi * radio.fc / SPEED_OF_LIGHT) * (
        ris.dr * rows * psi_ra * phi_ra
        + ris.dc * cols * psi_ra * varphi_ra
        + ris.dr * rows * psi_ur * phi_ur
        + ris.dc * cols * psi_ur * varphi_ur
    )
    return PhaseConfig(thetas=wrap_phase(theta))


def phase_shift_cophase(h_ur: ArrayChannel, h_ra: ArrayChannel) -> PhaseConfig:
    """Phases aligning every summand of the cascaded channel (max ``|h|``)."""
    if len(h_ur) != len(h_ra):
        raise DimensionError(f"channel lengths differ: {len(h_ur)} vs {len(h_ra)}")
    prod = np.conj(h_ra.coefficients) * h_ur.coefficients
    if np.any(prod == 0):
        raise GeometryError("zero-modulus channel entry; phase undefined")
    return PhaseConfig(thetas=wrap_phase(-np.angle(prod)))


def coherent_bound(h_ur: ArrayChannel, h_ra: ArrayChannel) -> float:
    """Largest attainable ``|h_ura|`` over all phase configurations."""
    return float(np.sum(np.abs(h_ur.coefficients) * np.abs(h_ra.coefficients)))


@dataclass(frozen=True, eq=False)
class PairwiseRisLinks:
    """Every UE x UAV reflected link of a scenario at once.

    ``thetas[u, a]`` holds the PRU phases used for pair ``(u, a)`` and
    ``snr_db[u, a]`` the resulting reflected-link SNR.
    """

    thetas: np.ndarray  # (U, A, M)
    h_ura: np.ndarray  # (U, A) complex
    snr_db: np.ndarray  # (U, A)
    d_ur: np.ndarray  # (U,)
    d_ra: np.ndarray  # (A,)


def pairwise_ris_links(sc: Scenario, phase_mode: PhaseMode | str = PhaseMode.PAPER) -> PairwiseRisLinks:
    """Vectorised evaluation of phases, cascaded channels and SNRs for all pairs."""
    phase_mode = PhaseMode(phase_mode)
    ris, radio = sc.ris, sc.radio
    pos = np.asarray(ris.position, dtype=float)
    ue3 = _ue3(sc.ue_positions)
    phi_ur, varphi_ur, psi_ur, d_ur = _angle_terms(ue3, pos, LinkKind.UE_TO_RIS)
    phi_ra, varphi_ra, psi_ra, d_ra = _angle_terms(sc.uav_positions, pos, LinkKind.RIS_TO_UAV)
    rows, cols = _pru_grid(ris)
    k = TWO_PI / radio.wavelength

    # per-node phase slopes along PRU rows / columns
    ur_row, ur_col = phi_ur * psi_ur, varphi_ur * psi_ur  # (U,)
    ra_row, ra_col = phi_ra * psi_ra, varphi_ra * psi_ra  # (A,)
    ph_ur = -k * (ris.dr * np.outer(ur_row, rows) + ris.dc * np.outer(ur_col, cols))  # (U, M)
    ph_ra = -k * (ris.dr * np.outer(ra_row, rows) + ris.dc * np.outer(ra_col, cols))  # (A, M)
    amp = radio.beta0 / np.outer(d_ur, d_ra)  # (U, A)

    if phase_mode is PhaseMode.PAPER:
        pref = math.pi * radio.fc / SPEED_OF_LIGHT
        theta = pref * (
            ris.dr * rows * (ra_row[None, :, None] + ur_row[:, None, None])
            + ris.dc * cols * (ra_col[None, :, None] + ur_col[:, None, None])
        )
        thetas = wrap_phase(theta)
        total = thetas + ph_ur[:, None, :] - ph_ra[None, :, :]
        h = amp * np.exp(1j * total).sum(axis=-1)
    else:
        thetas = wrap_phase(-(ph_ur[:, None, :] - ph_ra[None, :, :]))
        h = amp * ris.M + 0j

    power = np.abs(h) ** 2
    with np.errstate(divide="ignore"):
        snr = 10.0 * np.log10(radio.p * power / radio.N0)
    return PairwiseRisLinks(thetas=thetas, h_ura=h, snr_db=snr, d_ur=d_ur, d_ra=d_ra)
