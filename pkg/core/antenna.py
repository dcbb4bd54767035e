# core/antenna.py v1.0.0
"""
Directional beam models: the ideal sector and the uniform linear array (ULA).

Both keep transmit power constant. A sector of width θ reaches
r(θ) = r·sqrt(2π/θ) so its footprint always equals the omnidirectional disk;
a ULA with m elements has gain m at boresight and reaches r·g^(1/α) in a
direction of gain g.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from core.errors import ParameterError
from core.kernel_config import (
    DEFAULT_MAX_MULTIPLE, DEFAULT_PATHLOSS_EXP, DEFAULT_TX_POWER, RX_GAIN,
    ULA_SINGULAR_GUARD, ANGLE_TOLERANCE, CEIL_TOLERANCE, CALIBRATION_TOLERANCE, GAIN_FLOOR,
)
from core.utils import TWO_PI, wrap_angle, within_range

Point = Tuple[float, float]


@dataclass(frozen=True)
class SectorBeam:
    boresight: float
    width: float
    length: float

    @classmethod
    def for_width(cls, boresight: float, width: float, omni_range: float) -> "SectorBeam":
        return cls(wrap_angle(boresight), width, sector_beam_length(width, omni_range))

    def pointed(self, boresight: float) -> "SectorBeam":
        return SectorBeam(wrap_angle(boresight), self.width, self.length)


@dataclass(frozen=True)
class UlaBeam:
    boresight: float
    elements: int
    pathloss_exponent: float = DEFAULT_PATHLOSS_EXP
    tx_power: float = DEFAULT_TX_POWER
    rx_threshold: float = DEFAULT_TX_POWER

    def __post_init__(self):
        if self.elements < 1:
            raise ParameterError(f"ULA needs at least one element, got {self.elements}")

    @classmethod
    def calibrated(cls, boresight: float, elements: int, omni_range: float,
                   pathloss_exponent: float = DEFAULT_PATHLOSS_EXP,
                   tx_power: float = DEFAULT_TX_POWER) -> "UlaBeam":
        """Threshold p_r0 = p_t / r^α, so one element reaches exactly omni_range."""
        return cls(
            boresight=wrap_angle(boresight),
            elements=int(elements),
            pathloss_exponent=pathloss_exponent,
            tx_power=tx_power,
            rx_threshold=tx_power / omni_range ** pathloss_exponent,
        )

    def pointed(self, boresight: float) -> "UlaBeam":
        return UlaBeam(wrap_angle(boresight), self.elements, self.pathloss_exponent,
                       self.tx_power, self.rx_threshold)


@dataclass(frozen=True)
class BeamwidthChoice:
    theta_star: float
    length_multiple: int
    p_nf: float
    p_nl: float
    weighted_length: float

    @property
    def beam_length_ratio(self) -> float:
        """r(θ*)/r."""
        return math.sqrt(TWO_PI / self.theta_star)


# ── Sector model ─────────────────────────────────────────────────────────────

def sector_beam_length(width: float, omni_range: float) -> float:
    if not (0.0 < width <= TWO_PI):
        raise ParameterError(f"beam width must lie in (0, 2π], got {width}")
    if width == TWO_PI:
        return float(omni_range)
    return omni_range * math.sqrt(TWO_PI / width)


def candidate_width(length_multiple: int) -> float:
    """θ = 2π/k², the width whose beam length is k·r."""
    return TWO_PI / (length_multiple * length_multiple)


def region_presence_probs(length_multiple: int, neighborhood_size: int,
                          omni_range: float = 1.0) -> Tuple[float, float]:
    """
    Probabilities that the first and the last radial region of a k·r beam hold a node.

    Region i spans radii [(i-1)r, ir] under width 2π/k², so
    A_f = θr²/2 and A_l = θr²(2k-1)/2.
    """
    k = length_multiple
    if k < 1:
        raise ParameterError(f"length multiple must be >= 1, got {k}")
    if neighborhood_size < 0:
        raise ParameterError(f"neighborhood size must be >= 0, got {neighborhood_size}")
    theta = candidate_width(k)
    disk = math.pi * omni_range ** 2
    area_first = theta * omni_range ** 2 / 2.0
    area_last = theta * omni_range ** 2 * (2 * k - 1) / 2.0
    share_first = min(area_first / disk, 1.0)
    share_last = min(area_last / disk, 1.0)
    p_nf = 1.0 - (1.0 - share_first) ** neighborhood_size
    p_nl = 1.0 - (1.0 - share_last) ** neighborhood_size
    return p_nf, p_nl


def optimize_beamwidth(neighborhood_size: int, max_multiple: int = DEFAULT_MAX_MULTIPLE,
                       omni_range: float = 1.0) -> BeamwidthChoice:
    """argmax over k = 1..K of r_C = r(θ)·p_nf·p_nl; ties go to the smaller k."""
    if max_multiple < 1:
        raise ParameterError(f"max_multiple must be >= 1, got {max_multiple}")
    best = None
    for k in range(1, max_multiple + 1):
        theta = candidate_width(k)
        p_nf, p_nl = region_presence_probs(k, neighborhood_size, omni_range)
        weighted = sector_beam_length(theta, omni_range) * p_nf * p_nl
        if best is None or weighted > best.weighted_length:
            best = BeamwidthChoice(theta, k, p_nf, p_nl, weighted)
    return best


def _angular_offset(angle, boresight):
    """Signed offset of angle from boresight in (-π, π]; scalar or array."""
    return np.mod(np.asarray(angle) - boresight + math.pi, TWO_PI) - math.pi


def sector_covers(origin: Point, beam: SectorBeam, target: Point) -> bool:
    dx, dy = target[0] - origin[0], target[1] - origin[1]
    distance = math.hypot(dx, dy)
    if distance == 0.0:
        raise ParameterError("origin and target coincide")
    if not within_range(distance, beam.length):
        return False
    offset = float(_angular_offset(math.atan2(dy, dx), beam.boresight))
    return abs(offset) <= beam.width / 2.0 + ANGLE_TOLERANCE


def sector_coverage_mask(origin: Point, beam: SectorBeam, targets: np.ndarray) -> np.ndarray:
    """Vectorized sector_covers over an (M, 2) array; coincident targets are excluded."""
    delta = targets - np.asarray(origin, dtype=float)
    distance = np.hypot(delta[:, 0], delta[:, 1])
    offset = _angular_offset(np.arctan2(delta[:, 1], delta[:, 0]), beam.boresight)
    angular = np.abs(offset) <= beam.width / 2.0 + ANGLE_TOLERANCE
    return (distance > 0.0) & within_range(distance, beam.length) & angular


# ── Uniform linear array ─────────────────────────────────────────────────────

def ula_gain(elements: int, boresight: float, direction):
    """
    Array-factor gain with half-wavelength spacing.

    ψ = π(cos φ − cos θ_b); F = sin(mψ/2) / (m sin(ψ/2)); gain = m·F².
    Accepts a scalar or array direction.
    """
    if elements < 1:
        raise ParameterError(f"ULA needs at least one element, got {elements}")
    phi = np.asarray(direction, dtype=float)
    psi = math.pi * (np.cos(phi) - math.cos(boresight))
    half = np.sin(psi / 2.0)
    singular = np.abs(half) < ULA_SINGULAR_GUARD
    safe = np.where(singular, 1.0, half)
    factor = np.where(singular, 1.0, np.sin(elements * psi / 2.0) / (elements * safe))
    gain = elements * factor ** 2
    if gain.ndim == 0:
        return float(gain)
    return gain


def ula_reach(beam: UlaBeam, gain, omni_range: float = 1.0):
    """
    Largest distance s with p_t·g·g_r / s^α >= p_r0.

    Expressed relative to omni_range so a calibrated single element reaches
    exactly omni_range, bit for bit.
    """
    calibration = beam.tx_power * RX_GAIN / (beam.rx_threshold * omni_range ** beam.pathloss_exponent)
    if abs(calibration - 1.0) < CALIBRATION_TOLERANCE:
        calibration = 1.0
    return omni_range * (np.asarray(gain, dtype=float) * calibration) ** (1.0 / beam.pathloss_exponent)


def ula_covers(origin: Point, beam: UlaBeam, target: Point, omni_range: float = 1.0) -> bool:
    dx, dy = target[0] - origin[0], target[1] - origin[1]
    distance = math.hypot(dx, dy)
    if distance == 0.0:
        raise ParameterError("origin and target coincide")
    gain = ula_gain(beam.elements, beam.boresight, math.atan2(dy, dx))
    if gain <= GAIN_FLOOR:
        return False
    return bool(within_range(distance, float(ula_reach(beam, gain, omni_range))))


def ula_coverage_mask(origin: Point, beam: UlaBeam, targets: np.ndarray, omni_range: float = 1.0) -> np.ndarray:
    delta = targets - np.asarray(origin, dtype=float)
    distance = np.hypot(delta[:, 0], delta[:, 1])
    gain = np.atleast_1d(ula_gain(beam.elements, beam.boresight, np.arctan2(delta[:, 1], delta[:, 0])))
    reach = ula_reach(beam, gain, omni_range)
    return (distance > 0.0) & (gain > GAIN_FLOOR) & within_range(distance, reach)


def elements_for_beamwidth(choice: BeamwidthChoice, omni_range: float = 1.0) -> int:
    """m = ceil(r(θ*)/r)."""
    ratio = sector_beam_length(choice.theta_star, omni_range) / omni_range
    return max(1, math.ceil(ratio - CEIL_TOLERANCE))


def footprint_area(width: float, omni_range: float = 1.0) -> float:
    """Area θ·r(θ)²/2 of a sector; equals πr² for every admissible width."""
    return width * sector_beam_length(width, omni_range) ** 2 / 2.0

