# core/utils.py v1.0.0
"""
Shared helpers for the simulator modules.

  - make_rng()     : independent numpy generator per (seed, stream).
  - round_count()  : half-up rounding of fraction × population.
  - bearing(), wrap_angle(): planar angle helpers.
  - within_range() : the single distance predicate every coverage test uses.
  - fmt()          : fixed 6-decimal formatting for all text outputs.
"""

import math
from typing import Iterable, Sequence, TextIO

import numpy as np

from core.kernel_config import RANGE_TOLERANCE, FLOAT_FORMAT

TWO_PI = 2.0 * math.pi


def make_rng(seed: int, stream: int) -> np.random.Generator:
    """
    Generator for one purpose of one run.

    Seeding with the pair [seed, stream] keeps placement, traffic, selection
    and direction draws independent while staying a pure function of seed.
    """
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFF, int(stream)])


def round_count(fraction: float, population: int) -> int:
    """round(fraction · population), halves rounded up."""
    return int(math.floor(fraction * population + 0.5))


def wrap_angle(angle: float) -> float:
    """Maps any angle into [0, 2π)."""
    wrapped = math.fmod(angle, TWO_PI)
    if wrapped < 0.0:
        wrapped += TWO_PI
    if wrapped >= TWO_PI:
        wrapped = 0.0
    return wrapped


def bearing(origin: Sequence[float], target: Sequence[float]) -> float:
    """Direction from origin toward target, in [0, 2π)."""
    return wrap_angle(math.atan2(target[1] - origin[1], target[0] - origin[0]))


def within_range(distance, reach):
    """distance <= reach up to RANGE_TOLERANCE; works on scalars and numpy arrays."""
    return distance <= reach * (1.0 + RANGE_TOLERANCE)


def fmt(value: float) -> str:
    if value is None:
        return ""
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return FLOAT_FORMAT.format(value)


def write_rows(out: TextIO, header: Iterable[str], rows: Iterable[Iterable[str]], sep: str = " "):
    """Writes a header line and rows of pre-formatted cells."""
    out.write(sep.join(header) + "\n")
    for row in rows:
        out.write(sep.join(str(cell) for cell in row) + "\n")
