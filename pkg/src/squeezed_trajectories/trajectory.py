"""Time grids, random substreams and the trajectory record shared by all schemes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError

__all__ = ["TrajectoryRecord", "substream", "n_steps", "time_grid", "check_step"]

_U64 = 1 << 64


def substream(seed: int, index: int = 0) -> np.random.Generator:
    """Independent generator for trajectory ``index`` of an experiment ``seed``.

    The stream is a Philox-4x64 counter-based generator whose 128-bit key is
    ``seed + index * 2**64``: the low word carries the user seed and the high
    word the trajectory index.  Distinct ``(seed, index)`` pairs therefore get
    distinct keys, and a trajectory's numbers do not depend on how many other
    trajectories are run or in which order.
    """
    seed, index = int(seed), int(index)
    if not (0 <= seed < _U64 and 0 <= index < _U64):
        raise ConfigError(f"seed and index must be unsigned 64-bit integers, got {seed}, {index}")
    return np.random.Generator(np.random.Philox(key=seed + index * _U64))


def n_steps(t_final: float, dt: float) -> int:
    """Number of steps ``floor(t_final / dt)``, tolerant of rounding in the ratio."""
    return int(math.floor(t_final / dt * (1 + 1e-12)))


def time_grid(t_final: float, dt: float) -> np.ndarray:
    return dt * np.arange(n_steps(t_final, dt) + 1)


def check_step(t_final: float, dt: float, mu: float) -> None:
    if not (t_final > 0 and dt > 0):
        raise ConfigError(f"t_final and dt must be positive, got {t_final!r}, {dt!r}")
    if dt > t_final:
        raise ConfigError(f"dt={dt!r} exceeds t_final={t_final!r}")
    if dt * mu > 0.01 * (1 + 1e-12):
        raise ConfigError(f"dt*mu={dt * mu!r} exceeds the stability guard 0.01")


@dataclass
class TrajectoryRecord:
    """Time series produced by one simulated trajectory.

    Row ``k`` of every series refers to time ``t[k] = k dt``.  Increment series
    (``innovations``, ``outputs``) hold in row ``k >= 1`` the increment over
    ``[t[k-1], t[k]]``; row 0 is zero.  For the double-homodyne scheme they
    have a trailing axis of length 2 (channels 1 and 2).

    Arrays are treated as read-only; trajectories of one ensemble share their
    (noise-independent) ``zeta`` and ``nu`` arrays.
    """

    scheme: str
    t: np.ndarray
    alpha: np.ndarray
    zeta: np.ndarray
    nu: np.ndarray
    innovations: np.ndarray
    outputs: np.ndarray
    seed: int
    index: int = 0
    dx2: np.ndarray = field(init=False, repr=False)
    dp2: np.ndarray = field(init=False, repr=False)
    purity: Optional[np.ndarray] = None

    def __post_init__(self):
        self.dx2 = 1.0 + 2.0 * self.nu + 2.0 * self.zeta.real
        self.dp2 = 1.0 + 2.0 * self.nu - 2.0 * self.zeta.real

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0]) if len(self.t) > 1 else 0.0

    def __len__(self):
        return len(self.t)
