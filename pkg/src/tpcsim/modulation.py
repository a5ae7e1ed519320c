"""Binary data to per-symbol pulse timings, and ideal switching-signal sampling.

Both schemes place one pulse per symbol period T:

* VPWM varies the pulse width around an average duty cycle delta, pulse
  centered at T/2.
* VPPM keeps the width at delta*T and shifts the pulse center by +/- depth
  seconds around T/2.

Pulse membership is half-open, [t_start, t_end), so each sample belongs to
exactly one signal level even when it lands on an edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DepthOutOfRangeError


class Scheme(Enum):
    VPWM = "vpwm"
    VPPM = "vppm"
    UNMODULATED = "unmodulated"


@dataclass(frozen=True)
class ModulationConfig:
    scheme: Scheme
    T: float
    delta: float
    depth: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.T) and self.T > 0):
            raise ValueError(f"T must be finite and > 0, got {self.T!r}")
        if not (0.0 < self.delta < 1.0):
            raise ValueError(f"delta must lie in (0, 1), got {self.delta!r}")
        if self.depth < 0:
            raise ValueError(f"depth must be >= 0, got {self.depth!r}")


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float).copy()
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class SwitchingPattern:
    """Per-symbol pulse start/end times, each relative to its own symbol period."""

    T: float
    t_start: np.ndarray
    t_end: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "t_start", _readonly(self.t_start))
        object.__setattr__(self, "t_end", _readonly(self.t_end))
        if self.t_start.shape != self.t_end.shape or self.t_start.ndim != 1:
            raise ValueError("t_start and t_end must be 1-d arrays of equal length")
        if self.K and not (
            np.all(self.t_start >= 0.0)
            and np.all(self.t_start < self.t_end)
            and np.all(self.t_end <= self.T)
        ):
            raise ValueError("each symbol needs 0 <= t_start < t_end <= T")

    @property
    def K(self) -> int:
        return len(self.t_start)

    @property
    def t_center(self) -> np.ndarray:
        return _readonly((self.t_start + self.t_end) / 2.0)

    @property
    def widths(self) -> np.ndarray:
        return _readonly(self.t_end - self.t_start)

    def mean_duty(self) -> float:
        """Average duty cycle of the pattern (delta for both schemes' balanced use)."""
        if self.K == 0:
            return 0.0
        return float(np.mean(self.widths)) / self.T


def _validated_bits(bits) -> np.ndarray:
    arr = np.asarray(bits, dtype=int)
    if arr.ndim != 1:
        raise ValueError("bits must be a 1-d sequence")
    if arr.size and not np.all((arr == 0) | (arr == 1)):
        raise ValueError("bits must contain only 0 and 1")
    return arr


def alternating_bits(K: int) -> np.ndarray:
    """The [1, 0, 1, 0, ...] test sequence of length K."""
    return (1 - np.arange(K) % 2).astype(int)


def encode_vpwm(bits, cfg: ModulationConfig) -> SwitchingPattern:
    """Pulse-width keying: bit k maps to duty delta + (2*bits[k]-1)*depth.

    Pulses stay centered at T/2.  Raises DepthOutOfRangeError when a resulting
    duty cycle leaves (0, 1).
    """
    if cfg.scheme is not Scheme.VPWM:
        raise ValueError(f"config scheme is {cfg.scheme}, expected VPWM")
    arr = _validated_bits(bits)
    duty = cfg.delta + (2 * arr - 1) * cfg.depth
    if arr.size and not (np.all(duty > 0.0) and np.all(duty < 1.0)):
        raise DepthOutOfRangeError(
            f"duty cycles {cfg.delta} +/- {cfg.depth} leave the open interval (0, 1)"
        )
    half = 0.5 * cfg.T
    t_start = half - duty * half
    t_end = half + duty * half
    return SwitchingPattern(T=cfg.T, t_start=t_start, t_end=t_end)


def encode_vppm(bits, cfg: ModulationConfig) -> SwitchingPattern:
    """Pulse-position keying: bit k shifts the pulse center to T/2 +/- depth.

    The width stays at delta*T.  depth is in seconds here.  Raises
    DepthOutOfRangeError when a shifted pulse leaves [0, T].
    """
    if cfg.scheme is not Scheme.VPPM:
        raise ValueError(f"config scheme is {cfg.scheme}, expected VPPM")
    arr = _validated_bits(bits)
    width = cfg.delta * cfg.T
    center = cfg.T / 2.0 + (2 * arr - 1) * cfg.depth
    t_start = center - width / 2.0
    t_end = center + width / 2.0
    if arr.size and not (np.all(t_start >= 0.0) and np.all(t_end <= cfg.T)):
        raise DepthOutOfRangeError(
            f"pulse of width {width:.6g} s shifted by +/-{cfg.depth:.6g} s "
            f"leaves the symbol period [0, {cfg.T:.6g}] s"
        )
    return SwitchingPattern(T=cfg.T, t_start=t_start, t_end=t_end)


def unmodulated_pattern(cfg: ModulationConfig, K: int) -> SwitchingPattern:
    """K identical centered pulses of width delta*T."""
    half = 0.5 * cfg.T
    t_start = np.full(K, half - cfg.delta * half)
    t_end = np.full(K, half + cfg.delta * half)
    return SwitchingPattern(T=cfg.T, t_start=t_start, t_end=t_end)


def encode(bits, cfg: ModulationConfig) -> SwitchingPattern:
    """Dispatch on cfg.scheme; UNMODULATED ignores the bit values."""
    if cfg.scheme is Scheme.VPWM:
        return encode_vpwm(bits, cfg)
    if cfg.scheme is Scheme.VPPM:
        return encode_vppm(bits, cfg)
    return unmodulated_pattern(cfg, len(np.asarray(bits)))


def sample_switching(pat: SwitchingPattern, dt: float, N: int) -> np.ndarray:
    """Point samples s1[n] = s1(n*dt) of the ideal two-level switching signal.

    A sample is 1 exactly when its time falls inside [k*T + t_start[k],
    k*T + t_end[k]) for the symbol k containing it, and 0 outside all pulses
    or beyond the last symbol.  Edges need not align with the grid.
    """
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt!r}")
    t = np.arange(N) * dt
    if pat.K == 0:
        return np.zeros(N)
    offsets = np.arange(pat.K) * pat.T
    edges = np.empty(2 * pat.K)
    edges[0::2] = offsets + pat.t_start
    edges[1::2] = offsets + pat.t_end
    # ulp-level inversions at abutting pulses would break the parity count
    edges = np.maximum.accumulate(edges)
    inside = np.searchsorted(edges, t, side="right") % 2 == 1
    return np.where(inside, 1.0, 0.0)
