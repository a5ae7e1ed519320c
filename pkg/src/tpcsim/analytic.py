"""Exact continuous-time output voltage of the modulated buck converter.

The output splits into a transient part driven by the initial conditions and a
data part that is a sum of per-symbol pulse shapes:

    v2(t) = v2_t(t) + V1 * sum_k g_tx(t - k*T - t_center[k]; T_p[k])

where g_tx is the difference of two shifted unit-step responses of the filter.
A generic convolution path handles arbitrary (e.g. finite-slope) input
waveforms through the impulse response.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .circuit import CircuitParams, Dynamics, InitialConditions, impulse_response
from .errors import ResolutionTooCoarseError
from .modulation import SwitchingPattern


@dataclass(frozen=True)
class Waveform:
    """Uniformly sampled real signal: samples[n] is the value at t0 + n*dt."""

    dt: float
    t0: float
    samples: np.ndarray

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be finite and > 0, got {self.dt!r}")
        arr = np.asarray(self.samples, dtype=float).copy()
        if arr.ndim != 1:
            raise ValueError("samples must be 1-d")
        if arr.size and not np.all(np.isfinite(arr)):
            raise ValueError("samples must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return len(self.samples)

    def times(self) -> np.ndarray:
        return self.t0 + np.arange(len(self.samples)) * self.dt


def _shaped_like(t, values: np.ndarray):
    if np.isscalar(t):
        return float(values)
    return values


def transient_component(d: Dynamics, ic: InitialConditions, t):
    """Initial-condition response; identically zero when both conditions are zero."""
    t_arr = np.asarray(t, dtype=float)
    tp = np.maximum(t_arr, 0.0)
    coeff = (d.a * ic.v2_0 + ic.dv2_0) / d.b
    v = np.exp(-d.a * tp) * (coeff * np.sin(d.b * tp) + ic.v2_0 * np.cos(d.b * tp))
    return _shaped_like(t, np.where(t_arr >= 0.0, v, 0.0))


def unit_step_component(d: Dynamics, t):
    """Normalized step response u(t) = 1 - exp(-a*t)*(cos(b*t) + (a/b)*sin(b*t)), t >= 0."""
    t_arr = np.asarray(t, dtype=float)
    tp = np.maximum(t_arr, 0.0)
    v = 1.0 - np.exp(-d.a * tp) * (np.cos(d.b * tp) + (d.a / d.b) * np.sin(d.b * tp))
    return _shaped_like(t, np.where(t_arr >= 0.0, v, 0.0))


def pulse_shape_gtx(d: Dynamics, Tp: float, t):
    """Response to one unit pulse of width Tp centered at t = 0.

    g_tx(t) = u(t + Tp/2) - u(t - Tp/2).  The width is an explicit argument
    because modulation may vary it per symbol.
    """
    if Tp <= 0:
        raise ValueError(f"Tp must be > 0, got {Tp!r}")
    t_arr = np.asarray(t, dtype=float)
    v = unit_step_component(d, t_arr + Tp / 2.0) - unit_step_component(d, t_arr - Tp / 2.0)
    return _shaped_like(t, v)


def _data_component_direct(d: Dynamics, pat: SwitchingPattern, V1: float, t_arr: np.ndarray):
    """Literal per-symbol summation of shifted step responses (O(N*K))."""
    total = np.zeros_like(t_arr)
    for k in range(pat.K):
        shift = k * pat.T
        total += unit_step_component(d, t_arr - shift - pat.t_start[k])
        total -= unit_step_component(d, t_arr - shift - pat.t_end[k])
    return V1 * total


def _data_component_prefix(d: Dynamics, pat: SwitchingPattern, V1: float, t_arr: np.ndarray):
    """Edge prefix-sum evaluation of the same sum (O(N + K)).

    Each edge at time tau contributes sign * u(t - tau) with
    u(x) = 1 - Re[(1 - j*a/b) * exp(s01*x)], so the decaying parts collapse
    into exp(s01*t) times a cumulative complex weight over past edges.
    """
    offsets = np.arange(pat.K) * pat.T
    times = np.empty(2 * pat.K)
    times[0::2] = offsets + pat.t_start
    times[1::2] = offsets + pat.t_end
    signs = np.tile([1.0, -1.0], pat.K)
    order = np.argsort(times, kind="stable")
    times = times[order]
    signs = signs[order]

    w = complex(1.0, -d.a / d.b)
    weights = signs * w * np.exp(-d.s01 * times)
    cum_sign = np.concatenate([[0.0], np.cumsum(signs)])
    cum_weight = np.concatenate([[0.0 + 0.0j], np.cumsum(weights)])

    idx = np.searchsorted(times, t_arr, side="right")
    active = idx > 0
    total = np.zeros_like(t_arr)
    if np.any(active):
        decay = np.exp(d.s01 * t_arr[active]) * cum_weight[idx[active]]
        total[active] = cum_sign[idx[active]] - decay.real
    return V1 * total


def data_component(d: Dynamics, pat: SwitchingPattern, V1: float, t):
    """Zero-state response to the pattern: V1 * sum of shifted per-symbol pulse shapes."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if pat.K == 0:
        out = np.zeros_like(t_arr)
    # the prefix form needs exp(a * tau) for the last edge to stay finite
    elif d.a * (pat.K * pat.T) < 600.0:
        out = _data_component_prefix(d, pat, V1, t_arr)
    else:
        out = _data_component_direct(d, pat, V1, t_arr)
    if np.isscalar(t):
        return float(out[0])
    return out.reshape(np.asarray(t).shape)


def output_voltage(d: Dynamics, ic: InitialConditions, pat: SwitchingPattern, V1: float, t):
    """Total output voltage: transient plus data component."""
    t_arr = np.asarray(t, dtype=float)
    v = transient_component(d, ic, t_arr) + data_component(d, pat, V1, t_arr)
    return _shaped_like(t, v)


def sample_output(
    d: Dynamics,
    ic: InitialConditions,
    pat: SwitchingPattern,
    V1: float,
    dt: float,
    N: int,
) -> Waveform:
    """Point-evaluate the closed form on a uniform grid starting at t = 0."""
    t = np.arange(N) * dt
    return Waveform(dt=dt, t0=0.0, samples=output_voltage(d, ic, pat, V1, t))


def convolve_end_to_end(v1: Waveform, d: Dynamics, p: CircuitParams) -> Waveform:
    """Filter an arbitrary input waveform through the impulse response.

    Rectangle-rule approximation of (v1 * h_i)(t) on the input grid, with h_i
    truncated at 30/a where its envelope has decayed to exp(-30).  Requires the
    grid to resolve the ringing: dt <= 2*pi/(20*b).
    """
    dt_max = 2.0 * math.pi / (20.0 * d.b)
    if v1.dt > dt_max:
        raise ResolutionTooCoarseError(
            f"dt = {v1.dt:.6g} s is too coarse for ringing at {d.b:.6g} rad/s "
            f"(need dt <= {dt_max:.6g} s)"
        )
    n_taps = int(np.ceil(30.0 / d.a / v1.dt)) + 1
    h = impulse_response(d, p, np.arange(n_taps) * v1.dt)
    out = fftconvolve(v1.samples, h)[: len(v1.samples)] * v1.dt
    return Waveform(dt=v1.dt, t0=v1.t0, samples=out)
