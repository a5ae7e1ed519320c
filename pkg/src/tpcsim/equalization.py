"""Receiver building blocks: observation, transient subtraction, equalization,
and brute-force sequence detection on the discrete-model state space.

The observed signal is r[n] = c*v2[n] + noise.  Before any equalization the
initial-condition transient can be reconstructed from (estimated) initial
values and subtracted; estimation errors leave a residual transient that is
linear in those errors.  Zero-forcing equalization inverts the filter response
1/H(f), optionally regularized.  Sequence detection compares the observation
against the trajectories of all candidate bit sequences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytic import Waveform
from .circuit import (
    CircuitParams,
    Dynamics,
    InitialConditions,
    frequency_response,
    initial_inductor_current,
)
from .discrete import Variant, derive_params
from .errors import GridMismatchError, IndivisibleDecimationError, TooManyBitsError
from .modulation import ModulationConfig, encode, sample_switching


@dataclass(frozen=True)
class ObservationModel:
    """Scale factor, additive white Gaussian noise level, and RNG seed."""

    c: float = 1.0
    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma!r}")


@dataclass(frozen=True)
class EstimatedIC:
    v2_0_hat: float
    dv2_0_hat: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.v2_0_hat) and np.isfinite(self.dv2_0_hat)):
            raise ValueError(f"estimates must be finite, got {self!r}")


@dataclass(frozen=True)
class JointState:
    """Sliding windows of the two state signals at one sub-sampled index."""

    iL_window: tuple
    v2_window: tuple
    m: int
    N_sub: int


def observe(w: Waveform, om: ObservationModel) -> Waveform:
    """r[n] = c*w[n] + N(0, sigma^2), drawn deterministically from the seed."""
    rng = np.random.default_rng(om.seed)
    noise = rng.normal(0.0, om.sigma, len(w))
    return Waveform(dt=w.dt, t0=w.t0, samples=om.c * w.samples + noise)


def reconstruct_transient(d: Dynamics, e: EstimatedIC, t):
    """Transient rebuilt from estimated initial values (same closed form)."""
    from .analytic import transient_component

    return transient_component(d, InitialConditions(e.v2_0_hat, e.dv2_0_hat), t)


def subtract_transient(
    r: Waveform, d: Dynamics, e: EstimatedIC, c_assumed: float = 1.0
) -> Waveform:
    """Remove the reconstructed transient from an observation starting at t = 0."""
    if r.t0 != 0.0:
        raise ValueError(f"observation must start at t = 0, got t0 = {r.t0!r}")
    t = r.times()
    return Waveform(
        dt=r.dt, t0=r.t0, samples=r.samples - c_assumed * reconstruct_transient(d, e, t)
    )


def zf_response(p: CircuitParams, f, eps: float = 0.0):
    """Zero-forcing equalizer F(f) = 1/H(f); eps > 0 switches to the
    regularized form conj(H)/(|H|^2 + eps) to bound the high-frequency gain."""
    h = frequency_response(p, f)
    if eps == 0.0:
        return 1.0 / h
    return np.conj(h) / (np.abs(h) ** 2 + eps)


def equalize_frequency_domain(r: Waveform, p: CircuitParams, eps: float = 0.0) -> Waveform:
    """Apply F(f) per FFT bin; the mean is set aside and restored so the DC
    operating point survives equalization.  Lengths that are not a power of
    two are edge-padded for the transform and trimmed afterwards."""
    n = len(r)
    if n < 2:
        raise ValueError("need at least two samples")
    n_fft = 1 << (n - 1).bit_length()
    mean = float(np.mean(r.samples))
    x = np.pad(r.samples - mean, (0, n_fft - n), mode="edge")
    freqs = np.fft.fftfreq(n_fft, r.dt)
    gains = zf_response(p, freqs, eps)
    y = np.fft.ifft(np.fft.fft(x) * gains).real[:n] + mean
    return Waveform(dt=r.dt, t0=r.t0, samples=y)


def build_state_sequence(
    iL: Waveform,
    v2: Waveform,
    N_sub: int,
    L_m: int = 2,
    J: int | None = None,
) -> list[JointState]:
    """Joint states from sub-sampled trajectories.

    State m holds the windows [x[m], x[m-1], ..., x[m-L_m+1]] of both signals
    sampled at m*N_sub*dt; the first complete state is at m = L_m - 1.  When J
    is given, N_sub must divide it so the sub-rate is a whole number of
    samples per symbol.
    """
    if not (isinstance(N_sub, (int, np.integer)) and N_sub >= 1):
        raise ValueError(f"N_sub must be an integer >= 1, got {N_sub!r}")
    if L_m < 1:
        raise ValueError(f"L_m must be >= 1, got {L_m!r}")
    if J is not None and J % N_sub != 0:
        raise IndivisibleDecimationError(f"N_sub = {N_sub} does not divide J = {J}")
    if len(iL) != len(v2) or iL.dt != v2.dt or iL.t0 != v2.t0:
        raise GridMismatchError("iL and v2 trajectories are not on the same grid")
    iL_sub = iL.samples[::N_sub]
    v2_sub = v2.samples[::N_sub]
    states = []
    for m in range(L_m - 1, len(iL_sub)):
        sel = slice(m, m - L_m if m - L_m >= 0 else None, -1)
        states.append(
            JointState(
                iL_window=tuple(iL_sub[sel]),
                v2_window=tuple(v2_sub[sel]),
                m=m,
                N_sub=int(N_sub),
            )
        )
    return states


def _candidate_trajectories(
    p: CircuitParams,
    cfg: ModulationConfig,
    ic: InitialConditions,
    J: int,
    K: int,
    variant: Variant,
) -> tuple[np.ndarray, np.ndarray]:
    """v2 trajectories of all 2^K bit sequences, rows in lexicographic order."""
    n_cand = 1 << K
    bits_matrix = (np.arange(n_cand)[:, None] >> np.arange(K - 1, -1, -1)) & 1
    dp = derive_params(p, J, cfg.T, variant)
    N = K * J
    s1_zero = sample_switching(encode(np.zeros(K, dtype=int), cfg), dp.dt, N)
    s1_one = sample_switching(encode(np.ones(K, dtype=int), cfg), dp.dt, N)
    ksym = np.minimum(np.arange(N) // J, K - 1)
    s1_all = np.where(bits_matrix[:, ksym] == 1, s1_one[None, :], s1_zero[None, :])

    iL = np.full(n_cand, initial_inductor_current(p, ic))
    v2 = np.full(n_cand, ic.v2_0)
    out = np.empty((n_cand, N))
    out[:, 0] = v2
    for n in range(1, N):
        if variant is Variant.PREDICTIVE:
            v2_new = dp.kappa * v2 + dp.mu * iL
            iL = iL + dp.beta * p.V1 * s1_all[:, n - 1] + dp.gamma * v2
            v2 = v2_new
        else:
            iL = dp.alpha * iL + dp.beta * p.V1 * s1_all[:, n] + dp.gamma * v2
            v2 = dp.kappa * v2 + dp.mu * iL
        out[:, n] = v2
    return bits_matrix, out


def brute_force_detect(
    r: Waveform,
    p: CircuitParams,
    cfg: ModulationConfig,
    ic: InitialConditions,
    J: int,
    K: int,
    variant: Variant = Variant.EXACT,
) -> np.ndarray:
    """Exhaustive minimum-distance sequence detection over all 2^K candidates.

    The observation is compared (in v2 units, i.e. assuming unit scale) against
    the discrete-model trajectory of every bit sequence; ties resolve to the
    lexicographically smallest sequence.  Limited to K <= 12.
    """
    if K > 12:
        raise TooManyBitsError(f"exhaustive search over 2^{K} sequences refused (K <= 12)")
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K!r}")
    N = K * J
    if len(r) < N:
        raise ValueError(f"observation has {len(r)} samples, need {N}")
    bits_matrix, trajectories = _candidate_trajectories(p, cfg, ic, J, K, variant)
    diffs = trajectories - r.samples[None, :N]
    distances = np.einsum("ij,ij->i", diffs, diffs)
    best = int(np.argmin(distances))
    return bits_matrix[best].astype(int)
