"""Discrete-time iteration models of the converter and the DCM extension.

Three variants of the forward iteration for inductor current and output
voltage at interval dt = T/J:

* EXACT      -- coefficients from resolving the implicit update equations.
* SIMPLIFIED -- the same data flow with v2[n] ~ v2[n-1] coefficient shortcuts.
* PREDICTIVE -- a linear prediction form using only index n-1 values
  (s1[n] ~ s1[n-1], iL[n] ~ iL[n-1]), which shifts the output by about one
  sample.

Discontinuous conduction mode (asynchronous converter with a diode) clips the
inductor current at zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .analytic import Waveform
from .circuit import CircuitParams, InitialConditions, initial_inductor_current
from .errors import UnstableStepError
from .modulation import SwitchingPattern, sample_switching


class Variant(Enum):
    EXACT = "exact"
    SIMPLIFIED = "simplified"
    PREDICTIVE = "predictive"


class ConductionMode(Enum):
    CCM = "ccm"
    DCM = "dcm"


@dataclass(frozen=True)
class DiscreteParams:
    alpha: float
    beta: float
    gamma: float
    kappa: float
    mu: float
    dt: float
    variant: Variant


@dataclass(frozen=True)
class SimState:
    iL: float
    v2: float
    n: int = 0


def derive_params(p: CircuitParams, J: int, T: float, variant: Variant) -> DiscreteParams:
    """Iteration coefficients for interval dt = T/J.

    The simplified/predictive coefficient set requires dt < C*R_L, otherwise
    kappa <= 0 and the voltage update loses its decaying fixed point.
    """
    if not (isinstance(J, (int, np.integer)) and J >= 1):
        raise ValueError(f"J must be an integer >= 1, got {J!r}")
    if T <= 0:
        raise ValueError(f"T must be > 0, got {T!r}")
    dt = T / J
    crl = p.C * p.R_L
    if variant is Variant.EXACT:
        kappa = crl / (crl + dt)
        mu = p.R_L * dt / (crl + dt)
        den = p.L * (crl + dt) + p.R_L * dt * dt
        alpha = p.L * (crl + dt) / den
        beta = dt * (crl + dt) / den
        gamma = -crl * dt / den
    else:
        if dt >= crl:
            raise UnstableStepError(
                f"dt = {dt:.6g} s >= C*R_L = {crl:.6g} s: kappa <= 0 for the "
                f"{variant.value} coefficients; raise J"
            )
        alpha = 1.0
        beta = dt / p.L
        gamma = -beta
        kappa = (crl - dt) / crl
        mu = dt / p.C
    return DiscreteParams(
        alpha=alpha, beta=beta, gamma=gamma, kappa=kappa, mu=mu, dt=dt, variant=variant
    )


def _step_values(
    iL: float,
    v2: float,
    s1_n: float,
    s1_prev: float,
    dp: DiscreteParams,
    V1: float,
    dcm: bool,
) -> tuple[float, float]:
    """One update of (iL, v2).  Single source of truth for all variants.

    EXACT/SIMPLIFIED consume s1[n] and the fresh iL[n]; PREDICTIVE consumes
    s1[n-1] and iL[n-1].  In DCM the current clip happens before it feeds the
    voltage update (EXACT/SIMPLIFIED) or before it is stored (PREDICTIVE),
    preserving each variant's data flow.
    """
    if dp.variant is Variant.PREDICTIVE:
        v2_new = dp.kappa * v2 + dp.mu * iL
        iL_new = iL + dp.beta * V1 * s1_prev + dp.gamma * v2
        if dcm and iL_new < 0.0:
            iL_new = 0.0
    else:
        iL_new = dp.alpha * iL + dp.beta * V1 * s1_n + dp.gamma * v2
        if dcm and iL_new < 0.0:
            iL_new = 0.0
        v2_new = dp.kappa * v2 + dp.mu * iL_new
    return iL_new, v2_new


def step(
    s: SimState,
    s1_n: float,
    s1_prev: float,
    dp: DiscreteParams,
    mode: ConductionMode = ConductionMode.CCM,
    V1: float = 1.0,
) -> SimState:
    """Advance one sample.  For the first predictive step s1_prev is 0 (the
    switching signal is right-sided)."""
    iL, v2 = _step_values(s.iL, s.v2, s1_n, s1_prev, dp, V1, mode is ConductionMode.DCM)
    return SimState(iL=iL, v2=v2, n=s.n + 1)


def simulate(
    p: CircuitParams,
    pat: SwitchingPattern,
    ic: InitialConditions,
    J: int,
    variant: Variant,
    mode: ConductionMode = ConductionMode.CCM,
) -> tuple[Waveform, Waveform]:
    """Run the iteration over the whole pattern.

    Returns (v2, iL) trajectories of length K*J at dt = T/J; sample 0 carries
    the initial conditions.
    """
    dp = derive_params(p, J, pat.T, variant)
    N = pat.K * J
    s1 = sample_switching(pat, dp.dt, N)
    iL = initial_inductor_current(p, ic)
    v2 = ic.v2_0
    dcm = mode is ConductionMode.DCM
    if dcm and (iL < 0.0 or v2 < 0.0):
        raise ValueError(
            f"DCM requires iL(0) >= 0 and v2(0) >= 0, got iL={iL:.6g}, v2={v2:.6g}"
        )
    out_v2 = np.empty(N)
    out_iL = np.empty(N)
    if N:
        out_v2[0] = v2
        out_iL[0] = iL
    step_fn = _step_values
    for n in range(1, N):
        iL, v2 = step_fn(iL, v2, s1[n], s1[n - 1], dp, p.V1, dcm)
        out_v2[n] = v2
        out_iL[n] = iL
    return (
        Waveform(dt=dp.dt, t0=0.0, samples=out_v2),
        Waveform(dt=dp.dt, t0=0.0, samples=out_iL),
    )
