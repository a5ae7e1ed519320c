"""Tests for the receiver building blocks."""

import numpy as np
import pytest

from tpcsim.analytic import Waveform, data_component, sample_output, transient_component
from tpcsim.circuit import CircuitParams, InitialConditions, derive_dynamics, frequency_response
from tpcsim.discrete import Variant, simulate
from tpcsim.equalization import (
    EstimatedIC,
    ObservationModel,
    brute_force_detect,
    build_state_sequence,
    equalize_frequency_domain,
    observe,
    reconstruct_transient,
    subtract_transient,
    zf_response,
)
from tpcsim.errors import GridMismatchError, IndivisibleDecimationError, TooManyBitsError
from tpcsim.modulation import ModulationConfig, Scheme, alternating_bits, encode_vpwm

FAST = CircuitParams(L=10e-6, C=1e-6, R_L=10.0)
T = 1e-6
CFG = ModulationConfig(Scheme.VPWM, T, 0.75, 0.2)
IC = InitialConditions(0.75, 0.0)


def make_obs(bits, J=8, sigma=0.0, seed=0, c=1.0):
    pat = encode_vpwm(np.asarray(bits), CFG)
    v2, _ = simulate(FAST, pat, IC, J, Variant.EXACT)
    return observe(v2, ObservationModel(c=c, sigma=sigma, seed=seed))


def test_observe_identity_and_scaling():
    w = Waveform(dt=1e-8, t0=0.0, samples=np.linspace(0, 1, 64))
    assert np.array_equal(observe(w, ObservationModel(c=1.0, sigma=0.0)).samples, w.samples)
    assert np.array_equal(observe(w, ObservationModel(c=2.0, sigma=0.0)).samples, 2 * w.samples)


def test_observe_noise_statistics():
    w = Waveform(dt=1e-8, t0=0.0, samples=np.zeros(100000))
    sigma = 0.05
    r = observe(w, ObservationModel(c=1.0, sigma=sigma, seed=123))
    assert np.var(r.samples) == pytest.approx(sigma**2, rel=0.05)
    # seeded: two draws are identical
    r2 = observe(w, ObservationModel(c=1.0, sigma=sigma, seed=123))
    assert np.array_equal(r.samples, r2.samples)


def test_reconstruct_matches_transient_for_exact_estimates():
    d = derive_dynamics(FAST)
    t = np.linspace(0.0, 5e-5, 500)
    exact = transient_component(d, IC, t)
    rebuilt = reconstruct_transient(d, EstimatedIC(IC.v2_0, IC.dv2_0), t)
    assert np.array_equal(exact, rebuilt)


def test_residual_transient_linearity():
    d = derive_dynamics(FAST)
    rng = np.random.default_rng(4)
    t = np.linspace(0.0, 4e-5, 300)
    truth = transient_component(d, IC, t)
    for _ in range(100):
        ev = rng.uniform(-0.05, 0.05)
        edv = rng.uniform(-5e4, 5e4)
        lam = rng.uniform(-3.0, 3.0)
        res1 = truth - reconstruct_transient(d, EstimatedIC(IC.v2_0 + ev, IC.dv2_0 + edv), t)
        res_neg = transient_component(d, InitialConditions(-ev, -edv), t)
        assert np.allclose(res1, res_neg, rtol=1e-9, atol=1e-14)
        res_lam = truth - reconstruct_transient(
            d, EstimatedIC(IC.v2_0 + lam * ev, IC.dv2_0 + lam * edv), t
        )
        assert np.allclose(res_lam, lam * res1, rtol=1e-9, atol=1e-12)


def test_subtract_transient_recovers_data_component():
    d = derive_dynamics(FAST)
    pat = encode_vpwm(alternating_bits(8), CFG)
    J = 32
    w = sample_output(d, IC, pat, FAST.V1, T / J, pat.K * J)
    cleaned = subtract_transient(w, d, EstimatedIC(IC.v2_0, IC.dv2_0))
    expected = data_component(d, pat, FAST.V1, w.times())
    assert np.allclose(cleaned.samples, expected, atol=1e-12)


def test_subtract_transient_error_bound():
    d = derive_dynamics(FAST)
    pat = encode_vpwm(alternating_bits(8), CFG)
    J = 32
    w = sample_output(d, IC, pat, FAST.V1, T / J, pat.K * J)
    eps_v = 0.01 * FAST.V1
    cleaned = subtract_transient(w, d, EstimatedIC(IC.v2_0 + eps_v, IC.dv2_0))
    truth = data_component(d, pat, FAST.V1, w.times())
    resid = np.abs(cleaned.samples - truth)
    t = w.times()
    bound = eps_v * (1.0 + d.a / d.b) * np.exp(-d.a * t)
    assert np.all(resid <= bound * (1 + 1e-9) + 1e-15)


def test_subtracted_amount_does_not_depend_on_data():
    d = derive_dynamics(FAST)
    est = EstimatedIC(0.7, 1e3)
    r1 = make_obs([1, 0, 1, 1])
    r2 = make_obs([0, 1, 0, 0])
    removed1 = r1.samples - subtract_transient(r1, d, est).samples
    removed2 = r2.samples - subtract_transient(r2, d, est).samples
    assert np.allclose(removed1, removed2, rtol=0, atol=1e-15)


def test_zf_identity_and_regularization():
    rng = np.random.default_rng(9)
    f = rng.uniform(-5e6, 5e6, 1000)
    prod = zf_response(FAST, f) * frequency_response(FAST, f)
    assert np.abs(prod - 1.0).max() < 1e-12
    assert zf_response(FAST, 0.0) == 1.0 + 0j
    f0 = 1.7e5
    h2 = abs(frequency_response(FAST, f0)) ** 2
    assert zf_response(FAST, f0, eps=h2) == pytest.approx(zf_response(FAST, f0) / 2.0, rel=1e-12)


def test_equalize_preserves_constant():
    w = Waveform(dt=1e-8, t0=0.0, samples=np.full(300, 0.42))
    out = equalize_frequency_domain(w, FAST)
    assert np.allclose(out.samples, 0.42, atol=1e-12)
    out_eps = equalize_frequency_domain(w, FAST, eps=0.5)
    assert np.allclose(out_eps.samples, 0.42, atol=1e-12)


def test_equalize_amplifies_wideband_input():
    pat = encode_vpwm(alternating_bits(8), CFG)
    v2, _ = simulate(FAST, pat, IC, 64, Variant.EXACT)
    out = equalize_frequency_domain(v2, FAST)
    centred_in = np.abs(v2.samples - v2.samples.mean()).max()
    centred_out = np.abs(out.samples - np.mean(out.samples)).max()
    assert centred_out > centred_in


def test_equalize_recovers_band_limited_input():
    # independent route: RK4-integrate the filter driven by a smooth two-tone
    # input, window the settled periodic part, equalize, compare to the input
    p = FAST
    d = derive_dynamics(p)
    J = 32
    dt = T / J
    window = 64 * T
    f1 = 2.0 / window
    f2 = 4.0 / window

    def v1_of(t):
        return p.V1 * (
            0.75
            + 0.08 * np.sin(2 * np.pi * f1 * t)
            + 0.04 * np.sin(2 * np.pi * f2 * t)
        )

    settle = int(np.ceil(20.0 / d.a / T))  # symbols until transient is gone
    n_total = (settle + 64) * J
    A = np.array([[0.0, -1.0 / p.L], [1.0 / p.C, -1.0 / (p.C * p.R_L)]])
    x = np.array([0.75 * p.V1 / p.R_L, 0.75 * p.V1])
    sub = 4
    h = dt / sub
    v2 = np.empty(n_total)
    v2[0] = x[1]
    for n in range(1, n_total):
        t0 = (n - 1) * dt
        for s in range(sub):
            ts = t0 + s * h

            def f(x_, tt):
                return A @ x_ + np.array([v1_of(tt) / p.L, 0.0])

            k1 = f(x, ts)
            k2 = f(x + 0.5 * h * k1, ts + 0.5 * h)
            k3 = f(x + 0.5 * h * k2, ts + 0.5 * h)
            k4 = f(x + h * k3, ts + h)
            x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        v2[n] = x[1]
    n0 = settle * J
    w = Waveform(dt=dt, t0=0.0, samples=v2[n0 : n0 + 64 * J])
    out = equalize_frequency_domain(w, p)
    target = v1_of(n0 * dt + np.arange(64 * J) * dt)
    assert np.abs(out.samples - target).max() < 0.02 * p.V1


def test_state_sequence_windows():
    pat = encode_vpwm(alternating_bits(4), CFG)
    v2, iL = simulate(FAST, pat, IC, 8, Variant.EXACT)
    states = build_state_sequence(iL, v2, N_sub=1, L_m=1, J=8)
    assert len(states) == len(v2)
    assert states[0].iL_window == (iL.samples[0],)
    assert states[5].v2_window == (v2.samples[5],)

    states2 = build_state_sequence(iL, v2, N_sub=2, L_m=3, J=8)
    assert states2[0].m == 2
    assert states2[0].iL_window == tuple(iL.samples[[4, 2, 0]])
    assert states2[-1].v2_window[0] == v2.samples[2 * states2[-1].m]


def test_state_sequence_uniqueness_for_same_bits():
    pat = encode_vpwm([1, 0, 1], CFG)
    v2a, iLa = simulate(FAST, pat, IC, 8, Variant.EXACT)
    v2b, iLb = simulate(FAST, pat, IC, 8, Variant.EXACT)
    sa = build_state_sequence(iLa, v2a, 2, 2, J=8)
    sb = build_state_sequence(iLb, v2b, 2, 2, J=8)
    assert sa == sb


def test_state_sequence_decimation_consistency():
    pat = encode_vpwm(alternating_bits(4), CFG)
    v2, iL = simulate(FAST, pat, IC, 8, Variant.EXACT)
    direct = build_state_sequence(iL, v2, N_sub=2, L_m=2, J=8)
    dec = lambda w: Waveform(dt=2 * w.dt, t0=w.t0, samples=w.samples[::2])
    pre = build_state_sequence(dec(iL), dec(v2), N_sub=1, L_m=2, J=4)
    assert [(s.iL_window, s.v2_window, s.m) for s in direct] == [
        (s.iL_window, s.v2_window, s.m) for s in pre
    ]


def test_state_sequence_guards():
    pat = encode_vpwm(alternating_bits(4), CFG)
    v2, iL = simulate(FAST, pat, IC, 8, Variant.EXACT)
    with pytest.raises(IndivisibleDecimationError):
        build_state_sequence(iL, v2, N_sub=3, L_m=2, J=8)
    other = Waveform(dt=v2.dt * 2, t0=0.0, samples=v2.samples)
    with pytest.raises(GridMismatchError):
        build_state_sequence(iL, other, N_sub=1, L_m=1)


def test_noiseless_detection_recovers_bits():
    rng = np.random.default_rng(21)
    for _ in range(10):
        bits = rng.integers(0, 2, 6)
        r = make_obs(bits, J=8, sigma=0.0)
        det = brute_force_detect(r, FAST, CFG, IC, J=8, K=6)
        assert np.array_equal(det, bits)


def test_detection_tie_breaks_lexicographically():
    cfg0 = ModulationConfig(Scheme.VPWM, T, 0.75, 0.0)  # depth 0: all bits alike
    pat = encode_vpwm([1, 1, 1], cfg0)
    v2, _ = simulate(FAST, pat, IC, 8, Variant.EXACT)
    det = brute_force_detect(v2, FAST, cfg0, IC, J=8, K=3)
    assert np.array_equal(det, [0, 0, 0])


def test_detection_refuses_large_searches():
    r = make_obs(alternating_bits(13), J=2)
    with pytest.raises(TooManyBitsError):
        brute_force_detect(r, FAST, CFG, IC, J=2, K=13)


def test_subtract_then_detect_equals_detection_on_data_component():
    # removing the exact transient reduces detection to the zero-state case
    d = derive_dynamics(FAST)
    bits = np.array([1, 1, 0, 1, 0, 0])
    pat = encode_vpwm(bits, CFG)
    J = 8
    N = pat.K * J
    dt = T / J
    full = sample_output(d, IC, pat, FAST.V1, dt, N)
    data_only = Waveform(dt=dt, t0=0.0, samples=data_component(d, pat, FAST.V1, full.times()))
    ic0 = InitialConditions(0.0, 0.0)
    sigma = 0.01
    for seed in range(5):
        om = ObservationModel(c=1.0, sigma=sigma, seed=seed)
        path_a = brute_force_detect(
            subtract_transient(observe(full, om), d, EstimatedIC(IC.v2_0, IC.dv2_0)),
            FAST, CFG, ic0, J, pat.K,
        )
        path_b = brute_force_detect(observe(data_only, om), FAST, CFG, ic0, J, pat.K)
        assert np.array_equal(path_a, path_b)


def test_noisy_detection_at_30db_snr():
    bits = np.array([1, 0, 1, 1, 0, 0, 1, 0])
    pat = encode_vpwm(bits, CFG)
    v2, _ = simulate(FAST, pat, IC, 8, Variant.EXACT)
    ripple_rms = np.std(v2.samples - np.mean(v2.samples))
    sigma = ripple_rms / 10 ** (30 / 20)
    errors = 0
    for seed in range(10):
        r = observe(v2, ObservationModel(c=1.0, sigma=sigma, seed=seed))
        det = brute_force_detect(r, FAST, CFG, IC, J=8, K=8)
        errors += int(np.sum(det != bits))
    assert errors == 0
