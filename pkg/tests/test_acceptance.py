"""Acceptance gate: eight numbered criteria, one PASS/FAIL line each.

Each test evaluates every check of its criterion, prints a single
summary line (visible even under pytest capture), and then asserts.
Stimulus amplitudes for the spatial criteria are the calibrated pairs at
4% relative spacing around the bisected thresholds; the bisections were
done at the production grid (half_length 25, 1001 points, dt 0.01) and
the resulting constants are frozen in excitable.scenarios.
"""

import dataclasses
import sys
import time

import numpy as np

from excitable import (
    AmariParams,
    GaussianPulse,
    HHParams,
    MemSynapticParams,
    MemTemporalParams,
    RectangularPulse,
    StimulusProgram,
    convolve_direct,
    convolve_spectral,
    difference_kernel,
    integrate,
    make_grid,
    make_time_grid,
)
from excitable.amari import simulate_amari
from excitable.analysis import fwhm, super_level_regions
from excitable.hh import simulate_hh
from excitable.memristive import (
    differential_conductance,
    negative_feedback_bound,
    positive_feedback_interval,
    quasi_static_current,
    simulate_ei_field,
    simulate_spatiotemporal,
    simulate_temporal,
    synaptic_kernels,
    synaptic_memductance,
)
from excitable.scenarios import CALIBRATED_AMPLITUDES, dt_halving_delta, parse_config

GRID = make_grid(25.0, 1001)
DT = 0.01


def report(capfd, number: int, checks: dict[str, bool], runtime: float, budget: float) -> None:
    checks = dict(checks)
    checks[f"runtime {runtime:.1f}s < {budget:.0f}s"] = runtime < budget
    passed = all(checks.values())
    verdict = "PASS" if passed else "FAIL"
    failed = [name for name, ok in checks.items() if not ok]
    detail = "all checks ok" if passed else "failed: " + "; ".join(failed)
    with capfd.disabled():
        print(
            f"\n[criterion {number}] {verdict} ({runtime:.1f}s) {detail}",
            file=sys.stderr,
            flush=True,
        )
    assert passed, f"criterion {number} failed: {failed}"


def test_criterion_1_positive_feedback_interval(capfd):
    start = time.perf_counter()
    p = MemTemporalParams()
    checks = {}
    checks["interval == (1, 5.45) exactly"] = positive_feedback_interval(p) == (1.0, 5.45)
    for v in (1.5, 3.0, 5.0):
        checks[f"dc(fast, v={v}) < 0"] = differential_conductance(p, v, "fast") < 0.0
    for v in (6.0, 8.0):
        checks[f"dc(fast, v={v}) > 0"] = differential_conductance(p, v, "fast") > 0.0
    eps = 1e-6
    for v in (1.5, 3.0, 5.0, 6.0, 8.0):
        fd = (
            quasi_static_current(p, v + eps, "fast")
            - quasi_static_current(p, v - eps, "fast")
        ) / (2 * eps)
        analytic = differential_conductance(p, v, "fast")
        checks[f"analytic vs FD at v={v}"] = (
            abs(fd - analytic) / max(abs(analytic), 1e-12) <= 1e-6
        )
    report(capfd, 1, checks, time.perf_counter() - start, budget=1.0)


def test_criterion_2_negative_feedback_bound(capfd):
    start = time.perf_counter()
    p = MemTemporalParams()
    checks = {"bound == 1 exactly": negative_feedback_bound(p) == 1.0}
    for v in (1.5, 2.0, 5.0, 10.0):
        checks[f"dc(both-active, v={v}) > 0"] = (
            differential_conductance(p, v, "both-active") > 0.0
        )
    report(capfd, 2, checks, time.perf_counter() - start, budget=1.0)


def test_criterion_3_hh_all_or_none(capfd):
    start = time.perf_counter()
    p = HHParams()

    def peak(amplitude: float, t_end: float = 40.0) -> float:
        stim = StimulusProgram((RectangularPulse(amplitude, 5.0, 6.0),), "point")
        traj = simulate_hh(p, stim, make_time_grid(0.0, t_end, DT), stride=20)
        return float(np.max(traj.series("v")))

    lo, hi = 0.0, 20.0
    for _ in range(10):
        mid = 0.5 * (lo + hi)
        if peak(mid) > -20.0:
            hi = mid
        else:
            lo = mid
    a_star = 0.5 * (lo + hi)

    checks = {
        "peak v at 1.02 A* > 0 mV": peak(1.02 * a_star, 60.0) > 0.0,
        "peak v at 0.98 A* < -50 mV": peak(0.98 * a_star, 60.0) < -50.0,
    }

    stim = StimulusProgram((RectangularPulse(1.02 * a_star, 5.0, 6.0),), "point")
    traj = simulate_hh(p, stim, make_time_grid(0.0, 60.0, DT), stride=10)
    gates_ok = all(
        bool(np.all((traj.series(g) >= 0.0) & (traj.series(g) <= 1.0)))
        for g in ("m", "h", "n")
    )
    checks["gating variables stay in [0, 1]"] = gates_ok

    rest = simulate_hh(p, StimulusProgram((), "point"), make_time_grid(0.0, 500.0, DT), 500)
    v = rest.series("v")
    checks["resting drift < 0.01 mV over 500 ms"] = float(np.max(np.abs(v - v[0]))) < 0.01
    report(capfd, 3, checks, time.perf_counter() - start, budget=10.0)


def test_criterion_4_memristive_temporal(capfd):
    start = time.perf_counter()
    p = MemTemporalParams()

    zero = simulate_temporal(p, StimulusProgram((), "point"), make_time_grid(0.0, 100.0, DT), 100)
    checks = {
        "zero equilibrium exact over 100 ms": float(np.max(np.abs(zero.states))) == 0.0
    }

    def run(amplitude: float, t_end: float = 60.0):
        stim = StimulusProgram((RectangularPulse(amplitude, 5.0, 6.0),), "point")
        return simulate_temporal(p, stim, make_time_grid(0.0, t_end, DT), 10)

    lo, hi = 0.0, 10.0
    for _ in range(12):
        mid = 0.5 * (lo + hi)
        if float(np.max(run(mid).series("v"))) > 3.0:
            hi = mid
        else:
            lo = mid
    a_star = 0.5 * (lo + hi)

    super_traj = run(1.02 * a_star, 100.0)
    peak_super = float(np.max(super_traj.series("v")))
    peak_sub = float(np.max(run(0.98 * a_star, 100.0).series("v")))
    checks["threshold jump factor > 3"] = peak_super / peak_sub > 3.0
    checks["post-spike return to |v| < 1e-3"] = abs(super_traj.series("v")[-1]) < 1e-3
    report(capfd, 4, checks, time.perf_counter() - start, budget=10.0)


def test_criterion_5_amari_spatial(capfd):
    start = time.perf_counter()
    params = AmariParams()
    a_star = CALIBRATED_AMPLITUDES["amari"]
    # one run carries both probes: sub pulse at t0=10 (read at 205),
    # super pulse at t0=210 (read at 305)
    stim = StimulusProgram(
        (
            GaussianPulse(0.98 * a_star, 5.0, 5.0, 10.0),
            GaussianPulse(1.02 * a_star, 5.0, 5.0, 210.0),
        ),
        "E",
    )
    traj, snaps = simulate_amari(
        params, stim, GRID, make_time_grid(0.0, 305.0, DT), 100, (205.0, 305.0)
    )
    theta = params.theta
    u_sub = snaps[205.0]["u"]
    u_super = snaps[305.0]["u"]
    regions = super_level_regions(u_super, theta)
    width = fwhm(GRID.x, u_super)
    u_all = traj.series("u")
    persist_mask = (traj.times >= 210.0 + 10.0 * 5.0) & (traj.times <= 305.0)
    checks = {
        "sub: max_x u(205) < theta": float(np.max(u_sub)) < theta,
        "super: one connected region above theta": len(regions) == 1,
        "super: FWHM < 2 sigma_x": width < 2.0 * 5.0,
        "super: persists from t0 + 10 sigma_t to readout": bool(
            np.all(np.max(u_all[persist_mask], axis=1) > theta)
        ),
    }
    report(capfd, 5, checks, time.perf_counter() - start, budget=60.0)


def test_criterion_6_memristive_spatial(capfd):
    start = time.perf_counter()
    params = MemSynapticParams()
    a_star = CALIBRATED_AMPLITUDES["mem-spatial"]
    stim = StimulusProgram(
        (
            GaussianPulse(0.98 * a_star, 10.0, 5.0, 5.0),
            GaussianPulse(1.02 * a_star, 10.0, 5.0, 105.0),
        ),
        "E",
    )
    traj, snaps = simulate_ei_field(
        params, stim, GRID, make_time_grid(0.0, 200.0, DT), 100, (100.0, 200.0)
    )
    v_sub = snaps[100.0]["v_E"]
    v_super = snaps[200.0]["v_E"]
    level = params.exc.v_threshold  # persistent activity sits far above this
    regions = super_level_regions(v_super, level)
    width = fwhm(GRID.x, v_super)

    kernels = synaptic_kernels(params, GRID)
    g_ok = True
    for state in traj.states:
        n = GRID.n_points
        g_e = synaptic_memductance(state[2 * n : 3 * n], params.exc, kernels[0])
        g_i = synaptic_memductance(state[3 * n : 4 * n], params.inh, kernels[1])
        if not (np.all(g_e >= 0.0) and np.all(g_i >= 0.0)):
            g_ok = False
            break

    checks = {
        "sub: max_x v_E(100) below persistence": float(np.max(v_sub)) < 1.0,
        "super: persistent regions above threshold": len(regions) >= 1,
        "super: FWHM < 2 sigma_x": width < 2.0 * 10.0,
        "memductances >= 0 at every recorded step": g_ok,
    }
    report(capfd, 6, checks, time.perf_counter() - start, budget=120.0)


def test_criterion_7_spatiotemporal_unification(capfd):
    start = time.perf_counter()
    tp = MemTemporalParams()
    sp = MemSynapticParams()
    stim = StimulusProgram(
        (
            GaussianPulse(0.14, 10.0, 5.0, 10.0),
            GaussianPulse(0.15, 10.0, 5.0, 30.0),
        ),
        "E",
    )
    traj = simulate_spatiotemporal(tp, sp, stim, GRID, make_time_grid(0.0, 100.0, DT), 100)
    center = traj.series("v_E")[:, GRID.n_points // 2]
    v33 = traj.snapshot("v_E", 33.0)
    checks = {
        "temporal excursion at x=0 (peak > 3)": float(np.max(center)) > 3.0,
        "returns to rest (|v_E(0, 100)| < 0.1)": abs(float(center[-1])) < 0.1,
        "spatial slice at t=33: FWHM < 2 sigma_x": fwhm(GRID.x, v33) < 2.0 * 10.0,
    }

    # reduction identity A: no synapses -> point model at every grid point
    tg = make_time_grid(0.0, 20.0, DT)
    sp0 = dataclasses.replace(
        sp,
        exc=dataclasses.replace(sp.exc, g_max=0.0),
        inh=dataclasses.replace(sp.inh, g_max=0.0),
    )
    stim_u = StimulusProgram((RectangularPulse(2.0, 5.0, 6.0),), "E")
    stim_p = StimulusProgram((RectangularPulse(2.0, 5.0, 6.0),), "point")
    red_a = simulate_spatiotemporal(tp, sp0, stim_u, GRID, tg, 100)
    point = simulate_temporal(tp, stim_p, tg, 100)
    diff_a = max(
        float(np.max(np.abs(red_a.series(f) - point.series(g)[:, None])))
        for f, g in (("v_E", "v"), ("em_E", "v_em"), ("im_E", "v_im"))
    )
    checks["reduction to temporal model <= 1e-12"] = diff_a <= 1e-12

    # reduction identity B: no intrinsic channels -> E/I field
    tp0 = dataclasses.replace(tp, g_exc_max=0.0, g_inh_max=0.0)
    stim_g = StimulusProgram((GaussianPulse(0.5, 10.0, 5.0, 5.0),), "E")
    red_b = simulate_spatiotemporal(tp0, sp, stim_g, GRID, tg, 100)
    ref, _ = simulate_ei_field(sp, stim_g, GRID, tg, 100)
    diff_b = max(
        float(np.max(np.abs(red_b.series(k) - ref.series(k))))
        for k in ("v_E", "v_I", "syn_E", "syn_I")
    )
    checks["reduction to E/I field <= 1e-12"] = diff_b <= 1e-12
    report(capfd, 7, checks, time.perf_counter() - start, budget=180.0)


def test_criterion_8_numerics_suite(capfd):
    start = time.perf_counter()
    checks = {}

    # spectral vs direct on 200 random cases
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(200):
        n = 2 * int(rng.integers(2, 80)) + 1
        g = make_grid(float(rng.uniform(0.5, 30.0)), n)
        s_e = float(rng.uniform(0.05, 1.0))
        k = difference_kernel(s_e, s_e * float(rng.uniform(1.5, 20.0)), g)
        f = rng.normal(size=n)
        a, b = convolve_direct(f, k), convolve_spectral(f, k)
        worst = max(worst, float(np.max(np.abs(a - b))) / max(float(np.max(np.abs(a))), 1e-30))
    checks["spectral vs direct <= 1e-9 (200 cases)"] = worst <= 1e-9

    # empirical RK4 order on y' = -y
    errs = []
    for dt in (0.1, 0.05):
        _, states = integrate(
            lambda t, y: -y, np.array([1.0]), make_time_grid(0.0, 1.0, dt)
        )
        errs.append(abs(states[-1, 0] - np.exp(-1.0)))
    order = float(np.log2(errs[0] / errs[1]))
    checks["RK4 order 4.0 +/- 0.2"] = abs(order - 4.0) <= 0.2

    # dt-halving on shortened windows of each acceptance scenario
    windows = {
        "hh": {
            "model": "hh",
            "time": {"t_end": 20.0, "dt": DT},
            "stimulus": {
                "target": "point",
                "pulses": [{"kind": "rect", "amplitude": 10.0, "t_on": 5.0, "t_off": 6.0}],
            },
            "stride": 100,
        },
        "mem-temporal": {
            "model": "mem-temporal",
            "time": {"t_end": 20.0, "dt": DT},
            "stimulus": {
                "target": "point",
                "pulses": [{"kind": "rect", "amplitude": 2.0, "t_on": 5.0, "t_off": 6.0}],
            },
            "stride": 100,
        },
        "amari": {
            "model": "amari",
            "time": {"t_end": 20.0, "dt": DT},
            "stimulus": {
                "target": "E",
                "pulses": [
                    {
                        "kind": "gaussian",
                        "amplitude": 1.02 * CALIBRATED_AMPLITUDES["amari"],
                        "sigma_x": 5.0,
                        "sigma_t": 5.0,
                        "t_center": 10.0,
                    }
                ],
            },
            "stride": 200,
        },
        "mem-spatial": {
            "model": "mem-spatial",
            "time": {"t_end": 20.0, "dt": DT},
            "stimulus": {
                "target": "E",
                "pulses": [
                    {
                        "kind": "gaussian",
                        "amplitude": 1.02 * CALIBRATED_AMPLITUDES["mem-spatial"],
                        "sigma_x": 10.0,
                        "sigma_t": 5.0,
                        "t_center": 5.0,
                    }
                ],
            },
            "stride": 200,
        },
        "mem-spatiotemporal": {
            "model": "mem-spatiotemporal",
            "time": {"t_end": 10.0, "dt": DT},
            "stimulus": {
                "target": "E",
                "pulses": [
                    {
                        "kind": "gaussian",
                        "amplitude": 0.15,
                        "sigma_x": 10.0,
                        "sigma_t": 5.0,
                        "t_center": 5.0,
                    }
                ],
            },
            "stride": 200,
        },
    }
    for name, raw in windows.items():
        delta = dt_halving_delta(parse_config(raw))
        checks[f"dt halving < 0.5% ({name})"] = delta < 5e-3

    # byte-identical reruns
    tg = make_time_grid(0.0, 10.0, DT)
    stim = StimulusProgram((RectangularPulse(10.0, 2.0, 3.0),), "point")
    h1 = simulate_hh(HHParams(), stim, tg, 100)
    h2 = simulate_hh(HHParams(), stim, tg, 100)
    astim = StimulusProgram((GaussianPulse(0.3, 5.0, 2.0, 2.0),), "E")
    a1, _ = simulate_amari(AmariParams(), astim, GRID, make_time_grid(0.0, 5.0, DT), 100)
    a2, _ = simulate_amari(AmariParams(), astim, GRID, make_time_grid(0.0, 5.0, DT), 100)
    checks["byte-identical reruns"] = (
        h1.states.tobytes() == h2.states.tobytes()
        and a1.states.tobytes() == a2.states.tobytes()
    )
    report(capfd, 8, checks, time.perf_counter() - start, budget=60.0)
