"""Unified memristive excitability models.

Three instantiations share one circuit law (RC membrane with Ohmic
currents whose conductances are rectified filtered voltages):

* temporal point neuron - fast excitatory / slow inhibitory first-order
  filters of the cell's own voltage;
* E/I spatial field - synaptic memductances driven by temporally then
  spatially filtered presynaptic population voltages;
* combined spatio-temporal model - both mechanisms at once.

Closed-form feedback criteria for the temporal model are evaluated in
exact rational arithmetic and cross-checkable against the analytic
differential conductance.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .core import (
    MemSynapticParams,
    MemTemporalParams,
    SpatialGrid,
    SynapseParams,
    TimeGrid,
    Trajectory,
    layout_widths,
)
from .numerics import (
    Kernel,
    Normalization,
    convolve_spectral,
    exponential_kernel,
    integrate,
    relu,
)
from .stimulus import StimulusProgram

__all__ = [
    "relu_memductance",
    "temporal_rhs",
    "simulate_temporal",
    "positive_feedback_interval",
    "negative_feedback_bound",
    "differential_conductance",
    "total_current",
    "synaptic_kernels",
    "synaptic_memductance",
    "synaptic_memductance_step",
    "ei_field_rhs",
    "simulate_ei_field",
    "spatiotemporal_rhs",
    "simulate_spatiotemporal",
    "TEMPORAL_LAYOUT",
    "ei_layout",
    "spatiotemporal_layout",
]

TEMPORAL_LAYOUT = layout_widths(["v", "v_em", "v_im"], 1)


def ei_layout(n: int) -> dict[str, slice]:
    return layout_widths(["v_E", "v_I", "syn_E", "syn_I"], n)


def spatiotemporal_layout(n: int) -> dict[str, slice]:
    return layout_widths(
        ["v_E", "v_I", "em_E", "im_E", "em_I", "im_I", "syn_E", "syn_I"], n
    )


def relu_memductance(v_filtered, g_max: float, v_threshold: float):
    """g = g_max * relu(v_filtered - v_threshold); closed below threshold."""
    return g_max * relu(np.asarray(v_filtered, dtype=float) - v_threshold)


# ---------------------------------------------------------------------------
# Temporal point neuron
# ---------------------------------------------------------------------------


def temporal_rhs(
    state: np.ndarray, params: MemTemporalParams, i_app: float
) -> np.ndarray:
    """Derivatives of (v, v_em, v_im): RC membrane with rectified filtered
    voltages as conductances, plus first-order lags toward v."""
    v, v_em, v_im = state
    g_e = params.g_exc_max * max(0.0, v_em - params.v_exc_threshold)
    g_i = params.g_inh_max * max(0.0, v_im - params.v_inh_threshold)
    i_tot = (
        params.g_leak * v
        + g_e * (v - params.e_exc)
        + g_i * (v - params.e_inh)
    )
    dv = (-i_tot + i_app) / params.capacitance
    return np.array(
        [dv, (v - v_em) / params.tau_exc, (v - v_im) / params.tau_inh]
    )


def simulate_temporal(
    params: MemTemporalParams,
    stimulus: StimulusProgram,
    time_grid: TimeGrid,
    stride: int = 1,
) -> Trajectory:
    """Integrate from the exact rest state (0, 0, 0)."""
    pulses = stimulus.pulses

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        i_app = 0.0
        for p in pulses:
            i_app += p.time_factor(t)
        return temporal_rhs(y, params, i_app)

    times, states = integrate(
        rhs, np.zeros(3), time_grid, stride, TEMPORAL_LAYOUT
    )
    return Trajectory(
        model="mem-temporal",
        times=times,
        states=states,
        layout=TEMPORAL_LAYOUT,
        stimulus=stimulus.describe(),
    )


# ---------------------------------------------------------------------------
# Closed-form feedback criteria
# ---------------------------------------------------------------------------


def positive_feedback_interval(
    params: MemTemporalParams,
) -> tuple[float, float] | None:
    """Voltage band of negative differential conductance in the fast
    regime (excitatory filter tracking v, inhibitory filter at rest):

        v_th_e < v < (E_e + v_th_e - g_l/g_e_max) / 2

    Evaluated in exact rational arithmetic and rounded once; returns None
    when the band is empty.
    """
    g_l = Fraction(params.g_leak)
    g_e = Fraction(params.g_exc_max)
    v_lo = Fraction(params.v_exc_threshold)
    v_hi = (-g_l / g_e + Fraction(params.e_exc) + v_lo) / 2
    if v_hi <= v_lo:
        return None
    return (float(v_lo), float(v_hi))


def negative_feedback_bound(params: MemTemporalParams) -> float:
    """Voltage above which the differential conductance is positive with
    both channels active: the max of the turning point and both
    thresholds.  Exact rational arithmetic, rounded once."""
    g_l = Fraction(params.g_leak)
    g_e = Fraction(params.g_exc_max)
    g_i = Fraction(params.g_inh_max)
    turning = (
        g_e * (Fraction(params.e_exc) + Fraction(params.v_exc_threshold))
        + g_i * (Fraction(params.e_inh) + Fraction(params.v_inh_threshold))
        - g_l
    ) / (2 * (g_e + g_i))
    return float(
        max(turning, Fraction(params.v_exc_threshold), Fraction(params.v_inh_threshold))
    )


def total_current(
    params: MemTemporalParams, v: float, v_em: float, v_im: float
) -> float:
    """Instantaneous total membrane current at a frozen filter state."""
    g_e = params.g_exc_max * max(0.0, v_em - params.v_exc_threshold)
    g_i = params.g_inh_max * max(0.0, v_im - params.v_inh_threshold)
    return params.g_leak * v + g_e * (v - params.e_exc) + g_i * (v - params.e_inh)


def differential_conductance(
    params: MemTemporalParams, v: float, regime: str = "fast"
) -> float:
    """Analytic d i_tot / d v under a quasi-static filter substitution.

    regime "fast": v_em = v, v_im = 0 (excitatory filter instantaneous,
    inhibitory still at rest).  regime "both-active": v_em = v_im = v.
    """
    d = params.g_leak
    if regime == "fast":
        if v > params.v_exc_threshold:
            d += params.g_exc_max * (2.0 * v - params.e_exc - params.v_exc_threshold)
    elif regime == "both-active":
        if v > params.v_exc_threshold:
            d += params.g_exc_max * (2.0 * v - params.e_exc - params.v_exc_threshold)
        if v > params.v_inh_threshold:
            d += params.g_inh_max * (2.0 * v - params.e_inh - params.v_inh_threshold)
    else:
        raise ValueError(f"unknown regime {regime!r}")
    return d


def quasi_static_current(
    params: MemTemporalParams, v: float, regime: str = "fast"
) -> float:
    """i_tot with the regime's filter substitution applied (for
    finite-difference cross-checks of differential_conductance)."""
    if regime == "fast":
        return total_current(params, v, v, 0.0)
    if regime == "both-active":
        return total_current(params, v, v, v)
    raise ValueError(f"unknown regime {regime!r}")


# ---------------------------------------------------------------------------
# Synaptic (spatial) machinery
# ---------------------------------------------------------------------------


def synaptic_kernels(
    params: MemSynapticParams, grid: SpatialGrid
) -> tuple[Kernel, Kernel]:
    """Unit-integral exponential kernels for the E and I synapse types."""
    return (
        exponential_kernel(params.exc.sigma, grid, Normalization.UNIT_INTEGRAL),
        exponential_kernel(params.inh.sigma, grid, Normalization.UNIT_INTEGRAL),
    )


def synaptic_memductance(
    filter_state: np.ndarray, synapse: SynapseParams, kernel: Kernel
) -> np.ndarray:
    """Spatially filter the temporally filtered presynaptic field, then
    rectify: g = g_max * relu((filter * w) - v_threshold)."""
    spatial = convolve_spectral(filter_state, kernel)
    return relu_memductance(spatial, synapse.g_max, synapse.v_threshold)


def synaptic_memductance_step(
    presyn: np.ndarray,
    filter_state: np.ndarray,
    synapse: SynapseParams,
    kernel: Kernel,
    dt: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Advance the temporal filter one RK4 step against a frozen
    presynaptic field and return (new filter state, memductance field).

    Standalone helper; the field simulations integrate the filter jointly
    with the membrane equations instead of stepping it separately.
    """
    tau = synapse.tau

    def deriv(f):
        return (presyn - f) / tau

    k1 = deriv(filter_state)
    k2 = deriv(filter_state + 0.5 * dt * k1)
    k3 = deriv(filter_state + 0.5 * dt * k2)
    k4 = deriv(filter_state + dt * k3)
    new_filter = filter_state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return new_filter, synaptic_memductance(new_filter, synapse, kernel)


# ---------------------------------------------------------------------------
# E/I spatial field
# ---------------------------------------------------------------------------


def ei_field_rhs(
    state: np.ndarray,
    params: MemSynapticParams,
    kernels: tuple[Kernel, Kernel],
    i_app_e: np.ndarray,
    i_app_i: np.ndarray,
) -> np.ndarray:
    """Derivative of the flat state (v_E, v_I, syn_E, syn_I).

    The excitatory memductance is driven by v_E and acts on both
    populations; the inhibitory one is driven by v_I, likewise.
    """
    n = kernels[0].grid.n_points
    v_e, v_i, f_e, f_i = (state[i * n : (i + 1) * n] for i in range(4))
    g_exc = synaptic_memductance(f_e, params.exc, kernels[0])
    g_inh = synaptic_memductance(f_i, params.inh, kernels[1])
    assert np.all(g_exc >= 0.0) and np.all(g_inh >= 0.0)

    def membrane(v_k, i_app):
        return (
            -params.g_leak * v_k
            - g_exc * (v_k - params.exc.e_rev)
            - g_inh * (v_k - params.inh.e_rev)
            + i_app
        ) / params.capacitance

    return np.concatenate(
        [
            membrane(v_e, i_app_e),
            membrane(v_i, i_app_i),
            (v_e - f_e) / params.exc.tau,
            (v_i - f_i) / params.inh.tau,
        ]
    )


def _target_masks(target: str) -> tuple[float, float]:
    to_e = 1.0 if target in ("E", "both") else 0.0
    to_i = 1.0 if target in ("I", "both") else 0.0
    return to_e, to_i


def simulate_ei_field(
    params: MemSynapticParams,
    stimulus: StimulusProgram,
    grid: SpatialGrid,
    time_grid: TimeGrid,
    stride: int = 100,
    readout_times: tuple[float, ...] = (),
) -> tuple[Trajectory, dict[float, dict]]:
    """Integrate the E/I field from the exact all-zero rest state."""
    kernels = synaptic_kernels(params, grid)
    n = grid.n_points
    evaluate_stimulus = stimulus.field_evaluator(grid.x)
    to_e, to_i = _target_masks(stimulus.target)
    layout = ei_layout(n)

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        i_app = evaluate_stimulus(t)
        return ei_field_rhs(y, params, kernels, to_e * i_app, to_i * i_app)

    times, states = integrate(rhs, np.zeros(4 * n), time_grid, stride, layout)
    traj = Trajectory(
        model="mem-spatial",
        times=times,
        states=states,
        layout=layout,
        stimulus=stimulus.describe(),
        grid=grid,
    )
    snapshots: dict[float, dict] = {}
    for t_read in readout_times:
        i = traj.index_at(t_read)
        snapshots[t_read] = {
            "t": float(times[i]),
            "v_E": states[i, layout["v_E"]].copy(),
            "v_I": states[i, layout["v_I"]].copy(),
        }
    return traj, snapshots


# ---------------------------------------------------------------------------
# Combined spatio-temporal model
# ---------------------------------------------------------------------------


def spatiotemporal_rhs(
    state: np.ndarray,
    temporal: MemTemporalParams,
    synaptic: MemSynapticParams,
    kernels: tuple[Kernel, Kernel],
    i_app_e: np.ndarray,
    i_app_i: np.ndarray,
) -> np.ndarray:
    """Derivative of the flat state
    (v_E, v_I, em_E, im_E, em_I, im_I, syn_E, syn_I).

    Each population carries its own intrinsic fast/slow filters; the
    synaptic memductances couple the populations exactly as in the pure
    spatial model.  Intrinsic currents use the temporal reversal
    potentials, synaptic currents the synaptic ones.
    """
    n = kernels[0].grid.n_points
    (v_e, v_i, em_e, im_e, em_i, im_i, f_e, f_i) = (
        state[i * n : (i + 1) * n] for i in range(8)
    )
    g_exc_syn = synaptic_memductance(f_e, synaptic.exc, kernels[0])
    g_inh_syn = synaptic_memductance(f_i, synaptic.inh, kernels[1])
    assert np.all(g_exc_syn >= 0.0) and np.all(g_inh_syn >= 0.0)

    def membrane(v_k, em_k, im_k, i_app):
        g_e = relu_memductance(em_k, temporal.g_exc_max, temporal.v_exc_threshold)
        g_i = relu_memductance(im_k, temporal.g_inh_max, temporal.v_inh_threshold)
        return (
            -temporal.g_leak * v_k
            - g_e * (v_k - temporal.e_exc)
            - g_i * (v_k - temporal.e_inh)
            - g_exc_syn * (v_k - synaptic.exc.e_rev)
            - g_inh_syn * (v_k - synaptic.inh.e_rev)
            + i_app
        ) / temporal.capacitance

    return np.concatenate(
        [
            membrane(v_e, em_e, im_e, i_app_e),
            membrane(v_i, em_i, im_i, i_app_i),
            (v_e - em_e) / temporal.tau_exc,
            (v_e - im_e) / temporal.tau_inh,
            (v_i - em_i) / temporal.tau_exc,
            (v_i - im_i) / temporal.tau_inh,
            (v_e - f_e) / synaptic.exc.tau,
            (v_i - f_i) / synaptic.inh.tau,
        ]
    )


def simulate_spatiotemporal(
    temporal: MemTemporalParams,
    synaptic: MemSynapticParams,
    stimulus: StimulusProgram,
    grid: SpatialGrid,
    time_grid: TimeGrid,
    stride: int = 100,
) -> Trajectory:
    """Integrate the combined model from the exact all-zero rest state."""
    kernels = synaptic_kernels(synaptic, grid)
    n = grid.n_points
    evaluate_stimulus = stimulus.field_evaluator(grid.x)
    to_e, to_i = _target_masks(stimulus.target)
    layout = spatiotemporal_layout(n)

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        i_app = evaluate_stimulus(t)
        return spatiotemporal_rhs(
            y, temporal, synaptic, kernels, to_e * i_app, to_i * i_app
        )

    times, states = integrate(rhs, np.zeros(8 * n), time_grid, stride, layout)
    return Trajectory(
        model="mem-spatiotemporal",
        times=times,
        states=states,
        layout=layout,
        stimulus=stimulus.describe(),
        grid=grid,
    )


def temporal_slice(traj: Trajectory, x: float = 0.0) -> np.ndarray:
    """v_E(x, t) over recorded times at the grid point closest to x."""
    j = int(np.argmin(np.abs(traj.grid.x - x)))
    return traj.series("v_E")[:, j]


def spatial_slice(traj: Trajectory, t: float) -> np.ndarray:
    """v_E(x, t) over the grid at the recorded time closest to t."""
    return traj.snapshot("v_E", t)
