"""Hodgkin-Huxley point neuron: gating kinetics, membrane equation, and
deterministic simulation from the computed resting equilibrium.

Rate functions are the canonical 1952 alpha/beta pairs in the modern sign
convention (rest near -65 mV); removable singularities are evaluated by
series expansion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .core import HHParams, HHState, TimeGrid, Trajectory, layout_widths
from .numerics import integrate
from .stimulus import StimulusProgram

__all__ = [
    "GatingPoint",
    "alpha_beta",
    "gating_steady_state_and_tau",
    "resting_state",
    "hh_rhs",
    "simulate_hh",
]

_SINGULAR_EPS = 1e-7

HH_LAYOUT = layout_widths(["v", "m", "h", "n"], 1)


def _expm1_ratio(u: float) -> float:
    """u / (1 - exp(-u)), with the u -> 0 limit handled by series."""
    if abs(u) < _SINGULAR_EPS:
        return 1.0 + 0.5 * u  # next term u^2/12 is below double precision here
    return u / (-math.expm1(-u))


def alpha_beta(v: float) -> dict[str, tuple[float, float]]:
    """Canonical opening/closing rates (1/ms) for m, h, n at voltage v (mV)."""
    a_m = _expm1_ratio((v + 40.0) / 10.0)
    b_m = 4.0 * math.exp(-(v + 65.0) / 18.0)
    a_h = 0.07 * math.exp(-(v + 65.0) / 20.0)
    b_h = 1.0 / (1.0 + math.exp(-(v + 35.0) / 10.0))
    a_n = 0.1 * _expm1_ratio((v + 55.0) / 10.0)
    b_n = 0.125 * math.exp(-(v + 65.0) / 80.0)
    return {"m": (a_m, b_m), "h": (a_h, b_h), "n": (a_n, b_n)}


@dataclass(frozen=True)
class GatingPoint:
    """Steady states and time constants of the three gates at one voltage."""

    m_inf: float
    tau_m: float
    h_inf: float
    tau_h: float
    n_inf: float
    tau_n: float


def gating_steady_state_and_tau(v: float) -> GatingPoint:
    rates = alpha_beta(v)
    out = {}
    for name, (a, b) in rates.items():
        out[f"{name}_inf"] = a / (a + b)
        out[f"tau_{name}"] = 1.0 / (a + b)
    return GatingPoint(**out)


def _steady_current(v: float, p: HHParams) -> float:
    g = gating_steady_state_and_tau(v)
    i_na = p.g_na_max * g.m_inf**3 * g.h_inf * (v - p.e_na)
    i_k = p.g_k_max * g.n_inf**4 * (v - p.e_k)
    i_l = p.g_leak * (v - p.e_leak)
    return i_na + i_k + i_l


def resting_state(params: HHParams) -> HHState:
    """Resting equilibrium: root of the steady-state total current with all
    gates at their steady values."""
    v_rest = brentq(_steady_current, -90.0, -40.0, args=(params,), xtol=1e-12)
    g = gating_steady_state_and_tau(v_rest)
    return HHState(v=v_rest, m=g.m_inf, h=g.h_inf, n=g.n_inf)


def hh_rhs(state: np.ndarray, params: HHParams, i_app: float) -> np.ndarray:
    """Membrane and gating derivatives for state (v, m, h, n).

    Rates are the same alpha/beta pairs as ``alpha_beta``, inlined because
    this function dominates simulation cost."""
    v, m, h, n = state
    i_na = params.g_na_max * m**3 * h * (v - params.e_na)
    i_k = params.g_k_max * n**4 * (v - params.e_k)
    i_l = params.g_leak * (v - params.e_leak)
    dv = (-(i_l + i_na + i_k) + i_app) / params.capacitance
    a_m = _expm1_ratio((v + 40.0) / 10.0)
    b_m = 4.0 * math.exp(-(v + 65.0) / 18.0)
    a_h = 0.07 * math.exp(-(v + 65.0) / 20.0)
    b_h = 1.0 / (1.0 + math.exp(-(v + 35.0) / 10.0))
    a_n = 0.1 * _expm1_ratio((v + 55.0) / 10.0)
    b_n = 0.125 * math.exp(-(v + 65.0) / 80.0)
    return np.array(
        [
            dv,
            a_m * (1.0 - m) - b_m * m,
            a_h * (1.0 - h) - b_h * h,
            a_n * (1.0 - n) - b_n * n,
        ]
    )


def simulate_hh(
    params: HHParams,
    stimulus: StimulusProgram,
    time_grid: TimeGrid,
    stride: int = 1,
    initial_state: HHState | None = None,
) -> Trajectory:
    """Integrate the point neuron from rest (or a given state)."""
    if initial_state is None:
        initial_state = resting_state(params)
    pulses = stimulus.pulses

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        i_app = 0.0
        for p in pulses:
            i_app += p.time_factor(t)
        return hh_rhs(y, params, i_app)

    times, states = integrate(rhs, initial_state.as_array(), time_grid, stride, HH_LAYOUT)
    return Trajectory(
        model="hh",
        times=times,
        states=states,
        layout=HH_LAYOUT,
        stimulus=stimulus.describe(),
    )
