"""Conductance-based point neuron: rates, equilibrium, and spiking.

Reference numbers were computed with an independent implementation of the
rate formulas (root-finding done separately from this package) and frozen
here.
"""

import numpy as np
import pytest

from excitable import (
    HHParams,
    HHState,
    RectangularPulse,
    StimulusProgram,
    make_time_grid,
)
from excitable.hh import (
    alpha_beta,
    gating_steady_state_and_tau,
    hh_rhs,
    resting_state,
    simulate_hh,
)


class TestRates:
    def test_alpha_m_at_singularity_is_exactly_one(self):
        # (v + 40)/10 -> 0: limit of u/(1 - e^-u) is 1
        assert alpha_beta(-40.0)["m"][0] == 1.0

    def test_alpha_n_at_singularity(self):
        assert alpha_beta(-55.0)["n"][0] == pytest.approx(0.1, abs=1e-12)

    def test_rates_continuous_across_singularity(self):
        lo = alpha_beta(-40.0 - 1e-6)["m"][0]
        hi = alpha_beta(-40.0 + 1e-6)["m"][0]
        assert lo == pytest.approx(hi, abs=1e-6)

    def test_reference_values_at_minus_65(self):
        r = alpha_beta(-65.0)
        assert r["m"][0] == pytest.approx(0.223563724585, abs=1e-9)
        assert r["m"][1] == pytest.approx(4.0, abs=1e-12)
        assert r["h"][0] == pytest.approx(0.07, abs=1e-12)
        assert r["h"][1] == pytest.approx(0.047425873178, abs=1e-9)
        assert r["n"][0] == pytest.approx(0.058197670687, abs=1e-9)
        assert r["n"][1] == pytest.approx(0.125, abs=1e-12)

    def test_gating_point_at_minus_65(self):
        g = gating_steady_state_and_tau(-65.0)
        assert g.m_inf == pytest.approx(0.052932485257, abs=1e-9)
        assert g.tau_m == pytest.approx(0.236766878686, abs=1e-9)
        assert g.h_inf == pytest.approx(0.596120753506, abs=1e-9)
        assert g.tau_h == pytest.approx(8.516010764375, abs=1e-9)
        assert g.n_inf == pytest.approx(0.317676914061, abs=1e-9)
        assert g.tau_n == pytest.approx(5.458584687512, abs=1e-9)

    def test_all_rates_positive_over_physiological_range(self):
        for v in np.linspace(-100.0, 60.0, 161):
            for a, b in alpha_beta(float(v)).values():
                assert a > 0 and b > 0


class TestRestingState:
    def test_reference_equilibrium(self):
        rest = resting_state(HHParams())
        assert rest.v == pytest.approx(-64.999722433735, abs=1e-6)
        assert rest.m == pytest.approx(0.052934217621, abs=1e-6)
        assert rest.h == pytest.approx(0.596111046347, abs=1e-6)
        assert rest.n == pytest.approx(0.317681167580, abs=1e-6)

    def test_rhs_vanishes_at_rest(self):
        rest = resting_state(HHParams())
        dy = hh_rhs(rest.as_array(), HHParams(), 0.0)
        assert np.max(np.abs(dy)) < 1e-9

    def test_rest_state_is_valid(self):
        assert resting_state(HHParams()).violations() == []


class TestSimulation:
    def test_zero_input_holds_rest(self):
        tg = make_time_grid(0.0, 50.0, 0.01)
        traj = simulate_hh(HHParams(), StimulusProgram((), "point"), tg, stride=100)
        v = traj.series("v")
        assert np.max(np.abs(v - v[0])) < 1e-6

    def test_strong_pulse_spikes_and_repolarizes(self):
        tg = make_time_grid(0.0, 60.0, 0.01)
        stim = StimulusProgram((RectangularPulse(20.0, 5.0, 6.0),), "point")
        traj = simulate_hh(HHParams(), stim, tg, stride=10)
        v = traj.series("v")
        assert np.max(v) > 0.0  # overshoot
        assert v[-1] < -50.0  # back near rest

    def test_weak_pulse_stays_subthreshold(self):
        tg = make_time_grid(0.0, 60.0, 0.01)
        stim = StimulusProgram((RectangularPulse(1.0, 5.0, 6.0),), "point")
        traj = simulate_hh(HHParams(), stim, tg, stride=10)
        assert np.max(traj.series("v")) < -50.0

    def test_gates_remain_in_unit_interval(self):
        tg = make_time_grid(0.0, 60.0, 0.01)
        stim = StimulusProgram((RectangularPulse(20.0, 5.0, 6.0),), "point")
        traj = simulate_hh(HHParams(), stim, tg, stride=10)
        for gate in ("m", "h", "n"):
            g = traj.series(gate)
            assert np.all(g >= 0.0) and np.all(g <= 1.0)

    def test_custom_initial_state(self):
        tg = make_time_grid(0.0, 1.0, 0.01)
        start = HHState(v=-70.0, m=0.05, h=0.6, n=0.3)
        traj = simulate_hh(HHParams(), StimulusProgram((), "point"), tg, 10, start)
        assert traj.series("v")[0] == -70.0

    def test_layout_and_metadata(self):
        tg = make_time_grid(0.0, 1.0, 0.01)
        traj = simulate_hh(HHParams(), StimulusProgram((), "point"), tg, 10)
        assert traj.variables == ["v", "m", "h", "n"]
        assert traj.model == "hh"
