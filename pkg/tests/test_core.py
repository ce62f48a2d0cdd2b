"""Grids, parameter invariants, and trajectory bookkeeping."""

import numpy as np
import pytest

from excitable import (
    AmariParams,
    HHParams,
    HHState,
    MemSynapticParams,
    MemTemporalParams,
    SynapseParams,
    Trajectory,
    ValidationError,
    make_grid,
    make_time_grid,
    validate,
)
from excitable.core import layout_widths


class TestSpatialGrid:
    def test_zero_is_sampled_exactly(self):
        g = make_grid(25.0, 1001)
        assert g.x[500] == 0.0

    def test_mirror_symmetry_is_exact(self):
        g = make_grid(25.0, 1001)
        assert np.array_equal(g.x, -g.x[::-1])

    def test_endpoints_hit_half_length_exactly(self):
        g = make_grid(7.3, 91)
        assert g.x[0] == -7.3 and g.x[-1] == 7.3

    def test_dx(self):
        g = make_grid(5.0, 101)
        assert g.dx == pytest.approx(0.1)
        assert len(g) == 101

    def test_even_n_rejected(self):
        with pytest.raises(ValidationError, match="odd"):
            make_grid(5.0, 100)

    def test_nonpositive_length_rejected(self):
        with pytest.raises(ValidationError, match="half_length"):
            make_grid(0.0, 101)

    def test_too_few_points_rejected(self):
        with pytest.raises(ValidationError):
            make_grid(5.0, 1)

    def test_x_is_read_only(self):
        g = make_grid(5.0, 101)
        with pytest.raises(ValueError):
            g.x[0] = 99.0

    def test_same_as(self):
        a, b, c = make_grid(5.0, 101), make_grid(5.0, 101), make_grid(5.0, 51)
        assert a.same_as(b) and not a.same_as(c)


class TestTimeGrid:
    def test_n_steps_rounds(self):
        assert make_time_grid(0.0, 1.0, 0.01).n_steps == 100
        # 0.3/0.1 is not exactly 3 in floats; rounding must absorb that
        assert make_time_grid(0.0, 0.3, 0.1).n_steps == 3

    def test_bad_interval(self):
        with pytest.raises(ValidationError):
            make_time_grid(1.0, 1.0, 0.01)

    def test_bad_dt(self):
        with pytest.raises(ValidationError):
            make_time_grid(0.0, 1.0, -0.1)


class TestParameterInvariants:
    def test_defaults_are_valid(self):
        for params in (HHParams(), AmariParams(), MemTemporalParams(), MemSynapticParams()):
            assert validate(params) == []

    def test_violations_list_every_problem(self):
        bad = MemTemporalParams(g_leak=-1.0, tau_exc=5.0, tau_inh=2.0)
        msgs = bad.violations()
        assert any("g_leak" in m for m in msgs)
        assert any("tau_exc < tau_inh" in m for m in msgs)
        assert len(msgs) >= 2

    def test_hh_reversal_ordering(self):
        assert HHParams(e_k=60.0).violations()

    def test_amari_scale_ordering(self):
        assert AmariParams(sigma_e=3.0, sigma_i=2.0).violations()

    def test_synaptic_nested_violations_are_prefixed(self):
        bad = MemSynapticParams(
            exc=SynapseParams(sigma=0.5, tau=0.1, v_threshold=2.0, g_max=-1.0, e_rev=10.0)
        )
        assert any(m.startswith("exc.") for m in bad.violations())

    def test_validate_rejects_foreign_objects(self):
        with pytest.raises(TypeError):
            validate(object())

    def test_hh_state_gating_range(self):
        assert HHState(v=-65.0, m=1.5, h=0.5, n=0.5).violations()
        assert HHState(v=-65.0, m=0.5, h=0.5, n=0.5).violations() == []


class TestTrajectory:
    def _traj(self):
        times = np.array([0.0, 1.0, 2.0])
        states = np.array([[0.0, 10.0], [1.0, 11.0], [2.0, 12.0]])
        return Trajectory(
            model="toy", times=times, states=states, layout=layout_widths(["a", "b"], 1)
        )

    def test_series(self):
        t = self._traj()
        assert np.array_equal(t.series("a"), [0.0, 1.0, 2.0])
        assert np.array_equal(t.series("b"), [10.0, 11.0, 12.0])

    def test_snapshot_picks_nearest_time(self):
        t = self._traj()
        assert t.snapshot("b", 1.2) == 11.0
        assert t.index_at(1.9) == 2

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            Trajectory(
                model="toy",
                times=np.array([0.0]),
                states=np.zeros((2, 1)),
                layout=layout_widths(["a"], 1),
            )

    def test_states_read_only(self):
        t = self._traj()
        with pytest.raises(ValueError):
            t.states[0, 0] = 5.0

    def test_layout_widths(self):
        lay = layout_widths(["u", "v"], 3)
        assert lay == {"u": slice(0, 3), "v": slice(3, 6)}
