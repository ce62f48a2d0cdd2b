"""Shared domain types: grids, parameter records, states, trajectories.

All types are frozen dataclasses; arrays are marked read-only after
construction so instances can be shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

__all__ = [
    "ValidationError",
    "GridMismatchError",
    "SpatialGrid",
    "TimeGrid",
    "make_grid",
    "make_time_grid",
    "HHParams",
    "HHState",
    "AmariParams",
    "MemTemporalParams",
    "SynapseParams",
    "MemSynapticParams",
    "Trajectory",
    "validate",
]


class ValidationError(ValueError):
    """Raised when a grid or parameter record violates its invariants."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class GridMismatchError(ValueError):
    """Raised when two sampled quantities do not share the same grid."""


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform symmetric 1-D grid on [-half_length, half_length].

    n_points must be odd so that x = 0 is a sample point.
    """

    half_length: float
    n_points: int
    x: np.ndarray = field(repr=False, compare=False)

    @property
    def dx(self) -> float:
        return 2.0 * self.half_length / (self.n_points - 1)

    def __len__(self) -> int:
        return self.n_points

    def same_as(self, other: "SpatialGrid") -> bool:
        return (
            self.n_points == other.n_points
            and self.half_length == other.half_length
        )


def make_grid(half_length: float, n_points: int) -> SpatialGrid:
    """Build a symmetric spatial grid; rejects even n_points or L <= 0."""
    violations = []
    if n_points < 3:
        violations.append(f"n_points must be >= 3, got {n_points}")
    if n_points % 2 == 0:
        violations.append(f"n_points must be odd so x=0 is sampled, got {n_points}")
    if not half_length > 0:
        violations.append(f"half_length must be > 0, got {half_length}")
    if violations:
        raise ValidationError(violations)
    dx = 2.0 * half_length / (n_points - 1)
    half = n_points // 2
    # mirror one half so x[j] == -x[N-1-j] exactly
    pos = dx * np.arange(1, half + 1)
    pos[-1] = half_length
    x = np.concatenate([-pos[::-1], [0.0], pos])
    return SpatialGrid(half_length=float(half_length), n_points=int(n_points), x=_freeze(x))


@dataclass(frozen=True)
class TimeGrid:
    """Fixed-step time discretization, times in ms."""

    t_start: float
    t_end: float
    dt: float

    def __post_init__(self):
        violations = []
        if not self.dt > 0:
            violations.append(f"dt must be > 0, got {self.dt}")
        if not self.t_end > self.t_start:
            violations.append(
                f"t_end must exceed t_start, got [{self.t_start}, {self.t_end}]"
            )
        if violations:
            raise ValidationError(violations)

    @property
    def n_steps(self) -> int:
        return int(round((self.t_end - self.t_start) / self.dt))


def make_time_grid(t_start: float, t_end: float, dt: float) -> TimeGrid:
    return TimeGrid(t_start=float(t_start), t_end=float(t_end), dt=float(dt))


# ---------------------------------------------------------------------------
# Parameter records.  Defaults are the canonical desk-scale values; each
# record knows how to list its own invariant violations.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HHParams:
    """Conductance-based point-neuron constants (mS/cm^2, mV, uF/cm^2)."""

    capacitance: float = 1.0
    g_na_max: float = 120.0
    e_na: float = 50.0
    g_k_max: float = 36.0
    e_k: float = -77.0
    g_leak: float = 0.3
    e_leak: float = -54.4

    def violations(self) -> list[str]:
        out = []
        for name in ("capacitance", "g_na_max", "g_k_max", "g_leak"):
            if not getattr(self, name) > 0:
                out.append(f"{name} must be > 0, got {getattr(self, name)}")
        if not (self.e_na > self.e_leak > self.e_k):
            out.append(
                "reversal potentials must satisfy e_na > e_leak > e_k, got "
                f"({self.e_na}, {self.e_leak}, {self.e_k})"
            )
        return out


@dataclass(frozen=True)
class HHState:
    """Membrane voltage plus the three gating fractions."""

    v: float
    m: float
    h: float
    n: float

    def violations(self) -> list[str]:
        out = []
        for name in ("m", "h", "n"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                out.append(f"gating variable {name} outside [0, 1]: {val}")
        if not np.isfinite(self.v):
            out.append(f"v is not finite: {self.v}")
        return out

    def as_array(self) -> np.ndarray:
        return np.array([self.v, self.m, self.h, self.n])


@dataclass(frozen=True)
class AmariParams:
    """Neural-field constants: membrane time constant, kernel scales,
    firing threshold, and lateral-kernel settings.

    ``kernel_gain`` multiplies the unit-integral difference kernel; the
    default was calibrated so that a localized bump attractor exists while
    the uniform background stays stable (see README).
    """

    tau: float = 3.0
    sigma_e: float = 0.3
    sigma_i: float = 2.0
    theta: float = 0.4
    slope: float = 5.0
    kernel_gain: float = 2.1
    normalize_kernel: bool = True

    def violations(self) -> list[str]:
        out = []
        if not self.sigma_e < self.sigma_i:
            out.append(
                f"sigma_e < sigma_i required, got ({self.sigma_e}, {self.sigma_i})"
            )
        for name in ("tau", "sigma_e", "sigma_i", "slope", "kernel_gain"):
            if not getattr(self, name) > 0:
                out.append(f"{name} must be > 0, got {getattr(self, name)}")
        return out


@dataclass(frozen=True)
class MemTemporalParams:
    """Point-neuron with relu memductances: fast excitatory and slow
    inhibitory first-order filters gating Ohmic currents."""

    capacitance: float = 1.0
    g_leak: float = 0.1
    g_exc_max: float = 1.0
    e_exc: float = 10.0
    v_exc_threshold: float = 1.0
    tau_exc: float = 0.1
    g_inh_max: float = 10.0
    e_inh: float = -10.0
    v_inh_threshold: float = 1.0
    tau_inh: float = 10.0

    def violations(self) -> list[str]:
        out = []
        if not self.tau_exc < self.tau_inh:
            out.append(
                f"tau_exc < tau_inh required, got ({self.tau_exc}, {self.tau_inh})"
            )
        if not (self.e_exc > 0.0 > self.e_inh):
            out.append(
                f"e_exc > 0 > e_inh required, got ({self.e_exc}, {self.e_inh})"
            )
        for name in ("capacitance", "g_leak", "g_exc_max", "g_inh_max", "tau_exc", "tau_inh"):
            if not getattr(self, name) > 0:
                out.append(f"{name} must be > 0, got {getattr(self, name)}")
        return out


@dataclass(frozen=True)
class SynapseParams:
    """One synapse type: spatial scale, filter time constant, relu
    threshold, maximal conductance, and reversal potential."""

    sigma: float
    tau: float
    v_threshold: float
    g_max: float
    e_rev: float

    def violations(self) -> list[str]:
        out = []
        for name in ("sigma", "tau", "g_max"):
            if not getattr(self, name) > 0:
                out.append(f"{name} must be > 0, got {getattr(self, name)}")
        return out


def _default_exc_synapse() -> SynapseParams:
    return SynapseParams(sigma=0.5, tau=0.1, v_threshold=2.0, g_max=10.0, e_rev=10.0)


def _default_inh_synapse() -> SynapseParams:
    return SynapseParams(sigma=5.0, tau=1.0, v_threshold=2.0, g_max=3.0, e_rev=-10.0)


@dataclass(frozen=True)
class MemSynapticParams:
    """E/I population field with synaptic relu memductances."""

    capacitance: float = 1.0
    g_leak: float = 0.1
    exc: SynapseParams = field(default_factory=_default_exc_synapse)
    inh: SynapseParams = field(default_factory=_default_inh_synapse)

    def violations(self) -> list[str]:
        out = []
        if not self.exc.sigma < self.inh.sigma:
            out.append(
                f"exc.sigma < inh.sigma required, got ({self.exc.sigma}, {self.inh.sigma})"
            )
        if not self.exc.tau < self.inh.tau:
            out.append(
                f"exc.tau < inh.tau required, got ({self.exc.tau}, {self.inh.tau})"
            )
        for name in ("capacitance", "g_leak"):
            if not getattr(self, name) > 0:
                out.append(f"{name} must be > 0, got {getattr(self, name)}")
        out += [f"exc.{v}" for v in self.exc.violations()]
        out += [f"inh.{v}" for v in self.inh.violations()]
        return out


def validate(params) -> list[str]:
    """Return every violated invariant of a parameter record (empty = ok)."""
    if not hasattr(params, "violations"):
        raise TypeError(f"not a validatable parameter record: {type(params)!r}")
    return params.violations()


# ---------------------------------------------------------------------------
# Trajectories
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Trajectory:
    """Time-indexed record of a simulation.

    ``states`` has shape (n_recorded, dim); ``layout`` maps a variable name
    to its column slice (width 1 for point models, n_points for fields).
    """

    model: str
    times: np.ndarray
    states: np.ndarray
    layout: Mapping[str, slice]
    stimulus: str = ""
    grid: SpatialGrid | None = None

    def __post_init__(self):
        if self.states.shape[0] != self.times.shape[0]:
            raise ValidationError(
                [
                    f"snapshot count {self.states.shape[0]} does not match "
                    f"recorded times {self.times.shape[0]}"
                ]
            )
        _freeze(self.times)
        _freeze(self.states)

    @property
    def variables(self) -> list[str]:
        return list(self.layout)

    def series(self, name: str) -> np.ndarray:
        """All recorded values of one variable, shape (n_recorded, width)
        squeezed to (n_recorded,) for scalar variables."""
        block = self.states[:, self.layout[name]]
        return block[:, 0] if block.shape[1] == 1 else block

    def index_at(self, t: float) -> int:
        i = int(np.argmin(np.abs(self.times - t)))
        return i

    def snapshot(self, name: str, t: float) -> np.ndarray:
        """Value of one variable at the recorded time closest to t."""
        block = self.states[self.index_at(t), self.layout[name]]
        return block[0] if block.shape == (1,) else block


def layout_widths(names: list[str], width: int) -> dict[str, slice]:
    """Contiguous equal-width layout in declaration order."""
    return {n: slice(i * width, (i + 1) * width) for i, n in enumerate(names)}
