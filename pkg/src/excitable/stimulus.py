"""Applied-current generators: spatio-temporal Gaussian pulses and
rectangular steps, composed into a stimulus program."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .core import TimeGrid, ValidationError

__all__ = [
    "GaussianPulse",
    "RectangularPulse",
    "StimulusProgram",
    "TARGETS",
]

TARGETS = ("E", "I", "both", "point")


@dataclass(frozen=True)
class GaussianPulse:
    """Separable space-time Gaussian centered at x = 0, t = t_center.

    value(x, t) = amplitude * exp(-x^2 / 2 sigma_x^2)
                            * exp(-(t - t_center)^2 / 2 sigma_t^2)
    """

    amplitude: float
    sigma_x: float
    sigma_t: float
    t_center: float

    def __post_init__(self):
        bad = []
        if not self.sigma_x > 0:
            bad.append(f"sigma_x must be > 0, got {self.sigma_x}")
        if not self.sigma_t > 0:
            bad.append(f"sigma_t must be > 0, got {self.sigma_t}")
        if bad:
            raise ValidationError(bad)

    def value(self, x, t: float):
        sp = np.exp(-np.square(x) / (2.0 * self.sigma_x**2))
        tp = np.exp(-((t - self.t_center) ** 2) / (2.0 * self.sigma_t**2))
        return self.amplitude * sp * tp

    def spatial_profile(self, x: np.ndarray) -> np.ndarray:
        return np.exp(-np.square(x) / (2.0 * self.sigma_x**2))

    def time_factor(self, t: float) -> float:
        return self.amplitude * float(
            np.exp(-((t - self.t_center) ** 2) / (2.0 * self.sigma_t**2))
        )

    def support(self) -> tuple[float, float]:
        # effective support: +-5 sigma_t around the center
        return (self.t_center - 5.0 * self.sigma_t, self.t_center + 5.0 * self.sigma_t)

    def describe(self) -> str:
        return (
            f"gaussian(A={self.amplitude:g}, sigma_x={self.sigma_x:g}, "
            f"sigma_t={self.sigma_t:g}, t0={self.t_center:g})"
        )


@dataclass(frozen=True)
class RectangularPulse:
    """Spatially uniform current step: amplitude on [t_on, t_off), else 0."""

    amplitude: float
    t_on: float
    t_off: float

    def __post_init__(self):
        if not self.t_on < self.t_off:
            raise ValidationError(
                [f"t_on < t_off required, got [{self.t_on}, {self.t_off})"]
            )

    def value(self, x, t: float):
        on = 1.0 if self.t_on <= t < self.t_off else 0.0
        return self.amplitude * on * np.ones_like(np.asarray(x, dtype=float))

    def spatial_profile(self, x: np.ndarray) -> np.ndarray:
        return np.ones_like(x)

    def time_factor(self, t: float) -> float:
        return self.amplitude if self.t_on <= t < self.t_off else 0.0

    def support(self) -> tuple[float, float]:
        return (self.t_on, self.t_off)

    def describe(self) -> str:
        return f"rect(A={self.amplitude:g}, on=[{self.t_on:g}, {self.t_off:g}))"


Pulse = Union[GaussianPulse, RectangularPulse]


@dataclass(frozen=True)
class StimulusProgram:
    """Ordered sum of pulses aimed at one target population."""

    pulses: tuple[Pulse, ...] = ()
    target: str = "E"

    def __post_init__(self):
        if self.target not in TARGETS:
            raise ValidationError(
                [f"unknown stimulus target {self.target!r}, expected one of {TARGETS}"]
            )

    def value(self, x, t: float):
        total = np.zeros_like(np.asarray(x, dtype=float))
        for p in self.pulses:
            total = total + p.value(x, t)
        return total

    def value_at_point(self, t: float, x: float = 0.0) -> float:
        return float(sum(p.time_factor(t) * p.spatial_profile(np.array(x)) for p in self.pulses))

    def field_evaluator(self, x: np.ndarray) -> Callable[[float], np.ndarray]:
        """Fast evaluator with the spatial profiles precomputed."""
        profiles = [p.spatial_profile(x) for p in self.pulses]
        pulses = self.pulses

        def evaluate(t: float) -> np.ndarray:
            total = np.zeros_like(x)
            for p, prof in zip(pulses, profiles):
                f = p.time_factor(t)
                if f != 0.0:
                    total = total + f * prof
            return total

        return evaluate

    def outside_window(self, time_grid: TimeGrid) -> list[Pulse]:
        """Pulses whose effective support falls outside the simulated
        window (reported as a warning by the CLI, not an error)."""
        out = []
        for p in self.pulses:
            lo, hi = p.support()
            if hi < time_grid.t_start or lo > time_grid.t_end:
                out.append(p)
        return out

    def describe(self) -> str:
        if not self.pulses:
            return "none"
        parts = " + ".join(p.describe() for p in self.pulses)
        return f"{parts} -> {self.target}"
