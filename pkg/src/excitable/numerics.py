"""Numerical primitives shared by every model: sampled spatial kernels,
open-boundary 1-D convolution (direct and spectral), and a fixed-step
classical Runge-Kutta integrator.

The direct convolution is the oracle; the spectral path must reproduce it
to 1e-9 relative sup-norm (zero-padded FFT, so no wraparound).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np
import scipy.fft

from .core import GridMismatchError, SpatialGrid, TimeGrid, ValidationError

__all__ = [
    "Normalization",
    "Kernel",
    "exponential_kernel",
    "difference_kernel",
    "convolve_direct",
    "convolve_spectral",
    "relu",
    "integrate",
    "NonFiniteError",
]


def relu(x):
    """One-sided linear rectifier; relu(0) == 0 exactly."""
    return np.maximum(0.0, x)


class Normalization(Enum):
    RAW = "raw"
    UNIT_INTEGRAL = "unit-integral"


@dataclass(frozen=True)
class Kernel:
    """Even-symmetric interaction profile sampled at every grid lag.

    ``values`` holds k at lags m*dx for m = -(N-1) .. N-1 (length 2N-1),
    constructed by mirroring the nonnegative-lag half so the symmetry is
    exact.  ``line_integral`` is the analytic integral over the infinite
    line (the uniform-field gain W0).
    """

    grid: SpatialGrid
    values: np.ndarray = field(repr=False, compare=False)
    normalization: Normalization = Normalization.UNIT_INTEGRAL
    scales: tuple[float, ...] = ()
    line_integral: float = 0.0
    gain: float = 1.0
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def on_grid(self) -> np.ndarray:
        """Kernel samples at the grid positions themselves (lag = x_j)."""
        n = self.grid.n_points
        half = n // 2
        return self.values[n - 1 - half : n + half]

    def abs_integral(self) -> float:
        """Trapezoid estimate of the total-variation mass over [-2L, 2L]."""
        return float(self.grid.dx * np.sum(np.abs(self.values)))

    def spectrum(self, nfft: int) -> np.ndarray:
        spec = self._cache.get(nfft)
        if spec is None:
            spec = scipy.fft.rfft(self.values, nfft)
            self._cache[nfft] = spec
        return spec


def _mirror(half: np.ndarray) -> np.ndarray:
    # half[0] is the lag-0 sample
    return np.concatenate([half[:0:-1], half])


def _lags(grid: SpatialGrid) -> np.ndarray:
    return grid.dx * np.arange(grid.n_points)


def exponential_kernel(
    sigma: float, grid: SpatialGrid, normalization: Normalization = Normalization.UNIT_INTEGRAL
) -> Kernel:
    """k(x) = c * exp(-|x|/sigma); c = 1 (raw) or 1/(2 sigma) (unit integral)."""
    if not sigma > 0:
        raise ValidationError([f"sigma must be > 0, got {sigma}"])
    c = 1.0 if normalization is Normalization.RAW else 1.0 / (2.0 * sigma)
    half = c * np.exp(-_lags(grid) / sigma)
    integral = 2.0 * sigma * c
    return Kernel(
        grid=grid,
        values=_mirror(half),
        normalization=normalization,
        scales=(sigma,),
        line_integral=integral,
    )


def difference_kernel(
    sigma_e: float,
    sigma_i: float,
    grid: SpatialGrid,
    normalization: Normalization = Normalization.UNIT_INTEGRAL,
    gain: float = 1.0,
) -> Kernel:
    """Short-range-excitation / long-range-inhibition profile.

    Under unit-integral normalization each lobe carries amplitude
    1/(2 sigma), giving a positive center and negative surround; ``gain``
    scales the whole kernel.  Raw mode keeps both amplitudes at 1 (then the
    difference is nonpositive everywhere for sigma_e < sigma_i).
    """
    if not (0 < sigma_e < sigma_i):
        raise ValidationError(
            [f"0 < sigma_e < sigma_i required, got ({sigma_e}, {sigma_i})"]
        )
    lags = _lags(grid)
    if normalization is Normalization.RAW:
        half = gain * (np.exp(-lags / sigma_e) - np.exp(-lags / sigma_i))
        integral = gain * 2.0 * (sigma_e - sigma_i)
    else:
        half = gain * (
            np.exp(-lags / sigma_e) / (2.0 * sigma_e)
            - np.exp(-lags / sigma_i) / (2.0 * sigma_i)
        )
        integral = 0.0
    return Kernel(
        grid=grid,
        values=_mirror(half),
        normalization=normalization,
        scales=(sigma_e, sigma_i),
        line_integral=integral,
        gain=gain,
    )


def _check_field(field_values: np.ndarray, kernel: Kernel) -> np.ndarray:
    f = np.asarray(field_values, dtype=float)
    if f.shape != (kernel.grid.n_points,):
        raise GridMismatchError(
            f"field shape {f.shape} does not match grid with "
            f"{kernel.grid.n_points} points"
        )
    return f


def convolve_direct(field_values: np.ndarray, kernel: Kernel) -> np.ndarray:
    """Open-boundary Riemann-sum convolution: out_j = dx * sum_i k(x_j - x_i) f_i.

    The integral is truncated at the domain boundary: no wraparound, no
    padding.  Direct time-domain summation; serves as the oracle for the
    spectral path.
    """
    f = _check_field(field_values, kernel)
    n = kernel.grid.n_points
    full = np.convolve(f, kernel.values)
    return kernel.grid.dx * full[n - 1 : 2 * n - 1]


def convolve_spectral(field_values: np.ndarray, kernel: Kernel) -> np.ndarray:
    """Same operator as convolve_direct via zero-padded FFT."""
    f = _check_field(field_values, kernel)
    n = kernel.grid.n_points
    nfft = scipy.fft.next_fast_len(3 * n - 2)
    spec = kernel.spectrum(nfft)
    full = scipy.fft.irfft(scipy.fft.rfft(f, nfft) * spec, nfft)
    return kernel.grid.dx * full[n - 1 : 2 * n - 1]


class NonFiniteError(RuntimeError):
    """A state component became NaN/Inf during integration."""

    def __init__(self, step: int, t: float, component: str):
        self.step = step
        self.t = t
        self.component = component
        super().__init__(
            f"non-finite state at step {step} (t={t:g}), first offending "
            f"component: {component}"
        )


def _name_component(index: int, layout) -> str:
    if layout:
        for name, sl in layout.items():
            if sl.start <= index < sl.stop:
                width = sl.stop - sl.start
                if width == 1:
                    return name
                return f"{name}[{index - sl.start}]"
    return f"component {index}"


def integrate(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    time_grid: TimeGrid,
    stride: int = 1,
    layout=None,
) -> tuple[np.ndarray, np.ndarray]:
    """Classical fixed-step RK4; deterministic and bitwise reproducible.

    Records the initial state, every ``stride``-th step, and the final
    step.  Raises NonFiniteError naming the first bad component if the
    state leaves the finite range.
    """
    if stride < 1:
        raise ValidationError([f"stride must be >= 1, got {stride}"])
    y = np.array(y0, dtype=float).ravel()
    dt = time_grid.dt
    n_steps = time_grid.n_steps
    times = [time_grid.t_start]
    states = [y.copy()]
    for i in range(n_steps):
        t = time_grid.t_start + i * dt
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * dt, y + (0.5 * dt) * k1)
        k3 = rhs(t + 0.5 * dt, y + (0.5 * dt) * k2)
        k4 = rhs(t + dt, y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)):
            bad = int(np.argmin(np.isfinite(y)))
            raise NonFiniteError(i + 1, t + dt, _name_component(bad, layout))
        if (i + 1) % stride == 0 or i + 1 == n_steps:
            times.append(time_grid.t_start + (i + 1) * dt)
            states.append(y.copy())
    return np.array(times), np.array(states)
