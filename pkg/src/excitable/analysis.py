"""Small measurement helpers for field profiles: super-level regions and
bump widths."""

from __future__ import annotations

import numpy as np

__all__ = ["super_level_regions", "fwhm"]


def super_level_regions(values: np.ndarray, level: float) -> list[tuple[int, int]]:
    """Index ranges [i0, i1) of the maximal runs where values > level."""
    above = np.asarray(values) > level
    edges = np.flatnonzero(np.diff(above.astype(np.int8)))
    starts = list(edges[~above[edges]] + 1)
    stops = list(edges[above[edges]] + 1)
    if above[0]:
        starts.insert(0, 0)
    if above[-1]:
        stops.append(above.shape[0])
    return list(zip(starts, stops))


def fwhm(x: np.ndarray, values: np.ndarray, baseline: float | None = None) -> float:
    """Full width at half maximum of the tallest bump, measured above the
    baseline (default: the minimum of the profile), with linear
    interpolation at the crossings."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(values, dtype=float)
    base = float(np.min(v)) if baseline is None else float(baseline)
    peak_i = int(np.argmax(v))
    half = base + 0.5 * (v[peak_i] - base)

    def crossing(i_inside: int, direction: int) -> float:
        j = i_inside
        while 0 <= j + direction < v.shape[0] and v[j + direction] > half:
            j += direction
        k = j + direction
        if k < 0 or k >= v.shape[0]:
            return float(x[j])
        # interpolate between the last point above and the first below
        frac = (v[j] - half) / (v[j] - v[k])
        return float(x[j] + frac * (x[k] - x[j]))

    return abs(crossing(peak_i, +1) - crossing(peak_i, -1))
