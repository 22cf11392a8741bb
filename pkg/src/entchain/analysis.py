"""Post-processing of entropy time series.

Period extraction works on the magnitude spectrum of the mean-subtracted
von Neumann series (Hann window, zero-padded FFT, parabolic refinement of
peak bins).  Spectral peaks are robust against the nonlinear superposition
of mode oscillations in the entropy, where zero-crossing counting is not.
The slowest significant peak is the revival period; the scaling fit is a
per-time least squares of S_1 against ln N.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .entanglement import EntropySeries


@dataclass(frozen=True)
class PeriodEstimate:
    """Dominant oscillation periods, strongest first."""

    periods: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if np.any(self.periods <= 0):
            raise ValueError("periods must be positive")
        if np.any(np.diff(self.weights) > 0):
            raise ValueError("weights must be sorted descending")


@dataclass(frozen=True)
class ScalingFit:
    """Per-time least-squares fit S_1(t, N) = c(t) ln N + d(t).

    ``spread`` is max_N |S_1/ln N - mean_N(S_1/ln N)| per time point and
    ``relative_spread`` divides that by the mean's magnitude.
    """

    times: np.ndarray
    sizes: tuple[int, ...]
    slope: np.ndarray
    intercept: np.ndarray
    residual: np.ndarray
    spread: np.ndarray
    relative_spread: np.ndarray


def _uniform_step(times: np.ndarray) -> float:
    steps = np.diff(times)
    if steps.size == 0 or steps.min() <= 0:
        raise ValueError("series needs at least two increasing time points")
    if steps.max() - steps.min() > 1e-9 * steps.max():
        raise ValueError("period extraction needs a uniform time grid")
    return float(steps.mean())


def _spectrum_peaks(times: np.ndarray, values: np.ndarray, pad_factor: int = 8):
    """(frequencies, weights) of local maxima of the windowed magnitude
    spectrum, strongest first; the band below 1.2 / window_length is
    excluded as unresolvable."""
    dt = _uniform_step(times)
    n = times.size
    if n < 16:
        raise ValueError(f"series too short for spectral analysis ({n} samples)")
    centered = values - values.mean()
    swing = np.abs(centered).max()
    if swing == 0.0 or swing < 1e-13 * max(np.abs(values).max(), 1.0):
        raise ValueError("series is constant; no oscillation to analyze")
    window = np.hanning(n)
    spectrum = np.abs(np.fft.rfft(centered * window, n=pad_factor * n))
    freqs = np.fft.rfftfreq(pad_factor * n, d=dt)

    span = times[-1] - times[0]
    f_min = 1.2 / span
    interior = (
        (spectrum[1:-1] > spectrum[:-2])
        & (spectrum[1:-1] >= spectrum[2:])
        & (freqs[1:-1] >= f_min)
    )
    idx = np.flatnonzero(interior) + 1
    if idx.size == 0:
        raise ValueError(
            "no spectral peaks found above the resolvable-frequency floor; "
            "the window is too short or the grid too coarse"
        )
    df = freqs[1] - freqs[0]
    left, mid, right = spectrum[idx - 1], spectrum[idx], spectrum[idx + 1]
    denom = left - 2.0 * mid + right
    shift = np.where(denom != 0.0, 0.5 * (left - right) / np.where(denom, denom, 1.0), 0.0)
    shift = np.clip(shift, -0.5, 0.5)
    peak_freqs = freqs[idx] + shift * df
    peak_weights = mid - 0.25 * (left - right) * shift
    order = np.argsort(peak_weights)[::-1]
    return peak_freqs[order], peak_weights[order]


def extract_periods(series: EntropySeries, count: int) -> PeriodEstimate:
    """Top ``count`` oscillation periods of the von Neumann series."""
    if count < 1:
        raise ValueError("count must be at least 1")
    freqs, weights = _spectrum_peaks(series.times, series.s1)
    if freqs.size < count:
        raise ValueError(
            f"only {freqs.size} spectral peaks are resolvable on this grid, "
            f"{count} requested; lengthen the window or refine the grid"
        )
    return PeriodEstimate(periods=1.0 / freqs[:count], weights=weights[:count])


def revival_period(series: EntropySeries, rel_threshold: float = 0.1) -> float:
    """Period of the slowest significant oscillation of the entropy.

    Significant means spectral weight at least ``rel_threshold`` times the
    strongest peak's.  The window must hold two full cycles of the result;
    otherwise the revival is not yet confirmed and the error suggests a
    longer run.
    """
    if not 0.0 < rel_threshold <= 1.0:
        raise ValueError("rel_threshold must lie in (0, 1]")
    freqs, weights = _spectrum_peaks(series.times, series.s1)
    significant = freqs[weights >= rel_threshold * weights[0]]
    period = 1.0 / significant.min()
    span = series.times[-1] - series.times[0]
    if period > span / 2.0:
        raise ValueError(
            f"slowest component has period {period:.4g} but the window is only "
            f"{span:.4g}; rerun with t_max of at least {2.0 * period:.4g} to "
            "confirm a revival"
        )
    return float(period)


def fit_scaling(series_by_size: dict[int, EntropySeries]) -> ScalingFit:
    """Least-squares S_1 = c(t) ln N + d(t) across chain sizes.

    All series must share one time grid; at least three sizes are needed
    for a meaningful two-parameter fit.
    """
    sizes = tuple(sorted(int(n) for n in series_by_size))
    if len(sizes) < 3:
        raise ValueError(f"scaling fit needs at least 3 chain sizes, got {len(sizes)}")
    if any(n < 2 for n in sizes):
        raise ValueError("chain sizes must be at least 2")
    first = series_by_size[sizes[0]].times
    data = np.empty((len(sizes), first.size))
    for row, n in enumerate(sizes):
        series = series_by_size[n]
        if series.times.shape != first.shape or not np.allclose(
            series.times, first, rtol=0.0, atol=1e-12
        ):
            raise ValueError("all series must share an identical time grid")
        data[row] = series.s1

    log_sizes = np.log(np.asarray(sizes, dtype=float))
    design = np.column_stack((log_sizes, np.ones_like(log_sizes)))
    coef, _, _, _ = np.linalg.lstsq(design, data, rcond=None)
    residual = np.linalg.norm(data - design @ coef, axis=0)

    ratios = data / log_sizes[:, None]
    mean = ratios.mean(axis=0)
    spread = np.abs(ratios - mean).max(axis=0)
    floor = np.maximum(np.abs(mean), 1e-300)
    return ScalingFit(
        times=first,
        sizes=sizes,
        slope=coef[0],
        intercept=coef[1],
        residual=residual,
        spread=spread,
        relative_spread=spread / floor,
    )
