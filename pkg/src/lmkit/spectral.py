"""Six-band short-time log-energy contours.

The detector watches energy movement in six fixed frequency bands
(0-0.4, 0.8-1.5, 1.2-2.0, 2.0-3.5, 3.5-5.0 and 5.0-8.0 kHz; bands 2 and 3
deliberately overlap and are computed independently).  This module turns a
16 kHz signal into per-band dB contours on a fine analysis grid, smooths
them with either a moving average ("basic") or a normalized convolution
kernel ("advanced"), and differentiates them into rate-of-rise contours
whose peaks drive landmark detection.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from . import kernels
from .audio import SampledSignal

DEFAULT_BAND_EDGES_HZ = (
    (0.0, 400.0),
    (800.0, 1500.0),
    (1200.0, 2000.0),
    (2000.0, 3500.0),
    (3500.0, 5000.0),
    (5000.0, 8000.0),
)

# Analysis grid: 8 ms Hanning window stepped every 1 ms.  The 1 ms hop keeps
# the 20 ms / 10 ms smoothing spans at 21- and 11-frame kernels; the 8 ms
# window keeps a full-scale 1 kHz tone at least 20 dB inside band 2 (a 6 ms
# window leaves under 1 dB of margin against leakage into band 3).
DEFAULT_WINDOW_S = 0.008
DEFAULT_HOP_S = 0.001
DEFAULT_NFFT = 256

# Energy floor relative to full scale: silence reads -100 dB.
DEFAULT_ENERGY_FLOOR = 1e-10


@dataclass(frozen=True)
class BandSpec:
    """Ordered band edges in Hz; a bin belongs to [low_hz, high_hz)."""

    bands: tuple = DEFAULT_BAND_EDGES_HZ

    def __post_init__(self):
        if len(self.bands) != 6:
            raise ValueError("exactly 6 bands required")
        for lo, hi in self.bands:
            if not lo < hi:
                raise ValueError(f"band edges must satisfy low < high, got ({lo}, {hi})")


@dataclass(frozen=True)
class FrameGrid:
    """Uniform analysis grid; frame i is centered at origin_s + i * hop_s."""

    hop_s: float
    window_s: float
    n_frames: int
    origin_s: float

    def __post_init__(self):
        if self.hop_s <= 0:
            raise ValueError("hop_s must be positive")
        if self.window_s < self.hop_s:
            raise ValueError("window_s must be >= hop_s")

    def frame_time(self, i: int) -> float:
        return self.origin_s + i * self.hop_s

    def times(self) -> np.ndarray:
        return self.origin_s + self.hop_s * np.arange(self.n_frames)

    def nearest_frame(self, t: float) -> int:
        i = int(round((t - self.origin_s) / self.hop_s))
        return min(max(i, 0), self.n_frames - 1)


@dataclass
class BandEnergyContours:
    """6 x n_frames matrix of band log-energies in dB on a FrameGrid.

    ``smoothing`` is one of raw/basic/advanced; ``pass_name`` labels which
    detector pass (coarse/fine) a smoothed contour belongs to ("none" for
    raw contours).
    """

    grid: FrameGrid
    energy_db: np.ndarray
    smoothing: str = "raw"
    pass_name: str = "none"

    def __post_init__(self):
        self.energy_db = np.asarray(self.energy_db, dtype=np.float64)
        if self.energy_db.ndim != 2 or self.energy_db.shape[0] != 6:
            raise ValueError("energy_db must have shape (6, n_frames)")
        if self.energy_db.shape[1] != self.grid.n_frames:
            raise ValueError("energy_db width does not match grid.n_frames")
        if not np.all(np.isfinite(self.energy_db)):
            raise ValueError("energy_db must be finite (is the floor applied?)")


def band_energies(
    sig: SampledSignal,
    spec: BandSpec | None = None,
    window_s: float = DEFAULT_WINDOW_S,
    hop_s: float = DEFAULT_HOP_S,
    nfft: int = DEFAULT_NFFT,
    floor: float = DEFAULT_ENERGY_FLOOR,
) -> BandEnergyContours:
    """Compute raw six-band log-energy contours from a signal.

    Per frame, a Hanning-windowed power spectrum is computed and each
    band's energy is the sum of the power bins whose center frequency lies
    in [low_hz, high_hz); the result is 10*log10(energy + floor) dB.

    Args:
        sig: input signal; bands assume the canonical 16 kHz rate.
        spec: band edges (defaults to the standard six bands).
        window_s / hop_s: analysis window and step, in seconds.
        nfft: FFT size; must cover the window.
        floor: energy floor keeping log values finite on silence.

    Raises:
        ValueError: signal shorter than one analysis window, or nfft too
            small for the window.
    """
    spec = spec or BandSpec()
    fs = sig.sample_rate_hz
    nwin = int(round(window_s * fs))
    nhop = int(round(hop_s * fs))
    if nwin < 2 or nhop < 1:
        raise ValueError("window/hop too small for the sample rate")
    if sig.samples.size < nwin:
        raise ValueError(
            f"signal of {sig.samples.size} samples is shorter than one "
            f"{nwin}-sample analysis window"
        )
    if nfft < nwin:
        raise ValueError(f"nfft={nfft} smaller than the {nwin}-sample window")
    n_frames = 1 + (sig.samples.size - nwin) // nhop
    frames = np.lib.stride_tricks.sliding_window_view(sig.samples, nwin)[::nhop]
    window = np.hanning(nwin)
    power = np.abs(np.fft.rfft(frames * window, n=nfft, axis=1)) ** 2
    freqs = np.fft.rfftfreq(nfft, 1.0 / fs)
    energy = np.empty((6, n_frames))
    for b, (lo, hi) in enumerate(spec.bands):
        mask = (freqs >= lo) & (freqs < hi)
        energy[b] = power[:, mask].sum(axis=1)
    energy_db = 10.0 * np.log10(energy + floor)
    grid = FrameGrid(
        hop_s=nhop / fs,
        window_s=nwin / fs,
        n_frames=n_frames,
        origin_s=(nwin / 2) / fs,
    )
    return BandEnergyContours(grid, energy_db, smoothing="raw", pass_name="none")


def span_to_frames(span_s: float, hop_s: float) -> int:
    """Convert a smoothing span to an odd frame count (minimum 1)."""
    n = int(round(span_s / hop_s))
    if n < 1:
        n = 1
    if n % 2 == 0:
        n += 1
    return n


def smooth_basic(
    c: BandEnergyContours, span_s: float, pass_name: str = "none"
) -> BandEnergyContours:
    """Moving-average smoothing over span_s (odd-forced frame count).

    Edge frames average over the shrinking in-bounds window.  A span at or
    below one hop degenerates to the identity.
    """
    if span_s <= 0:
        raise ValueError("span_s must be positive")
    width = span_to_frames(span_s, c.grid.hop_s)
    out = np.vstack([kernels.moving_average(row, width) for row in c.energy_db])
    return BandEnergyContours(c.grid, out, smoothing="basic", pass_name=pass_name)


def hanning_kernel(length: int) -> np.ndarray:
    """Hanning weights of odd length (endpoints are zero for length >= 3)."""
    if length < 1 or length % 2 == 0:
        raise ValueError("kernel length must be odd and >= 1")
    return np.hanning(length)


def smooth_advanced(
    c: BandEnergyContours,
    span_s: float,
    kernel="hanning",
    pass_name: str = "none",
) -> BandEnergyContours:
    """Linear-convolution smoothing with a normalized kernel.

    Args:
        c: raw contours.
        span_s: kernel span in seconds (odd-forced frame count) when
            kernel="hanning"; ignored for explicit weight arrays.
        kernel: "hanning" or a 1-D array of non-negative weights (odd
            length, not all zero).  The kernel is unit-normalized, and edge
            frames renormalize over the valid overlap, so constants pass
            through unchanged.
    """
    if isinstance(kernel, str):
        if kernel != "hanning":
            raise ValueError(f"unknown kernel name {kernel!r}")
        if span_s <= 0:
            raise ValueError("span_s must be positive")
        weights = hanning_kernel(span_to_frames(span_s, c.grid.hop_s))
    else:
        weights = np.asarray(kernel, dtype=np.float64)
    out = np.vstack([kernels.kernel_smooth(row, weights) for row in c.energy_db])
    return BandEnergyContours(c.grid, out, smoothing="advanced", pass_name=pass_name)


def rate_of_rise(c: BandEnergyContours, step_s: float) -> np.ndarray:
    """Symmetric dB difference across step_s for each band contour.

    ror[b][i] = c[b][i + k] - c[b][i - k] with k = round(step_s / (2*hop))
    clamped to at least one frame; out-of-range frames replicate the edge
    value, which keeps the derivative flat at utterance boundaries.

    Returns:
        (6, n_frames) array of dB differences.
    """
    if step_s < c.grid.hop_s:
        raise ValueError("step_s must be at least one hop")
    k = max(1, int(round(step_s / (2.0 * c.grid.hop_s))))
    return np.vstack([kernels.rate_of_rise(row, k) for row in c.energy_db])


def write_contours_csv(c: BandEnergyContours, path) -> None:
    """Export contours as CSV: frame_time_s, band1_db .. band6_db."""
    times = c.grid.times()
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["frame_time_s"] + [f"band{b}_db" for b in range(1, 7)])
        for i in range(c.grid.n_frames):
            writer.writerow(
                [f"{times[i]:.6f}"] + [f"{c.energy_db[b, i]:.4f}" for b in range(6)]
            )


def write_contours_json(c: BandEnergyContours, path) -> None:
    """Export contours as JSON with grid metadata (plot-ready)."""
    doc = {
        "hop_s": c.grid.hop_s,
        "window_s": c.grid.window_s,
        "origin_s": c.grid.origin_s,
        "smoothing": c.smoothing,
        "pass": c.pass_name,
        "frame_time_s": [round(t, 6) for t in c.grid.times()],
        "bands_db": [[round(v, 4) for v in row] for row in c.energy_db],
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f)
        f.write("\n")
