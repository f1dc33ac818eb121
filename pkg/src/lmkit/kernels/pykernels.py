"""NumPy reference implementations of the contour kernels.

These define the semantics; ``lmkit.kernels._ckernels`` is a compiled
drop-in replacement and must agree with them to floating-point rounding.
All functions take 1-D float arrays and return new arrays.
"""

import numpy as np


def _as_f64(x):
    a = np.ascontiguousarray(x, dtype=np.float64)
    if a.ndim != 1:
        raise ValueError("expected a 1-D array")
    return a


def moving_average(x, width):
    """Centered moving average with shrinking windows at the edges.

    out[i] is the mean of x over [i - width//2, i + width//2] clipped to
    the array bounds, so edge frames average over fewer samples instead of
    padding.

    Args:
        x: 1-D float array.
        width: window length in samples, odd, >= 1.

    Returns:
        Array of the same length as x.
    """
    x = _as_f64(x)
    if width < 1 or width % 2 == 0:
        raise ValueError("width must be odd and >= 1, got %r" % (width,))
    if width == 1 or x.size == 0:
        return x.copy()
    h = width // 2
    idx = np.arange(x.size)
    lo = np.maximum(idx - h, 0)
    hi = np.minimum(idx + h, x.size - 1)
    csum = np.concatenate(([0.0], np.cumsum(x)))
    return (csum[hi + 1] - csum[lo]) / (hi - lo + 1)


def kernel_smooth(x, kernel):
    """Smooth x with a unit-normalized weighting kernel.

    out[i] = sum_j kernel[j] * x[i + j - c] / sum_j kernel[j], with
    c = len(kernel)//2 and both sums restricted to in-bounds positions, so
    edge frames are renormalized over the valid kernel overlap.  Constant
    inputs are preserved exactly for any kernel.

    Args:
        x: 1-D float array.
        kernel: 1-D array of non-negative weights, odd length, not all zero.

    Returns:
        Array of the same length as x.
    """
    x = _as_f64(x)
    k = _as_f64(kernel)
    if k.size < 1 or k.size % 2 == 0:
        raise ValueError("kernel length must be odd and >= 1")
    if np.any(k < 0):
        raise ValueError("kernel weights must be non-negative")
    if not np.any(k > 0):
        raise ValueError("kernel weights must not be all zero")
    if x.size == 0:
        return x.copy()
    if k.size <= x.size:
        num = np.correlate(x, k, mode="same")
        den = np.correlate(np.ones(x.size), k, mode="same")
        return num / den
    # Kernel longer than the contour: np.correlate would swap its operands,
    # so fall back to explicit overlap sums.
    c = k.size // 2
    out = np.empty_like(x)
    for i in range(x.size):
        j0 = max(0, c - i)
        j1 = min(k.size, c - i + x.size)
        w = k[j0:j1]
        out[i] = np.dot(w, x[i - c + j0 : i - c + j1]) / w.sum()
    return out


def rate_of_rise(x, half_step):
    """Symmetric difference x[i + k] - x[i - k] with edge replication.

    Out-of-range indices are clamped to the first/last sample, which keeps
    the output flat (zero) at the array edges for locally constant input.

    Args:
        x: 1-D float array.
        half_step: k, in samples; must be >= 1.

    Returns:
        Array of the same length as x.
    """
    x = _as_f64(x)
    k = int(half_step)
    if k < 1:
        raise ValueError("half_step must be >= 1")
    if x.size == 0:
        return x.copy()
    pad = np.concatenate((np.full(k, x[0]), x, np.full(k, x[-1])))
    return pad[2 * k :] - pad[: pad.size - 2 * k]


def peak_pick(x, threshold):
    """Collapse supra-threshold runs of x to single peak frames.

    Each maximal run of consecutive samples with x >= threshold yields one
    peak at its maximum; when the maximum is attained at several samples of
    the run, the middle one of the tied samples is taken.

    Args:
        x: 1-D float array.
        threshold: minimum value for a sample to join a run.

    Returns:
        (indices, magnitudes): int64 and float64 arrays, one entry per run,
        in increasing index order.
    """
    x = _as_f64(x)
    above = np.flatnonzero(x >= threshold)
    if above.size == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64)
    splits = np.flatnonzero(np.diff(above) > 1) + 1
    indices = []
    magnitudes = []
    for run in np.split(above, splits):
        vals = x[run]
        m = vals.max()
        tied = run[vals == m]
        indices.append(int(tied[tied.size // 2]))
        magnitudes.append(float(m))
    return np.asarray(indices, dtype=np.int64), np.asarray(magnitudes, dtype=np.float64)
