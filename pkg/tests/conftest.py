import numpy as np
import pytest

from lmkit.spectral import BandEnergyContours, FrameGrid


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def contours_from_matrix(matrix, hop_s=0.001, window_s=0.008, pass_name="coarse"):
    """Wrap a (6, n) dB matrix as BandEnergyContours on a standard grid."""
    matrix = np.asarray(matrix, dtype=np.float64)
    grid = FrameGrid(
        hop_s=hop_s,
        window_s=window_s,
        n_frames=matrix.shape[1],
        origin_s=window_s / 2,
    )
    return BandEnergyContours(grid, matrix, smoothing="basic", pass_name=pass_name)


def step_matrix(n_frames, step_frame, heights_db, base_db=-60.0):
    """(6, n) matrix stepping from base_db by heights_db[band] at step_frame."""
    m = np.full((6, n_frames), base_db)
    for band, h in enumerate(heights_db):
        m[band, step_frame:] += h
    return m
