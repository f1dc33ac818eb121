"""Audio ingestion: WAV decode/encode and sample-rate conversion.

Detection runs at a canonical 16 kHz; other rates are resampled on ingest.
Only RIFF PCM (8/16/32-bit int) and IEEE float WAV files are supported.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
import scipy.io.wavfile
import scipy.signal

CANONICAL_RATE_HZ = 16000


@dataclass
class SampledSignal:
    """Mono audio: float64 samples in [-1, 1] plus their sample rate."""

    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise ValueError("samples must be 1-D (mono)")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("samples must be finite")

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz


def _sniff_sphere(path):
    try:
        with open(path, "rb") as f:
            return f.read(8) == b"NIST_1A\n"
    except OSError:
        return False


def read_wav(path) -> SampledSignal:
    """Decode a WAV file to a mono SampledSignal.

    Multichannel input is averaged to mono.  Integer encodings are scaled
    to [-1, 1]; float data is taken as-is (and rescaled only if it exceeds
    full scale).  The signal is returned at the file's own rate; use
    resample() to convert.

    Raises:
        FileNotFoundError: path does not exist.
        ValueError: unsupported encoding or zero-length audio.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"no such audio file: {path}")
    if _sniff_sphere(path):
        raise ValueError(
            f"{path}: NIST SPHERE file, not RIFF WAV; convert it first "
            "(e.g. with sph2pipe)"
        )
    try:
        rate, data = scipy.io.wavfile.read(path)
    except Exception as exc:
        raise ValueError(f"{path}: cannot decode as WAV ({exc})") from exc
    if data.size == 0:
        raise ValueError(f"{path}: zero-length audio")
    if data.dtype == np.int16:
        x = data / 32768.0
    elif data.dtype == np.int32:
        x = data / 2147483648.0
    elif data.dtype == np.uint8:
        x = (data.astype(np.float64) - 128.0) / 128.0
    elif data.dtype in (np.float32, np.float64):
        x = data.astype(np.float64)
    else:
        raise ValueError(f"{path}: unsupported WAV sample format {data.dtype}")
    if x.ndim == 2:
        x = x.mean(axis=1)
    peak = np.max(np.abs(x)) if x.size else 0.0
    if peak > 1.0 + 1e-6:
        x = x / peak
    return SampledSignal(np.asarray(x, dtype=np.float64), int(rate))


def write_wav(path, sig: SampledSignal, encoding: str = "int16") -> None:
    """Write a SampledSignal as RIFF WAV ('int16' or 'float32')."""
    if encoding == "int16":
        data = np.clip(np.round(sig.samples * 32768.0), -32768, 32767).astype(np.int16)
    elif encoding == "float32":
        data = sig.samples.astype(np.float32)
    else:
        raise ValueError(f"unsupported encoding {encoding!r}")
    scipy.io.wavfile.write(path, sig.sample_rate_hz, data)


def resample(sig: SampledSignal, target_hz: int) -> SampledSignal:
    """Band-limited resampling to target_hz (polyphase, anti-aliased).

    Returns the input object unchanged when the rate already matches.
    Duration is preserved to within one sample period.
    """
    if target_hz <= 0:
        raise ValueError("target_hz must be positive")
    if target_hz == sig.sample_rate_hz:
        return sig
    g = math.gcd(sig.sample_rate_hz, target_hz)
    up = target_hz // g
    down = sig.sample_rate_hz // g
    # No renormalization here: resampling must stay linear, even though
    # filter ringing can overshoot full scale slightly near sharp edges.
    y = scipy.signal.resample_poly(sig.samples, up, down)
    return SampledSignal(y, target_hz)
