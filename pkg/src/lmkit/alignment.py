"""Phoneme alignment files in the TIMIT .PHN convention.

Each line is ``start_sample end_sample label``; times are converted to
seconds on read.  Segments must be sorted and non-overlapping, but gaps
are allowed (silence is usually an explicit segment such as ``h#``).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field


@dataclass(frozen=True)
class PhoneSegment:
    label: str
    start_s: float
    end_s: float

    def __post_init__(self):
        if self.start_s < 0:
            raise ValueError(f"segment {self.label!r}: negative start time")
        if self.end_s <= self.start_s:
            raise ValueError(
                f"segment {self.label!r}: end {self.end_s} <= start {self.start_s}"
            )

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


@dataclass
class Alignment:
    utterance_id: str
    segments: list[PhoneSegment] = field(default_factory=list)

    def __post_init__(self):
        prev_end = None
        for seg in self.segments:
            if prev_end is not None and seg.start_s < prev_end - 1e-9:
                raise ValueError(
                    f"{self.utterance_id}: segment {seg.label!r} at {seg.start_s} "
                    f"overlaps previous segment ending at {prev_end}"
                )
            prev_end = seg.end_s


def read_phn(path, sample_rate_hz: int) -> Alignment:
    """Parse a .PHN file into an Alignment (times in seconds).

    Args:
        path: alignment file path.
        sample_rate_hz: rate used to convert sample indices to seconds.

    Raises:
        ValueError: malformed line, end <= start, or overlapping segments;
            the message carries the file name and line number.
    """
    if sample_rate_hz <= 0:
        raise ValueError("sample_rate_hz must be positive")
    utt_id = os.path.splitext(os.path.basename(str(path)))[0]
    segments = []
    with open(path, "r", encoding="ascii") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'start end label'")
            try:
                start = int(parts[0])
                end = int(parts[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: sample indices must be integers")
            if start < 0:
                raise ValueError(f"{path}:{lineno}: negative start sample")
            if end <= start:
                raise ValueError(f"{path}:{lineno}: end sample {end} <= start {start}")
            segments.append(
                PhoneSegment(parts[2], start / sample_rate_hz, end / sample_rate_hz)
            )
    try:
        return Alignment(utt_id, segments)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc


def write_phn(align: Alignment, path, sample_rate_hz: int) -> None:
    """Write an Alignment in .PHN format (seconds rounded to samples)."""
    if sample_rate_hz <= 0:
        raise ValueError("sample_rate_hz must be positive")
    with open(path, "w", encoding="ascii") as f:
        for seg in align.segments:
            start = int(round(seg.start_s * sample_rate_hz))
            end = int(round(seg.end_s * sample_rate_hz))
            f.write(f"{start} {end} {seg.label}\n")
