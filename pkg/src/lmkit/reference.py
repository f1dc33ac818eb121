"""Rule-based reference landmarks from phoneme alignments.

Landmark references are derived from segment boundaries: voiced fricatives
carry v+/v- at their edges, fricatives f+/f-, nasals and [l] s+/s-, and
maximal runs of voiced phones carry g+/g-.  Stops and affricates carry
b+/b- placed at the strongest energy swing inside the segment when band
contours are available, else at the segment boundaries.  TIMIT closure
symbols (bcl, dcl, ...) count as their release stop, and a closure
directly followed by its release is searched as one window.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import spectral
from .alignment import Alignment
from .detector import LandmarkEvent, LandmarkSequence
from .spectral import BandEnergyContours

logger = logging.getLogger(__name__)

TIMIT_VOWELS = frozenset(
    "iy ih eh ey ae aa aw ay ah ao oy ow uh uw ux er ax ix axr ax-h".split()
)

# TIMIT symbols that carry no landmark of their own and never join a voiced
# run: silences, epenthetic silence, glottal closure marks, semivowels and
# [h]-like phones (excluded from the voiced set by default), syllabic [l].
TIMIT_SILENCE = frozenset("h# pau epi sil".split())
TIMIT_NONLANDMARK = frozenset("w y r hh hv el".split())

CLOSURE_TO_STOP = {
    "bcl": "b",
    "dcl": "d",
    "gcl": "g",
    "pcl": "p",
    "tcl": "t",
    "kcl": "k",
}


@dataclass(frozen=True)
class PhoneClassTable:
    """Phoneme classes that drive the annotation rules.

    All lookups go through canonical labels (closures map to their stop).
    Override individual sets to change class membership, e.g. to treat
    semivowels as voiced.
    """

    voiced_fricatives: frozenset = frozenset({"z", "zh", "v", "dh"})
    fricatives: frozenset = frozenset({"s", "sh", "f", "th"})
    nasals_l: frozenset = frozenset({"m", "n", "ng", "em", "en", "eng", "nx", "l"})
    stops_affricates: frozenset = frozenset(
        {"b", "d", "g", "p", "t", "k", "dx", "q", "jh", "ch"}
    )
    vowels: frozenset = TIMIT_VOWELS
    voiced_stops: frozenset = frozenset({"b", "d", "g"})
    silence: frozenset = TIMIT_SILENCE
    other_known: frozenset = TIMIT_NONLANDMARK

    def canonical(self, label: str) -> str:
        return CLOSURE_TO_STOP.get(label, label)

    @property
    def voiced(self) -> frozenset:
        return self.vowels | self.voiced_fricatives | self.nasals_l | self.voiced_stops

    def is_known(self, label: str) -> bool:
        lab = self.canonical(label)
        return (
            lab in self.voiced
            or lab in self.fricatives
            or lab in self.stops_affricates
            or lab in self.silence
            or lab in self.other_known
        )


def default_table() -> PhoneClassTable:
    return PhoneClassTable()


def _warn_unknown(align: Alignment, table: PhoneClassTable):
    seen = set()
    for seg in align.segments:
        if not table.is_known(seg.label) and seg.label not in seen:
            seen.add(seg.label)
            logger.warning(
                "%s: unknown phoneme label %r carries no landmark",
                align.utterance_id,
                seg.label,
            )


def label_segmental(align: Alignment, table: PhoneClassTable | None = None) -> LandmarkSequence:
    """Segment-boundary landmarks: v for voiced fricatives, f for
    fricatives, s for nasals and [l]; onset at the segment start, offset at
    its end.  Unknown labels are skipped with a warning."""
    table = table or default_table()
    _warn_unknown(align, table)
    events = []
    for seg in align.segments:
        lab = table.canonical(seg.label)
        if lab in table.voiced_fricatives:
            kind = "v"
        elif lab in table.fricatives:
            kind = "f"
        elif lab in table.nasals_l:
            kind = "s"
        else:
            continue
        events.append(LandmarkEvent(kind, "+", seg.start_s, 0.0))
        events.append(LandmarkEvent(kind, "-", seg.end_s, 0.0))
    return LandmarkSequence(align.utterance_id, events)


# Gaps below this are floating-point artifacts of sample-index conversion,
# not real silences; they do not break a voiced run.
RUN_GAP_TOL_S = 0.001


def label_glottal(align: Alignment, table: PhoneClassTable | None = None) -> LandmarkSequence:
    """Voicing landmarks: g+ at the start and g- at the end of each maximal
    run of consecutive, time-contiguous voiced segments (vowels, voiced
    fricatives, nasals/[l], and the voiced stops b, d, g)."""
    table = table or default_table()
    runs = []
    cur = None
    for seg in align.segments:
        if table.canonical(seg.label) in table.voiced:
            if cur is not None and seg.start_s - cur[1] < RUN_GAP_TOL_S:
                cur = (cur[0], seg.end_s)
            else:
                if cur is not None:
                    runs.append(cur)
                cur = (seg.start_s, seg.end_s)
        elif cur is not None:
            runs.append(cur)
            cur = None
    if cur is not None:
        runs.append(cur)
    events = []
    for start, end in runs:
        events.append(LandmarkEvent("g", "+", start, 0.0))
        events.append(LandmarkEvent("g", "-", end, 0.0))
    return LandmarkSequence(align.utterance_id, events)


def _burst_windows(align: Alignment, table: PhoneClassTable):
    """Stop/affricate search windows; a closure merges with the release
    that immediately follows it (same stop, contiguous)."""
    windows = []  # [canonical, start_s, end_s, open_closure]
    for seg in align.segments:
        lab = table.canonical(seg.label)
        if lab not in table.stops_affricates:
            continue
        is_closure = seg.label in CLOSURE_TO_STOP
        if (
            windows
            and windows[-1][3]
            and not is_closure
            and lab == windows[-1][0]
            and seg.start_s - windows[-1][2] < RUN_GAP_TOL_S
        ):
            windows[-1][2] = seg.end_s
            windows[-1][3] = False
        else:
            windows.append([lab, seg.start_s, seg.end_s, is_closure])
    return [(w[1], w[2]) for w in windows]


def label_bursts(
    align: Alignment,
    table: PhoneClassTable | None = None,
    contours: BandEnergyContours | None = None,
    step_s: float = 0.026,
) -> LandmarkSequence:
    """Burst landmarks for stop/affricate segments.

    With fine-pass contours, b+ goes at the frame of maximal summed
    bands-2-6 rate of rise inside the window and b- at the maximal fall;
    without contours (or when the window covers no frame), b+/b- fall back
    to the window boundaries.
    """
    table = table or default_table()
    events = []
    summed_ror = None
    times = None
    if contours is not None:
        summed_ror = spectral.rate_of_rise(contours, step_s)[1:6].sum(axis=0)
        times = contours.grid.times()
    for start, end in _burst_windows(align, table):
        t_plus, t_minus = start, end
        if summed_ror is not None:
            inside = np.flatnonzero((times >= start) & (times < end))
            if inside.size:
                seg_ror = summed_ror[inside]
                t_plus = round(float(times[inside[np.argmax(seg_ror)]]), 6)
                t_minus = round(float(times[inside[np.argmin(seg_ror)]]), 6)
        events.append(LandmarkEvent("b", "+", t_plus, 0.0))
        events.append(LandmarkEvent("b", "-", t_minus, 0.0))
    return LandmarkSequence(align.utterance_id, events)


def label_reference(
    align: Alignment,
    table: PhoneClassTable | None = None,
    contours: BandEnergyContours | None = None,
    burst_step_s: float = 0.026,
) -> LandmarkSequence:
    """All reference landmarks for an alignment, sorted by time.

    Union of the segmental (v/f/s), glottal (g), and burst (b) rules; a
    voiced fricative therefore carries both v and g landmarks, and a
    voiced stop both g and b.
    """
    table = table or default_table()
    events = []
    events.extend(label_segmental(align, table).events)
    events.extend(label_glottal(align, table).events)
    events.extend(label_bursts(align, table, contours, burst_step_s).events)
    return LandmarkSequence(align.utterance_id, events)
