"""Two-pass landmark detection on six-band energy contours.

Landmarks are abrupt-change events with a type and a polarity:

* g: vocal-fold vibration onset (+) / offset (-), from band-1 peaks.
* b/s: broadband energy onset/offset in obstruent regions, from a vote of
  at least three of bands 2-6 moving together by 6 dB or more; labeled s
  inside a voiced segment and b outside.
* f/v: frication onset/offset, from all of bands 4-6 moving by 6 dB or
  more while bands 2 and 3 move the opposite way; labeled v inside a
  voiced segment and f outside.

Every event must appear in both a coarse pass (20 ms smoothing, 8 dB
threshold) and a fine pass (10 ms smoothing, 5 dB threshold); the fine
pass supplies the event time.  Voiced segments are intervals between a +g
and the next -g.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernels, spectral
from .audio import SampledSignal
from .spectral import BandEnergyContours, BandSpec

logger = logging.getLogger(__name__)

KINDS = ("g", "b", "s", "f", "v")
_KIND_RANK = {k: i for i, k in enumerate(KINDS)}
POLARITIES = ("+", "-")


def event_sort_key(ev):
    # ties: canonical kind order, then offset before onset (a segment's end
    # precedes the next segment's start when they share a boundary time)
    return (ev.time_s, _KIND_RANK[ev.kind], 0 if ev.polarity == "-" else 1)


@dataclass(frozen=True)
class LandmarkEvent:
    """One detected landmark: kind, polarity, time, and peak salience."""

    kind: str
    polarity: str
    time_s: float
    salience_db: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown landmark kind {self.kind!r}")
        if self.polarity not in POLARITIES:
            raise ValueError(f"polarity must be '+' or '-', got {self.polarity!r}")
        if self.time_s < 0:
            raise ValueError("time_s must be >= 0")

    @property
    def label(self) -> str:
        return self.kind + self.polarity


@dataclass
class LandmarkSequence:
    """Events of one utterance, sorted by (time, kind rank g<b<s<f<v)."""

    utterance_id: str
    events: list[LandmarkEvent] = field(default_factory=list)

    def __post_init__(self):
        self.events = sorted(self.events, key=event_sort_key)

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def kinds(self) -> list[str]:
        return [ev.kind for ev in self.events]

    def labels(self) -> list[str]:
        return [ev.label for ev in self.events]


@dataclass(frozen=True)
class DetectorConfig:
    """Tunable parameters of the six-band two-pass detector.

    The defaults implement the standard recipe: 20 ms coarse smoothing with
    an 8 dB peak threshold, 10 ms fine smoothing with a 5 dB threshold (the
    permissive end of the usual 5-8 dB range, so the coarse pass is the
    binding gate), and 6 dB band-vote moves.
    """

    sample_rate_hz: int = 16000
    band_spec: BandSpec = field(default_factory=BandSpec)
    window_s: float = spectral.DEFAULT_WINDOW_S
    hop_s: float = spectral.DEFAULT_HOP_S
    nfft: int = spectral.DEFAULT_NFFT
    energy_floor: float = spectral.DEFAULT_ENERGY_FLOOR
    smoothing: str = "basic"  # "basic" or "advanced"
    coarse_span_s: float = 0.020
    fine_span_s: float = 0.010
    coarse_step_s: float = 0.050
    fine_step_s: float = 0.026
    coarse_threshold_db: float = 8.0
    fine_threshold_db: float = 5.0
    band_vote_min: int = 3
    frication_delta_db: float = 6.0
    low_band_delta_db: float = 0.0
    align_tol_s: float = 0.015
    simultaneity_tol_s: float = 0.020
    min_gap_s: float = 0.005

    def __post_init__(self):
        if self.fine_threshold_db > self.coarse_threshold_db:
            raise ValueError("fine_threshold_db must be <= coarse_threshold_db")
        if not 1 <= self.band_vote_min <= 5:
            raise ValueError("band_vote_min must be in [1, 5]")
        if self.smoothing not in ("basic", "advanced"):
            raise ValueError(f"smoothing must be 'basic' or 'advanced', got {self.smoothing!r}")
        if self.coarse_threshold_db <= 0 or self.fine_threshold_db <= 0:
            raise ValueError("peak thresholds must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["band_spec"] = [list(b) for b in self.band_spec.bands]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DetectorConfig":
        d = dict(d)
        if "band_spec" in d and not isinstance(d["band_spec"], BandSpec):
            d["band_spec"] = BandSpec(tuple(tuple(b) for b in d["band_spec"]))
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown detector option(s): {sorted(unknown)}")
        return cls(**d)


@dataclass
class VoicingSegmentation:
    """Disjoint voiced intervals, each from one (+g, -g) pair.

    ``events`` holds the g events that survived pairing, in alternating
    +,-,+,- order starting with +; a trailing unpaired +g contributes an
    interval that closes at the utterance end without a -g event.
    """

    voiced_intervals: list[tuple[float, float]] = field(default_factory=list)
    events: list[LandmarkEvent] = field(default_factory=list)

    def is_voiced(self, t: float) -> bool:
        return any(lo <= t < hi for lo, hi in self.voiced_intervals)


def detect_peaks(ror: np.ndarray, threshold_db: float, sign: str = "rise"):
    """Per-band peak picking on a rate-of-rise matrix.

    Runs of consecutive frames at or above the threshold collapse to the
    single maximal frame.  For sign="fall" the negated matrix is scanned,
    so magnitudes are positive either way.

    Args:
        ror: (n_bands, n_frames) rate-of-rise matrix in dB.
        threshold_db: positive peak threshold.
        sign: "rise" or "fall".

    Returns:
        One list per band of (frame_index, magnitude_db) tuples.
    """
    if threshold_db <= 0:
        raise ValueError("threshold_db must be positive")
    if sign not in ("rise", "fall"):
        raise ValueError(f"sign must be 'rise' or 'fall', got {sign!r}")
    signed = ror if sign == "rise" else -ror
    out = []
    for row in signed:
        idx, mag = kernels.peak_pick(np.ascontiguousarray(row), threshold_db)
        out.append(list(zip(idx.tolist(), mag.tolist())))
    return out


def two_pass_match(coarse_peaks, fine_peaks, align_tol_s: float, hop_s: float):
    """Confirm coarse peaks against fine peaks and adopt the fine times.

    A coarse peak survives iff at least one fine peak lies within
    align_tol_s; pairs are matched greedily by increasing time distance,
    each fine peak used at most once.  The refined event keeps the fine
    peak's frame (the fine pass localizes) and the coarse peak's magnitude
    (the coarse pass gates).

    Args:
        coarse_peaks / fine_peaks: lists of (frame, magnitude), sorted.
        align_tol_s: matching tolerance in seconds.
        hop_s: frame hop, to convert the tolerance to frames.

    Returns:
        List of (fine_frame, coarse_magnitude), sorted by frame.
    """
    tol_frames = align_tol_s / hop_s
    pairs = []
    for ci, (cf, _cm) in enumerate(coarse_peaks):
        for fi, (ff, _fm) in enumerate(fine_peaks):
            d = abs(cf - ff)
            if d <= tol_frames:
                pairs.append((d, ci, fi))
    pairs.sort()
    used_c, used_f = set(), set()
    out = []
    for d, ci, fi in pairs:
        if ci in used_c or fi in used_f:
            continue
        used_c.add(ci)
        used_f.add(fi)
        out.append((fine_peaks[fi][0], coarse_peaks[ci][1]))
    out.sort()
    return out


def _dedupe(events, min_gap_s):
    """Collapse events of one (kind, polarity) closer than min_gap_s,
    keeping the higher salience (earlier on ties)."""
    by_group = {}
    for ev in sorted(events, key=event_sort_key):
        by_group.setdefault((ev.kind, ev.polarity), []).append(ev)
    out = []
    for group in by_group.values():
        kept = []
        for ev in group:
            if kept and ev.time_s - kept[-1].time_s < min_gap_s:
                if ev.salience_db > kept[-1].salience_db:
                    kept[-1] = ev
            else:
                kept.append(ev)
        out.extend(kept)
    return sorted(out, key=event_sort_key)


def _refined_band_peaks(ror_coarse, ror_fine, band, sign, coarse_th, fine_th, cfg):
    cp = detect_peaks(ror_coarse[band : band + 1], coarse_th, sign)[0]
    fp = detect_peaks(ror_fine[band : band + 1], fine_th, sign)[0]
    return two_pass_match(cp, fp, cfg.align_tol_s, cfg.hop_s)


def detect_g(
    coarse: BandEnergyContours, fine: BandEnergyContours, cfg: DetectorConfig
):
    """Detect voicing onset/offset candidates from band-1 peaks.

    Band-1 rise peaks present in both passes become +g, fall peaks -g.
    The returned events are deduplicated but not yet paired; run them
    through pair_voicing to enforce the alternating +/- structure.

    Returns:
        List of g LandmarkEvents sorted by time.
    """
    rc = spectral.rate_of_rise(coarse, cfg.coarse_step_s)
    rf = spectral.rate_of_rise(fine, cfg.fine_step_s)
    events = []
    for sign, pol in (("rise", "+"), ("fall", "-")):
        for frame, mag in _refined_band_peaks(
            rc, rf, 0, sign, cfg.coarse_threshold_db, cfg.fine_threshold_db, cfg
        ):
            events.append(
                LandmarkEvent("g", pol, round(fine.grid.frame_time(frame), 6), mag)
            )
    return _dedupe(events, cfg.min_gap_s)


def pair_voicing(g_events, utterance_end_s: float) -> VoicingSegmentation:
    """Pair g events left to right into disjoint voiced intervals.

    Runs of same-polarity events collapse to their highest-salience member
    first; then a -g before any +g is dropped, and a trailing unmatched +g
    closes its interval at the utterance end (without emitting a -g).
    """
    collapsed = []
    for ev in sorted(g_events, key=event_sort_key):
        if collapsed and collapsed[-1].polarity == ev.polarity:
            if ev.salience_db > collapsed[-1].salience_db:
                collapsed[-1] = ev
        else:
            collapsed.append(ev)
    seg = VoicingSegmentation()
    pending = None
    for ev in collapsed:
        if ev.polarity == "+":
            pending = ev
        elif pending is not None:
            seg.voiced_intervals.append((pending.time_s, ev.time_s))
            seg.events.extend([pending, ev])
            pending = None
        # else: leading -g, dropped
    if pending is not None:
        seg.voiced_intervals.append((pending.time_s, utterance_end_s))
        seg.events.append(pending)
    return seg


def _cluster_votes(band_events, vote_min, simul_frames):
    """Group per-band refined peaks into simultaneous candidates.

    band_events: {band_index: [(frame, magnitude), ...]}.  A candidate is a
    set of peaks, at most one per band, all within simul_frames of their
    median frame, covering at least vote_min bands.  Greedy left-to-right:
    each unused peak seeds a group that pulls the nearest unused peak of
    every other band, members outside the median window are discarded, and
    accepted members are consumed.

    Yields (median_frame, members) with members = [(frame, band, mag), ...].
    """
    pool = sorted(
        (frame, band, mag)
        for band, peaks in band_events.items()
        for frame, mag in peaks
    )
    used = [False] * len(pool)
    results = []
    for i, (f0, b0, _m0) in enumerate(pool):
        if used[i]:
            continue
        group = {b0: i}
        for j, (f, b, _m) in enumerate(pool):
            if used[j] or j == i:
                continue
            if abs(f - f0) <= simul_frames:
                if b not in group or abs(f - f0) < abs(pool[group[b]][0] - f0):
                    group[b] = j
        member_ids = sorted(group.values())
        median = float(np.median([pool[j][0] for j in member_ids]))
        member_ids = [j for j in member_ids if abs(pool[j][0] - median) <= simul_frames]
        if len(member_ids) < vote_min:
            continue
        median = float(np.median([pool[j][0] for j in member_ids]))
        for j in member_ids:
            used[j] = True
        results.append((median, [pool[j] for j in member_ids]))
    return results


def detect_bs(
    coarse: BandEnergyContours,
    fine: BandEnergyContours,
    voicing: VoicingSegmentation,
    cfg: DetectorConfig,
):
    """Detect burst (b) and sonorant (s) landmarks from the band vote.

    A candidate needs at least band_vote_min of bands 2-6 showing
    simultaneous moves of frication_delta_db or more, in the same
    direction, confirmed per band across both passes.  Rising candidates
    get polarity +, falling ones -; candidates inside a voiced interval
    are s, outside b.  The event time is the member fine-pass peak time
    nearest the group median; salience is the strongest member magnitude.
    """
    rc = spectral.rate_of_rise(coarse, cfg.coarse_step_s)
    rf = spectral.rate_of_rise(fine, cfg.fine_step_s)
    coarse_th = max(cfg.coarse_threshold_db, cfg.frication_delta_db)
    fine_th = max(cfg.fine_threshold_db, cfg.frication_delta_db)
    simul_frames = cfg.simultaneity_tol_s / cfg.hop_s
    events = []
    for sign, pol in (("rise", "+"), ("fall", "-")):
        band_events = {
            band: _refined_band_peaks(rc, rf, band, sign, coarse_th, fine_th, cfg)
            for band in range(1, 6)
        }
        for median, members in _cluster_votes(band_events, cfg.band_vote_min, simul_frames):
            frame = min(members, key=lambda m: (abs(m[0] - median), m[0]))[0]
            t = round(fine.grid.frame_time(frame), 6)
            kind = "s" if voicing.is_voiced(t) else "b"
            salience = max(m[2] for m in members)
            events.append(LandmarkEvent(kind, pol, t, salience))
    return _dedupe(events, cfg.min_gap_s)


def detect_fv(
    coarse: BandEnergyContours,
    fine: BandEnergyContours,
    voicing: VoicingSegmentation,
    cfg: DetectorConfig,
):
    """Detect frication (f) and voiced frication (v) landmarks.

    Onset (+): all of bands 4, 5, 6 rise by frication_delta_db or more
    (confirmed across both passes, simultaneous around their median) while
    bands 2 and 3 both fall at the candidate frame in both passes; offset
    (-) mirrors it.  Candidates in voiced intervals are v, otherwise f.
    The low-band opposition has no minimum magnitude by default
    (low_band_delta_db raises it).  Salience is the weakest high-band
    magnitude, the binding one.
    """
    rc = spectral.rate_of_rise(coarse, cfg.coarse_step_s)
    rf = spectral.rate_of_rise(fine, cfg.fine_step_s)
    coarse_th = max(cfg.coarse_threshold_db, cfg.frication_delta_db)
    fine_th = max(cfg.fine_threshold_db, cfg.frication_delta_db)
    simul_frames = cfg.simultaneity_tol_s / cfg.hop_s
    events = []
    for sign, pol, opp in (("rise", "+", -1.0), ("fall", "-", 1.0)):
        high = {
            band: _refined_band_peaks(rc, rf, band, sign, coarse_th, fine_th, cfg)
            for band in (3, 4, 5)
        }
        if not all(high.values()):
            continue
        for median, members in _cluster_votes(high, 3, simul_frames):
            if {m[1] for m in members} != {3, 4, 5}:
                continue
            frame = min(members, key=lambda m: (abs(m[0] - median), m[0]))[0]
            # bands 2 and 3 must move the opposite way at the candidate
            # frame, in both passes
            ok = True
            for row in (rc, rf):
                for band in (1, 2):
                    if opp * row[band, frame] <= cfg.low_band_delta_db:
                        ok = False
            if not ok:
                continue
            t = round(fine.grid.frame_time(frame), 6)
            kind = "v" if voicing.is_voiced(t) else "f"
            salience = min(m[2] for m in members)
            events.append(LandmarkEvent(kind, pol, t, salience))
    return _dedupe(events, cfg.min_gap_s)


def suppress_vote_conflicts(bs_events, fv_events, window_s: float):
    """Drop b/s events that coincide with an f/v event of the same polarity.

    A transition matching the frication template usually also carries the
    plain band vote; the more specific frication reading wins.
    """
    out = []
    for ev in bs_events:
        clash = any(
            fv.polarity == ev.polarity and abs(fv.time_s - ev.time_s) <= window_s
            for fv in fv_events
        )
        if not clash:
            out.append(ev)
    return out


def compute_contours(sig: SampledSignal, cfg: DetectorConfig):
    """Raw, coarse, and fine contours for a signal under a config.

    Returns:
        (raw, coarse, fine) BandEnergyContours; coarse/fine use the
        configured smoothing method and spans.
    """
    raw = spectral.band_energies(
        sig,
        spec=cfg.band_spec,
        window_s=cfg.window_s,
        hop_s=cfg.hop_s,
        nfft=cfg.nfft,
        floor=cfg.energy_floor,
    )
    if cfg.smoothing == "basic":
        coarse = spectral.smooth_basic(raw, cfg.coarse_span_s, pass_name="coarse")
        fine = spectral.smooth_basic(raw, cfg.fine_span_s, pass_name="fine")
    else:
        coarse = spectral.smooth_advanced(raw, cfg.coarse_span_s, pass_name="coarse")
        fine = spectral.smooth_advanced(raw, cfg.fine_span_s, pass_name="fine")
    return raw, coarse, fine


def detect_all(
    sig: SampledSignal, cfg: DetectorConfig | None = None, utterance_id: str = ""
) -> LandmarkSequence:
    """Run the full detection pipeline on one utterance.

    Composition: band energies -> coarse/fine smoothing -> g detection and
    voicing pairing -> f/v and b/s detection (frication template wins a
    conflict) -> merged sequence sorted by time.  Deterministic for a fixed
    signal and config.

    Raises:
        ValueError: signal not at the configured sample rate, or shorter
            than one analysis window.
    """
    cfg = cfg or DetectorConfig()
    if sig.sample_rate_hz != cfg.sample_rate_hz:
        raise ValueError(
            f"signal at {sig.sample_rate_hz} Hz; detector expects "
            f"{cfg.sample_rate_hz} Hz (resample on ingest)"
        )
    _raw, coarse, fine = compute_contours(sig, cfg)
    g_events = detect_g(coarse, fine, cfg)
    voicing = pair_voicing(g_events, sig.duration_s)
    fv = detect_fv(coarse, fine, voicing, cfg)
    bs = detect_bs(coarse, fine, voicing, cfg)
    bs = suppress_vote_conflicts(bs, fv, cfg.simultaneity_tol_s)
    return LandmarkSequence(utterance_id, voicing.events + fv + bs)
