"""Synthetic utterances with planted landmark transitions.

These generators build signals whose landmark times are known by
construction, for detector validation and benchmarking without a speech
corpus.  Three band-isolated sources are gated on and off over a constant
multitone pedestal:

* a "voiced" source: partials at 120/240/360 Hz (band 1 only), so its
  gates plant g landmarks;
* a "mid" tone: partials at 1000/1350/1550 Hz (bands 2-3 only);
* "high" noise: 2.45-7.75 kHz (bands 4-6 only), so swapping mid for high
  plants f or v landmarks;
* "burst" noise: 0.85-7.75 kHz (bands 2-6), so gating it plants b or s
  landmarks depending on voicing.

The pedestal (one steady low tone per band) pins every band's silence
level deterministically, keeping log-energy contours quiet between the
planted transitions.  Gates use raised-cosine ramps centered on the
nominal transition time to avoid broadband edge splash.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import SampledSignal

PEDESTAL_HZ = (200.0, 1100.0, 1700.0, 2700.0, 4200.0, 6400.0)
PEDESTAL_AMP = 0.01

VOICED_PARTIALS = ((120.0, 1.0), (240.0, 0.5), (360.0, 0.25))
MID_PARTIALS = ((1000.0, 1.0), (1350.0, 0.8), (1550.0, 0.7))

ARCHETYPES = ("g", "b", "s", "f", "v")


@dataclass(frozen=True)
class PlantedLandmark:
    kind: str
    polarity: str
    time_s: float


def bandlimited_noise(n: int, lo_hz: float, hi_hz: float, fs: int, rng) -> np.ndarray:
    """Unit-RMS white noise brick-walled to [lo_hz, hi_hz]."""
    x = rng.standard_normal(n)
    spec = np.fft.rfft(x)
    f = np.fft.rfftfreq(n, 1.0 / fs)
    spec[(f < lo_hz) | (f > hi_hz)] = 0.0
    y = np.fft.irfft(spec, n)
    rms = np.sqrt(np.mean(y**2))
    return y / (rms + 1e-12)


def gate(n: int, on_s: float, off_s: float, fs: int, ramp_s: float = 0.02) -> np.ndarray:
    """0/1 envelope with raised-cosine ramps centered on on_s and off_s."""
    r = max(2, int(round(ramp_s * fs)))
    on = int(round(on_s * fs))
    off = int(round(off_s * fs))
    env = np.zeros(n)
    t = np.arange(n)
    env[(t >= on + r // 2) & (t < off - r // 2)] = 1.0
    rise = np.arange(max(0, on - r // 2), min(n, on + r // 2))
    env[rise] = 0.5 - 0.5 * np.cos(np.pi * (rise - (on - r // 2) + 0.5) / r)
    fall = np.arange(max(0, off - r // 2), min(n, off + r // 2))
    env[fall] = 0.5 + 0.5 * np.cos(np.pi * (fall - (off - r // 2) + 0.5) / r)
    return env


def _tones(partials, scale, n, fs, rng):
    t = np.arange(n) / fs
    x = np.zeros(n)
    for f, a in partials:
        x += a * np.sin(2 * np.pi * f * t + rng.uniform(0, 2 * np.pi))
    return scale * x


def make_planted_utterance(
    archetype: str, rng, sample_rate_hz: int = 16000, duration_s: float = 1.6
):
    """Build one utterance of the given archetype with jittered timings.

    Archetypes: "g" (voicing on/off), "b" (broadband burst in silence),
    "s" (burst inside a voiced stretch), "f" (mid tone swapped for high
    noise in silence), "v" (the same swap over a running voiced source).

    Returns:
        (SampledSignal, [PlantedLandmark ...]) with the planted events in
        time order.
    """
    if archetype not in ARCHETYPES:
        raise ValueError(f"unknown archetype {archetype!r}")
    fs = sample_rate_hz
    n = int(round(duration_s * fs))
    t = np.arange(n) / fs
    x = np.zeros(n)
    for f in PEDESTAL_HZ:
        x += PEDESTAL_AMP * np.sin(2 * np.pi * f * t + rng.uniform(0, 2 * np.pi))

    voiced = _tones(VOICED_PARTIALS, 0.35, n, fs, rng)
    mid = _tones(MID_PARTIALS, 0.25, n, fs, rng)
    high = 0.2 * bandlimited_noise(n, 2450.0, 7750.0, fs, rng)
    burst = 0.25 * bandlimited_noise(n, 850.0, 7750.0, fs, rng)

    def jit(lo=-0.05, hi=0.05):
        return rng.uniform(lo, hi)

    planted = []
    if archetype == "g":
        a, b = 0.4 + jit(), 1.1 + jit()
        x += voiced * gate(n, a, b, fs)
        planted = [("g", "+", a), ("g", "-", b)]
    elif archetype == "b":
        a, b = 0.5 + jit(), 0.9 + jit()
        x += burst * gate(n, a, b, fs)
        planted = [("b", "+", a), ("b", "-", b)]
    elif archetype == "s":
        va, vb = 0.25 + jit(-0.03, 0.03), 1.35 + jit(-0.03, 0.03)
        a, b = 0.6 + jit(-0.03, 0.03), 1.0 + jit(-0.03, 0.03)
        x += voiced * gate(n, va, vb, fs)
        x += burst * gate(n, a, b, fs)
        planted = [("g", "+", va), ("s", "+", a), ("s", "-", b), ("g", "-", vb)]
    elif archetype == "f":
        a, b = 0.7 + jit(-0.03, 0.03), 1.1 + jit(-0.03, 0.03)
        x += mid * gate(n, 0.3, a, fs)
        x += high * gate(n, a, b, fs)
        x += mid * gate(n, b, 1.4, fs)
        planted = [("f", "+", a), ("f", "-", b)]
    elif archetype == "v":
        va, vb = 0.25 + jit(-0.02, 0.02), 1.45 + jit(-0.02, 0.02)
        a, b = 0.7 + jit(-0.03, 0.03), 1.1 + jit(-0.03, 0.03)
        x += voiced * gate(n, va, vb, fs)
        x += mid * gate(n, 0.35, a, fs)
        x += high * gate(n, a, b, fs)
        x += mid * gate(n, b, 1.4, fs)
        planted = [("g", "+", va), ("v", "+", a), ("v", "-", b), ("g", "-", vb)]
    # keep the mix inside full scale; a uniform gain does not move any
    # landmark (thresholds are dB differences)
    peak = np.max(np.abs(x))
    if peak > 0.95:
        x *= 0.95 / peak
    sig = SampledSignal(x, fs)
    return sig, [PlantedLandmark(k, p, tt) for k, p, tt in planted]


def planted_suite(n_utterances: int, seed: int = 0, sample_rate_hz: int = 16000):
    """A reproducible list of (utt_id, SampledSignal, planted) triples
    cycling through the archetypes."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n_utterances):
        arche = ARCHETYPES[i % len(ARCHETYPES)]
        sig, planted = make_planted_utterance(arche, rng, sample_rate_hz)
        out.append((f"synth_{arche}_{i:03d}", sig, planted))
    return out


def score_recovery(planted, detected_events, tol_s: float = 0.03):
    """Match detected events to planted ones by kind, polarity, and time.

    Greedy nearest-first within tol_s, one-to-one.  Returns
    (n_hit, n_planted, n_spurious); spurious counts detected events left
    unmatched.
    """
    pairs = []
    for i, p in enumerate(planted):
        for j, ev in enumerate(detected_events):
            if ev.kind == p.kind and ev.polarity == p.polarity:
                dt = abs(ev.time_s - p.time_s)
                if dt <= tol_s:
                    pairs.append((dt, i, j))
    pairs.sort()
    used_p, used_d = set(), set()
    for dt, i, j in pairs:
        if i in used_p or j in used_d:
            continue
        used_p.add(i)
        used_d.add(j)
    return len(used_p), len(planted), len(detected_events) - len(used_d)
