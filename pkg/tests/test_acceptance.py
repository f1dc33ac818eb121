"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with -s or look at captured stdout).

Criterion 2 needs a TIMIT-format corpus; point LMKIT_TIMIT at its root
(the directory holding TRAIN/ and TEST/ with RIFF-converted wav files) to
enable it, otherwise it is skipped.
"""

import os
import time

import numpy as np
import pytest

from lmkit.alignment import Alignment, PhoneSegment, read_phn, write_phn
from lmkit.audio import SampledSignal, read_wav, resample, write_wav
from lmkit.cli import main
from lmkit.detector import DetectorConfig, compute_contours, detect_all, pair_voicing
from lmkit.evaluate import EvalReport, LerOptions, distribution, ler
from lmkit.formats import (
    read_landmarks_csv,
    read_landmarks_json,
    read_landmarks_textgrid,
    write_landmarks_csv,
    write_landmarks_json,
    write_landmarks_textgrid,
)
from lmkit.manifest import scan_timit
from lmkit.reference import label_reference
from lmkit.spectral import band_energies, smooth_advanced, smooth_basic, span_to_frames
from lmkit.synth import make_planted_utterance, planted_suite, score_recovery

from test_evaluate import brute_force_distance, seq_from_tokens

PASS_TOL_S = 0.030
HOP_S = 0.001


def report(number, name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE criterion {number} ({name}): {status}  {detail}")
    assert ok, f"criterion {number} ({name}): {detail}"


def test_criterion_1_planted_landmark_suite():
    """50 constructed utterances; >=80% recovery within 30 ms, <=20%
    spurious, both smoothing methods, under 60 s."""
    t0 = time.perf_counter()
    suite = planted_suite(50, seed=20250810)
    details = []
    ok = True
    for method in ("basic", "advanced"):
        cfg = DetectorConfig(smoothing=method)
        hits = planted = spurious = 0
        for _utt, sig, expect in suite:
            seq = detect_all(sig, cfg)
            h, n, s = score_recovery(expect, seq.events, tol_s=PASS_TOL_S)
            hits += h
            planted += n
            spurious += s
        rate = hits / planted
        spur_rate = spurious / planted
        details.append(f"{method}: recovery {rate:.1%}, spurious {spur_rate:.1%}")
        ok = ok and rate >= 0.80 and spur_rate <= 0.20
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 60.0
    report(1, "planted landmark suite", ok, "; ".join(details) + f"; {elapsed:.1f}s")


def _detect_corpus(manifest, cfg):
    hyps, refs = {}, {}
    for entry in manifest:
        sig = resample(read_wav(entry.audio_path), cfg.sample_rate_hz)
        hyps[entry.utterance_id] = detect_all(sig, cfg, entry.utterance_id)
        align = read_phn(entry.alignment_path, cfg.sample_rate_hz)
        align.utterance_id = entry.utterance_id
        _raw, _coarse, fine = compute_contours(sig, cfg)
        refs[entry.utterance_id] = label_reference(align, contours=fine)
    return refs, hyps


def test_criterion_2_timit_corpus_check():
    """Pooled test-split LER in [45, 70] against rule-based references;
    g has the strictly largest share in both splits."""
    root = os.environ.get("LMKIT_TIMIT")
    if not root:
        print("ACCEPTANCE criterion 2 (TIMIT corpus check): SKIP  set LMKIT_TIMIT to run")
        pytest.skip("no TIMIT-format corpus supplied (LMKIT_TIMIT unset)")
    splits = scan_timit(root)
    assert "train" in splits and "test" in splits, "corpus must have TRAIN and TEST"
    cfg = DetectorConfig()
    ok = True
    details = []
    pooled = EvalReport()
    for split_name in ("train", "test"):
        refs, hyps = _detect_corpus(splits[split_name], cfg)
        dist = distribution(list(refs.values()))
        props = dist.proportions
        g_largest = all(props["g"] > v for k, v in props.items() if k != "g")
        ok = ok and g_largest
        details.append(f"{split_name}: g share {props['g']:.2%} largest={g_largest}")
        if split_name == "test":
            for utt in refs:
                pooled.add(ler(refs[utt], hyps[utt], LerOptions()))
            details.append(f"test LER {pooled.ler_percent:.2f}%")
            ok = ok and 45.0 <= pooled.ler_percent <= 70.0
    report(2, "TIMIT corpus check", ok, "; ".join(details))


def test_criterion_3_ler_oracle_equivalence():
    """S+D+I equals a brute-force edit-distance oracle on 1000 random
    pairs; ler(x, x) = 0 on 100 random strings."""
    rng = np.random.default_rng(11)
    kinds = list("gbsfv")

    def random_tokens():
        n = int(rng.integers(0, 9))
        return "".join(rng.choice(kinds, size=n))

    mismatches = 0
    for _ in range(1000):
        a, b = random_tokens(), random_tokens()
        rep = ler(seq_from_tokens(a), seq_from_tokens(b))
        total = rep.substitutions + rep.deletions + rep.insertions
        if total != brute_force_distance(a, b):
            mismatches += 1
    self_errors = 0
    for _ in range(100):
        a = random_tokens()
        rep = ler(seq_from_tokens(a), seq_from_tokens(a))
        if rep.substitutions + rep.deletions + rep.insertions != 0:
            self_errors += 1
    ok = mismatches == 0 and self_errors == 0
    report(
        3,
        "evaluator oracle equivalence",
        ok,
        f"1000 pairs, {mismatches} mismatches; 100 self-pairs, {self_errors} nonzero",
    )


# 20 hand-constructed alignments covering every annotation rule, with the
# hand-derived reference sequence (fallback burst placement, no contours).
HAND_CASES = [
    (
        [("h#", 0, 0.1), ("sh", 0.1, 0.3), ("iy", 0.3, 0.5), ("h#", 0.5, 0.6)],
        [("f+", 0.1), ("g+", 0.3), ("f-", 0.3), ("g-", 0.5)],
    ),
    ([("z", 0, 0.2)], [("g+", 0.0), ("v+", 0.0), ("g-", 0.2), ("v-", 0.2)]),
    (
        [("m", 0, 0.1), ("l", 0.1, 0.2)],
        [("g+", 0.0), ("s+", 0.0), ("s-", 0.1), ("s+", 0.1), ("g-", 0.2), ("s-", 0.2)],
    ),
    (
        [("iy", 0, 0.1), ("m", 0.1, 0.2), ("s", 0.2, 0.3)],
        [("g+", 0.0), ("s+", 0.1), ("g-", 0.2), ("s-", 0.2), ("f+", 0.2), ("f-", 0.3)],
    ),
    ([("s", 0, 0.1)], [("f+", 0.0), ("f-", 0.1)]),
    (
        [("iy", 0, 0.1), ("h#", 0.1, 0.2), ("iy", 0.2, 0.3)],
        [("g+", 0.0), ("g-", 0.1), ("g+", 0.2), ("g-", 0.3)],
    ),
    (
        [("h#", 0, 0.1), ("tcl", 0.1, 0.16), ("t", 0.16, 0.2), ("iy", 0.2, 0.3)],
        [("b+", 0.1), ("g+", 0.2), ("b-", 0.2), ("g-", 0.3)],
    ),
    (
        [("aa", 0, 0.1), ("dcl", 0.1, 0.15), ("d", 0.15, 0.18), ("ix", 0.18, 0.3)],
        [("g+", 0.0), ("b+", 0.1), ("b-", 0.18), ("g-", 0.3)],
    ),
    (
        [("aa", 0, 0.1), ("kcl", 0.1, 0.18), ("h#", 0.18, 0.25)],
        [("g+", 0.0), ("g-", 0.1), ("b+", 0.1), ("b-", 0.18)],
    ),
    (
        [("h#", 0, 0.1), ("jh", 0.1, 0.2), ("iy", 0.2, 0.35)],
        [("b+", 0.1), ("g+", 0.2), ("b-", 0.2), ("g-", 0.35)],
    ),
    ([("ch", 0, 0.12)], [("b+", 0.0), ("b-", 0.12)]),
    (
        [("aa", 0, 0.1), ("dx", 0.1, 0.13), ("aa", 0.13, 0.25)],
        [("g+", 0.0), ("g-", 0.1), ("b+", 0.1), ("g+", 0.13), ("b-", 0.13), ("g-", 0.25)],
    ),
    (
        [("iy", 0, 0.1), ("q", 0.1, 0.15), ("iy", 0.15, 0.3)],
        [("g+", 0.0), ("g-", 0.1), ("b+", 0.1), ("g+", 0.15), ("b-", 0.15), ("g-", 0.3)],
    ),
    ([("w", 0, 0.1), ("iy", 0.1, 0.2)], [("g+", 0.1), ("g-", 0.2)]),
    (
        [("hh", 0, 0.08), ("aa", 0.08, 0.2), ("hv", 0.2, 0.28), ("aa", 0.28, 0.4)],
        [("g+", 0.08), ("g-", 0.2), ("g+", 0.28), ("g-", 0.4)],
    ),
    (
        [("aa", 0, 0.1), ("z", 0.1, 0.2), ("iy", 0.2, 0.3)],
        [("g+", 0.0), ("v+", 0.1), ("v-", 0.2), ("g-", 0.3)],
    ),
    (
        [("aa", 0, 0.1), ("th", 0.1, 0.2), ("aa", 0.2, 0.3), ("f", 0.3, 0.4)],
        [("g+", 0.0), ("g-", 0.1), ("f+", 0.1), ("g+", 0.2), ("f-", 0.2), ("g-", 0.3),
         ("f+", 0.3), ("f-", 0.4)],
    ),
    (
        [("em", 0, 0.1), ("en", 0.1, 0.2), ("eng", 0.2, 0.3), ("nx", 0.3, 0.4)],
        [("g+", 0.0), ("s+", 0.0), ("s-", 0.1), ("s+", 0.1), ("s-", 0.2), ("s+", 0.2),
         ("s-", 0.3), ("s+", 0.3), ("g-", 0.4), ("s-", 0.4)],
    ),
    (
        [("iy", 0, 0.1), ("aa", 0.2, 0.3)],
        [("g+", 0.0), ("g-", 0.1), ("g+", 0.2), ("g-", 0.3)],
    ),
    (
        [("iy", 0, 0.1), ("zz", 0.1, 0.2), ("iy", 0.2, 0.3)],
        [("g+", 0.0), ("g-", 0.1), ("g+", 0.2), ("g-", 0.3)],
    ),
]


def test_criterion_4_reference_labeler_exactness():
    """label_reference equals the hand-derived sequence on 20 alignments."""
    assert len(HAND_CASES) == 20
    failures = []
    for i, (segs, expected) in enumerate(HAND_CASES):
        align = Alignment(f"case{i}", [PhoneSegment(l, a, b) for l, a, b in segs])
        seq = label_reference(align)
        got = [(e.label, e.time_s) for e in seq.events]
        if len(got) != len(expected) or any(
            g[0] != e[0] or abs(g[1] - e[1]) > 1e-6 for g, e in zip(got, expected)
        ):
            failures.append(f"case {i}: got {got}, expected {expected}")
    report(
        4,
        "reference labeler exactness",
        not failures,
        failures[0] if failures else "20/20 alignments exact",
    )


def _voicing_of(seq, duration):
    g_events = [e for e in seq.events if e.kind == "g"]
    return pair_voicing(g_events, duration)


def test_criterion_5_detector_invariants():
    """Amplitude invariance, shift covariance, g alternation, voicing
    placement, and threshold monotonicity over 25 randomized signals."""
    suite = planted_suite(25, seed=77)
    cfg = DetectorConfig()
    problems = []
    for utt, sig, _planted in suite:
        base = detect_all(sig, cfg)
        base_labels = [e.label for e in base.events]

        # amplitude-scaling invariance
        for a in (0.1, 0.5, 1.0):
            scaled = detect_all(SampledSignal(a * sig.samples, 16000), cfg)
            if [e.label for e in scaled.events] != base_labels:
                problems.append(f"{utt}: labels changed at scale {a}")
            elif any(
                abs(x.time_s - y.time_s) > HOP_S + 1e-9
                for x, y in zip(scaled.events, base.events)
            ):
                problems.append(f"{utt}: times moved at scale {a}")

        # time-shift covariance: prepend 100 ms of the background (the
        # pedestal tones are 10 Hz multiples, so the splice is seamless)
        shift = 1600
        shifted_sig = SampledSignal(
            np.concatenate([sig.samples[:shift], sig.samples]), 16000
        )
        shifted = detect_all(shifted_sig, cfg)
        if [e.label for e in shifted.events] != base_labels:
            problems.append(f"{utt}: labels changed under 100 ms shift")
        elif any(
            abs((x.time_s - y.time_s) - 0.1) > HOP_S + 1e-9
            for x, y in zip(shifted.events, base.events)
        ):
            problems.append(f"{utt}: shift not covariant")

        # g polarity alternation starting with +
        g_pols = [e.polarity for e in base.events if e.kind == "g"]
        if g_pols and (g_pols[0] != "+" or any(a == b for a, b in zip(g_pols, g_pols[1:]))):
            problems.append(f"{utt}: g polarity not alternating: {g_pols}")

        # s/v inside voiced intervals, b/f outside
        voicing = _voicing_of(base, sig.duration_s)
        for ev in base.events:
            if ev.kind in ("s", "v") and not voicing.is_voiced(ev.time_s):
                problems.append(f"{utt}: {ev.label}@{ev.time_s} outside voicing")
            if ev.kind in ("b", "f") and voicing.is_voiced(ev.time_s):
                problems.append(f"{utt}: {ev.label}@{ev.time_s} inside voicing")

        # raising the coarse threshold never adds events of any kind
        # (checked below the voicing-extinction point, where the gating
        # intervals themselves stay put)
        prev = None
        for th in (8.0, 10.0, 12.0):
            seq = detect_all(sig, DetectorConfig(coarse_threshold_db=th))
            counts = {}
            for ev in seq.events:
                counts[ev.kind] = counts.get(ev.kind, 0) + 1
            if prev is not None and any(
                counts.get(k, 0) > prev.get(k, 0) for k in "gbsfv"
            ):
                problems.append(f"{utt}: count rose at threshold {th}")
            prev = counts
    report(
        5,
        "detector invariant suite",
        not problems,
        problems[0] if problems else "25 signals, all invariants hold",
    )


def test_criterion_6_spectral_correctness():
    """Band-2 localization margin, dB scaling, and smoothing equivalence."""
    fs = 16000
    t = np.arange(fs) / fs
    sine = SampledSignal(0.5 * np.sin(2 * np.pi * 1000.0 * t), fs)
    c = band_energies(sine)
    interior = c.energy_db[:, 50:-50]
    margin = float((interior[1] - np.delete(interior, 1, axis=0).max(axis=0)).min())

    rng = np.random.default_rng(5)
    x = rng.uniform(-0.25, 0.25, size=fs // 2)
    c1 = band_energies(SampledSignal(x, fs))
    c2 = band_energies(SampledSignal(2.0 * x, fs))
    gain = c2.energy_db - c1.energy_db
    gain_err = float(np.max(np.abs(gain - 20.0 * np.log10(2.0))))

    raw = band_energies(SampledSignal(rng.uniform(-0.5, 0.5, size=fs // 2), fs))
    width = span_to_frames(0.02, raw.grid.hop_s)
    diff = float(
        np.max(
            np.abs(
                smooth_basic(raw, 0.02).energy_db
                - smooth_advanced(raw, 0.02, kernel=np.ones(width)).energy_db
            )
        )
    )
    ok = margin >= 20.0 and gain_err <= 0.1 and diff <= 1e-9
    report(
        6,
        "spectral correctness",
        ok,
        f"band-2 margin {margin:.1f} dB; 2x gain err {gain_err:.3f} dB; "
        f"basic-vs-uniform-advanced {diff:.2e}",
    )


def test_criterion_7_io_round_trips(tmp_path):
    """WAV within 1 LSB, .PHN sample-exact, landmark files reproduce the
    sequence (CSV/JSON bit-exact; TextGrid at its microsecond precision),
    and CLI reruns are byte-identical."""
    rng = np.random.default_rng(13)
    problems = []

    x = rng.uniform(-0.99, 0.99, size=4000)
    write_wav(tmp_path / "w.wav", SampledSignal(x, 16000), encoding="int16")
    back = read_wav(tmp_path / "w.wav")
    if np.max(np.abs(back.samples - x)) > 1.0 / 32768.0:
        problems.append("WAV round trip beyond 1 LSB")

    bounds = np.sort(rng.choice(80000, size=12, replace=False))
    segs = [
        PhoneSegment("aa", int(bounds[i]) / 16000, int(bounds[i + 1]) / 16000)
        for i in range(0, 10, 2)
    ]
    write_phn(Alignment("p", segs), tmp_path / "p.phn", 16000)
    back_align = read_phn(tmp_path / "p.phn", 16000)
    if [(s.start_s, s.end_s) for s in back_align.segments] != [
        (s.start_s, s.end_s) for s in segs
    ]:
        problems.append(".PHN round trip not sample-exact")

    sig, _ = make_planted_utterance("v", np.random.default_rng(3))
    seq = detect_all(sig, DetectorConfig(), utterance_id="rt")
    write_landmarks_csv(seq, tmp_path / "rt.csv")
    write_landmarks_json(seq, tmp_path / "rt.json")
    write_landmarks_textgrid(seq, tmp_path / "rt.TextGrid")
    (csv_back,) = read_landmarks_csv(tmp_path / "rt.csv")
    (json_back,) = read_landmarks_json(tmp_path / "rt.json")
    (tg_back,) = read_landmarks_textgrid(tmp_path / "rt.TextGrid", utterance_id="rt")
    if csv_back.events != seq.events:
        problems.append("CSV round trip not exact")
    if json_back.events != seq.events:
        problems.append("JSON round trip not exact")
    tg_ok = len(tg_back.events) == len(seq.events) and all(
        a.kind == b.kind and a.polarity == b.polarity and abs(a.time_s - b.time_s) <= 5e-7
        for a, b in zip(tg_back.events, seq.events)
    )
    if not tg_ok:
        problems.append("TextGrid round trip beyond microsecond precision")

    wav_dir = tmp_path / "wavs"
    wav_dir.mkdir()
    write_wav(wav_dir / "u1.wav", sig, encoding="float32")
    data = tmp_path / "data"
    data.mkdir()
    (data / "wav.scp").write_text(f"u1 {wav_dir / 'u1.wav'}\n")
    outs = []
    for run in ("r1", "r2"):
        out = tmp_path / run
        code = main(
            ["extract", str(data), "-o", str(out), "--format", "csv,json,textgrid"]
        )
        if code != 0:
            problems.append(f"extract rerun {run} failed")
        outs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    if outs and outs[0] != outs[-1]:
        problems.append("reruns not byte-identical")

    report(7, "I/O round trips", not problems, problems[0] if problems else "all round trips exact")
