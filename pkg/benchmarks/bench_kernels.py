#!/usr/bin/env python3
"""Benchmark the compiled contour kernels against the NumPy fallback.

Times each kernel on a realistic contour load (a 3 s utterance is about
3000 frames per band at the 1 ms hop; smoothing, differentiation, and
peak picking each run 6 bands x 2 passes per utterance) and then the full
detection pipeline with each backend swapped in.

Usage:
    python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import contextlib
import time

import numpy as np

from lmkit import kernels, spectral
from lmkit.detector import DetectorConfig, compute_contours, detect_all
from lmkit.kernels import pykernels
from lmkit.synth import make_planted_utterance

KERNEL_FUNCS = ("moving_average", "kernel_smooth", "rate_of_rise", "peak_pick")

N_CALLS_PER_UTT = 12  # 6 bands x 2 passes


def backends():
    out = [("numpy", pykernels)]
    if kernels.BACKEND == "cython":
        from lmkit.kernels import _ckernels

        out.insert(0, ("cython", _ckernels))
    return out


@contextlib.contextmanager
def use_backend(impl):
    saved = {name: getattr(kernels, name) for name in KERNEL_FUNCS}
    for name in KERNEL_FUNCS:
        setattr(kernels, name, getattr(impl, name))
    try:
        yield
    finally:
        for name, fn in saved.items():
            setattr(kernels, name, fn)


def time_call(fn, repeats):
    fn()  # warm up
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def bench_kernels(repeats):
    # real contour data from a planted utterance, tiled out to ~3 s
    sig, _ = make_planted_utterance("v", np.random.default_rng(0))
    raw, _coarse, fine = compute_contours(sig, DetectorConfig())
    contour = np.tile(raw.energy_db[2], 2)
    ror = np.tile(spectral.rate_of_rise(fine, 0.026)[2], 2)
    n_frames = contour.size
    hann = np.hanning(21)
    cases = {
        "moving_average(21)": lambda impl: impl.moving_average(contour, 21),
        "kernel_smooth(hann21)": lambda impl: impl.kernel_smooth(contour, hann),
        "rate_of_rise(k=25)": lambda impl: impl.rate_of_rise(contour, 25),
        "peak_pick(6 dB)": lambda impl: impl.peak_pick(ror, 6.0),
    }
    rows = []
    for label, call in cases.items():
        times = {}
        for name, impl in backends():
            per_call = time_call(lambda: call(impl), repeats)
            times[name] = per_call * N_CALLS_PER_UTT * 1e3  # ms per utterance
        rows.append((label, times))
    return n_frames, rows


def bench_pipeline(repeats):
    sig, _ = make_planted_utterance("v", np.random.default_rng(1))
    cfg = DetectorConfig()
    times = {}
    for name, impl in backends():
        with use_backend(impl):
            times[name] = time_call(lambda: detect_all(sig, cfg), max(1, repeats // 10)) * 1e3
    return times


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()

    names = [n for n, _ in backends()]
    print(f"active backend: {kernels.BACKEND}")
    if "cython" not in names:
        print("compiled extension not built; timing the NumPy fallback only\n")

    n_frames, rows = bench_kernels(args.repeats)
    print(f"\nper-kernel cost for one {n_frames}-frame utterance "
          f"({N_CALLS_PER_UTT} band-pass calls), ms:")
    header = f"{'kernel':24s}" + "".join(f"{n:>12s}" for n in names)
    if len(names) == 2:
        header += f"{'speedup':>10s}"
    print(header)
    for label, times in rows:
        row = f"{label:24s}" + "".join(f"{times[n]:12.3f}" for n in names)
        if len(names) == 2:
            row += f"{times['numpy'] / times['cython']:9.1f}x"
        print(row)

    print("\nfull detect_all on a 1.6 s utterance, ms:")
    times = bench_pipeline(args.repeats)
    row = f"{'detect_all':24s}" + "".join(f"{times[n]:12.1f}" for n in names)
    if len(names) == 2:
        row += f"{times['numpy'] / times['cython']:9.1f}x"
    print(row)


if __name__ == "__main__":
    main()
