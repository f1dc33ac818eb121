"""Batch command-line front-end.

Subcommands:
    extract    detect landmarks for a manifest or a single WAV file
    label-ref  generate rule-based reference landmarks from alignments
    eval       score hypothesis landmarks against references
    stats      landmark kind distributions over a directory

Configuration comes from an optional YAML file (--config, or the
LMKIT_CONFIG environment variable) overridden by flags.  Exit codes:
0 success, 1 partial or total data failure, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import fnmatch
import json
import logging
import os
import sys
from dataclasses import dataclass, field

import yaml

from . import formats
from .alignment import read_phn
from .audio import read_wav, resample
from .detector import DetectorConfig, LandmarkSequence, compute_contours, detect_all
from .evaluate import EvalReport, LerOptions, TimingReport, distribution, ler, timing_match
from .manifest import DataManifest, ManifestEntry, read_manifest
from .reference import default_table, label_reference
from .spectral import write_contours_csv, write_contours_json

logger = logging.getLogger("lmkit")

CONFIG_ENV_VAR = "LMKIT_CONFIG"


@dataclass
class RunConfig:
    """Declarative run settings; round-trips through YAML losslessly.

    jobs=0 means one worker per available core.
    """

    detector: DetectorConfig = field(default_factory=DetectorConfig)
    formats: list = field(default_factory=lambda: ["csv"])
    jobs: int = 0
    resample: bool = True
    export_contours: str | None = None
    log_level: str = "WARNING"

    def to_dict(self) -> dict:
        return {
            "detector": self.detector.to_dict(),
            "formats": list(self.formats),
            "jobs": self.jobs,
            "resample": self.resample,
            "export_contours": self.export_contours,
            "log_level": self.log_level,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        unknown = set(d) - {"detector", "formats", "jobs", "resample", "export_contours", "log_level"}
        if unknown:
            raise ValueError(f"unknown config key(s): {sorted(unknown)}")
        det = d.get("detector", {})
        if not isinstance(det, DetectorConfig):
            det = DetectorConfig.from_dict(det)
        return cls(
            detector=det,
            formats=list(d.get("formats", ["csv"])),
            jobs=int(d.get("jobs", 0)),
            resample=bool(d.get("resample", True)),
            export_contours=d.get("export_contours"),
            log_level=str(d.get("log_level", "WARNING")),
        )

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            yaml.safe_dump(self.to_dict(), f, sort_keys=True)

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path, "r", encoding="utf-8") as f:
            doc = yaml.safe_load(f) or {}
        return cls.from_dict(doc)


def _load_run_config(args) -> RunConfig:
    path = args.config or os.environ.get(CONFIG_ENV_VAR)
    cfg = RunConfig.load(path) if path else RunConfig()
    det = cfg.detector.to_dict()
    for flag, key in (
        ("method", "smoothing"),
        ("coarse_threshold", "coarse_threshold_db"),
        ("fine_threshold", "fine_threshold_db"),
        ("band_vote_min", "band_vote_min"),
    ):
        val = getattr(args, flag, None)
        if val is not None:
            det[key] = val
    cfg.detector = DetectorConfig.from_dict(det)
    if getattr(args, "format", None):
        cfg.formats = [s.strip() for s in args.format.split(",") if s.strip()]
    for fmt in cfg.formats:
        if fmt not in formats.FORMAT_EXTENSIONS:
            raise ValueError(f"unsupported output format {fmt!r}")
    if getattr(args, "jobs", None) is not None:
        cfg.jobs = args.jobs
    if getattr(args, "export_contours", None):
        cfg.export_contours = args.export_contours
    if getattr(args, "log_level", None):
        cfg.log_level = args.log_level
    elif cfg.log_level:
        logging.getLogger().setLevel(getattr(logging, cfg.log_level.upper(), logging.WARNING))
    return cfg


def _manifest_from_input(path) -> DataManifest:
    if os.path.isdir(path):
        return read_manifest(path)
    utt = os.path.splitext(os.path.basename(path))[0]
    return DataManifest([ManifestEntry(utt, path)])


def _write_sequence(seq: LandmarkSequence, out_dir: str, fmts) -> None:
    for fmt in fmts:
        out = os.path.join(out_dir, seq.utterance_id + formats.FORMAT_EXTENSIONS[fmt])
        formats.write_landmark_file(seq, out, fmt)


def _extract_one(task):
    entry_id, audio_path, cfg_dict, out_dir = task
    cfg = RunConfig.from_dict(cfg_dict)
    try:
        sig = read_wav(audio_path)
        if cfg.resample:
            sig = resample(sig, cfg.detector.sample_rate_hz)
        seq = detect_all(sig, cfg.detector, utterance_id=entry_id)
        _write_sequence(seq, out_dir, cfg.formats)
        if cfg.export_contours:
            _raw, _coarse, fine = compute_contours(sig, cfg.detector)
            writer = write_contours_csv if cfg.export_contours == "csv" else write_contours_json
            ext = ".contours.csv" if cfg.export_contours == "csv" else ".contours.json"
            writer(fine, os.path.join(out_dir, entry_id + ext))
        return entry_id, len(seq), None
    except Exception as exc:  # crash isolation: one bad utterance cannot stop the batch
        return entry_id, 0, f"{type(exc).__name__}: {exc}"


def _label_one(task):
    entry_id, audio_path, align_path, cfg_dict, out_dir, use_audio = task
    cfg = RunConfig.from_dict(cfg_dict)
    try:
        if align_path is None:
            raise FileNotFoundError("no alignment path in manifest")
        align = read_phn(align_path, cfg.detector.sample_rate_hz)
        align.utterance_id = entry_id
        contours = None
        if use_audio and audio_path and os.path.exists(audio_path):
            sig = read_wav(audio_path)
            if cfg.resample:
                sig = resample(sig, cfg.detector.sample_rate_hz)
            _raw, _coarse, contours = compute_contours(sig, cfg.detector)
        seq = label_reference(
            align, default_table(), contours, burst_step_s=cfg.detector.fine_step_s
        )
        _write_sequence(seq, out_dir, cfg.formats)
        return entry_id, len(seq), None
    except Exception as exc:
        return entry_id, 0, f"{type(exc).__name__}: {exc}"


def _run_batch(worker, tasks, jobs):
    if jobs <= 0:
        jobs = os.cpu_count() or 1
    jobs = min(jobs, len(tasks))
    if jobs <= 1:
        return [worker(t) for t in tasks]
    try:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(worker, tasks))
    except (OSError, PermissionError) as exc:
        logger.warning("process pool unavailable (%s); running sequentially", exc)
        return [worker(t) for t in tasks]


def _report_batch(results, what: str) -> int:
    failures = [(utt, err) for utt, _n, err in results if err]
    n_events = sum(n for _utt, n, err in results if not err)
    ok = len(results) - len(failures)
    print(f"{what}: {ok} ok, {len(failures)} failed, {n_events} events total")
    for utt, err in failures:
        print(f"  FAILED {utt}: {err}", file=sys.stderr)
    return 1 if failures else 0


def cmd_extract(args) -> int:
    cfg = _load_run_config(args)
    manifest = _manifest_from_input(args.input)
    os.makedirs(args.out_dir, exist_ok=True)
    tasks = [
        (e.utterance_id, e.audio_path, cfg.to_dict(), args.out_dir) for e in manifest
    ]
    results = _run_batch(_extract_one, tasks, cfg.jobs)
    return _report_batch(results, "extract")


def cmd_label_ref(args) -> int:
    cfg = _load_run_config(args)
    manifest = _manifest_from_input(args.input)
    os.makedirs(args.out_dir, exist_ok=True)
    tasks = [
        (
            e.utterance_id,
            e.audio_path,
            e.alignment_path,
            cfg.to_dict(),
            args.out_dir,
            not args.no_audio,
        )
        for e in manifest
    ]
    results = _run_batch(_label_one, tasks, cfg.jobs)
    return _report_batch(results, "label-ref")


def _load_landmark_dir(dir_path) -> dict:
    seqs = {}
    for fn in sorted(os.listdir(dir_path)):
        ext = os.path.splitext(fn)[1].lower()
        if ext not in (".csv", ".json", ".textgrid"):
            continue
        for seq in formats.read_landmark_file(os.path.join(dir_path, fn)):
            if seq.utterance_id in seqs:
                raise ValueError(f"{dir_path}: duplicate utterance id {seq.utterance_id!r}")
            seqs[seq.utterance_id] = seq
    return seqs


def cmd_eval(args) -> int:
    refs = _load_landmark_dir(args.ref)
    hyps = _load_landmark_dir(args.hyp)
    shared = sorted(set(refs) & set(hyps))
    only_ref = sorted(set(refs) - set(hyps))
    only_hyp = sorted(set(hyps) - set(refs))
    if not shared:
        print("eval: no overlapping utterance ids between ref and hyp", file=sys.stderr)
        return 1
    opts = LerOptions(collapse_polarity=not args.keep_polarity)
    pooled = EvalReport()
    per_utt = {}
    timing_pooled = TimingReport(tolerance_s=args.tolerance) if args.tolerance else None
    for utt in shared:
        rep = ler(refs[utt], hyps[utt], opts)
        per_utt[utt] = rep
        pooled.add(rep)
        if timing_pooled is not None:
            timing_pooled.add(timing_match(refs[utt], hyps[utt], args.tolerance))
    os.makedirs(args.out_dir, exist_ok=True)
    doc = {
        "n_utterances": len(shared),
        "unmatched_ref_only": only_ref,
        "unmatched_hyp_only": only_hyp,
        "pooled": pooled.to_dict(),
        "per_utterance": {u: per_utt[u].to_dict() for u in shared},
    }
    if args.per_utt_average:
        doc["per_utterance_average_ler_percent"] = round(
            sum(r.ler_percent for r in per_utt.values()) / len(per_utt), 2
        )
    if timing_pooled is not None:
        doc["timing"] = timing_pooled.to_dict()
    with open(os.path.join(args.out_dir, "eval_report.json"), "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")
    with open(os.path.join(args.out_dir, "eval_report.tsv"), "w", encoding="utf-8") as f:
        f.write("utt_id\tn_ref\tsub\tdel\tins\tler_percent\n")
        for utt in shared:
            r = per_utt[utt]
            f.write(
                f"{utt}\t{r.n_ref_tokens}\t{r.substitutions}\t{r.deletions}\t"
                f"{r.insertions}\t{r.ler_percent:.2f}\n"
            )
        f.write(
            f"TOTAL\t{pooled.n_ref_tokens}\t{pooled.substitutions}\t{pooled.deletions}\t"
            f"{pooled.insertions}\t{pooled.ler_percent:.2f}\n"
        )
    print(
        f"eval: {len(shared)} utterances, pooled LER {pooled.ler_percent:.2f}% "
        f"(S={pooled.substitutions} D={pooled.deletions} I={pooled.insertions} "
        f"N={pooled.n_ref_tokens})"
    )
    if only_ref or only_hyp:
        print(
            f"eval: unmatched ids: {len(only_ref)} ref-only, {len(only_hyp)} hyp-only",
            file=sys.stderr,
        )
    return 0


def cmd_stats(args) -> int:
    seqs = _load_landmark_dir(args.dir)
    if not seqs:
        print(f"stats: no landmark files in {args.dir}", file=sys.stderr)
        return 1
    splits = {}
    for spec in args.split or ["all=*"]:
        name, _sep, pattern = spec.partition("=")
        if not _sep:
            print(f"stats: bad --split {spec!r}, expected name=glob", file=sys.stderr)
            return 2
        splits[name] = pattern
    os.makedirs(args.out_dir, exist_ok=True)
    status = 0
    for name, pattern in splits.items():
        members = [seqs[u] for u in sorted(seqs) if fnmatch.fnmatch(u, pattern)]
        try:
            dist = distribution(members)
        except ValueError:
            print(f"stats: split {name!r} has no landmark events", file=sys.stderr)
            status = 1
            continue
        out = os.path.join(args.out_dir, f"stats_{name}.csv")
        with open(out, "w", encoding="utf-8") as f:
            f.write("kind,count,proportion\n")
            for kind, count, prop in dist.to_rows():
                f.write(f"{kind},{count},{prop:.6f}\n")
        print(f"stats: split {name}: {dist.total} events -> {out}")
    return status


def _add_common(p):
    p.add_argument("--config", "-c", help=f"YAML config file (default ${CONFIG_ENV_VAR})")
    p.add_argument("--log-level", default=None, help="logging level (default WARNING)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lmkit", description="Acoustic landmark detection toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="detect landmarks for a manifest or WAV file")
    p.add_argument("input", help="data directory with wav.scp, or a single WAV file")
    p.add_argument("--out-dir", "-o", required=True)
    p.add_argument("--format", help="comma list of csv,json,textgrid (default csv)")
    p.add_argument("--method", choices=["basic", "advanced"], help="smoothing method")
    p.add_argument("--coarse-threshold", type=float, dest="coarse_threshold")
    p.add_argument("--fine-threshold", type=float, dest="fine_threshold")
    p.add_argument("--band-vote-min", type=int, dest="band_vote_min")
    p.add_argument("--jobs", "-j", type=int, help="parallel utterances (default: all cores)")
    p.add_argument(
        "--export-contours", choices=["csv", "json"], help="also export fine-pass contours"
    )
    _add_common(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("label-ref", help="rule-based reference landmarks from alignments")
    p.add_argument("input", help="data directory with wav.scp and align.scp")
    p.add_argument("--out-dir", "-o", required=True)
    p.add_argument("--format", help="comma list of csv,json,textgrid (default csv)")
    p.add_argument(
        "--no-audio",
        action="store_true",
        help="skip audio; place burst landmarks at segment boundaries",
    )
    p.add_argument("--jobs", "-j", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_label_ref)

    p = sub.add_parser("eval", help="score hypothesis landmarks against references")
    p.add_argument("--ref", required=True, help="directory of reference landmark files")
    p.add_argument("--hyp", required=True, help="directory of hypothesis landmark files")
    p.add_argument("--out-dir", "-o", required=True)
    p.add_argument("--tolerance", type=float, help="also report timing metrics at this tolerance (s)")
    p.add_argument("--keep-polarity", action="store_true", help="do not collapse +/- for LER")
    p.add_argument(
        "--per-utt-average",
        action="store_true",
        help="also report the mean of per-utterance LERs",
    )
    _add_common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("stats", help="landmark distribution per split")
    p.add_argument("dir", help="directory of landmark files")
    p.add_argument("--out-dir", "-o", required=True)
    p.add_argument(
        "--split",
        action="append",
        help="name=glob over utterance ids (repeatable; default all=*)",
    )
    _add_common(p)
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = args.log_level or "WARNING"
    logging.basicConfig(level=getattr(logging, level.upper(), logging.WARNING))
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"lmkit {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
