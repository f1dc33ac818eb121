"""Kaldi-style data directories: wav.scp plus optional align.scp.

Each .scp line maps an utterance id to a plain file path (no command
pipes).  A manifest joins the two maps on utterance id.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ManifestEntry:
    utterance_id: str
    audio_path: str
    alignment_path: str | None = None


@dataclass
class DataManifest:
    entries: list[ManifestEntry] = field(default_factory=list)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def _read_scp(path):
    table = {}
    order = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split(maxsplit=1)
            if len(parts) != 2 or not parts[1].strip():
                raise ValueError(f"{path}:{lineno}: expected 'utt-id path'")
            utt, p = parts[0], parts[1].strip()
            if utt in table:
                raise ValueError(f"{path}:{lineno}: duplicate utterance id {utt!r}")
            table[utt] = p
            order.append(utt)
    return table, order


def read_manifest(dir_path) -> DataManifest:
    """Load a data directory containing wav.scp and optionally align.scp.

    Utterances present only in align.scp are skipped with a warning;
    utterances without an alignment get alignment_path=None.

    Raises:
        FileNotFoundError: wav.scp missing.
        ValueError: malformed lines or duplicate utterance ids.
    """
    wav_scp = os.path.join(dir_path, "wav.scp")
    if not os.path.exists(wav_scp):
        raise FileNotFoundError(f"{dir_path}: wav.scp not found")
    wavs, order = _read_scp(wav_scp)
    aligns = {}
    align_scp = os.path.join(dir_path, "align.scp")
    if os.path.exists(align_scp):
        aligns, _ = _read_scp(align_scp)
        for utt in aligns:
            if utt not in wavs:
                logger.warning("%s: id %r has no wav.scp entry; skipped", align_scp, utt)
    entries = [ManifestEntry(utt, wavs[utt], aligns.get(utt)) for utt in order]
    return DataManifest(entries)


def scan_timit(root) -> dict[str, DataManifest]:
    """Walk a TIMIT-layout corpus into per-split manifests.

    Expects ``<root>/TRAIN`` and/or ``<root>/TEST`` (case-insensitive)
    containing speaker directories with paired .wav/.phn files; utterance
    ids are ``<speaker>_<sentence>``.  Returns {"train": ..., "test": ...}
    for the splits found.
    """
    splits = {}
    for name in sorted(os.listdir(root)):
        if name.lower() not in ("train", "test"):
            continue
        split_dir = os.path.join(root, name)
        if not os.path.isdir(split_dir):
            continue
        entries = []
        for dirpath, _dirnames, filenames in sorted(os.walk(split_dir)):
            for fn in sorted(filenames):
                base, ext = os.path.splitext(fn)
                if ext.lower() != ".wav":
                    continue
                wav_path = os.path.join(dirpath, fn)
                phn_path = None
                for cand in (base + ".phn", base + ".PHN", base + ".Phn"):
                    p = os.path.join(dirpath, cand)
                    if os.path.exists(p):
                        phn_path = p
                        break
                utt = f"{os.path.basename(dirpath)}_{base}"
                entries.append(ManifestEntry(utt, wav_path, phn_path))
        if entries:
            splits[name.lower()] = DataManifest(entries)
    return splits
