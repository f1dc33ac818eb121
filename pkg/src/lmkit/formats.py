"""Landmark sequence file formats: CSV, JSON, and Praat TextGrid.

Detector output, reference labels, and evaluation input all share these
formats, so any file written here can be fed back to `lmkit eval` on either
side.  CSV and JSON carry full float precision (bit-exact round trips);
TextGrid writes times with 6 decimals and carries only the point labels
(like ``g+``), so salience is not preserved there.
"""

from __future__ import annotations

import csv
import json
import os

from .detector import LandmarkEvent, LandmarkSequence

CSV_HEADER = ["utt_id", "time_s", "kind", "polarity", "salience_db"]

FORMAT_EXTENSIONS = {"csv": ".csv", "json": ".json", "textgrid": ".TextGrid"}


def write_landmarks_csv(seqs, path) -> None:
    """Write one or more sequences as CSV (sorted by time within each)."""
    if isinstance(seqs, LandmarkSequence):
        seqs = [seqs]
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(CSV_HEADER)
        for seq in seqs:
            for ev in seq.events:
                w.writerow([seq.utterance_id, repr(ev.time_s), ev.kind, ev.polarity, repr(ev.salience_db)])


def read_landmarks_csv(path) -> list[LandmarkSequence]:
    """Read a landmark CSV; returns one sequence per utterance id, in
    order of first appearance."""
    by_utt: dict[str, list[LandmarkEvent]] = {}
    with open(path, "r", newline="", encoding="utf-8") as f:
        r = csv.reader(f)
        header = next(r, None)
        if header != CSV_HEADER:
            raise ValueError(f"{path}: expected header {','.join(CSV_HEADER)}")
        for row in r:
            if not row:
                continue
            if len(row) != 5:
                raise ValueError(f"{path}: malformed row {row!r}")
            utt, t, kind, pol, sal = row
            by_utt.setdefault(utt, []).append(
                LandmarkEvent(kind, pol, float(t), float(sal))
            )
    return [LandmarkSequence(utt, evs) for utt, evs in by_utt.items()]


def write_landmarks_json(seqs, path) -> None:
    """Write sequences as JSON: a single object for one sequence, an array
    for several."""
    single = isinstance(seqs, LandmarkSequence)
    if single:
        seqs = [seqs]
    docs = [
        {
            "utterance_id": seq.utterance_id,
            "events": [
                {
                    "time_s": ev.time_s,
                    "kind": ev.kind,
                    "polarity": ev.polarity,
                    "salience_db": ev.salience_db,
                }
                for ev in seq.events
            ],
        }
        for seq in seqs
    ]
    with open(path, "w", encoding="utf-8") as f:
        json.dump(docs[0] if single else docs, f, indent=2)
        f.write("\n")


def read_landmarks_json(path) -> list[LandmarkSequence]:
    with open(path, "r", encoding="utf-8") as f:
        doc = json.load(f)
    if isinstance(doc, dict):
        doc = [doc]
    out = []
    for entry in doc:
        events = [
            LandmarkEvent(e["kind"], e["polarity"], e["time_s"], e.get("salience_db", 0.0))
            for e in entry["events"]
        ]
        out.append(LandmarkSequence(entry["utterance_id"], events))
    return out


def write_landmarks_textgrid(seq: LandmarkSequence, path, xmax_s: float | None = None) -> None:
    """Write one sequence as a Praat TextGrid (long format, UTF-8) with a
    single point tier named "landmarks"; point labels are kind+polarity."""
    if xmax_s is None:
        xmax_s = seq.events[-1].time_s + 0.001 if seq.events else 0.001
    lines = [
        'File type = "ooTextFile"',
        'Object class = "TextGrid"',
        "",
        "xmin = 0",
        f"xmax = {xmax_s:.6f}",
        "tiers? <exists>",
        "size = 1",
        "item []:",
        "    item [1]:",
        '        class = "TextTier"',
        '        name = "landmarks"',
        "        xmin = 0",
        f"        xmax = {xmax_s:.6f}",
        f"        points: size = {len(seq.events)}",
    ]
    for i, ev in enumerate(seq.events, start=1):
        lines.append(f"        points [{i}]:")
        lines.append(f"            number = {ev.time_s:.6f}")
        lines.append(f'            mark = "{ev.label}"')
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


def read_landmarks_textgrid(path, utterance_id: str | None = None) -> list[LandmarkSequence]:
    """Read landmark points from a TextGrid point tier.

    Any point whose mark looks like a landmark label (kind letter plus
    polarity) is taken; salience is not stored in TextGrids and reads back
    as 0.  The utterance id defaults to the file stem.
    """
    if utterance_id is None:
        utterance_id = os.path.splitext(os.path.basename(str(path)))[0]
    events = []
    number = None
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line.startswith("number") and "=" in line:
                number = float(line.split("=", 1)[1].strip())
            elif line.startswith("mark") and "=" in line and number is not None:
                mark = line.split("=", 1)[1].strip().strip('"')
                if len(mark) == 2 and mark[0] in "gbsfv" and mark[1] in "+-":
                    events.append(LandmarkEvent(mark[0], mark[1], number, 0.0))
                number = None
    return [LandmarkSequence(utterance_id, events)]


_READERS = {
    ".csv": read_landmarks_csv,
    ".json": read_landmarks_json,
    ".textgrid": read_landmarks_textgrid,
}


def read_landmark_file(path) -> list[LandmarkSequence]:
    """Read any supported landmark file, dispatching on the extension."""
    ext = os.path.splitext(str(path))[1].lower()
    reader = _READERS.get(ext)
    if reader is None:
        raise ValueError(f"{path}: unsupported landmark format {ext!r}")
    return reader(path)


def write_landmark_file(seq: LandmarkSequence, path, fmt: str) -> None:
    """Write one sequence in the named format (csv, json, or textgrid)."""
    if fmt == "csv":
        write_landmarks_csv(seq, path)
    elif fmt == "json":
        write_landmarks_json(seq, path)
    elif fmt == "textgrid":
        write_landmarks_textgrid(seq, path)
    else:
        raise ValueError(f"unsupported landmark format {fmt!r}")
