"""Kaldi-style data directory and TIMIT-layout corpus parsing."""

import pytest

from lmkit.manifest import read_manifest, scan_timit


def make_dir(tmp_path, wav_lines, align_lines=None):
    (tmp_path / "wav.scp").write_text("".join(l + "\n" for l in wav_lines))
    if align_lines is not None:
        (tmp_path / "align.scp").write_text("".join(l + "\n" for l in align_lines))
    return tmp_path


def test_join_on_utterance_id(tmp_path):
    d = make_dir(
        tmp_path,
        ["utt1 /data/utt1.wav", "utt2 /data/utt2.wav"],
        ["utt1 /data/utt1.phn"],
    )
    m = read_manifest(d)
    assert len(m) == 2
    by_id = {e.utterance_id: e for e in m}
    assert by_id["utt1"].alignment_path == "/data/utt1.phn"
    assert by_id["utt2"].alignment_path is None


def test_duplicate_id_names_the_culprit(tmp_path):
    d = make_dir(tmp_path, ["utt1 /a.wav", "utt1 /b.wav"])
    with pytest.raises(ValueError, match="utt1"):
        read_manifest(d)


def test_empty_manifest_is_valid(tmp_path):
    m = read_manifest(make_dir(tmp_path, []))
    assert len(m) == 0


def test_missing_wav_scp(tmp_path):
    with pytest.raises(FileNotFoundError, match="wav.scp"):
        read_manifest(tmp_path)


def test_align_only_id_skipped_with_warning(tmp_path, caplog):
    d = make_dir(tmp_path, ["utt1 /a.wav"], ["utt9 /x.phn"])
    with caplog.at_level("WARNING"):
        m = read_manifest(d)
    assert len(m) == 1
    assert "utt9" in caplog.text


def test_path_with_spaces(tmp_path):
    d = make_dir(tmp_path, ["utt1 /data/my corpus/utt 1.wav"])
    m = read_manifest(d)
    assert m.entries[0].audio_path == "/data/my corpus/utt 1.wav"


def test_malformed_line(tmp_path):
    d = make_dir(tmp_path, ["just-an-id"])
    with pytest.raises(ValueError, match="wav.scp:1"):
        read_manifest(d)


def test_preserves_file_order(tmp_path):
    d = make_dir(tmp_path, [f"utt{i} /w{i}.wav" for i in (3, 1, 2)])
    m = read_manifest(d)
    assert [e.utterance_id for e in m] == ["utt3", "utt1", "utt2"]


class TestScanTimit:
    def build_tree(self, root):
        for split, spk, sent in [
            ("TRAIN", "FAA0", "SA1"),
            ("TRAIN", "MBB1", "SX12"),
            ("TEST", "FCC2", "SI99"),
        ]:
            d = root / split / "DR1" / spk
            d.mkdir(parents=True, exist_ok=True)
            (d / f"{sent}.wav").write_bytes(b"RIFF")
            if sent != "SX12":
                (d / f"{sent}.phn").write_text("0 160 h#\n")
        return root

    def test_splits_and_ids(self, tmp_path):
        splits = scan_timit(self.build_tree(tmp_path))
        assert set(splits) == {"train", "test"}
        train_ids = [e.utterance_id for e in splits["train"]]
        assert train_ids == ["FAA0_SA1", "MBB1_SX12"]
        by_id = {e.utterance_id: e for e in splits["train"]}
        assert by_id["FAA0_SA1"].alignment_path is not None
        assert by_id["MBB1_SX12"].alignment_path is None
        assert [e.utterance_id for e in splits["test"]] == ["FCC2_SI99"]

    def test_missing_split_omitted(self, tmp_path):
        (tmp_path / "TRAIN" / "DR1" / "X").mkdir(parents=True)
        (tmp_path / "TRAIN" / "DR1" / "X" / "SA1.WAV").write_bytes(b"RIFF")
        splits = scan_timit(tmp_path)
        assert set(splits) == {"train"}
        assert splits["train"].entries[0].utterance_id == "X_SA1"
