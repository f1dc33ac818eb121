"""lmkit: acoustic landmark detection, reference labeling, and evaluation.

Landmarks are time points of abrupt articulatory change in speech (g, b,
s, f, v; each with onset + and offset - polarity).  The package provides:

* a six-band two-pass filter detector (``lmkit.detector``),
* rule-based reference labels from phoneme alignments (``lmkit.reference``),
* Landmark Error Rate and timing metrics (``lmkit.evaluate``),
* WAV / .PHN / Kaldi-style manifest ingestion (``lmkit.audio``,
  ``lmkit.alignment``, ``lmkit.manifest``),
* CSV / JSON / Praat TextGrid landmark files (``lmkit.formats``),
* a batch CLI (``lmkit.cli``), and synthetic planted-landmark test
  signals (``lmkit.synth``).
"""

from .alignment import Alignment, PhoneSegment, read_phn, write_phn
from .audio import CANONICAL_RATE_HZ, SampledSignal, read_wav, resample, write_wav
from .detector import (
    DetectorConfig,
    LandmarkEvent,
    LandmarkSequence,
    VoicingSegmentation,
    detect_all,
    detect_bs,
    detect_fv,
    detect_g,
    detect_peaks,
    pair_voicing,
    two_pass_match,
)
from .evaluate import (
    DistributionReport,
    EvalReport,
    LerOptions,
    TimingReport,
    distribution,
    ler,
    timing_match,
)
from .manifest import DataManifest, ManifestEntry, read_manifest, scan_timit
from .reference import (
    PhoneClassTable,
    default_table,
    label_bursts,
    label_glottal,
    label_reference,
    label_segmental,
)
from .spectral import (
    BandEnergyContours,
    BandSpec,
    FrameGrid,
    band_energies,
    rate_of_rise,
    smooth_advanced,
    smooth_basic,
)

__version__ = "0.1.0"
