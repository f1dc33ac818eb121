"""Scoring hypothesis landmark sequences against references.

The headline metric is the Landmark Error Rate: a minimum-edit-distance
alignment of the two token strings, by convention with polarity collapsed
and timing ignored, reported as 100*(S+D+I)/N like a word error rate.
Timing-aware detection metrics (precision/recall/F1 under a tolerance)
and corpus-level kind distributions complement it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .detector import KINDS, LandmarkSequence

INS_MARK = "<ins>"
DEL_MARK = "<del>"


@dataclass(frozen=True)
class LerOptions:
    """LER conventions.  The defaults (collapse polarity, ignore timing)
    reproduce the customary reporting convention; with use_timing, tokens
    only match when their times also agree within timing_tolerance_s."""

    collapse_polarity: bool = True
    use_timing: bool = False
    timing_tolerance_s: float = 0.02


@dataclass
class EvalReport:
    """Edit-distance decomposition of one comparison (or a pooled one).

    confusion[ref_token][hyp_token] counts aligned token pairs (matches on
    the diagonal, substitutions off it); a deleted reference token counts
    under confusion[ref_token][DEL_MARK], an inserted hypothesis token
    under confusion[INS_MARK][hyp_token].
    """

    n_ref_tokens: int = 0
    substitutions: int = 0
    deletions: int = 0
    insertions: int = 0
    confusion: dict = field(default_factory=dict)
    degenerate: bool = False

    @property
    def ler_percent(self) -> float:
        total = self.substitutions + self.deletions + self.insertions
        return 100.0 * total / max(1, self.n_ref_tokens)

    def add(self, other: "EvalReport") -> None:
        self.n_ref_tokens += other.n_ref_tokens
        self.substitutions += other.substitutions
        self.deletions += other.deletions
        self.insertions += other.insertions
        self.degenerate = self.degenerate or other.degenerate
        for r, row in other.confusion.items():
            mine = self.confusion.setdefault(r, {})
            for h, n in row.items():
                mine[h] = mine.get(h, 0) + n

    def to_dict(self) -> dict:
        return {
            "n_ref_tokens": self.n_ref_tokens,
            "substitutions": self.substitutions,
            "deletions": self.deletions,
            "insertions": self.insertions,
            "ler_percent": round(self.ler_percent, 2),
            "degenerate": self.degenerate,
            "confusion": self.confusion,
        }


def sequence_tokens(seq: LandmarkSequence, opts: LerOptions | None = None):
    """Linearize a sequence into (token, time) pairs.

    Events at identical times keep the canonical kind order g<b<s<f<v from
    the sequence sort, so linearization is deterministic.
    """
    opts = opts or LerOptions()
    out = []
    for ev in seq.events:
        tok = ev.kind if opts.collapse_polarity else ev.kind + ev.polarity
        out.append((tok, ev.time_s))
    return out


def _tokens_equal(a, b, opts):
    if a[0] != b[0]:
        return False
    if opts.use_timing and abs(a[1] - b[1]) > opts.timing_tolerance_s:
        return False
    return True


def ler(
    ref: LandmarkSequence, hyp: LandmarkSequence, opts: LerOptions | None = None
) -> EvalReport:
    """Landmark Error Rate of hyp against ref.

    Unit-cost edit distance over the token strings; counts come from one
    optimal alignment with ties broken in favor of substitutions (diagonal
    steps), then deletions, so confusion matrices are reproducible.  An
    empty reference with a non-empty hypothesis is reported with
    degenerate=True and LER = 100*I/max(1, N).
    """
    opts = opts or LerOptions()
    rtoks = sequence_tokens(ref, opts)
    htoks = sequence_tokens(hyp, opts)
    n, m = len(rtoks), len(htoks)
    # d[i][j]: distance between first i ref tokens and first j hyp tokens
    d = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        d[i][0] = i
    for j in range(1, m + 1):
        d[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            sub = d[i - 1][j - 1] + (0 if _tokens_equal(rtoks[i - 1], htoks[j - 1], opts) else 1)
            dele = d[i - 1][j] + 1
            ins = d[i][j - 1] + 1
            d[i][j] = min(sub, dele, ins)
    report = EvalReport(n_ref_tokens=n, degenerate=(n == 0 and m > 0))
    conf = report.confusion

    def bump(r, h):
        conf.setdefault(r, {})
        conf[r][h] = conf[r].get(h, 0) + 1

    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0:
            eq = _tokens_equal(rtoks[i - 1], htoks[j - 1], opts)
            if d[i][j] == d[i - 1][j - 1] + (0 if eq else 1):
                if not eq:
                    report.substitutions += 1
                bump(rtoks[i - 1][0], htoks[j - 1][0])
                i -= 1
                j -= 1
                continue
        if i > 0 and d[i][j] == d[i - 1][j] + 1:
            report.deletions += 1
            bump(rtoks[i - 1][0], DEL_MARK)
            i -= 1
        else:
            report.insertions += 1
            bump(INS_MARK, htoks[j - 1][0])
            j -= 1
    return report


@dataclass
class KindScore:
    n_ref: int = 0
    n_hyp: int = 0
    n_match: int = 0
    abs_err_sum_s: float = 0.0

    @property
    def precision(self) -> float:
        return self.n_match / self.n_hyp if self.n_hyp else 0.0

    @property
    def recall(self) -> float:
        return self.n_match / self.n_ref if self.n_ref else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if (p + r) else 0.0


@dataclass
class TimingReport:
    """Tolerance-based detection scores: greedy one-to-one matching of
    same-kind, same-polarity events by increasing time error."""

    tolerance_s: float
    per_kind: dict = field(default_factory=dict)
    overall: KindScore = field(default_factory=KindScore)

    @property
    def mean_abs_error_s(self) -> float:
        return self.overall.abs_err_sum_s / self.overall.n_match if self.overall.n_match else 0.0

    def add(self, other: "TimingReport") -> None:
        for kind, ks in other.per_kind.items():
            mine = self.per_kind.setdefault(kind, KindScore())
            mine.n_ref += ks.n_ref
            mine.n_hyp += ks.n_hyp
            mine.n_match += ks.n_match
            mine.abs_err_sum_s += ks.abs_err_sum_s
        self.overall.n_ref += other.overall.n_ref
        self.overall.n_hyp += other.overall.n_hyp
        self.overall.n_match += other.overall.n_match
        self.overall.abs_err_sum_s += other.overall.abs_err_sum_s

    def to_dict(self) -> dict:
        def ks_dict(ks):
            return {
                "n_ref": ks.n_ref,
                "n_hyp": ks.n_hyp,
                "n_match": ks.n_match,
                "precision": round(ks.precision, 6),
                "recall": round(ks.recall, 6),
                "f1": round(ks.f1, 6),
            }

        d = {
            "tolerance_s": self.tolerance_s,
            "overall": ks_dict(self.overall),
            "mean_abs_error_s": round(self.mean_abs_error_s, 9),
            "per_kind": {k: ks_dict(v) for k, v in sorted(self.per_kind.items())},
        }
        return d


def timing_match(
    ref: LandmarkSequence, hyp: LandmarkSequence, tolerance_s: float
) -> TimingReport:
    """Match events per (kind, polarity), nearest-in-time first.

    Candidate pairs with |dt| <= tolerance_s are taken greedily by
    increasing |dt| (ties by earlier reference time), each event used at
    most once.  Scores are aggregated per kind and overall.
    """
    if tolerance_s <= 0:
        raise ValueError("tolerance_s must be positive")
    report = TimingReport(tolerance_s=tolerance_s)
    groups = {}
    for src, seq in (("ref", ref), ("hyp", hyp)):
        for ev in seq.events:
            groups.setdefault((ev.kind, ev.polarity), {"ref": [], "hyp": []})[src].append(ev)
    for (kind, _pol), g in sorted(groups.items()):
        ks = report.per_kind.setdefault(kind, KindScore())
        ks.n_ref += len(g["ref"])
        ks.n_hyp += len(g["hyp"])
        pairs = []
        for i, r in enumerate(g["ref"]):
            for j, h in enumerate(g["hyp"]):
                dt = abs(r.time_s - h.time_s)
                if dt <= tolerance_s:
                    pairs.append((dt, r.time_s, i, j))
        pairs.sort()
        used_r, used_h = set(), set()
        for dt, _t, i, j in pairs:
            if i in used_r or j in used_h:
                continue
            used_r.add(i)
            used_h.add(j)
            ks.n_match += 1
            ks.abs_err_sum_s += dt
    for ks in report.per_kind.values():
        report.overall.n_ref += ks.n_ref
        report.overall.n_hyp += ks.n_hyp
        report.overall.n_match += ks.n_match
        report.overall.abs_err_sum_s += ks.abs_err_sum_s
    return report


@dataclass
class DistributionReport:
    """Per-kind token counts and proportions over a corpus split."""

    counts: dict = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def proportions(self) -> dict:
        total = self.total
        return {k: self.counts.get(k, 0) / total for k in KINDS}

    def to_rows(self):
        props = self.proportions
        return [(k, self.counts.get(k, 0), props[k]) for k in KINDS]


def distribution(seqs) -> DistributionReport:
    """Kind distribution over a collection of sequences.

    Raises:
        ValueError: no events at all (proportions undefined).
    """
    counts = {k: 0 for k in KINDS}
    for seq in seqs:
        for ev in seq.events:
            counts[ev.kind] += 1
    if sum(counts.values()) == 0:
        raise ValueError("no landmark events; distribution undefined")
    return DistributionReport(counts)
