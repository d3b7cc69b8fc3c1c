"""Record ingestion, the preprocessing cascade, roving, and synthetic data.

The cascade runs in a fixed order: split participants into ear-level
records, drop records with missing measurements, merge the audiogram and
loudness sides by (participant, ear), label each merged record with its
nearest standard profile, exclude records whose pure-tone average marks
normal hearing, and prune rare classes once. A calibration-offset
("roving") step can then shift every dB-level feature by one per-participant
Gaussian draw, leaving slopes untouched.

A seeded synthetic generator stands in for clinical data: it jitters the
standard profiles, maps thresholds at the two center frequencies to
loudness-function parameters with a simple recruitment rule, and labels
each record by re-classifying its own jittered audiogram.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .bisgaard import (
    Audiogram,
    BisgaardClass,
    StandardAudiogram,
    class_from_name,
    classify,
    load_profiles,
    pta,
    resample,
)
from .errors import (
    ConfigurationError,
    DataError,
    ParameterError,
    ParseError,
    SchemaError,
)
from .loudness import (
    FEATURE_NAMES,
    LoudnessFeatureVector,
    LoudnessFunction,
    derive_features,
    validate_features,
)

# Clinical measurement grid; the CSV schema carries one column per frequency.
THRESHOLD_FREQUENCIES_HZ: tuple[float, ...] = (
    125.0, 250.0, 500.0, 750.0, 1000.0, 1500.0, 2000.0, 3000.0, 4000.0, 6000.0, 8000.0,
)

THRESHOLD_COLUMNS: tuple[str, ...] = tuple(f"f{int(f)}" for f in THRESHOLD_FREQUENCIES_HZ)
CSV_COLUMNS: tuple[str, ...] = ("id", "ear") + THRESHOLD_COLUMNS + FEATURE_NAMES

EARS = ("left", "right")

DEFAULT_MIN_PTA = 20.0
DEFAULT_MIN_CLASS_FRACTION = 0.05
DEFAULT_MIN_CLASS_COUNT = 35

DEFAULT_SYNTHETIC_CLASSES: tuple[BisgaardClass, ...] = (
    BisgaardClass.N2,
    BisgaardClass.N3,
    BisgaardClass.N4,
    BisgaardClass.S1,
    BisgaardClass.S2,
    BisgaardClass.S3,
)


@dataclass(frozen=True)
class EarData:
    """What one source dataset knows about one ear."""

    audiogram: Audiogram | None = None
    features: LoudnessFeatureVector | None = None

    def is_empty(self) -> bool:
        return self.audiogram is None and self.features is None


@dataclass(frozen=True)
class ParticipantRecord:
    """Per-participant container before the ear split."""

    participant_id: str
    left: EarData | None = None
    right: EarData | None = None

    def __post_init__(self) -> None:
        ears = [e for e in (self.left, self.right) if e is not None and not e.is_empty()]
        if not ears:
            raise ParameterError(
                f"participant {self.participant_id!r} carries no ear data"
            )


@dataclass(frozen=True)
class EarRecord:
    """One ear of one participant, possibly holding only one data side."""

    participant_id: str
    ear: str
    audiogram: Audiogram | None = None
    features: LoudnessFeatureVector | None = None


@dataclass(frozen=True)
class LabeledRecord:
    """Fully prepared record: features, class label, and pure-tone average."""

    participant_id: str
    ear: str
    features: LoudnessFeatureVector
    label: BisgaardClass
    pta: float

    def __post_init__(self) -> None:
        violations = validate_features(self.features)
        if violations:
            raise DataError(
                f"invalid features for {self.participant_id}/{self.ear}: "
                + "; ".join(violations)
            )


@dataclass(frozen=True)
class RovingConfig:
    """One Gaussian calibration offset per participant.

    (mean=0, sd=0) is the no-roving reference and must be a strict no-op.
    """

    mean: float
    sd: float
    seed: int = 0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mean) and math.isfinite(self.sd)):
            raise ConfigurationError("roving mean and sd must be finite")
        if self.sd < 0:
            raise ConfigurationError(f"roving sd must be >= 0, got {self.sd}")
        if self.seed < 0:
            raise ConfigurationError("roving seed must be non-negative")


@dataclass(frozen=True)
class SyntheticConfig:
    """Knobs of the synthetic generator. Defaults produce overlapping classes.

    The slope rules express loudness recruitment: the lower slope shrinks
    and the upper slope grows with the hearing threshold, both clamped to
    a plausible range. None of the constants is a claim about clinical
    data; every one is overridable.
    """

    records_per_class: int
    classes: tuple[BisgaardClass, ...] = DEFAULT_SYNTHETIC_CLASSES
    seed: int = 0
    jitter_sd: float = 4.0
    l2_5_offset_mean: float = 5.0
    l2_5_offset_sd: float = 3.0
    l_cut_noise_sd: float = 2.0
    m_low_intercept: float = 0.9
    m_low_slope: float = -0.006
    m_low_bounds: tuple[float, float] = (0.25, 0.9)
    m_high_intercept: float = 0.8
    m_high_slope: float = 0.02
    m_high_bounds: tuple[float, float] = (0.8, 3.5)

    def __post_init__(self) -> None:
        if self.records_per_class < 1:
            raise ConfigurationError("records_per_class must be >= 1")
        if not self.classes:
            raise ConfigurationError("class set must be non-empty")
        if len(set(self.classes)) != len(self.classes):
            raise ConfigurationError("class set must not repeat classes")
        if self.seed < 0:
            raise ConfigurationError("seed must be non-negative")
        for name in ("jitter_sd", "l2_5_offset_sd", "l_cut_noise_sd"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be >= 0")


@dataclass(frozen=True)
class PreprocessSummary:
    """Record counts after each cascade stage, for bookkeeping and reports."""

    audiogram_ears: int
    audiogram_complete: int
    loudness_ears: int
    loudness_complete: int
    merged: int
    after_pta_filter: int
    after_class_filter: int
    class_set: tuple[BisgaardClass, ...]

    def as_dict(self) -> dict:
        d = {k: getattr(self, k) for k in (
            "audiogram_ears", "audiogram_complete", "loudness_ears",
            "loudness_complete", "merged", "after_pta_filter", "after_class_filter",
        )}
        d["class_set"] = [c.name for c in self.class_set]
        return d


def split_ears(records: list[ParticipantRecord]) -> list[EarRecord]:
    """One record per present ear; participant order, left before right."""
    out: list[EarRecord] = []
    for rec in records:
        for ear, data in (("left", rec.left), ("right", rec.right)):
            if data is not None and not data.is_empty():
                out.append(
                    EarRecord(rec.participant_id, ear, data.audiogram, data.features)
                )
    return out


def _features_complete(features: LoudnessFeatureVector) -> bool:
    return all(math.isfinite(v) for v in features.as_tuple())


def drop_incomplete(records: list[EarRecord]) -> list[EarRecord]:
    """Remove records whose present measurements contain missing values.

    A side that is absent entirely (None) is not a gap; NaN inside a present
    audiogram or feature vector is.
    """
    out = []
    for r in records:
        if r.audiogram is None and r.features is None:
            continue
        if r.audiogram is not None and not r.audiogram.is_complete():
            continue
        if r.features is not None and not _features_complete(r.features):
            continue
        out.append(r)
    return out


def merge_by_id_ear(
    audiogram_records: list[EarRecord], loudness_records: list[EarRecord]
) -> list[EarRecord]:
    """Inner join on (participant, ear): audiogram side x loudness side."""

    def keyed(records: list[EarRecord], side: str) -> dict:
        table: dict[tuple[str, str], EarRecord] = {}
        for r in records:
            key = (r.participant_id, r.ear)
            if key in table:
                raise DataError(f"duplicate {side} record for {key}")
            table[key] = r
        return table

    audio = keyed(audiogram_records, "audiogram")
    loud = keyed(loudness_records, "loudness")
    out = []
    for key, a in audio.items():
        l = loud.get(key)
        if l is None:
            continue
        if a.audiogram is None:
            raise DataError(f"audiogram side is missing an audiogram for {key}")
        if l.features is None:
            raise DataError(f"loudness side is missing features for {key}")
        out.append(EarRecord(key[0], key[1], a.audiogram, l.features))
    return out


def label_records(
    records: list[EarRecord],
    profiles: tuple[StandardAudiogram, ...] | None = None,
) -> list[LabeledRecord]:
    """Classify each record's audiogram and attach label plus PTA."""
    if profiles is None:
        profiles = load_profiles()
    out = []
    for r in records:
        if r.audiogram is None or r.features is None:
            raise DataError(
                f"record {r.participant_id}/{r.ear} lacks audiogram or features"
            )
        label, _ = classify(r.audiogram, profiles)
        out.append(
            LabeledRecord(r.participant_id, r.ear, r.features, label, pta(r.audiogram))
        )
    return out


def filter_pta(records: list[LabeledRecord], min_pta: float = DEFAULT_MIN_PTA) -> list[LabeledRecord]:
    """Keep records with pta >= min_pta; the boundary value is retained."""
    return [r for r in records if r.pta >= min_pta]


def filter_rare_classes(
    records: list[LabeledRecord],
    min_fraction: float = DEFAULT_MIN_CLASS_FRACTION,
    min_count: int = DEFAULT_MIN_CLASS_COUNT,
) -> tuple[list[LabeledRecord], tuple[BisgaardClass, ...]]:
    """Drop every class below either threshold. Applied once, not iterated."""
    n = len(records)
    counts: dict[BisgaardClass, int] = {}
    for r in records:
        counts[r.label] = counts.get(r.label, 0) + 1
    keep = {
        c for c, k in counts.items() if k >= min_count and (k / n) >= min_fraction
    }
    survivors = [r for r in records if r.label in keep]
    return survivors, tuple(sorted(keep))


def preprocess(
    audiogram_participants: list[ParticipantRecord],
    loudness_participants: list[ParticipantRecord],
    *,
    min_pta: float = DEFAULT_MIN_PTA,
    min_fraction: float = DEFAULT_MIN_CLASS_FRACTION,
    min_count: int = DEFAULT_MIN_CLASS_COUNT,
    profiles: tuple[StandardAudiogram, ...] | None = None,
) -> tuple[list[LabeledRecord], PreprocessSummary]:
    """Run the full cascade on separate audiogram and loudness datasets."""
    audio_ears = split_ears(audiogram_participants)
    audio_complete = drop_incomplete(audio_ears)
    loud_ears = split_ears(loudness_participants)
    loud_complete = drop_incomplete(loud_ears)
    merged = merge_by_id_ear(audio_complete, loud_complete)
    labeled = label_records(merged, profiles)
    after_pta = filter_pta(labeled, min_pta)
    final, class_set = filter_rare_classes(after_pta, min_fraction, min_count)
    summary = PreprocessSummary(
        audiogram_ears=len(audio_ears),
        audiogram_complete=len(audio_complete),
        loudness_ears=len(loud_ears),
        loudness_complete=len(loud_complete),
        merged=len(merged),
        after_pta_filter=len(after_pta),
        after_class_filter=len(final),
        class_set=class_set,
    )
    return final, summary


def prepare_combined(
    participants: list[ParticipantRecord],
    *,
    min_pta: float = DEFAULT_MIN_PTA,
    min_fraction: float = DEFAULT_MIN_CLASS_FRACTION,
    min_count: int = DEFAULT_MIN_CLASS_COUNT,
    profiles: tuple[StandardAudiogram, ...] | None = None,
) -> tuple[list[LabeledRecord], PreprocessSummary]:
    """Cascade for a single dataset that carries both sides per record."""
    ears = split_ears(participants)
    complete = [
        r for r in drop_incomplete(ears) if r.audiogram is not None and r.features is not None
    ]
    labeled = label_records(complete, profiles)
    after_pta = filter_pta(labeled, min_pta)
    final, class_set = filter_rare_classes(after_pta, min_fraction, min_count)
    summary = PreprocessSummary(
        audiogram_ears=len(ears),
        audiogram_complete=len(complete),
        loudness_ears=len(ears),
        loudness_complete=len(complete),
        merged=len(complete),
        after_pta_filter=len(after_pta),
        after_class_filter=len(final),
        class_set=class_set,
    )
    return final, summary


def _participant_key(participant_id: str) -> int:
    # Stable across runs and processes, unlike hash().
    digest = hashlib.blake2b(participant_id.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def participant_offset(cfg: RovingConfig, participant_id: str) -> float:
    """The calibration offset a participant receives under ``cfg``.

    Keyed by participant identity, not record order, so any record ordering
    and any parallel execution produce identical offsets.
    """
    seq = np.random.SeedSequence([cfg.seed, _participant_key(participant_id)])
    rng = np.random.default_rng(seq)
    return float(rng.normal(cfg.mean, cfg.sd))


def apply_roving(records: list[LabeledRecord], cfg: RovingConfig) -> list[LabeledRecord]:
    """Shift every dB-level feature by one per-participant offset.

    Both ears and both frequencies of a participant share the offset; slope
    features are carried over bit-identically. A zero offset returns the
    record object unchanged, which makes (mean=0, sd=0) a byte-level no-op.
    """
    if cfg.mean == 0.0 and cfg.sd == 0.0:
        return list(records)
    offsets: dict[str, float] = {}
    out = []
    for r in records:
        o = offsets.get(r.participant_id)
        if o is None:
            o = participant_offset(cfg, r.participant_id)
            offsets[r.participant_id] = o
        if o == 0.0:
            out.append(r)
        else:
            out.append(replace(r, features=r.features.shifted(o)))
    return out


def _extended_profile(profile: StandardAudiogram) -> tuple[float, ...]:
    """Profile thresholds on the clinical grid, flat beyond the profile edges."""
    as_audiogram = Audiogram(profile.grid, profile.thresholds)
    out = []
    for f in THRESHOLD_FREQUENCIES_HZ:
        if f < profile.grid[0]:
            out.append(profile.thresholds[0])
        elif f > profile.grid[-1]:
            out.append(profile.thresholds[-1])
        else:
            out.append(resample(as_audiogram, (f,)).thresholds[0])
    return tuple(out)


def _clamp(x: float, bounds: tuple[float, float]) -> float:
    return min(max(x, bounds[0]), bounds[1])


def _synthesize_ear(
    cfg: SyntheticConfig,
    base_thresholds: tuple[float, ...],
    rng: np.random.Generator,
    participant_id: str,
    ear: str,
    profiles: tuple[StandardAudiogram, ...],
) -> tuple[Audiogram, LabeledRecord]:
    jitter = rng.normal(0.0, cfg.jitter_sd, size=len(base_thresholds))
    thresholds = tuple(t + j for t, j in zip(base_thresholds, jitter))
    audiogram = Audiogram(
        THRESHOLD_FREQUENCIES_HZ, thresholds, ear=ear, participant_id=participant_id
    )
    label, _ = classify(audiogram, profiles)

    blocks = []
    for freq in (1500.0, 4000.0):
        t = thresholds[THRESHOLD_FREQUENCIES_HZ.index(freq)]
        l2_5 = t + rng.normal(cfg.l2_5_offset_mean, cfg.l2_5_offset_sd)
        m_low = _clamp(cfg.m_low_intercept + cfg.m_low_slope * t, cfg.m_low_bounds)
        m_high = _clamp(cfg.m_high_intercept + cfg.m_high_slope * t, cfg.m_high_bounds)
        # l_cut placed so the fitted curve reaches 2.5 CU exactly at l2_5.
        l_cut = l2_5 + (25.0 - 2.5) / m_low
        fn = LoudnessFunction(l_cut=l_cut, m_low=m_low, m_high=m_high)
        reported_l_cut = l_cut + rng.normal(0.0, cfg.l_cut_noise_sd)
        blocks.append((fn, reported_l_cut))

    features = derive_features(blocks[0][0], blocks[1][0]).with_l_cut(
        blocks[0][1], blocks[1][1]
    )
    record = LabeledRecord(participant_id, ear, features, label, pta(audiogram))
    return audiogram, record


def generate_synthetic_full(
    cfg: SyntheticConfig,
) -> tuple[list[ParticipantRecord], list[LabeledRecord]]:
    """Synthesize participants (audiograms + features) and labeled records.

    Each participant contributes two ears with independent jitter; an odd
    records-per-class count leaves the last participant single-eared. RNG
    streams are keyed by (seed, class, participant, ear), so output does not
    depend on generation order.
    """
    profiles = load_profiles()
    by_class = {p.bisgaard_class: p for p in profiles}
    participants: list[ParticipantRecord] = []
    labeled: list[LabeledRecord] = []
    for ci, cls in enumerate(cfg.classes):
        base = _extended_profile(by_class[cls])
        n_participants = (cfg.records_per_class + 1) // 2
        for pi in range(n_participants):
            pid = f"syn-{cls.name}-p{pi:04d}"
            remaining = cfg.records_per_class - 2 * pi
            ears = EARS if remaining >= 2 else EARS[:1]
            ear_data: dict[str, EarData] = {}
            for ei, ear in enumerate(ears):
                rng = np.random.default_rng(
                    np.random.SeedSequence([cfg.seed, ci, pi, ei])
                )
                audiogram, record = _synthesize_ear(
                    cfg, base, rng, pid, ear, profiles
                )
                ear_data[ear] = EarData(audiogram=audiogram, features=record.features)
                labeled.append(record)
            participants.append(
                ParticipantRecord(pid, ear_data.get("left"), ear_data.get("right"))
            )
    return participants, labeled


def generate_synthetic(cfg: SyntheticConfig) -> list[LabeledRecord]:
    """Labeled synthetic records; see ``generate_synthetic_full``."""
    return generate_synthetic_full(cfg)[1]


def feature_matrix(records: list[LabeledRecord]) -> np.ndarray:
    """(n, 12) float64 matrix in ``FEATURE_NAMES`` column order."""
    return np.array([r.features.as_tuple() for r in records], dtype=np.float64)


def labels_of(records: list[LabeledRecord]) -> list[BisgaardClass]:
    return [r.label for r in records]


def _parse_cell(value: str, line_number: int, column: str) -> float:
    if value == "":
        return math.nan
    try:
        return float(value)
    except ValueError:
        raise ParseError(
            f"column {column!r} has non-numeric value {value!r}", line_number
        ) from None


def _format_cell(value: float | None) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return repr(float(value))


def load_csv(path) -> list[ParticipantRecord]:
    """Read participant records from the documented CSV schema.

    Empty cells mark missing values: a fully empty block (all thresholds or
    all features) means that side is absent; a partially empty block keeps
    the side present with NaN gaps so ``drop_incomplete`` can remove it.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("file is empty", 1) from None
        if tuple(header) != CSV_COLUMNS:
            unknown = [c for c in header if c not in CSV_COLUMNS]
            missing = [c for c in CSV_COLUMNS if c not in header]
            raise SchemaError(
                f"header mismatch: unknown columns {unknown}, missing columns {missing}"
            )
        order: list[str] = []
        ears: dict[str, dict[str, EarData]] = {}
        for line_number, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(CSV_COLUMNS):
                raise ParseError(
                    f"expected {len(CSV_COLUMNS)} cells, got {len(row)}", line_number
                )
            pid, ear = row[0], row[1]
            if not pid:
                raise ParseError("empty participant id", line_number)
            if ear not in EARS:
                raise ParseError(f"ear must be 'left' or 'right', got {ear!r}", line_number)
            thresholds = [
                _parse_cell(v, line_number, c)
                for v, c in zip(row[2:13], THRESHOLD_COLUMNS)
            ]
            feature_values = [
                _parse_cell(v, line_number, c) for v, c in zip(row[13:], FEATURE_NAMES)
            ]
            audiogram = None
            if any(not math.isnan(t) for t in thresholds):
                audiogram = Audiogram(
                    THRESHOLD_FREQUENCIES_HZ, thresholds, ear=ear, participant_id=pid
                )
            features = None
            if any(not math.isnan(v) for v in feature_values):
                features = LoudnessFeatureVector.from_sequence(feature_values)
            if audiogram is None and features is None:
                raise ParseError("row carries no data", line_number)
            if pid not in ears:
                ears[pid] = {}
                order.append(pid)
            if ear in ears[pid]:
                raise ParseError(f"duplicate entry for ({pid!r}, {ear!r})", line_number)
            ears[pid][ear] = EarData(audiogram=audiogram, features=features)
    return [
        ParticipantRecord(pid, ears[pid].get("left"), ears[pid].get("right"))
        for pid in order
    ]


def write_csv(records: list[ParticipantRecord], path) -> None:
    """Inverse of ``load_csv``; floats use shortest round-trip formatting."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            for ear, data in (("left", rec.left), ("right", rec.right)):
                if data is None or data.is_empty():
                    continue
                if data.audiogram is not None:
                    if data.audiogram.frequencies != THRESHOLD_FREQUENCIES_HZ:
                        raise DataError(
                            f"audiogram of {rec.participant_id}/{ear} is not on "
                            "the clinical frequency grid"
                        )
                    thresholds = [_format_cell(t) for t in data.audiogram.thresholds]
                else:
                    thresholds = [""] * len(THRESHOLD_COLUMNS)
                if data.features is not None:
                    features = [_format_cell(v) for v in data.features.as_tuple()]
                else:
                    features = [""] * len(FEATURE_NAMES)
                writer.writerow([rec.participant_id, ear, *thresholds, *features])


def write_labeled_json(records: list[LabeledRecord], path) -> None:
    payload = {
        "records": [
            {
                "participant_id": r.participant_id,
                "ear": r.ear,
                "label": r.label.name,
                "pta": r.pta,
                "features": r.features.as_dict(),
            }
            for r in records
        ]
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_labeled_json(path) -> list[LabeledRecord]:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"not valid JSON: {exc}") from None
    if not isinstance(payload, dict) or "records" not in payload:
        raise SchemaError("expected a top-level object with a 'records' list")
    out = []
    for i, entry in enumerate(payload["records"]):
        try:
            features = LoudnessFeatureVector.from_sequence(
                entry["features"][name] for name in FEATURE_NAMES
            )
            record = LabeledRecord(
                participant_id=str(entry["participant_id"]),
                ear=str(entry["ear"]),
                features=features,
                label=class_from_name(str(entry["label"])),
                pta=float(entry["pta"]),
            )
        except KeyError as exc:
            raise SchemaError(f"record {i} is missing key {exc}") from None
        out.append(record)
    return out
