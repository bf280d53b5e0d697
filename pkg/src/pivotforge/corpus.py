"""Corpus ingestion, validation, splitting, and summary statistics.

Manifests are the system of record for every dataset this toolkit touches:
authentic recordings, TTS prompt pools, synthetic audio, and mixed training
sets all travel as JSONL (canonical) or CSV (import convenience) manifests.
"""

from __future__ import annotations

import csv
import json
import random
from dataclasses import dataclass, field
from pathlib import Path

GENDERS = ("M", "F", "unknown")
SOURCES = ("authentic", "synthetic", "noise")
SPLITS = ("train", "val", "test", "pool")

CSV_HEADER = ["id", "text", "audio", "duration_s", "speaker", "gender", "language", "source"]


class ManifestError(ValueError):
    """Raised when a manifest file or record violates the manifest contract."""


@dataclass(frozen=True)
class Provenance:
    """Where a non-authentic utterance came from.

    For synthetic audio this records the TTS provider, the voice used, the
    pivot language whose TTS system spoke the text, and whether the text was
    transliterated into the pivot orthography first.  Noise entries reuse the
    same record to tag their origin corpus/language.
    """

    provider: str
    voice_id: str
    pivot_language: str
    transliterated: bool = False
    extra: tuple[tuple[str, str], ...] = ()

    def to_dict(self) -> dict:
        d = {
            "provider": self.provider,
            "voice_id": self.voice_id,
            "pivot_language": self.pivot_language,
            "transliterated": self.transliterated,
        }
        d.update(dict(self.extra))
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Provenance":
        known = {"provider", "voice_id", "pivot_language", "transliterated"}
        extra = tuple(sorted((k, str(v)) for k, v in d.items() if k not in known))
        return cls(
            provider=str(d.get("provider", "")),
            voice_id=str(d.get("voice_id", "")),
            pivot_language=str(d.get("pivot_language", "")),
            transliterated=bool(d.get("transliterated", False)),
            extra=extra,
        )


@dataclass(frozen=True)
class Utterance:
    """One text (plus optional audio) record with provenance metadata."""

    id: str
    text: str
    audio: str | None = None
    duration_s: float | None = None
    speaker: str = "unknown"
    gender: str = "unknown"
    language: str = "und"
    source: str = "authentic"
    provenance: Provenance | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ManifestError("utterance id must be nonempty")
        if not self.text:
            raise ManifestError(f"utterance {self.id!r}: text must be nonempty")
        if self.gender not in GENDERS:
            raise ManifestError(f"utterance {self.id!r}: gender must be one of {GENDERS}, got {self.gender!r}")
        if self.source not in SOURCES:
            raise ManifestError(f"utterance {self.id!r}: source must be one of {SOURCES}, got {self.source!r}")
        if self.duration_s is not None and self.duration_s < 0:
            raise ManifestError(f"utterance {self.id!r}: duration_s must be >= 0, got {self.duration_s}")
        if self.source == "synthetic":
            if self.provenance is None or not self.provenance.pivot_language:
                raise ManifestError(
                    f"utterance {self.id!r}: synthetic utterances require provenance with a pivot_language"
                )

    def to_dict(self) -> dict:
        d: dict = {"id": self.id, "text": self.text}
        if self.audio is not None:
            d["audio"] = self.audio
        if self.duration_s is not None:
            d["duration_s"] = self.duration_s
        d["speaker"] = self.speaker
        d["gender"] = self.gender
        d["language"] = self.language
        d["source"] = self.source
        if self.provenance is not None:
            d["provenance"] = self.provenance.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Utterance":
        try:
            uid = str(d["id"])
            text = str(d["text"])
        except KeyError as exc:
            raise ManifestError(f"record missing required key {exc.args[0]!r}") from None
        duration = d.get("duration_s")
        if duration is not None and duration != "":
            try:
                duration = float(duration)
            except (TypeError, ValueError):
                raise ManifestError(f"utterance {uid!r}: duration_s is not a number: {duration!r}") from None
        else:
            duration = None
        prov = d.get("provenance")
        return cls(
            id=uid,
            text=text,
            audio=str(d["audio"]) if d.get("audio") else None,
            duration_s=duration,
            speaker=str(d.get("speaker") or "unknown"),
            gender=str(d.get("gender") or "unknown"),
            language=str(d.get("language") or "und"),
            source=str(d.get("source") or "authentic"),
            provenance=Provenance.from_dict(prov) if isinstance(prov, dict) else None,
        )


@dataclass(frozen=True)
class Manifest:
    """An ordered, immutable collection of utterances with a split role.

    Invariants checked at construction: ids are unique, and every entry
    carries the manifest's target language (synthetic/noise entries keep
    their origin language in provenance, not in the language field).
    """

    entries: tuple[Utterance, ...]
    split: str = "train"
    language: str = "und"

    def __post_init__(self) -> None:
        if self.split not in SPLITS:
            raise ManifestError(f"split must be one of {SPLITS}, got {self.split!r}")
        seen: set[str] = set()
        for u in self.entries:
            if u.id in seen:
                raise ManifestError(f"duplicate utterance id {u.id!r}")
            seen.add(u.id)
            if u.language != self.language:
                raise ManifestError(
                    f"utterance {u.id!r} has language {u.language!r} but manifest is {self.language!r}"
                )

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def ids(self) -> list[str]:
        return [u.id for u in self.entries]


@dataclass(frozen=True)
class CorpusStats:
    """Summary counts for one manifest."""

    utterance_count: int
    total_hours: float
    speaker_count: int
    gender_mix: frozenset[str] = frozenset()
    missing_duration: int = 0

    def to_dict(self) -> dict:
        return {
            "utterance_count": self.utterance_count,
            "total_hours": self.total_hours,
            "speaker_count": self.speaker_count,
            "gender_mix": sorted(self.gender_mix),
            "missing_duration": self.missing_duration,
        }


def _infer_language(records: list[Utterance], declared: str | None) -> str:
    langs = {u.language for u in records if u.language != "und"}
    if declared:
        return declared
    if len(langs) == 1:
        return langs.pop()
    if not langs:
        return "und"
    raise ManifestError(f"records mix languages {sorted(langs)} and no manifest language was declared")


def load_manifest(
    path: str | Path,
    format: str | None = None,
    split: str = "train",
    language: str | None = None,
) -> Manifest:
    """Read a JSONL or CSV manifest file.

    `format` is inferred from the file extension when not given.  Rows
    missing the optional `language` field inherit the manifest language;
    unknown optional keys are dropped.  Raises ManifestError with a line
    number on parse failures, duplicate ids, or missing required columns.
    """
    path = Path(path)
    if format is None:
        format = "csv" if path.suffix.lower() == ".csv" else "jsonl"
    if format not in ("jsonl", "csv"):
        raise ManifestError(f"unsupported manifest format {format!r}")
    if not path.exists():
        raise ManifestError(f"manifest file not found: {path}")

    records: list[Utterance] = []
    if format == "jsonl":
        with path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    payload = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ManifestError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from None
                if not isinstance(payload, dict):
                    raise ManifestError(f"{path}:{lineno}: expected a JSON object")
                try:
                    records.append(Utterance.from_dict(payload))
                except ManifestError as exc:
                    raise ManifestError(f"{path}:{lineno}: {exc}") from None
    else:
        with path.open(encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            missing = [c for c in ("id", "text") if c not in (reader.fieldnames or [])]
            if missing:
                raise ManifestError(f"{path}: CSV header missing required column(s) {missing}")
            for lineno, row in enumerate(reader, start=2):
                row = {k: v for k, v in row.items() if k in CSV_HEADER and v not in (None, "")}
                try:
                    records.append(Utterance.from_dict(row))
                except ManifestError as exc:
                    raise ManifestError(f"{path}:{lineno}: {exc}") from None

    lang = _infer_language(records, language)
    normalized = []
    for u in records:
        if u.language == "und" and lang != "und":
            u = _with_language(u, lang)
        normalized.append(u)
    try:
        return Manifest(entries=tuple(normalized), split=split, language=lang)
    except ManifestError as exc:
        raise ManifestError(f"{path}: {exc}") from None


def _with_language(u: Utterance, language: str) -> Utterance:
    return Utterance(
        id=u.id,
        text=u.text,
        audio=u.audio,
        duration_s=u.duration_s,
        speaker=u.speaker,
        gender=u.gender,
        language=language,
        source=u.source,
        provenance=u.provenance,
    )


def save_manifest(m: Manifest, path: str | Path, format: str | None = None) -> Path:
    """Write a manifest back to disk; inverse of load_manifest for both formats."""
    path = Path(path)
    if format is None:
        format = "csv" if path.suffix.lower() == ".csv" else "jsonl"
    path.parent.mkdir(parents=True, exist_ok=True)
    if format == "jsonl":
        with path.open("w", encoding="utf-8") as fh:
            for u in m.entries:
                fh.write(json.dumps(u.to_dict(), ensure_ascii=False, sort_keys=True) + "\n")
    elif format == "csv":
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for u in m.entries:
                writer.writerow([
                    u.id,
                    u.text,
                    u.audio or "",
                    "" if u.duration_s is None else repr(u.duration_s),
                    u.speaker,
                    u.gender,
                    u.language,
                    u.source,
                ])
    else:
        raise ManifestError(f"unsupported manifest format {format!r}")
    return path


def split_manifest(
    m: Manifest, counts: tuple[int, int, int], seed: int
) -> tuple[Manifest, Manifest, Manifest]:
    """Partition a manifest into train/val/test of exactly the requested sizes.

    A seeded pseudorandom permutation is applied, then sliced, so the same
    (manifest, counts, seed) always yields the same id partition.
    """
    n_train, n_val, n_test = counts
    if min(counts) < 0:
        raise ManifestError(f"split counts must be nonnegative, got {counts}")
    total = n_train + n_val + n_test
    if total > len(m.entries):
        raise ManifestError(
            f"insufficient entries: requested {total} ({n_train}/{n_val}/{n_test}) "
            f"but manifest has {len(m.entries)}"
        )
    order = list(m.entries)
    random.Random(seed).shuffle(order)
    parts = (
        order[:n_train],
        order[n_train:n_train + n_val],
        order[n_train + n_val:total],
    )
    return tuple(
        Manifest(entries=tuple(part), split=role, language=m.language)
        for part, role in zip(parts, ("train", "val", "test"))
    )


def corpus_stats(m: Manifest) -> CorpusStats:
    """Count utterances, hours, speakers, and genders for one manifest.

    Entries without a duration contribute zero hours and are tallied in
    missing_duration instead of raising.
    """
    total_s = 0.0
    missing = 0
    speakers: set[str] = set()
    genders: set[str] = set()
    for u in m.entries:
        if u.duration_s is None:
            missing += 1
        else:
            total_s += u.duration_s
        speakers.add(u.speaker)
        genders.add(u.gender)
    return CorpusStats(
        utterance_count=len(m.entries),
        total_hours=total_s / 3600.0,
        speaker_count=len(speakers),
        gender_mix=frozenset(genders),
        missing_duration=missing,
    )
