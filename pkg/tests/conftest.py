import json
import random
from pathlib import Path

import pytest

from pivotforge.corpus import Manifest, Provenance, Utterance

WORDS = [
    "jambo", "habari", "nzuri", "sana", "rafiki", "asante", "karibu", "chakula",
    "maji", "moto", "baridi", "shule", "kitabu", "mwalimu", "mtoto", "nyumba",
    "safari", "simba", "tembo", "twiga", "ndege", "samaki", "mkate", "ndizi",
    "embe", "nanasi", "mchana", "usiku", "asubuhi", "jioni", "leo", "kesho",
    "jana", "wiki", "mwezi", "mwaka", "saa", "dakika", "haraka", "polepole",
]


def make_text(rng: random.Random, lo: int = 3, hi: int = 6) -> str:
    return " ".join(rng.sample(WORDS, rng.randint(lo, hi)))


def make_utterance(i: int, prefix: str = "utt", language: str = "swh", **kwargs) -> Utterance:
    rng = random.Random(i)
    defaults = dict(
        id=f"{prefix}-{i:05d}",
        text=make_text(rng),
        audio=f"audio/{prefix}-{i:05d}.wav",
        duration_s=round(2.0 + rng.random() * 4.0, 3),
        speaker=f"spk-{i % 7}",
        gender=("M", "F")[i % 2],
        language=language,
        source="authentic",
    )
    defaults.update(kwargs)
    return Utterance(**defaults)


def make_manifest(n: int, prefix: str = "utt", split: str = "train",
                  language: str = "swh", **kwargs) -> Manifest:
    entries = tuple(make_utterance(i, prefix=prefix, language=language, **kwargs) for i in range(n))
    return Manifest(entries=entries, split=split, language=language)


def make_synthetic_manifest(n: int, prefix: str = "syn", language: str = "swh",
                            pivot: str = "spa") -> Manifest:
    entries = tuple(
        make_utterance(
            i,
            prefix=prefix,
            language=language,
            source="synthetic",
            speaker=f"v{i % 3}",
            provenance=Provenance(provider="mock", voice_id=f"v{i % 3}", pivot_language=pivot),
        )
        for i in range(n)
    )
    return Manifest(entries=entries, split="train", language=language)


def write_jsonl(path: Path, rows: list[dict]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    return path


@pytest.fixture
def rng():
    return random.Random(20260822)


@pytest.fixture
def maps_dir():
    import pivotforge

    return Path(pivotforge.__file__).parent / "maps"
