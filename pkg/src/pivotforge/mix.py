"""Training-set construction: duplication policies, grids, leakage checks.

Augmentation balances authentic against synthetic data by literally
repeating the authentic entries (suffixed ids, same audio) rather than by
sampling weights, so the output manifest works with any trainer.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, replace

from .corpus import Manifest

# observed quality ceiling: more synthetic data than this starts to hurt
SYNTHETIC_CEILING = 8000
# synthetic-to-authentic target ratio used when data allows it
TARGET_RATIO = 8

_COPY_SUFFIX = re.compile(r"#\d+$")


class MixError(ValueError):
    """Raised for unsatisfiable policies or malformed grids."""


@dataclass(frozen=True)
class AugmentationPolicy:
    """How much authentic data to repeat and synthetic data to add."""

    authentic_count: int
    duplication_factor: int
    synthetic_count: int
    label: str = ""

    def __post_init__(self):
        if self.authentic_count < 0:
            raise MixError(f"authentic_count must be >= 0, got {self.authentic_count}")
        if self.duplication_factor < 1:
            raise MixError(f"duplication_factor must be >= 1, got {self.duplication_factor}")
        if self.synthetic_count < 0:
            raise MixError(f"synthetic_count must be >= 0, got {self.synthetic_count}")

    @property
    def balanced(self) -> bool:
        return self.duplication_factor * self.authentic_count == self.synthetic_count

    @property
    def total(self) -> int:
        return self.duplication_factor * self.authentic_count + self.synthetic_count

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "authentic_count": self.authentic_count,
            "duplication_factor": self.duplication_factor,
            "synthetic_count": self.synthetic_count,
            "total": self.total,
        }


@dataclass(frozen=True)
class ExperimentGrid:
    """A labeled batch of augmentation policies to sweep."""

    cells: tuple[AugmentationPolicy, ...]

    def __post_init__(self):
        labels = [c.label for c in self.cells]
        if len(set(labels)) != len(labels):
            dupes = sorted({l for l in labels if labels.count(l) > 1})
            raise MixError(f"duplicate cell labels: {dupes}")

    def __len__(self) -> int:
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells)

    def to_list(self) -> list[dict]:
        return [c.to_dict() for c in self.cells]


def recommend_policy(
    authentic_count: int,
    synthetic_available: int,
    ceiling: int = SYNTHETIC_CEILING,
    ratio: int = TARGET_RATIO,
) -> AugmentationPolicy:
    """Pick the duplication factor and synthetic amount for N authentic pairs.

    Takes as much synthetic data as helps (up to ratio*N, capped by the
    ceiling and by what exists) and repeats the authentic side to match:
    d = max(1, round(S/N)).  With no synthetic data this is the plain
    no-augmentation baseline (d=1, S=0).
    """
    if authentic_count < 1:
        raise MixError(f"authentic_count must be >= 1, got {authentic_count}")
    if synthetic_available < 0:
        raise MixError(f"synthetic_available must be >= 0, got {synthetic_available}")
    s = min(ratio * authentic_count, synthetic_available, ceiling)
    d = max(1, round(s / authentic_count)) if s else 1
    return AugmentationPolicy(
        authentic_count=authentic_count,
        duplication_factor=d,
        synthetic_count=s,
        label=f"n{authentic_count}-s{s}-d{d}",
    )


def build_training_set(
    authentic: Manifest,
    synthetic: Manifest | None,
    policy: AugmentationPolicy,
    seed: int = 0,
) -> Manifest:
    """Assemble d copies of the first N authentic entries plus S synthetic.

    Copy 1 keeps the original id; copies 2..d get `id#2` .. `id#d` so every
    entry stays unique while remaining traceable.  The result is shuffled
    deterministically by seed and always has exactly d*N + S entries.
    """
    n = policy.authentic_count
    d = policy.duplication_factor
    s = policy.synthetic_count
    if len(authentic.entries) < n:
        raise MixError(f"need {n} authentic entries, manifest has {len(authentic.entries)}")
    have_syn = len(synthetic.entries) if synthetic is not None else 0
    if have_syn < s:
        raise MixError(f"need {s} synthetic entries, manifest has {have_syn}")

    selected = authentic.entries[:n]
    out = list(selected)
    for copy in range(2, d + 1):
        out.extend(replace(u, id=f"{u.id}#{copy}") for u in selected)
    if s:
        out.extend(synthetic.entries[:s])
    random.Random(seed).shuffle(out)
    language = authentic.language if n else (synthetic.language if synthetic else None)
    return Manifest(entries=tuple(out), split="train", language=language)


def make_grid(
    authentic_sizes: list[int],
    synthetic_sizes: list[int],
    duplication_factors: list[int] = (1,),
) -> ExperimentGrid:
    """Cartesian product of sizes and factors as a labeled experiment grid."""
    if not authentic_sizes or not synthetic_sizes or not duplication_factors:
        raise MixError("all grid dimensions need at least one value")
    for n in authentic_sizes:
        if n < 1:
            raise MixError(f"authentic sizes must be positive, got {n}")
    for s in synthetic_sizes:
        if s < 0:
            raise MixError(f"synthetic sizes must be >= 0, got {s}")
    for d in duplication_factors:
        if d < 1:
            raise MixError(f"duplication factors must be >= 1, got {d}")
    cells = tuple(
        AugmentationPolicy(
            authentic_count=n,
            duplication_factor=d,
            synthetic_count=s,
            label=f"n{n}-s{s}-d{d}",
        )
        for n in authentic_sizes
        for s in synthetic_sizes
        for d in duplication_factors
    )
    return ExperimentGrid(cells=cells)


def base_id(utterance_id: str) -> str:
    """Strip a duplication suffix (`#k`) if present."""
    return _COPY_SUFFIX.sub("", utterance_id)


def check_leakage(training: Manifest, holdouts: list[Manifest]) -> list[str]:
    """Ids present both in training (suffixes stripped) and in any holdout."""
    train_ids = {base_id(u.id) for u in training.entries}
    leaked = set()
    for holdout in holdouts:
        leaked.update(train_ids.intersection(u.id for u in holdout.entries))
    return sorted(leaked)
