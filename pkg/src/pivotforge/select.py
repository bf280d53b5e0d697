"""Phonetically diverse TTS prompt selection.

Diversity is proxied by character n-gram coverage over the candidate texts:
the languages this serves have near-phonemic orthographies, so covering
character unit types stands in for covering phones without shipping a G2P.
Selection is a deterministic greedy maximum-coverage sweep.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .corpus import Manifest

# TTS request hygiene: overly long sentences are excluded from candidacy
MAX_CANDIDATE_CHARS = 400

SEPARATOR = " "


class SelectionError(ValueError):
    """Raised when a selection request cannot be satisfied."""


@dataclass(frozen=True)
class UnitInventory:
    """Character n-gram occurrence counts over a manifest's texts."""

    n: int
    counts: dict[str, int]

    @property
    def type_count(self) -> int:
        return len(self.counts)

    @property
    def token_count(self) -> int:
        return sum(self.counts.values())


def _normalize(text: str) -> str:
    return SEPARATOR.join(text.lower().split())


def text_units(text: str, n: int) -> Counter[str]:
    """n-grams of one text: lowercased, whitespace runs collapsed to one separator."""
    if n not in (1, 2):
        raise SelectionError(f"n-gram order must be 1 or 2, got {n}")
    s = _normalize(text)
    return Counter(s[i:i + n] for i in range(len(s) - n + 1))


def unit_inventory(m: Manifest, n: int) -> UnitInventory:
    """Aggregate character n-gram counts across all entry texts."""
    if n not in (1, 2):
        raise SelectionError(f"n-gram order must be 1 or 2, got {n}")
    counts: Counter[str] = Counter()
    for u in m.entries:
        counts.update(text_units(u.text, n))
    return UnitInventory(n=n, counts=dict(counts))


def select_diverse(m: Manifest, k: int, n: int) -> Manifest:
    """Greedily pick k entries maximizing covered n-gram types.

    Each round selects the candidate adding the most uncovered unit types;
    ties break by larger pool-frequency mass of the newly covered types,
    then by lexicographically smaller id.  Entries longer than
    MAX_CANDIDATE_CHARS are not eligible.  Returns a pool-split manifest in
    selection order.
    """
    if n not in (1, 2):
        raise SelectionError(f"n-gram order must be 1 or 2, got {n}")
    if not 1 <= k <= len(m.entries):
        raise SelectionError(f"k must be in [1, {len(m.entries)}], got {k}")

    eligible = [u for u in m.entries if len(u.text) <= MAX_CANDIDATE_CHARS]
    if k > len(eligible):
        raise SelectionError(
            f"k={k} exceeds the {len(eligible)} candidates at most "
            f"{MAX_CANDIDATE_CHARS} characters long"
        )

    pool_counts: Counter[str] = Counter()
    unit_sets: dict[str, frozenset[str]] = {}
    for u in eligible:
        units = text_units(u.text, n)
        pool_counts.update(units)
        unit_sets[u.id] = frozenset(units)

    remaining = {u.id: u for u in eligible}
    covered: set[str] = set()
    picked: list = []

    while len(picked) < k:
        best_id: str | None = None
        best_gain = -1
        best_mass = -1
        for uid in remaining:
            new = unit_sets[uid] - covered
            gain = len(new)
            if gain < best_gain:
                continue
            mass = sum(pool_counts[t] for t in new)
            if (
                gain > best_gain
                or (gain == best_gain and mass > best_mass)
                or (gain == best_gain and mass == best_mass and (best_id is None or uid < best_id))
            ):
                best_id, best_gain, best_mass = uid, gain, mass
        assert best_id is not None
        if best_gain == 0:
            # coverage saturated: every further round ties at zero gain and
            # zero mass, so the tie-break reduces to ascending id order
            for uid in sorted(remaining):
                if len(picked) == k:
                    break
                picked.append(remaining[uid])
            break
        picked.append(remaining.pop(best_id))
        covered |= unit_sets[best_id]

    return Manifest(entries=tuple(picked), split="pool", language=m.language)
