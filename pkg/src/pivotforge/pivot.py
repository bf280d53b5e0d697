"""Typological distance tables and pivot-language ranking.

Distances arrive as precomputed pairwise values (external CSV, one row per
facet/pair).  Ranking combines facets as a weighted mean; the default
weighting leans entirely on geography and genealogy, with phonology
available for targeted experiments.  A low typological distance does not
guarantee the best ASR outcome, so the shortlist deliberately includes the
candidate nearest the average distance as a second hypothesis to try.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

STANDARD_FACETS = frozenset({"geographic", "genetic", "phonological"})

DEFAULT_WEIGHTS = {"geographic": 0.5, "genetic": 0.5, "phonological": 0.0}

# composite scores are rounded so that ranking order survives harmless
# floating-point noise (e.g. rescaling all weights by a constant)
SCORE_DECIMALS = 12


class DistanceError(ValueError):
    """Raised for malformed distance tables or unsatisfiable lookups."""


@dataclass(frozen=True)
class DistanceTable:
    """Symmetric per-facet language distances in [0, 1]."""

    facets: frozenset[str]
    entries: dict[tuple[str, str, str], float] = field(default_factory=dict)

    @staticmethod
    def key(facet: str, a: str, b: str) -> tuple[str, str, str]:
        return (facet, a, b) if a <= b else (facet, b, a)

    def lookup(self, facet: str, a: str, b: str) -> float | None:
        if a == b:
            return 0.0
        return self.entries.get(self.key(facet, a, b))

    def languages(self) -> set[str]:
        langs: set[str] = set()
        for _, a, b in self.entries:
            langs.add(a)
            langs.add(b)
        return langs


def load_distances(path: str | Path) -> DistanceTable:
    """Read a `facet,lang_a,lang_b,distance` CSV into a symmetric table.

    Distances must lie in [0, 1]; self-pairs must be zero; the same pair
    listed twice for one facet must agree.
    """
    path = Path(path)
    if not path.exists():
        raise DistanceError(f"distance file not found: {path}")
    entries: dict[tuple[str, str, str], float] = {}
    facets: set[str] = set()
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"facet", "lang_a", "lang_b", "distance"}
        missing = required - set(reader.fieldnames or [])
        if missing:
            raise DistanceError(f"{path}: header missing column(s) {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            facet = row["facet"].strip().lower()
            a = row["lang_a"].strip().lower()
            b = row["lang_b"].strip().lower()
            try:
                d = float(row["distance"])
            except (TypeError, ValueError):
                raise DistanceError(f"{path}:{lineno}: distance is not a number: {row['distance']!r}") from None
            if not (facet and a and b):
                raise DistanceError(f"{path}:{lineno}: empty facet or language code")
            if not 0.0 <= d <= 1.0:
                raise DistanceError(f"{path}:{lineno}: distance {d} outside [0, 1]")
            if a == b and d != 0.0:
                raise DistanceError(f"{path}:{lineno}: self-distance for {a!r} must be 0, got {d}")
            key = DistanceTable.key(facet, a, b)
            if key in entries and entries[key] != d:
                raise DistanceError(
                    f"{path}:{lineno}: conflicting distances for {facet} {a}-{b}: "
                    f"{entries[key]} vs {d}"
                )
            entries[key] = d
            facets.add(facet)
    return DistanceTable(facets=frozenset(facets | STANDARD_FACETS), entries=entries)


def composite_distance(
    t: DistanceTable, a: str, b: str, weights: dict[str, float] | None = None
) -> float:
    """Weighted mean distance over the positively weighted facets."""
    weights = DEFAULT_WEIGHTS if weights is None else weights
    if any(w < 0 for w in weights.values()):
        raise DistanceError(f"facet weights must be nonnegative: {weights}")
    active = {f: w for f, w in weights.items() if w > 0}
    total_w = sum(active.values())
    if total_w <= 0:
        raise DistanceError("at least one facet weight must be positive")
    acc = 0.0
    for f, w in active.items():
        d = t.lookup(f, a, b)
        if d is None:
            raise DistanceError(f"no {f} distance for pair ({a}, {b})")
        acc += w * d
    return acc / total_w


@dataclass(frozen=True)
class PivotRanking:
    """Candidates ordered by ascending composite distance from the target."""

    target: str
    scored: tuple[tuple[str, float, dict[str, float]], ...]
    ties: tuple[tuple[str, ...], ...] = ()
    unscorable: tuple[tuple[str, str], ...] = ()

    def codes(self) -> list[str]:
        return [code for code, _, _ in self.scored]


def rank_pivots(
    t: DistanceTable,
    target: str,
    candidates: set[str] | list[str],
    weights: dict[str, float] | None = None,
) -> PivotRanking:
    """Score every candidate against the target and sort ascending.

    Candidates missing any positively weighted facet are reported as
    unscorable rather than silently dropped or imputed.  Output order is
    independent of the candidate input order: ties in composite score are
    broken lexicographically by code.
    """
    weights = DEFAULT_WEIGHTS if weights is None else weights
    cands = sorted({c.lower() for c in candidates})
    if not cands:
        raise DistanceError("candidate set is empty")
    target = target.lower()
    if target in cands:
        raise DistanceError(f"target {target!r} cannot be its own pivot candidate")

    active = [f for f, w in weights.items() if w > 0]
    scored: list[tuple[str, float, dict[str, float]]] = []
    unscorable: list[tuple[str, str]] = []
    for c in cands:
        facet_scores: dict[str, float] = {}
        missing = None
        for f in active:
            d = t.lookup(f, c, target)
            if d is None:
                missing = f
                break
            facet_scores[f] = d
        if missing is not None:
            unscorable.append((c, f"no {missing} distance for pair ({c}, {target})"))
            continue
        score = round(composite_distance(t, c, target, weights), SCORE_DECIMALS)
        scored.append((c, score, facet_scores))

    scored.sort(key=lambda item: (item[1], item[0]))

    ties: list[tuple[str, ...]] = []
    i = 0
    while i < len(scored):
        j = i
        while j < len(scored) and scored[j][1] == scored[i][1]:
            j += 1
        if j - i > 1:
            ties.append(tuple(code for code, _, _ in scored[i:j]))
        i = j

    return PivotRanking(
        target=target,
        scored=tuple(scored),
        ties=tuple(ties),
        unscorable=tuple(unscorable),
    )


def shortlist(ranking: PivotRanking, m: int) -> list[str]:
    """Top-m candidates plus the one nearest the mean composite distance.

    Mirrors the empirical-search recipe: try the closest languages, and also
    the language sitting closest to the average distance from the target.
    The average candidate is appended after the top-m and deduplicated.
    """
    if m < 1:
        raise DistanceError(f"shortlist size must be >= 1, got {m}")
    if not ranking.scored:
        return []
    top = [code for code, _, _ in ranking.scored[:m]]
    mean = sum(score for _, score, _ in ranking.scored) / len(ranking.scored)
    avg_code = min(ranking.scored, key=lambda item: (abs(item[1] - mean), item[0]))[0]
    if avg_code not in top:
        top.append(avg_code)
    return top
