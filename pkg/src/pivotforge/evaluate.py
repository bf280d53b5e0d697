"""ASR scoring: edit alignments, WER/CER, reduction rates, diagnostics.

Error rates are corpus-level (pooled counts over all pairs, not averaged
per utterance) and may exceed 1.0 when hypotheses run long.  Alignment ties
are resolved the same way everywhere: match > substitute > delete > insert.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence


class EvalError(ValueError):
    """Raised for unusable scoring inputs (empty references, duplicate ids)."""


class EditOp(NamedTuple):
    """One alignment step; ref/hyp hold the consumed tokens (None if unused)."""

    kind: str  # match | substitute | delete | insert
    ref: str | None
    hyp: str | None


@dataclass(frozen=True)
class Alignment:
    """Minimum-edit-cost alignment of a hypothesis to a reference."""

    ops: tuple[EditOp, ...]
    cost: int

    def counts(self) -> "ErrorCounts":
        subs = dels = ins = nref = 0
        for op in self.ops:
            k = op.kind
            if k == "substitute":
                subs += 1
            elif k == "delete":
                dels += 1
            elif k == "insert":
                ins += 1
            if k != "insert":
                nref += 1
        return ErrorCounts(subs, dels, ins, nref)


class ErrorCounts(NamedTuple):
    substitutions: int
    deletions: int
    insertions: int
    reference_length: int

    @property
    def errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    def rate(self) -> float:
        if self.reference_length == 0:
            raise EvalError("error rate undefined for empty reference")
        return self.errors / self.reference_length

    def __add__(self, other):
        return ErrorCounts(*(a + b for a, b in zip(self, other)))


def align(ref: Sequence, hyp: Sequence) -> Alignment:
    """Unit-cost edit alignment via dynamic programming with backtrace.

    Among minimal alignments, each cell prefers match over substitute over
    delete over insert, which pins down one canonical op sequence.
    """
    nr, nh = len(ref), len(hyp)
    if nh == 0:
        return Alignment(tuple(EditOp("delete", r, None) for r in ref), nr)
    if nr == 0:
        return Alignment(tuple(EditOp("insert", None, h) for h in hyp), nh)

    # row-by-row cost DP; per-cell op choices kept for the backtrace
    prev = list(range(nh + 1))
    dec = bytearray(nr * nh)
    idx = 0
    for i in range(1, nr + 1):
        r = ref[i - 1]
        cur = [i]
        diag = prev[0]
        append = cur.append
        for j in range(1, nh + 1):
            up = prev[j]
            if r == hyp[j - 1]:
                # a match never loses: diag <= up + 1 and diag <= left + 1
                best = diag
                code = 0
            else:
                best = diag + 1
                code = 1
                if up + 1 < best:
                    best = up + 1
                    code = 2
                left = cur[j - 1]
                if left + 1 < best:
                    best = left + 1
                    code = 3
            append(best)
            dec[idx] = code
            idx += 1
            diag = up
        prev = cur

    ops: list[EditOp] = []
    i, j = nr, nh
    while i > 0 and j > 0:
        code = dec[(i - 1) * nh + (j - 1)]
        if code == 0:
            ops.append(EditOp("match", ref[i - 1], hyp[j - 1]))
            i -= 1
            j -= 1
        elif code == 1:
            ops.append(EditOp("substitute", ref[i - 1], hyp[j - 1]))
            i -= 1
            j -= 1
        elif code == 2:
            ops.append(EditOp("delete", ref[i - 1], None))
            i -= 1
        else:
            ops.append(EditOp("insert", None, hyp[j - 1]))
            j -= 1
    while i > 0:
        ops.append(EditOp("delete", ref[i - 1], None))
        i -= 1
    while j > 0:
        ops.append(EditOp("insert", None, hyp[j - 1]))
        j -= 1
    ops.reverse()
    return Alignment(tuple(ops), prev[nh])


def replay(ref: Sequence, ops: Iterable[EditOp]) -> list:
    """Apply alignment ops to the reference; yields the hypothesis tokens."""
    out = []
    pos = 0
    for op in ops:
        if op.kind == "match":
            out.append(ref[pos])
            pos += 1
        elif op.kind == "substitute":
            out.append(op.hyp)
            pos += 1
        elif op.kind == "delete":
            pos += 1
        else:
            out.append(op.hyp)
    if pos != len(ref):
        raise EvalError(f"ops consumed {pos} of {len(ref)} reference tokens")
    return out


@dataclass(frozen=True)
class Normalization:
    """Text normalization applied before tokenization (recorded in reports)."""

    lowercase: bool = True
    strip_punctuation: bool = True
    punctuation: str = ".,!?;:\"'"
    collapse_whitespace: bool = True

    def apply(self, text: str) -> str:
        if self.lowercase:
            text = text.lower()
        if self.strip_punctuation:
            text = text.translate({ord(c): None for c in self.punctuation})
        if self.collapse_whitespace:
            text = " ".join(text.split())
        else:
            text = text.strip()
        return text

    def to_dict(self) -> dict:
        return {
            "lowercase": self.lowercase,
            "strip_punctuation": self.strip_punctuation,
            "punctuation": self.punctuation,
            "collapse_whitespace": self.collapse_whitespace,
        }


RAW = Normalization(lowercase=False, strip_punctuation=False, collapse_whitespace=True)


def word_tokens(text: str, norm: Normalization) -> list[str]:
    return norm.apply(text).split()


def char_tokens(text: str, norm: Normalization) -> list[str]:
    # whitespace runs collapse to a single space token so word boundaries
    # count as one character each
    return list(" ".join(norm.apply(text).split()))


def _pooled_counts(
    pairs: Iterable[tuple[str, str]],
    tokenize,
    norm: Normalization,
) -> ErrorCounts:
    total = ErrorCounts(0, 0, 0, 0)
    for idx, (ref, hyp) in enumerate(pairs):
        rt = tokenize(ref, norm)
        if not rt:
            raise EvalError(f"pair {idx}: reference empty after normalization: {ref!r}")
        total = total + align(rt, tokenize(hyp, norm)).counts()
    return total


def word_error_rate(pairs: Iterable[tuple[str, str]], norm: Normalization = Normalization()) -> float:
    """Pooled (S+D+I)/N over whitespace word tokens."""
    return _pooled_counts(pairs, word_tokens, norm).rate()


def char_error_rate(pairs: Iterable[tuple[str, str]], norm: Normalization = Normalization()) -> float:
    """Pooled (S+D+I)/N over character tokens, spaces collapsed."""
    return _pooled_counts(pairs, char_tokens, norm).rate()


def reduction_rate(rate_old: float, rate_new: float) -> float:
    """Relative reduction (rate_old - rate_new) / rate_old; negative on regressions."""
    if rate_old == 0:
        raise ZeroDivisionError("reduction rate undefined for rate_old = 0")
    if rate_old < 0:
        raise EvalError(f"rate_old must be positive, got {rate_old}")
    return (rate_old - rate_new) / rate_old


def per_char_report(
    pairs: Iterable[tuple[str, str]],
    norm: Normalization = Normalization(),
    threshold: float = 0.25,
    relative: bool = False,
) -> tuple[dict[str, float], set[str]]:
    """Per-reference-character substitution+deletion proportions and outliers.

    For each character c the proportion p_c = (subs + dels of c) / occurrences
    of c is computed from character-level alignments; a character is an
    outlier when its proportion deviates from the mean by at least the
    threshold (absolute deviation by default, relative-to-mean when
    `relative`).  The word-separator space is not a language character and is
    excluded.
    """
    occur: Counter[str] = Counter()
    errors: Counter[str] = Counter()
    for idx, (ref, hyp) in enumerate(pairs):
        rt = char_tokens(ref, norm)
        if not rt:
            raise EvalError(f"pair {idx}: reference empty after normalization: {ref!r}")
        for op in align(rt, char_tokens(hyp, norm)).ops:
            c = op.ref
            if c is None or c == " ":
                continue
            occur[c] += 1
            if op.kind in ("substitute", "delete"):
                errors[c] += 1
    per_char = {c: errors[c] / n for c, n in occur.items()}
    if not per_char:
        return {}, set()
    mean = sum(per_char.values()) / len(per_char)
    cutoff = threshold * mean if relative else threshold
    outliers = {c for c, p in per_char.items() if abs(p - mean) >= cutoff}
    return per_char, outliers


@dataclass(frozen=True)
class EvalReport:
    """Full scoring bundle for one reference/hypothesis set."""

    wer: float
    cer: float
    word_counts: ErrorCounts
    char_counts: ErrorCounts
    per_char: dict[str, float]
    per_char_mean: float
    outliers: frozenset[str]
    normalization: Normalization
    outlier_threshold: float = 0.25
    outlier_relative: bool = False
    pair_count: int = 0

    def to_dict(self) -> dict:
        return {
            "pair_count": self.pair_count,
            "wer": self.wer,
            "cer": self.cer,
            "word_counts": self.word_counts._asdict(),
            "char_counts": self.char_counts._asdict(),
            "per_char": {c: self.per_char[c] for c in sorted(self.per_char)},
            "per_char_mean": self.per_char_mean,
            "outliers": sorted(self.outliers),
            "outlier_threshold": self.outlier_threshold,
            "outlier_relative": self.outlier_relative,
            "normalization": self.normalization.to_dict(),
        }

    def tsv_row(self, label: str | None = None) -> str:
        """One delimited row in the style of a results-table line."""
        cells = [] if label is None else [label]
        cells += [f"{self.wer * 100:.1f}%", f"{self.cer * 100:.1f}%"]
        return "\t".join(cells)


def evaluate_pairs(
    pairs: Sequence[tuple[str, str]],
    norm: Normalization = Normalization(),
    threshold: float = 0.25,
    relative: bool = False,
) -> EvalReport:
    """Score a list of (reference, hypothesis) strings into an EvalReport."""
    wc = _pooled_counts(pairs, word_tokens, norm)
    cc = _pooled_counts(pairs, char_tokens, norm)
    per_char, outliers = per_char_report(pairs, norm, threshold=threshold, relative=relative)
    mean = sum(per_char.values()) / len(per_char) if per_char else 0.0
    return EvalReport(
        wer=wc.rate(),
        cer=cc.rate(),
        word_counts=wc,
        char_counts=cc,
        per_char=per_char,
        per_char_mean=mean,
        outliers=frozenset(outliers),
        normalization=norm,
        outlier_threshold=threshold,
        outlier_relative=relative,
        pair_count=len(pairs),
    )


@dataclass(frozen=True)
class ABTally:
    """Win counts from paired A-B listening comparisons."""

    comparisons: int
    wins_a: int
    wins_b: int

    @property
    def proportion_a(self) -> float:
        return self.wins_a / self.comparisons if self.comparisons else 0.0

    @property
    def proportion_b(self) -> float:
        return self.wins_b / self.comparisons if self.comparisons else 0.0

    def to_dict(self) -> dict:
        return {
            "comparisons": self.comparisons,
            "wins_a": self.wins_a,
            "wins_b": self.wins_b,
            "proportion_a": self.proportion_a,
            "proportion_b": self.proportion_b,
        }


def ab_tally(records: Iterable[tuple[str, str]]) -> ABTally:
    """Count A/B preference wins; comparison ids must be unique."""
    seen: set[str] = set()
    wins_a = wins_b = 0
    for cid, winner in records:
        if cid in seen:
            raise EvalError(f"duplicate comparison id {cid!r}")
        seen.add(cid)
        if winner == "A":
            wins_a += 1
        elif winner == "B":
            wins_b += 1
        else:
            raise EvalError(f"comparison {cid!r}: winner must be 'A' or 'B', got {winner!r}")
    return ABTally(comparisons=len(seen), wins_a=wins_a, wins_b=wins_b)


def read_text_table(path: str | Path) -> dict[str, str]:
    """Read a JSONL file of {"id": ..., "text": ...} rows into an id->text map."""
    path = Path(path)
    table: dict[str, str] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise EvalError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from None
            if "id" not in row or "text" not in row:
                raise EvalError(f"{path}:{lineno}: row needs 'id' and 'text' keys")
            rid = str(row["id"])
            if rid in table:
                raise EvalError(f"{path}:{lineno}: duplicate id {rid!r}")
            table[rid] = str(row["text"])
    return table


def join_by_id(
    refs: dict[str, str], hyps: dict[str, str]
) -> tuple[list[tuple[str, str]], list[str], list[str]]:
    """Pair references with hypotheses by id; also report the unmatched ids."""
    common = [rid for rid in refs if rid in hyps]
    pairs = [(refs[rid], hyps[rid]) for rid in common]
    missing_hyp = sorted(rid for rid in refs if rid not in hyps)
    missing_ref = sorted(rid for rid in hyps if rid not in refs)
    return pairs, missing_hyp, missing_ref
