"""Grapheme rewrite rules: target-language text into pivot-language orthography.

Phone maps are hand-written, line-oriented rule files.  Rewriting is a
deterministic left-to-right scan applying the longest matching source
cluster at each position; replacements are never re-scanned.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .corpus import Manifest


class PhoneMapError(ValueError):
    """Raised for malformed phone-map documents."""


class UnmappedGraphemeError(ValueError):
    """Raised in error mode when input contains a letter no rule covers."""

    def __init__(self, char: str, offset: int):
        super().__init__(f"unmapped grapheme {char!r} at offset {offset}")
        self.char = char
        self.offset = offset


@dataclass(frozen=True)
class Rule:
    source: str
    replacement: str
    note: str | None = None


@dataclass(frozen=True)
class PhoneMap:
    """Ordered grapheme-rewrite rules plus verbatim passthrough characters.

    Characters that are not letters (whitespace, digits, punctuation) pass
    through by default; the explicit passthrough set extends that, e.g. for
    letters that should survive unmapped.
    """

    target_language: str
    pivot_language: str
    rules: tuple[Rule, ...] = ()
    passthrough: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for r in self.rules:
            if not r.source:
                raise PhoneMapError("rule with empty source cluster")
            if r.source in seen:
                raise PhoneMapError(f"duplicate source cluster {r.source!r}")
            seen.add(r.source)
        # longest-first per start character makes the scan loop a simple
        # first-match walk
        by_first: dict[str, list[Rule]] = {}
        for r in self.rules:
            by_first.setdefault(r.source[0], []).append(r)
        for rules in by_first.values():
            rules.sort(key=lambda r: -len(r.source))
        object.__setattr__(self, "_by_first", by_first)

    @property
    def sources(self) -> set[str]:
        return {r.source for r in self.rules}

    def max_replacement_len(self) -> int:
        return max((len(r.replacement) for r in self.rules), default=0)


def parse_phone_map(source: str) -> PhoneMap:
    """Parse a phone-map document (see the file format in the README).

    Lines: `@map <target> <pivot>` header (required, before any rule),
    optional `@passthrough <chars>` lines, then `<source> => <replacement>`
    rules with optional `# comment` trailers.  Blank lines and full-line
    comments are ignored.  Sources and replacements are lowercased.
    """
    target: str | None = None
    pivot: str | None = None
    rules: list[Rule] = []
    passthrough: set[str] = set()
    seen_sources: set[str] = set()

    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("@map"):
            parts = line.split()
            if len(parts) != 3:
                raise PhoneMapError(f"line {lineno}: @map needs exactly two language codes")
            target, pivot = parts[1].lower(), parts[2].lower()
            continue
        if line.startswith("@passthrough"):
            chars = line[len("@passthrough"):].strip()
            passthrough.update(c for c in chars if not c.isspace())
            continue
        if line.startswith("@"):
            raise PhoneMapError(f"line {lineno}: unknown directive {line.split()[0]!r}")
        if target is None:
            raise PhoneMapError(f"line {lineno}: rule before @map header")

        body, _, comment = line.partition("#")
        lhs, sep, rhs = body.partition("=>")
        if not sep:
            raise PhoneMapError(f"line {lineno}: expected '<source> => <replacement>'")
        src = lhs.strip().lower()
        repl = rhs.strip().lower()
        if not src:
            raise PhoneMapError(f"line {lineno}: empty source cluster")
        if src in seen_sources:
            raise PhoneMapError(f"line {lineno}: duplicate source cluster {src!r}")
        seen_sources.add(src)
        rules.append(Rule(source=src, replacement=repl, note=comment.strip() or None))

    if target is None or pivot is None:
        raise PhoneMapError("missing @map header")
    return PhoneMap(
        target_language=target,
        pivot_language=pivot,
        rules=tuple(rules),
        passthrough=frozenset(passthrough),
    )


def load_phone_map(path) -> PhoneMap:
    with open(path, encoding="utf-8") as fh:
        return parse_phone_map(fh.read())


def transliterate(text: str, map: PhoneMap, on_unmapped: str = "error") -> str:
    """Rewrite text with longest-match-first, leftmost scanning.

    Input is lowercased before matching.  At each position the longest rule
    source that matches wins; otherwise passthrough characters are copied
    verbatim, and remaining letters are handled per on_unmapped
    (error | keep | drop).
    """
    if on_unmapped not in ("error", "keep", "drop"):
        raise ValueError(f"on_unmapped must be error|keep|drop, got {on_unmapped!r}")
    text = text.lower()
    by_first = map._by_first  # type: ignore[attr-defined]
    passthrough = map.passthrough
    out: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        matched = False
        for rule in by_first.get(ch, ()):
            if text.startswith(rule.source, i):
                out.append(rule.replacement)
                i += len(rule.source)
                matched = True
                break
        if matched:
            continue
        if ch in passthrough or not ch.isalpha():
            out.append(ch)
        elif on_unmapped == "keep":
            out.append(ch)
        elif on_unmapped == "drop":
            pass
        else:
            raise UnmappedGraphemeError(ch, i)
        i += 1
    return "".join(out)


@dataclass(frozen=True)
class CoverageReport:
    """Which corpus characters a phone map reaches.

    A character counts as mapped when it participates in some rule source or
    is explicitly passed through.  Whitespace and digits are ignored.
    Default punctuation passthrough is deliberately NOT credited here, so
    that orthographic marks like the apostrophe in ng' get flagged until the
    map author handles them.
    """

    mapped: frozenset[str]
    unmapped: dict[str, int] = field(default_factory=dict)

    @property
    def complete(self) -> bool:
        return not self.unmapped


def coverage_check(map: PhoneMap, corpus: Manifest) -> CoverageReport:
    """Classify every character occurring in corpus texts as mapped/unmapped."""
    reachable: set[str] = set(map.passthrough)
    for r in map.rules:
        reachable.update(r.source)
    mapped: set[str] = set()
    unmapped: Counter[str] = Counter()
    for u in corpus.entries:
        for ch in u.text.lower():
            if ch.isspace() or ch.isdigit():
                continue
            if ch in reachable:
                mapped.add(ch)
            else:
                unmapped[ch] += 1
    return CoverageReport(mapped=frozenset(mapped), unmapped=dict(unmapped))
