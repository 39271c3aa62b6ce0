"""Ambiguity-preserving scanner producing lexical analysis graphs.

Scanning finds every token the token specification admits (longest match per
type and start position under the greedy policy, every match length under the
exploratory one), then adjacency links each token to the tokens that can come
immediately after it.  Spans are half-open ``[start, end)``.
"""

from __future__ import annotations

import bisect
import enum
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import groupby
from typing import Iterable, Iterator, Sequence

from .grammar import TokenTypeSpec
from .regex import RegexMatcher, compile_matcher

__all__ = [
    "Policy",
    "ScanConfig",
    "Token",
    "LexicalAnalysisGraph",
    "UnscannableRegion",
    "scan",
    "scan_greedy",
    "scan_exploratory",
    "compute_adjacency",
    "build_lexical_graph",
]

DEFAULT_IGNORE = r"[ \t\r\n\f\v]+"


class Policy(enum.Enum):
    GREEDY = "greedy"
    EXPLORATORY = "exploratory"


@dataclass(frozen=True)
class ScanConfig:
    policy: Policy = Policy.GREEDY
    ignore: str | None = DEFAULT_IGNORE

    def __post_init__(self) -> None:
        object.__setattr__(self, "policy", Policy(self.policy))


@dataclass(frozen=True, order=True)
class Token:
    start: int
    end: int
    type: str
    text: str = field(compare=False)

    @property
    def symbol(self) -> str:
        return self.type

    def __repr__(self) -> str:
        return f"{self.type}({self.text!r})[{self.start},{self.end})"


class UnscannableRegion(Exception):
    """No token and no ignorable text accounts for ``position``."""

    def __init__(self, text: str, position: int, tokens: Iterable[Token] = ()):
        self.position = position
        self.tokens = frozenset(tokens)
        line_start = text.rfind("\n", 0, position) + 1
        line_end = text.find("\n", position)
        line = text[line_start : line_end if line_end >= 0 else len(text)]
        self.excerpt = line[:80]
        column = position - line_start
        super().__init__(
            f"cannot scan input at position {position}: {self.excerpt!r} (column {column})"
        )


def _matcher(spec: TokenTypeSpec):
    pat = spec.pattern
    return compile_matcher(pat) if isinstance(pat, str) else pat


def _tiers(specs: Sequence[TokenTypeSpec]):
    """(precedence, [(spec, matcher)]) groups, highest tier first, stable."""
    ordered = sorted(specs, key=lambda s: -s.precedence)
    for prec, group in groupby(ordered, key=lambda s: s.precedence):
        yield prec, [(s, _matcher(s)) for s in group]


def _ignore_matcher(config: ScanConfig) -> RegexMatcher | None:
    return compile_matcher(config.ignore) if config.ignore else None


def scan_greedy(text: str, specs: Sequence[TokenTypeSpec], config: ScanConfig = ScanConfig()) -> set[Token]:
    """Longest match per token type at every reachable start position.

    Position 0 starts in MATCH state; every token end (and every end of an
    ignorable run) switches the following position to MATCH.
    """
    n = len(text)
    tiers = list(_tiers(specs))
    ignore = _ignore_matcher(config)
    match = [False] * (n + 1)
    match[0] = True
    forbidden: list[set[str]] = [set() for _ in range(n)]
    tokens: set[Token] = set()
    for pos in range(n):
        if not match[pos]:
            continue
        found = False
        for _, group in tiers:
            blocked = frozenset(forbidden[pos])
            emitted = []
            for spec, m in group:
                if spec.name in blocked:
                    continue
                length = m.longest(text, pos)
                if length > 0:
                    emitted.append((spec, length))
            # overrides of one tier only take effect for later tiers
            for spec, length in emitted:
                end = pos + length
                tokens.add(Token(pos, end, spec.name, text[pos:end]))
                if spec.overrides:
                    for q in range(pos, end):
                        forbidden[q].update(spec.overrides)
                match[end] = True
                found = True
        if ignore is not None:
            length = ignore.longest(text, pos)
            if length > 0:
                match[pos + length] = True
                found = True
        if not found:
            raise UnscannableRegion(text, pos, tokens)
    return tokens


def scan_exploratory(
    text: str, specs: Sequence[TokenTypeSpec], config: ScanConfig = ScanConfig(Policy.EXPLORATORY)
) -> set[Token]:
    """Every match length of every token type at every position.

    Tiers run one after another, each over the whole input, so a higher tier's
    overrides are in place before any lower tier starts matching.
    """
    n = len(text)
    forbidden: list[set[str]] = [set() for _ in range(n)]
    tokens: set[Token] = set()
    for _, group in _tiers(specs):
        emitted = []
        for spec, m in group:
            for pos in range(n):
                if spec.name in forbidden[pos]:
                    continue
                for length in m.lengths(text, pos):
                    emitted.append((spec, pos, pos + length))
        for spec, start, end in emitted:
            tokens.add(Token(start, end, spec.name, text[start:end]))
            if spec.overrides:
                for q in range(start, end):
                    forbidden[q].update(spec.overrides)

    covered = [False] * n
    for t in tokens:
        for q in range(t.start, t.end):
            covered[q] = True
    ignore = _ignore_matcher(config)
    if ignore is not None:
        pos = 0
        while pos < n:
            length = ignore.longest(text, pos)
            for q in range(pos, pos + length):
                covered[q] = True
            pos += max(length, 1)
    for pos, ok in enumerate(covered):
        if not ok:
            raise UnscannableRegion(text, pos, tokens)
    return tokens


def scan(text: str, specs: Sequence[TokenTypeSpec], config: ScanConfig = ScanConfig()) -> set[Token]:
    if config.policy is Policy.GREEDY:
        return scan_greedy(text, specs, config)
    return scan_exploratory(text, specs, config)


@dataclass(frozen=True)
class LexicalAnalysisGraph:
    tokens: tuple[Token, ...]
    following: dict[Token, frozenset[Token]]
    preceding: dict[Token, frozenset[Token]]
    start_tokens: frozenset[Token]

    @property
    def end_tokens(self) -> frozenset[Token]:
        return frozenset(t for t in self.tokens if not self.following[t])

    def edges(self) -> list[tuple[Token, Token]]:
        return [(a, b) for a in self.tokens for b in sorted(self.following[a])]

    def count_paths(self) -> int:
        """Number of start-to-end token paths."""
        ways: dict[Token, int] = {}
        for t in sorted(self.tokens, reverse=True):
            succ = self.following[t]
            ways[t] = sum(ways[b] for b in succ) if succ else 1
        return sum(ways[t] for t in self.start_tokens)

    def paths(self) -> Iterator[tuple[Token, ...]]:
        """Enumerate start-to-end token paths (exponential; small graphs only)."""

        def walk(t: Token, prefix: tuple[Token, ...]):
            prefix = prefix + (t,)
            succ = self.following[t]
            if not succ:
                yield prefix
            for b in sorted(succ):
                yield from walk(b, prefix)

        for t in sorted(self.start_tokens):
            yield from walk(t, ())


def compute_adjacency(tokens: Iterable[Token]) -> LexicalAnalysisGraph:
    """Link each token to its immediate successors.

    ``b`` follows ``a`` iff ``a.end <= b.start`` and no third token lies
    entirely within ``[a.end, b.start)``.  Both relations depend only on
    ``a.end`` and ``b.start``, so they are computed per boundary position.
    """
    toks = tuple(sorted(set(tokens)))
    by_start: dict[int, list[Token]] = defaultdict(list)
    for t in toks:
        by_start[t.start].append(t)
    starts = sorted(by_start)
    # min_end_from[i]: smallest end among tokens starting at starts[i:] (suffix min)
    min_end_from = [0] * (len(starts) + 1)
    min_end_from[len(starts)] = float("inf")
    for i in range(len(starts) - 1, -1, -1):
        min_end_from[i] = min(min(t.end for t in by_start[starts[i]]), min_end_from[i + 1])

    following: dict[Token, frozenset[Token]] = {}
    cache: dict[int, frozenset[Token]] = {}
    for a in toks:
        e = a.end
        succ = cache.get(e)
        if succ is None:
            i = bisect.bisect_left(starts, e)
            # every start s >= e with no token c, c.start >= e, c.end <= s
            limit = min_end_from[i]
            chosen = []
            for s in starts[i:]:
                if s >= limit:
                    break
                chosen.extend(by_start[s])
            succ = frozenset(chosen)
            cache[e] = succ
        following[a] = succ
    preceding: dict[Token, set[Token]] = {t: set() for t in toks}
    for a, succ in following.items():
        for b in succ:
            preceding[b].add(a)
    frozen_prec = {t: frozenset(v) for t, v in preceding.items()}
    start_tokens = frozenset(t for t in toks if not frozen_prec[t])
    return LexicalAnalysisGraph(toks, following, frozen_prec, start_tokens)


def build_lexical_graph(
    text: str, specs: Sequence[TokenTypeSpec], config: ScanConfig = ScanConfig()
) -> LexicalAnalysisGraph:
    """Scan ``text`` under ``config.policy``, drop tokens rejected by their
    type's validator, and compute adjacency."""
    tokens = scan(text, specs, config)
    validators = {s.name: s.validator for s in specs if s.validator is not None}
    if validators:
        tokens = {t for t in tokens if t.type not in validators or validators[t.type](t)}
    return compute_adjacency(tokens)
