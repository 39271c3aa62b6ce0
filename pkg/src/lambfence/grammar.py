"""Grammars, token-type specifications and disambiguation constraints.

Productions may flag right-hand-side elements as optional; those are expanded
into plain variants by :func:`desugar_optionals` and empty right-hand sides are
folded into ``Grammar.epsilon_symbols`` by :func:`extract_epsilon_symbols`.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field, replace
from functools import cached_property
from itertools import product as cartesian
from typing import Any, Callable, Iterable, Mapping


@dataclass(frozen=True)
class TokenTypeSpec:
    """A terminal: a name, how to match it, its precedence tier and overrides.

    ``pattern`` is either regular-expression text or a custom matcher object
    exposing ``lengths(text, pos)`` and ``longest(text, pos)``.  Higher
    ``precedence`` runs first.  ``overrides`` names the token types that are
    forbidden from starting anywhere inside a span matched by this type.
    ``validator`` optionally accepts or rejects each scanned token.
    """

    name: str
    pattern: Any
    precedence: int = 0
    overrides: frozenset[str] = frozenset()
    validator: Callable[[Any], bool] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "overrides", frozenset(self.overrides))


@dataclass(frozen=True)
class Production:
    """``lhs ::= rhs``.

    ``optional`` holds the rhs indices flagged optional (pre-desugar only).
    ``origin`` is the id of the production this one was desugared from; the
    constraint machinery refers to productions through it.
    """

    lhs: str
    rhs: tuple[str, ...]
    id: str
    optional: frozenset[int] = frozenset()
    origin: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "rhs", tuple(self.rhs))
        object.__setattr__(self, "optional", frozenset(self.optional))
        if not self.origin:
            object.__setattr__(self, "origin", self.id)

    def __str__(self) -> str:
        parts = [f"[{s}]" if i in self.optional else s for i, s in enumerate(self.rhs)]
        return f"{self.lhs} ::= {' '.join(parts) if parts else 'ε'}"


@dataclass(frozen=True)
class Grammar:
    nonterminals: frozenset[str]
    terminals: frozenset[str]
    productions: tuple[Production, ...]
    start: str
    epsilon_symbols: frozenset[str] = frozenset()

    @classmethod
    def build(
        cls,
        productions: Iterable[Production],
        start: str,
        terminals: Iterable[str],
        nonterminals: Iterable[str] = (),
        epsilon_symbols: Iterable[str] = (),
    ) -> "Grammar":
        """Build a grammar, inferring nonterminals from the production heads."""
        productions = tuple(productions)
        nts = set(nonterminals) | {p.lhs for p in productions}
        return cls(
            frozenset(nts),
            frozenset(terminals),
            productions,
            start,
            frozenset(epsilon_symbols),
        )

    @cached_property
    def by_id(self) -> dict[str, Production]:
        return {p.id: p for p in self.productions}

    @cached_property
    def by_lhs(self) -> dict[str, tuple[Production, ...]]:
        table: dict[str, list[Production]] = defaultdict(list)
        for p in self.productions:
            table[p.lhs].append(p)
        return {k: tuple(v) for k, v in table.items()}

    @cached_property
    def origins(self) -> frozenset[str]:
        return frozenset(p.origin for p in self.productions) | frozenset(self.by_id)

    def is_terminal(self, symbol: str) -> bool:
        return symbol in self.terminals


class Associativity(enum.Enum):
    LEFT = "left"
    RIGHT = "right"
    NON = "non"


@dataclass(frozen=True)
class ConstraintSet:
    """Disambiguation constraints keyed by production id (or origin id).

    ``selection`` pairs are ``(winner, loser)``; ``composition`` pairs are
    ``(inhibited outer, inner)``.  ``custom`` maps a production id to a
    predicate over the candidate explicit node.
    """

    associativity: Mapping[str, Associativity] = field(default_factory=dict)
    selection: frozenset[tuple[str, str]] = frozenset()
    composition: frozenset[tuple[str, str]] = frozenset()
    custom: Mapping[str, Callable[[Any], bool]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        assoc = {k: Associativity(v) for k, v in dict(self.associativity).items()}
        object.__setattr__(self, "associativity", assoc)
        object.__setattr__(self, "selection", frozenset(self.selection))
        object.__setattr__(self, "composition", frozenset(self.composition))
        object.__setattr__(self, "custom", dict(self.custom))

    @cached_property
    def selection_closure(self) -> frozenset[tuple[str, str]]:
        """Transitive closure of the selection-precedence pairs."""
        return frozenset(transitive_closure(self.selection))

    def is_empty(self) -> bool:
        return not (self.associativity or self.selection or self.composition or self.custom)

    def referenced_ids(self) -> set[str]:
        ids = set(self.associativity) | set(self.custom)
        for a, b in self.selection | self.composition:
            ids.update((a, b))
        return ids


def transitive_closure(pairs: Iterable[tuple[str, str]]) -> set[tuple[str, str]]:
    succ: dict[str, set[str]] = defaultdict(set)
    for a, b in pairs:
        succ[a].add(b)
    closure = set()
    for a in list(succ):
        seen: set[str] = set()
        stack = list(succ[a])
        while stack:
            b = stack.pop()
            if b in seen:
                continue
            seen.add(b)
            stack.extend(succ.get(b, ()))
        closure.update((a, b) for b in seen)
    return closure


def desugar_optionals(productions: Iterable[Production]) -> list[Production]:
    """Expand optional rhs elements into every include/omit variant.

    Variant 0 keeps every optional element and keeps the parent id; the
    remaining variants are numbered in decreasing inclusion-mask order and get
    ids ``<parent>/<index>``.  Variants with the same rhs are merged.
    """
    out: list[Production] = []
    for prod in productions:
        if not prod.optional:
            out.append(prod)
            continue
        opts = sorted(prod.optional)
        seen: set[tuple[str, ...]] = set()
        index = 0
        # masks enumerate keep(True)/drop(False) per optional slot, full rhs first
        for mask in cartesian((True, False), repeat=len(opts)):
            dropped = {i for i, keep in zip(opts, mask) if not keep}
            rhs = tuple(s for i, s in enumerate(prod.rhs) if i not in dropped)
            if rhs in seen:
                continue
            seen.add(rhs)
            vid = prod.id if index == 0 else f"{prod.id}/{index}"
            out.append(Production(prod.lhs, rhs, vid, origin=prod.origin))
            index += 1
    return out


def extract_epsilon_symbols(grammar: Grammar) -> Grammar:
    """Drop empty productions, recording their heads in ``epsilon_symbols``.

    Only direct epsilon productions count: a nonterminal that merely derives
    the empty string through other nonterminals is not added.
    """
    eps = {p.lhs for p in grammar.productions if not p.rhs}
    if not eps:
        return grammar
    kept = tuple(p for p in grammar.productions if p.rhs)
    return replace(
        grammar,
        productions=kept,
        epsilon_symbols=grammar.epsilon_symbols | eps,
    )


def normalize(grammar: Grammar) -> Grammar:
    """Desugar optionals and extract epsilon symbols: the form the parser needs."""
    return extract_epsilon_symbols(
        replace(grammar, productions=tuple(desugar_optionals(grammar.productions)))
    )


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    subject: str = ""

    def __str__(self) -> str:
        return f"{self.severity}: {self.message}"


def validate_grammar(grammar: Grammar, constraints: ConstraintSet | None = None) -> list[Diagnostic]:
    """Check grammar and constraint invariants; unreachable symbols are warnings."""
    diags: list[Diagnostic] = []

    def error(msg: str, subject: str = "") -> None:
        diags.append(Diagnostic("error", msg, subject))

    if grammar.start not in grammar.nonterminals:
        error(f"start symbol {grammar.start!r} is not a nonterminal", grammar.start)
    for sym in sorted(grammar.terminals & grammar.nonterminals):
        error(f"symbol {sym!r} is both a terminal and a nonterminal", sym)
    declared = grammar.terminals | grammar.nonterminals
    ids: set[str] = set()
    for p in grammar.productions:
        if p.id in ids:
            error(f"duplicate production id {p.id!r}", p.id)
        ids.add(p.id)
        if p.lhs not in grammar.nonterminals:
            error(f"production {p.id!r} has non-nonterminal head {p.lhs!r}", p.id)
        if not p.rhs:
            error(f"production {p.id!r} has an empty rhs", p.id)
        for sym in p.rhs:
            if sym not in declared:
                error(f"production {p.id!r} references undeclared symbol {sym!r}", sym)
        for i in p.optional:
            if not 0 <= i < len(p.rhs):
                error(f"production {p.id!r} flags out-of-range element {i}", p.id)

    if constraints is not None:
        known = grammar.origins
        for pid in sorted(constraints.referenced_ids()):
            if pid not in known:
                error(f"constraint references unknown production {pid!r}", pid)
        for kind, pairs in (("selection", constraints.selection), ("composition", constraints.composition)):
            for a, b in sorted(pairs):
                if a == b:
                    error(f"{kind} precedence pair ({a}, {b}) is reflexive", a)
        for a, b in sorted(constraints.selection_closure):
            if a == b and (a, a) not in constraints.selection:
                error(f"selection precedence is cyclic through {a!r}", a)

    reachable = {grammar.start}
    stack = [grammar.start]
    while stack:
        sym = stack.pop()
        for p in grammar.by_lhs.get(sym, ()):
            for s in p.rhs:
                if s not in reachable:
                    reachable.add(s)
                    stack.append(s)
    for sym in sorted(declared - reachable):
        diags.append(Diagnostic("warning", f"symbol {sym!r} is unreachable from {grammar.start!r}", sym))
    return diags
