"""Brute-force reference implementations used to cross-check the parser.

None of these share code with the scanner, chart parser or enforcer: scans
are enumerated with :mod:`re` over every ``(type, start, end)`` triple, parse
trees are enumerated top-down over a straight token sequence, and spans are
recognized with a textbook Earley recognizer.
"""

from __future__ import annotations

import re
from functools import lru_cache
from math import comb
from typing import Sequence

from .chart import IGraph, ImplicitNode
from .enforce import EGraph, ExplicitNode
from .grammar import ConstraintSet, Grammar, TokenTypeSpec
from .scanner import Token

__all__ = [
    "oracle_earley_spans",
    "oracle_enumerate_parses",
    "oracle_enumerate_scans",
    "oracle_filter_forest",
    "catalan",
]


# 15 tokens is eight operands of a binary expression
MAX_PARSE_TOKENS = 16


def catalan(n: int) -> int:
    return comb(2 * n, n) // (n + 1)


def _lengths(spec: TokenTypeSpec, text: str, start: int) -> set[int]:
    if isinstance(spec.pattern, str):
        rx = re.compile(spec.pattern)
        return {end - start for end in range(start + 1, len(text) + 1) if rx.fullmatch(text, start, end)}
    return set(spec.pattern.lengths(text, start))


def oracle_enumerate_scans(text: str, specs: Sequence[TokenTypeSpec]) -> set[Token]:
    """Every (type, start, end) whose substring fully matches the type's pattern
    and whose start is not covered by a strictly higher-tier override."""
    if len(text) > 64:
        raise ValueError("oracle input limited to 64 characters")
    found: set[Token] = set()
    for tier in sorted({s.precedence for s in specs}, reverse=True):
        above = [t for t in found]
        for spec in (s for s in specs if s.precedence == tier):
            for start in range(len(text)):
                if any(
                    spec.name in overrides_of(specs, t.type) and t.start <= start < t.end for t in above
                ):
                    continue
                for length in _lengths(spec, text, start):
                    found.add(Token(start, start + length, spec.name, text[start : start + length]))
    return found


def overrides_of(specs: Sequence[TokenTypeSpec], name: str) -> frozenset[str]:
    for s in specs:
        if s.name == name:
            return s.overrides
    return frozenset()


def oracle_enumerate_parses(
    tokens: Sequence[Token], grammar: Grammar, depth_bound: int | None = None
) -> set[tuple]:
    """All derivation trees whose frontier is exactly ``tokens``.

    Trees are nested tuples: ``("token", type, start, end)`` for leaves and
    ``(production id, lhs, start, end, children)`` otherwise.  A
    ``(symbol, span)`` already on the current root-to-leaf path is not
    expanded again.  ``depth_bound`` caps chains of nodes sharing one span
    (the only chains that can cycle).  Symbols in ``grammar.epsilon_symbols``
    may be skipped, contributing no child.
    """
    toks = tuple(tokens)
    if len(toks) > MAX_PARSE_TOKENS:
        raise ValueError(f"oracle limited to {MAX_PARSE_TOKENS} tokens")
    n = len(toks)
    if depth_bound is None:
        depth_bound = len(grammar.nonterminals) + 1
    eps = grammar.epsilon_symbols
    by_lhs: dict[str, list] = {}
    for p in grammar.productions:
        by_lhs.setdefault(p.lhs, []).append(p)

    # ``chain`` holds the path nodes spanning exactly [i, j): an ancestor with
    # a wider span can never reappear below, so it does not affect the result
    @lru_cache(maxsize=None)
    def trees(sym: str, i: int, j: int, chain: frozenset) -> frozenset:
        if sym in grammar.terminals:
            if j == i + 1 and toks[i].type == sym:
                t = toks[i]
                return frozenset([("token", sym, t.start, t.end)])
            return frozenset()
        if sym in chain or len(chain) >= depth_bound:
            return frozenset()
        inner = chain | {sym}
        out = set()
        for p in by_lhs.get(sym, ()):
            for kids in seq(p.rhs, 0, i, j, (i, j), inner):
                out.add((p.id, sym, toks[i].start, toks[j - 1].end, kids))
        return frozenset(out)

    def seq(rhs, k, i, j, span, chain):
        if k == len(rhs):
            if i == j:
                yield ()
            return
        sym = rhs[k]
        if sym in eps:
            yield from seq(rhs, k + 1, i, j, span, chain)
        # each remaining symbol consumes at least one token
        for m in range(i + 1, j + 1):
            heads = trees(sym, i, m, chain if (i, m) == span else frozenset())
            if not heads:
                continue
            tails = list(seq(rhs, k + 1, m, j, span, chain))
            for h in heads:
                for t in tails:
                    yield (h,) + t

    if n == 0:
        return set()
    return set(trees(grammar.start, 0, n, frozenset()))


def oracle_earley_spans(tokens: Sequence[Token], grammar: Grammar) -> set[tuple[int, int, str]]:
    """``(start, end, symbol)`` for every non-empty completed Earley item.

    Every production is predicted at every position, so the result is every
    nonterminal span derivable from the token string.  Epsilon symbols are
    skipped at prediction time; nothing else derives the empty string.
    """
    toks = tuple(tokens)
    n = len(toks)
    eps = grammar.epsilon_symbols
    prods = grammar.productions
    charts: list[set] = [set() for _ in range(n + 1)]
    done: set[tuple[int, int, str]] = set()

    def add(i: int, item, work) -> None:
        if item not in charts[i]:
            charts[i].add(item)
            work.append(item)

    for i in range(n + 1):
        work: list = list(charts[i])
        for pi in range(len(prods)):
            add(i, (pi, 0, i), work)
        while work:
            pi, dot, origin = work.pop()
            rhs = prods[pi].rhs
            if dot == len(rhs):
                if origin == i:
                    continue  # empty completion: not a node
                lhs = prods[pi].lhs
                done.add((origin, i, lhs))
                for qi, qdot, qorigin in list(charts[origin]):
                    qrhs = prods[qi].rhs
                    if qdot < len(qrhs) and qrhs[qdot] == lhs:
                        add(i, (qi, qdot + 1, qorigin), work)
                continue
            sym = rhs[dot]
            if sym in eps:
                add(i, (pi, dot + 1, origin), work)
        if i < n:
            for pi, dot, origin in charts[i]:
                rhs = prods[pi].rhs
                if dot < len(rhs) and rhs[dot] == toks[i].type:
                    charts[i + 1].add((pi, dot + 1, origin))
    return {(toks[s].start, toks[e - 1].end, x) for s, e, x in done}


def oracle_filter_forest(
    unconstrained: EGraph, igraph: IGraph, grammar: Grammar, constraints: ConstraintSet
) -> set[tuple]:
    """Apply ``constraints`` to whole trees after unconstrained expansion.

    A tree survives iff every internal node passes the per-node checks and no
    production preferred over it (transitively) derives the same implicit node
    from the same children while itself passing the per-node checks.
    """
    origin = {p.id: p.origin for p in grammar.productions}
    closure = constraints.selection_closure

    def names(pid: str) -> list[str]:
        return [pid, origin[pid]] if origin[pid] != pid else [pid]

    def local_ok(node: ExplicitNode) -> bool:
        mine = names(node.production)
        kids = node.children
        inner = [names(k.production) if k.token is None else set() for k in kids]
        assoc = next((constraints.associativity[x] for x in mine if x in constraints.associativity), None)
        if assoc is not None:
            same = [i for i, k in enumerate(kids) if k.token is None and origin[k.production] == origin[node.production]]
            last = len(kids) - 1
            if assoc.value == "left" and any(i != 0 for i in same):
                return False
            if assoc.value == "right" and any(i != last for i in same):
                return False
            if assoc.value == "non" and same and last > 0:
                return False
        if any((a, b) in constraints.composition for a in mine for k in inner for b in k):
            return False
        for x in mine:
            if x in constraints.custom:
                return bool(constraints.custom[x](node))
        return True

    verdicts: dict[ExplicitNode, bool] = {}

    def valid(node: ExplicitNode) -> bool:
        if node.token is not None:
            return True
        if node not in verdicts:
            verdicts[node] = all(valid(c) for c in node.children) and node_ok(node)
        return verdicts[node]

    def node_ok(node: ExplicitNode) -> bool:
        if not local_ok(node):
            return False
        implicit = ImplicitNode(node.start, node.end, node.symbol)
        kid_keys = tuple((c.start, c.end, c.symbol) for c in node.children)
        for pid, kids in igraph.derivations.get(implicit, ()):
            if pid == node.production:
                continue
            if tuple((k.start, k.end, k.symbol) for k in kids) != kid_keys:
                continue
            if not any((a, b) in closure for a in names(pid) for b in names(node.production)):
                continue
            rival = ExplicitNode(node.symbol, node.start, node.end, pid, node.children, origin=origin[pid])
            if local_ok(rival):
                return False
        return True

    return {root.canonical() for root in unconstrained.starting_nodes if valid(root)}
