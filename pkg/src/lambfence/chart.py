"""Chart parsing over lexical analysis graphs.

The lexical analysis graph is first extended with *cores*: one core sits in
front of every group of tokens sharing a preceding-token set, a starting core
precedes the start tokens and a final core follows the end tokens.  Handles
(dotted productions plus the span matched so far) live in cores, and an agenda
of ``(handle, node)`` pairs drives matching until a fixpoint is reached.  The
result is the implicit parse graph: ``(start, end, symbol)`` nodes plus the
reductions that produced each one.
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass, field
from typing import NamedTuple, Union

from ._gc import gc_paused
from .grammar import Grammar
from .scanner import LexicalAnalysisGraph, Token

__all__ = [
    "Core",
    "DottedProduction",
    "ELAGraph",
    "Handle",
    "IGraph",
    "ImplicitNode",
    "NoParse",
    "Reduction",
    "advance_handle",
    "build_ela_graph",
    "chart_parse",
]


class ImplicitNode(NamedTuple):
    start: int
    end: int
    symbol: str

    def __repr__(self) -> str:
        return f"{self.symbol}[{self.start},{self.end})"


Node = Union[Token, ImplicitNode]


class DottedProduction(NamedTuple):
    production: int  # index into Grammar.productions
    dot: int


class Handle(NamedTuple):
    """A production index, the dot, and the matched span ``[start, end)``."""

    production: int
    dot: int
    start: int
    end: int

    @property
    def dotted(self) -> DottedProduction:
        return DottedProduction(self.production, self.dot)

    def describe(self, grammar: Grammar) -> str:
        p = grammar.productions[self.production]
        rhs = list(p.rhs)
        rhs.insert(self.dot, ".")
        return f"({p.lhs} ::= {' '.join(rhs)}, [{self.start},{self.end}))"


class Reduction(NamedTuple):
    production: str
    start: int
    end: int


class Core:
    """A set of handles attached in front of a group of tokens."""

    __slots__ = ("id", "handles", "preceding_tokens", "following_tokens")

    def __init__(self, id: int, preceding_tokens=frozenset(), following_tokens=frozenset()):
        self.id = id
        self.handles: list[Handle] = []
        self.preceding_tokens: frozenset[Token] = frozenset(preceding_tokens)
        self.following_tokens: frozenset[Token] = frozenset(following_tokens)

    def __repr__(self) -> str:
        return f"Core({self.id}, {len(self.preceding_tokens)} in, {len(self.following_tokens)} out)"


@dataclass
class ELAGraph:
    la: LexicalAnalysisGraph
    cores: list[Core]
    starting_core: Core
    final_core: Core
    preceding_core: dict[Token, Core]
    following_cores: dict[Token, frozenset[Core]]
    # both depend only on positions: tokens starting at p share their
    # preceding set, tokens ending at e share their following set
    core_at_start: dict[int, Core] = field(default_factory=dict)
    cores_after_end: dict[int, frozenset[Core]] = field(default_factory=dict)

    @property
    def tokens(self) -> tuple[Token, ...]:
        return self.la.tokens


def build_ela_graph(la: LexicalAnalysisGraph) -> ELAGraph:
    """Insert cores between the tokens of ``la``."""
    starting = Core(0, frozenset(), la.start_tokens)
    groups: dict[frozenset[Token], list[Token]] = defaultdict(list)
    for t in la.tokens:
        if la.preceding[t]:
            groups[la.preceding[t]].append(t)
    # deterministic numbering: by earliest following token
    keyed = sorted(groups.items(), key=lambda kv: min(kv[1]))
    cores = [starting]
    core_of_set: dict[frozenset[Token], Core] = {}
    for i, (prec, toks) in enumerate(keyed, start=1):
        core = Core(i, prec, toks)
        cores.append(core)
        core_of_set[prec] = core
    end_tokens = la.end_tokens
    if la.tokens:
        final = Core(len(cores), end_tokens, frozenset())
        cores.append(final)
    else:
        final = starting

    preceding_core: dict[Token, Core] = {}
    following_cores: dict[Token, frozenset[Core]] = {}
    core_at_start: dict[int, Core] = {}
    cores_after_end: dict[int, frozenset[Core]] = {}
    for t in la.tokens:
        prec = la.preceding[t]
        core = core_of_set[prec] if prec else starting
        preceding_core[t] = core
        succ = la.following[t]
        foll = frozenset(preceding_core_for(b, la, core_of_set, starting) for b in succ) if succ else frozenset([final])
        following_cores[t] = foll
        if core_at_start.setdefault(t.start, core) is not core:
            raise AssertionError(f"tokens starting at {t.start} disagree on their preceding set")
        if cores_after_end.setdefault(t.end, foll) != foll:
            raise AssertionError(f"tokens ending at {t.end} disagree on their following set")
    return ELAGraph(la, cores, starting, final, preceding_core, following_cores, core_at_start, cores_after_end)


def preceding_core_for(t: Token, la, core_of_set, starting) -> Core:
    prec = la.preceding[t]
    return core_of_set[prec] if prec else starting


def _expected(rhs: tuple[str, ...], dot: int, eps: frozenset[str]) -> list[str]:
    """Symbols a node may carry to advance from ``dot`` (skipping epsilon symbols)."""
    out = []
    while dot < len(rhs):
        if rhs[dot] not in out:
            out.append(rhs[dot])
        if rhs[dot] not in eps:
            break
        dot += 1
    return out


def _advance(handle: Handle, node, rhs: tuple[str, ...], eps: frozenset[str]) -> list[Handle]:
    """Every handle reachable by consuming ``node`` (with epsilon skips around it)."""
    out = []
    dot = handle.dot
    start = handle.start if handle.dot else node.start
    n = len(rhs)
    while dot < n:
        sym = rhs[dot]
        if sym == node.symbol:
            d = dot + 1
            out.append(Handle(handle.production, d, start, node.end))
            while d < n and rhs[d] in eps:
                d += 1
                out.append(Handle(handle.production, d, start, node.end))
        if sym not in eps:
            break
        dot += 1
    if len(out) > 1:
        # an epsilon-able symbol repeated in the rhs can reach one dot twice
        return list(dict.fromkeys(out))
    return out


def advance_handle(handle: Handle, node, grammar: Grammar) -> list[Union[Handle, Reduction]]:
    """Match ``node`` against the symbol after the dot of ``handle``.

    Returns every outcome: advanced handles, and a :class:`Reduction` for each
    outcome whose dot reaches the end of the rhs.  An empty list is a no-match.
    """
    prod = grammar.productions[handle.production]
    out: list[Union[Handle, Reduction]] = []
    for h in _advance(handle, node, prod.rhs, grammar.epsilon_symbols):
        if h.dot == len(prod.rhs):
            out.append(Reduction(prod.id, h.start, h.end))
        else:
            out.append(h)
    return out


class NoParse(Exception):
    def __init__(self, igraph: "IGraph"):
        self.igraph = igraph
        self.maximal = igraph.maximal_nodes()
        shown = ", ".join(repr(n) for n in self.maximal[:8]) or "none"
        super().__init__(f"no parse for start symbol; widest nodes: {shown}")


@dataclass(frozen=True)
class IGraph:
    """Implicit parse graph.

    ``derivations`` maps each nonterminal node to the set of
    ``(production id, children)`` reductions that produced it; children are
    tokens or implicit nodes.
    """

    tokens: tuple[Token, ...]
    nodes: frozenset[ImplicitNode]
    starting_nodes: frozenset[ImplicitNode]
    derivations: dict[ImplicitNode, frozenset[tuple[str, tuple[Node, ...]]]]
    start_symbol: str
    stats: dict[str, int] = field(default_factory=dict, compare=False)

    def maximal_nodes(self) -> list[ImplicitNode]:
        """Nodes whose span is not strictly contained in another node's span."""
        spans = sorted(self.nodes, key=lambda n: (n.start, -n.end, n.symbol))
        out = []
        for n in spans:
            if not any(m.start <= n.start and n.end <= m.end and (m.end - m.start) > (n.end - n.start) for m in spans):
                out.append(n)
        return out

    def triples(self) -> set[tuple[int, int, str]]:
        return {(n.start, n.end, n.symbol) for n in self.nodes}


def chart_parse(
    ela: ELAGraph,
    grammar: Grammar,
    *,
    rng: random.Random | None = None,
    require_parse: bool = True,
) -> IGraph:
    with gc_paused():
        ig = _chart_parse(ela, grammar, rng)
    if require_parse and not ig.starting_nodes:
        raise NoParse(ig)
    return ig


def _chart_parse(ela: ELAGraph, grammar: Grammar, rng: random.Random | None) -> IGraph:
    """Run the agenda to a fixpoint and return the implicit parse graph.

    ``grammar`` must already be desugared and epsilon-extracted.  Dot-0 handles
    exist in every core implicitly; they are materialised when a node whose
    symbol can start a production appears.  With ``rng`` the agenda pops a
    random entry instead of the top of the stack.  Raises :class:`NoParse` when
    no starting node exists (unless ``require_parse`` is false).
    """
    prods = grammar.productions
    eps = grammar.epsilon_symbols
    rhss = [p.rhs for p in prods]
    lens = [len(r) for r in rhss]
    starters: dict[str, list[int]] = defaultdict(list)
    for i, rhs in enumerate(rhss):
        for sym in _expected(rhs, 0, eps):
            starters[sym].append(i)
    expected_cache: dict[tuple[int, int], list[str]] = {}

    for core in ela.cores:
        core.handles = []
    core_at_start = ela.core_at_start
    cores_after_end = ela.cores_after_end

    nodes_at: dict[tuple[int, str], list] = defaultdict(list)  # (core id, symbol)
    handles_at: dict[tuple[int, str], list[Handle]] = defaultdict(list)
    agenda: list = []
    pushed = 0
    # links[h] lists the (previous handle, consumed node) pairs that produced h.
    # Each (handle, node) pair reaches the agenda exactly once: whichever of the
    # two appears second pairs itself with the first, so no seen-set is needed.
    links: dict[Handle, list] = {}
    implicit: dict[ImplicitNode, list[Handle]] = {}

    def add_node(n) -> None:
        nonlocal pushed
        cid = core_at_start[n.start].id
        sym = n.symbol
        nodes_at[(cid, sym)].append(n)
        waiting = handles_at.get((cid, sym), ())
        agenda.extend((h, n) for h in waiting)
        seeds = starters.get(sym, ())
        agenda.extend((Handle(pi, 0, n.start, n.start), n) for pi in seeds)
        pushed += len(waiting) + len(seeds)

    for t in ela.tokens:
        add_node(t)

    while agenda:
        if rng is not None:
            i = rng.randrange(len(agenda))
            agenda[i], agenda[-1] = agenda[-1], agenda[i]
        pair = agenda.pop()
        h, n = pair
        pi = h.production
        for h2 in _advance(h, n, rhss[pi], eps):
            known = links.get(h2)
            if known is not None:
                known.append(pair)
                continue
            links[h2] = [pair]
            if h2.dot == lens[pi]:
                node = ImplicitNode(h2.start, h2.end, prods[pi].lhs)
                if node not in implicit:
                    implicit[node] = []
                    add_node(node)
                implicit[node].append(h2)
                continue
            key = (pi, h2.dot)
            exp = expected_cache.get(key)
            if exp is None:
                exp = expected_cache[key] = _expected(rhss[pi], h2.dot, eps)
            for core in cores_after_end[h2.end]:
                core.handles.append(h2)
                cid = core.id
                for sym in exp:
                    handles_at[(cid, sym)].append(h2)
                    ready = nodes_at.get((cid, sym))
                    if ready:
                        agenda.extend((h2, m) for m in ready)
                        pushed += len(ready)

    chains: dict[Handle, frozenset[tuple]] = {}

    def children_of(h: Handle) -> frozenset[tuple]:
        if h.dot == 0:
            return frozenset([()])
        got = chains.get(h)
        if got is None:
            acc = set()
            for prev, n in links[h]:
                for c in children_of(prev):
                    acc.add(c + (n,))
            got = chains[h] = frozenset(acc)
        return got

    derivations: dict[ImplicitNode, frozenset] = {}
    for node, completed in implicit.items():
        derivs = set()
        for hc in completed:
            pid = prods[hc.production].id
            for kids in children_of(hc):
                derivs.add((pid, kids))
        derivations[node] = frozenset(derivs)

    starting = ela.starting_core
    final_only = frozenset([ela.final_core])
    starting_nodes = frozenset(
        n
        for n in implicit
        if n.symbol == grammar.start and core_at_start[n.start] is starting and cores_after_end[n.end] == final_only
    )
    stats = {
        "agenda_entries": pushed,
        "handles": len(links),
        "cores": len(ela.cores),
        "positions": len({t.start for t in ela.tokens} | {t.end for t in ela.tokens}),
    }
    return IGraph(ela.tokens, frozenset(implicit), starting_nodes, derivations, grammar.start, stats)
