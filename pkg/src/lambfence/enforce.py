"""Expansion of the implicit parse graph into a constraint-filtered parse forest.

Every starting implicit node is expanded recursively with memoization into
explicit nodes (a production plus concrete children).  A history of the
implicit nodes on the current recursion chain cuts grammar cycles.  Candidates
are filtered as soon as they are built:

* associativity and composition precedence, per candidate;
* custom evaluators, per candidate;
* selection precedence, among the surviving candidates of one implicit node
  that share the same children.

Explicit nodes are interned in a store so shared subtrees exist once.
"""

from __future__ import annotations

import sys
from collections import Counter
from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Callable, Iterable

from ._gc import gc_paused
from .chart import IGraph, ImplicitNode
from .grammar import Associativity, ConstraintSet, Grammar
from .scanner import Token

__all__ = [
    "AllTreesRejected",
    "EGraph",
    "EvaluatorFailure",
    "ExplicitNode",
    "NodeStore",
    "check_associativity",
    "check_composition_precedence",
    "check_selection_precedence",
    "apply_custom_constraint",
    "expand",
]


class ExplicitNode:
    """One parse (sub)tree: a token leaf, or a production over child nodes.

    Equality and hashing are structural.
    """

    __slots__ = ("symbol", "start", "end", "production", "origin", "children", "token", "_canon", "_hash")

    def __init__(
        self,
        symbol: str,
        start: int,
        end: int,
        production: str | None = None,
        children: Iterable["ExplicitNode"] = (),
        token: Token | None = None,
        origin: str | None = None,
    ):
        self.symbol = symbol
        self.start = start
        self.end = end
        self.production = production
        self.origin = origin if origin is not None else production
        self.children = tuple(children)
        self.token = token
        if token is not None:
            self._canon = ("token", symbol, start, end)
            self._hash = hash(self._canon)
        else:
            self._canon = (production, symbol, start, end, tuple(c._canon for c in self.children))
            self._hash = hash((production, symbol, start, end, tuple(c._hash for c in self.children)))

    @classmethod
    def leaf(cls, token: Token) -> "ExplicitNode":
        return cls(token.type, token.start, token.end, token=token)

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)

    @property
    def is_token(self) -> bool:
        return self.token is not None

    def canonical(self) -> tuple:
        return self._canon

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, ExplicitNode):
            return NotImplemented
        if self._hash != other._hash or self.token != other.token:
            return False
        if (self.production, self.symbol, self.start, self.end) != (other.production, other.symbol, other.start, other.end):
            return False
        # interned children compare by identity, so this rarely recurses
        return len(self.children) == len(other.children) and all(
            a is b or a == b for a, b in zip(self.children, other.children)
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return self.sexpr()

    def sexpr(self) -> str:
        parts: list[str] = []
        stack: list = [self]
        while stack:
            n = stack.pop()
            if isinstance(n, str):
                parts.append(n)
            elif n.token is not None:
                parts.append(f"{n.symbol}:{n.token.text}")
            else:
                parts.append(f"{n.symbol}(")
                stack.append(")")
                for i, c in enumerate(reversed(n.children)):
                    stack.append(c)
                    if i < len(n.children) - 1:
                        stack.append(" ")
        return "".join(parts)

    def frontier(self) -> list[Token]:
        out: list[Token] = []
        stack = [self]
        while stack:
            n = stack.pop()
            if n.token is not None:
                out.append(n.token)
            else:
                stack.extend(reversed(n.children))
        return out

    def iter_nodes(self):
        """Pre-order walk over the distinct nodes of this tree."""
        seen = set()
        stack = [self]
        while stack:
            n = stack.pop()
            if id(n) in seen:
                continue
            seen.add(id(n))
            yield n
            stack.extend(reversed(n.children))


class NodeStore:
    """Content-addressed store: structurally equal nodes are one object."""

    def __init__(self):
        self._nodes: dict[ExplicitNode, ExplicitNode] = {}

    def intern(self, node: ExplicitNode) -> ExplicitNode:
        return self._nodes.setdefault(node, node)

    def __len__(self) -> int:
        return len(self._nodes)

    def __iter__(self):
        return iter(self._nodes.values())


@dataclass
class EGraph:
    starting_nodes: frozenset[ExplicitNode]
    store: NodeStore
    rejected: Counter = field(default_factory=Counter)

    def trees(self) -> list[ExplicitNode]:
        return sorted(self.starting_nodes, key=lambda n: n.sexpr())

    def nodes(self) -> set[ExplicitNode]:
        """Nodes reachable from the starting nodes."""
        out: set[ExplicitNode] = set()
        for root in self.starting_nodes:
            out.update(root.iter_nodes())
        return out


class AllTreesRejected(Exception):
    def __init__(self, reasons: dict[str, str], rejected: Counter):
        self.reasons = reasons
        self.rejected = rejected
        detail = "; ".join(f"{k}: {v}" for k, v in sorted(reasons.items())[:6])
        super().__init__(f"every parse tree was rejected by a constraint ({detail})")


class EvaluatorFailure(Exception):
    def __init__(self, production: str, cause: BaseException):
        self.production = production
        super().__init__(f"custom evaluator for {production!r} failed: {cause!r}")


def _lookup(table, node: ExplicitNode):
    hit = table.get(node.production)
    if hit is None and node.origin != node.production:
        hit = table.get(node.origin)
    return hit


def _names(node: ExplicitNode) -> tuple[str | None, ...]:
    return (node.production, node.origin) if node.origin != node.production else (node.production,)


def _same_production(a: ExplicitNode, b: ExplicitNode) -> bool:
    return b.token is None and b.origin == a.origin


def check_associativity(candidate: ExplicitNode, constraints: ConstraintSet) -> bool:
    """Reject a candidate whose own production reappears in a forbidden slot.

    Left-to-right rejects a same-production child that has a preceding sibling
    (only the leftmost operand may nest); right-to-left rejects one with a
    following sibling; non-associative rejects any.
    """
    assoc = _lookup(constraints.associativity, candidate)
    if assoc is None:
        return True
    kids = candidate.children
    last = len(kids) - 1
    for i, child in enumerate(kids):
        if not _same_production(candidate, child):
            continue
        if assoc is Associativity.LEFT and i > 0:
            return False
        if assoc is Associativity.RIGHT and i < last:
            return False
        if assoc is Associativity.NON and last > 0:
            return False
    return True


def check_composition_precedence(candidate: ExplicitNode, constraints: ConstraintSet) -> bool:
    """Reject when the candidate's production is declared over a child's production."""
    if not constraints.composition:
        return True
    pairs = constraints.composition
    outer = _names(candidate)
    for child in candidate.children:
        if child.token is not None:
            continue
        for inner in _names(child):
            for o in outer:
                if (o, inner) in pairs:
                    return False
    return True


def check_selection_precedence(candidates: Iterable[ExplicitNode], constraints: ConstraintSet) -> list[ExplicitNode]:
    """Drop candidates dominated by a preferred production over the same children.

    Dominance uses the transitive closure of the declared pairs.
    """
    cands = list(candidates)
    if not constraints.selection or len(cands) < 2:
        return cands
    closure = constraints.selection_closure
    kept = []
    for q in cands:
        beaten = False
        for p in cands:
            if p is q or p.production == q.production or p.children != q.children:
                continue
            if any((a, b) in closure for a in _names(p) for b in _names(q)):
                beaten = True
                break
        if not beaten:
            kept.append(q)
    return kept


def apply_custom_constraint(candidate: ExplicitNode, evaluator: Callable[[ExplicitNode], bool] | None) -> bool:
    if evaluator is None:
        return True
    try:
        return bool(evaluator(candidate))
    except Exception as exc:
        raise EvaluatorFailure(candidate.production or candidate.symbol, exc) from exc


def _local_verdict(candidate: ExplicitNode, constraints: ConstraintSet) -> str | None:
    """Name of the first per-candidate constraint that rejects, else None."""
    if not check_associativity(candidate, constraints):
        return "associativity"
    if not check_composition_precedence(candidate, constraints):
        return "composition"
    if not apply_custom_constraint(candidate, _lookup(constraints.custom, candidate)):
        return "custom"
    return None


def expand(igraph: IGraph, grammar: Grammar, constraints: ConstraintSet | None = None) -> EGraph:
    """Expand the starting nodes of ``igraph`` into explicit parse trees.

    Raises :class:`AllTreesRejected` when starting nodes exist but no tree
    satisfies the constraints.
    """
    constraints = constraints or ConstraintSet()
    origin_of = {p.id: p.origin for p in grammar.productions}
    derivations = igraph.derivations
    store = NodeStore()
    memo: dict[ImplicitNode, frozenset[ExplicitNode]] = {}
    leaves: dict[Token, ExplicitNode] = {}
    history: set[ImplicitNode] = set()
    open_spans: Counter = Counter()
    rejected: Counter = Counter()
    root_reasons: dict[str, str] = {}
    no_constraints = constraints.is_empty()

    def expand_node(node, depth: int) -> tuple[frozenset[ExplicitNode], set]:
        if isinstance(node, Token):
            leaf = leaves.get(node)
            if leaf is None:
                leaf = leaves[node] = store.intern(ExplicitNode.leaf(node))
            return frozenset([leaf]), set()
        if node in history:
            return frozenset(), {node}
        # a cycle can only pass through nodes of one span, so a memoized set
        # is safe unless a same-span node is on the chain (it may occur inside)
        hit = memo.get(node)
        if hit is not None and not open_spans[(node.start, node.end)]:
            return hit, set()
        history.add(node)
        open_spans[(node.start, node.end)] += 1
        blocked: set = set()
        survivors: list[ExplicitNode] = []
        for pid, kids in sorted(derivations.get(node, ()), key=_derivation_key):
            options = []
            for kid in kids:
                got, dep = expand_node(kid, depth + 1)
                blocked |= dep
                if not got:
                    break
                options.append(list(got))
            else:
                for combo in cartesian(*options):
                    cand = ExplicitNode(node.symbol, node.start, node.end, pid, combo, origin=origin_of[pid])
                    verdict = None if no_constraints else _local_verdict(cand, constraints)
                    if verdict is not None:
                        rejected[verdict] += 1
                        if depth == 0:
                            root_reasons[cand.sexpr()] = verdict
                        continue
                    survivors.append(store.intern(cand))
        kept = check_selection_precedence(survivors, constraints)
        if len(kept) != len(survivors):
            rejected["selection"] += len(survivors) - len(kept)
            if depth == 0:
                for c in set(survivors) - set(kept):
                    root_reasons[c.sexpr()] = "selection"
        history.discard(node)
        open_spans[(node.start, node.end)] -= 1
        blocked.discard(node)
        result = frozenset(kept)
        if not blocked:
            memo[node] = result
        return result, blocked

    roots: set[ExplicitNode] = set()
    # one frame per tree level; left-recursive chains grow with the input
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * len(igraph.tokens) + 1000))
    try:
        with gc_paused():
            for start in sorted(igraph.starting_nodes):
                got, _ = expand_node(start, 0)
                roots.update(got)
    finally:
        sys.setrecursionlimit(limit)
    if igraph.starting_nodes and not roots:
        raise AllTreesRejected(root_reasons, rejected)
    return EGraph(frozenset(roots), store, rejected)


def _derivation_key(d):
    pid, kids = d
    return (pid, [(k.start, k.end, k.symbol) for k in kids])

