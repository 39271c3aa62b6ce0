"""Shared builders and hypothesis strategies for the test suite."""

from __future__ import annotations

import random
from pathlib import Path

from hypothesis import strategies as st

from lambfence import (
    ConstraintSet,
    Grammar,
    Production,
    Token,
    TokenTypeSpec,
    build_ela_graph,
    chart_parse,
    compute_adjacency,
    expand,
    load_language_spec,
    normalize,
)

DATA = Path(__file__).parent / "data"

PRICE_TOKENS = [
    TokenTypeSpec("Integer", r"(-|\+)?[0-9]+", 1),
    TokenTypeSpec("Decimal", r"(-|\+)?[0-9]+\.[0-9]+", 1),
    TokenTypeSpec("Point", r"\.", 1),
    TokenTypeSpec("Hash", r"\#", 1),
    TokenTypeSpec("Dollar", r"\$", 1),
]
INTEGER = [TokenTypeSpec("Integer", r"(-|\+)?[0-9]+")]


def spec(name: str):
    return load_language_spec(DATA / name)


def straight(types, texts=None) -> list[Token]:
    """One token per type at consecutive unit positions."""
    texts = texts or types
    return [Token(i, i + 1, t, x) for i, (t, x) in enumerate(zip(types, texts))]


def prod(lhs, rhs, pid, optional=()):
    return Production(lhs, tuple(rhs.split()) if isinstance(rhs, str) else tuple(rhs), pid, frozenset(optional))


def grammar(rules, start, terminals) -> Grammar:
    """``rules`` as ``[(lhs, "rhs words", id), ...]``; returns the normalized grammar."""
    return normalize(Grammar.build([prod(*r) for r in rules], start, terminals))


def expr_grammar() -> Grammar:
    return grammar([("E", "E Plus E", "E.0"), ("E", "Num", "E.1")], "E", {"Plus", "Num"})


def expr_tokens(k: int) -> list[Token]:
    types, texts = [], []
    for i in range(k):
        if i:
            types.append("Plus")
            texts.append("+")
        types.append("Num")
        texts.append(str(i % 10))
    return straight(types, texts)


def parse_tokens(tokens, g: Grammar, constraints: ConstraintSet | None = None, require_parse=False):
    """chart + expand over a token set; returns (igraph, egraph or None)."""
    la = compute_adjacency(tokens)
    ig = chart_parse(build_ela_graph(la), g, require_parse=require_parse)
    if not ig.starting_nodes:
        return ig, None
    return ig, expand(ig, g, constraints)


# -- random grammars ---------------------------------------------------------

NONTERMINALS = ("S", "A", "B", "C")
TERMINALS = ("a", "b", "c")


@st.composite
def grammars(draw, max_nts=4, max_prods=8, optionals=True, cycles=True):
    """Random small grammars; every nonterminal used gets at least one production."""
    nts = list(NONTERMINALS[: draw(st.integers(1, max_nts))])
    symbols = nts + list(TERMINALS)
    n_prods = draw(st.integers(len(nts), max_prods))
    rules = []
    for i in range(n_prods):
        lhs = nts[i] if i < len(nts) else draw(st.sampled_from(nts))
        rhs = draw(st.lists(st.sampled_from(symbols), min_size=1, max_size=3))
        if not cycles and len(rhs) == 1 and rhs[0] in nts:
            rhs.append(draw(st.sampled_from(TERMINALS)))
        opt = set()
        if optionals and draw(st.integers(0, 4)) == 0:
            opt = {draw(st.integers(0, len(rhs) - 1))}
        rules.append((lhs, rhs, f"{lhs}.{i}", opt))
    raw = Grammar.build([prod(*r) for r in rules], "S", set(TERMINALS))
    return normalize(raw)


def sample_sentence(g: Grammar, rng: random.Random, max_len: int = 10, depth: int = 6) -> list[str] | None:
    """A random terminal string derived from ``g.start`` (None if the walk fails)."""

    def walk(sym, d):
        if sym in g.terminals:
            return [sym]
        options = g.by_lhs.get(sym, ())
        if not options or d > depth:
            return None
        p = rng.choice(options)
        out = []
        for s in p.rhs:
            if s in g.epsilon_symbols and rng.random() < 0.3:
                continue
            got = walk(s, d + 1)
            if got is None:
                return None
            out.extend(got)
        return out

    for _ in range(5):
        got = walk(g.start, 0)
        if got and len(got) <= max_len:
            return got
    return None


@st.composite
def grammar_inputs(draw, max_tokens=10, **kw):
    g = draw(grammars(**kw))
    rng = draw(st.randoms(use_true_random=False))
    words = sample_sentence(g, rng, max_tokens) if draw(st.booleans()) else None
    if words is None:
        words = draw(st.lists(st.sampled_from(TERMINALS), min_size=1, max_size=max_tokens))
    return g, straight(words)


# -- random token specs ------------------------------------------------------

ALPHABET = "ab1."


@st.composite
def regexes(draw, depth=2):
    """Patterns valid both for our engine and for :mod:`re`."""
    if depth == 0 or draw(st.integers(0, 2)) == 0:
        atom = draw(st.sampled_from(["a", "b", "1", r"\.", "[ab]", "[0-9]", "[^a]", "."]))
        return atom
    kind = draw(st.sampled_from(["cat", "alt", "star", "plus", "opt"]))
    if kind == "cat":
        return draw(regexes(depth - 1)) + draw(regexes(depth - 1))
    if kind == "alt":
        return f"({draw(regexes(depth - 1))}|{draw(regexes(depth - 1))})"
    inner = draw(regexes(depth - 1))
    return f"({inner})" + {"star": "*", "plus": "+", "opt": "?"}[kind]


@st.composite
def token_specs(draw, max_types=3, overrides=True):
    n = draw(st.integers(1, max_types))
    names = [f"T{i}" for i in range(n)]
    out = []
    for name in names:
        ov = set()
        if overrides and n > 1:
            ov = set(draw(st.lists(st.sampled_from([x for x in names if x != name]), max_size=2)))
        out.append(TokenTypeSpec(name, draw(regexes()), draw(st.integers(0, 1)), frozenset(ov)))
    return out


texts = st.text(alphabet=ALPHABET, max_size=20)
