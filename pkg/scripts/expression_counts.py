"""Tree counts for E ::= E Plus E | Num with and without associativity.

The unconstrained count is compared with the Catalan numbers and, for small
inputs, with the brute-force enumerator.
"""

import argparse
import time

from lambfence import ConstraintSet, Grammar, Production, Token, build_ela_graph, chart_parse, compute_adjacency, expand, normalize
from lambfence.oracles import MAX_PARSE_TOKENS, catalan, oracle_enumerate_parses


def operands(k):
    toks, pos = [], 0
    for i in range(k):
        if i:
            toks.append(Token(pos, pos + 1, "Plus", "+"))
            pos += 1
        toks.append(Token(pos, pos + 1, "Num", str(i % 10)))
        pos += 1
    return toks


def count(tokens, g, constraints=None):
    ig = chart_parse(build_ela_graph(compute_adjacency(tokens)), g)
    return len(expand(ig, g, constraints).starting_nodes)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-operands", type=int, default=10)
    args = ap.parse_args()

    prods = [Production("E", ("E", "Plus", "E"), "E.0"), Production("E", ("Num",), "E.1")]
    g = normalize(Grammar.build(prods, "E", {"Plus", "Num"}))
    constraints = {
        "left": ConstraintSet(associativity={"E.0": "left"}),
        "right": ConstraintSet(associativity={"E.0": "right"}),
    }
    print(f"{'k':>3} {'trees':>7} {'catalan':>8} {'oracle':>7} {'left':>5} {'right':>5} {'seconds':>8}")
    for k in range(1, args.max_operands + 1):
        toks = operands(k)
        t0 = time.perf_counter()
        free = count(toks, g)
        elapsed = time.perf_counter() - t0
        oracle = len(oracle_enumerate_parses(toks, g)) if len(toks) <= MAX_PARSE_TOKENS else "-"
        left = count(toks, g, constraints["left"])
        right = count(toks, g, constraints["right"])
        print(f"{k:>3} {free:>7} {catalan(k - 1):>8} {oracle:>7} {left:>5} {right:>5} {elapsed:>8.3f}")


if __name__ == "__main__":
    main()
