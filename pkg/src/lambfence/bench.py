"""Input families and a per-size timing worker for scaling runs.

``python -m lambfence.bench FAMILY SIZE`` times one run and prints a JSON line.
Each size runs in its own process so a timeout or memory cap affects only that
run.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import subprocess
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from .chart import build_ela_graph, chart_parse
from .enforce import expand
from .grammar import ConstraintSet, Grammar, Production, TokenTypeSpec, normalize
from .scanner import ScanConfig, build_lexical_graph

ARITH_TOKENS = (
    TokenTypeSpec("Num", "[0-9]+"),
    TokenTypeSpec("Plus", r"\+"),
    TokenTypeSpec("Times", r"\*"),
    TokenTypeSpec("LParen", r"\("),
    TokenTypeSpec("RParen", r"\)"),
)
EXPR_TOKENS = (TokenTypeSpec("Num", "[0-9]"), TokenTypeSpec("Plus", r"\+"))


def _rules(rules, start, terminals) -> Grammar:
    prods = [Production(lhs, tuple(rhs.split()), f"{lhs}.{k}") for lhs, k, rhs in rules]
    return normalize(Grammar.build(prods, start, terminals))


def arith_grammar() -> Grammar:
    """Unambiguous: the usual two precedence levels plus parentheses."""
    return _rules(
        [
            ("Expr", 0, "Expr Plus Term"),
            ("Expr", 1, "Term"),
            ("Term", 0, "Term Times Factor"),
            ("Term", 1, "Factor"),
            ("Factor", 0, "Num"),
            ("Factor", 1, "LParen Expr RParen"),
        ],
        "Expr",
        {t.name for t in ARITH_TOKENS},
    )


def expr_grammar() -> Grammar:
    """Ambiguous: E ::= E Plus E | Num."""
    return _rules([("E", 0, "E Plus E"), ("E", 1, "Num")], "E", {"Num", "Plus"})


def random_arith(n: int, rng: random.Random) -> str:
    """A random parenthesised expression of at most ``n`` characters."""
    out: list[str] = []
    depth = 0
    while True:
        # an operand, possibly behind opening parentheses
        while depth < 32 and len(out) + depth + 3 <= n and rng.random() < 0.25:
            out.append("(")
            depth += 1
        out.append(str(rng.randint(0, 9)))
        while depth and rng.random() < 0.35:
            out.append(")")
            depth -= 1
        if len(out) + depth + 2 > n:
            break
        out.append(rng.choice("+*"))
    out.extend(")" * depth)
    return "".join(out)


def flat_arith(n: int, rng: random.Random) -> str:
    """Digits joined by random operators, no parentheses; odd length <= n."""
    k = (n + 1) // 2
    return "".join(str(rng.randint(0, 9)) + rng.choice("+*") for _ in range(k))[: 2 * k - 1]


def flat_expr(n: int, rng: random.Random) -> str:
    k = (n + 1) // 2
    return "+".join(str(rng.randint(0, 9)) for _ in range(k))


@dataclass(frozen=True)
class Family:
    name: str
    make_input: object
    tokens: tuple
    grammar: object
    # forests of ambiguous inputs hold exponentially many trees, so only the
    # implicit graph is built for them
    expand: bool
    bound: float


FAMILIES = {
    "arith-random": Family("arith-random", random_arith, ARITH_TOKENS, arith_grammar, True, 2.3),
    "arith-flat": Family("arith-flat", flat_arith, ARITH_TOKENS, arith_grammar, True, 2.3),
    "expr-ambiguous": Family("expr-ambiguous", flat_expr, EXPR_TOKENS, expr_grammar, False, 3.3),
}


def time_once(family: str, size: int, seed: int = 0) -> dict:
    fam = FAMILIES[family]
    text = fam.make_input(size, random.Random(seed * 100003 + size))
    g = fam.grammar()
    t0 = time.perf_counter()
    la = build_lexical_graph(text, fam.tokens, ScanConfig(ignore=None))
    ig = chart_parse(build_ela_graph(la), g)
    trees = len(expand(ig, g, ConstraintSet()).starting_nodes) if fam.expand else None
    elapsed = time.perf_counter() - t0
    return {
        "family": family,
        "size": size,
        "chars": len(text),
        "tokens": len(la.tokens),
        "implicit_nodes": len(ig.nodes),
        "agenda_entries": ig.stats["agenda_entries"],
        "trees": trees,
        "seconds": elapsed,
    }


def fitted_exponent(sizes, times) -> float:
    """Least-squares slope of log time against log size."""
    xs = [math.log(s) for s in sizes]
    ys = [math.log(t) for t in times]
    mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
    return sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sum((x - mx) ** 2 for x in xs)


@dataclass
class SweepResult:
    family: str
    runs: list[dict] = field(default_factory=list)
    failure: str | None = None

    @property
    def complete(self) -> bool:
        return self.failure is None

    @property
    def exponent(self) -> float | None:
        done = [r for r in self.runs if r["seconds"] > 0]
        if len(done) < 2:
            return None
        return fitted_exponent([r["chars"] for r in done], [r["seconds"] for r in done])


def _limit_memory(limit_bytes: int):
    def apply():
        import resource

        resource.setrlimit(resource.RLIMIT_AS, (limit_bytes, limit_bytes))

    return apply


def sweep(family: str, exponents=range(8, 14), timeout: float = 60.0, memory_gb: float = 3.0, seed: int = 0) -> SweepResult:
    """Time each size in a fresh process; stop at the first failed size."""
    result = SweepResult(family)
    src = str(Path(__file__).resolve().parent.parent)
    env = {**os.environ, "PYTHONPATH": os.pathsep.join(filter(None, [src, os.environ.get("PYTHONPATH")]))}
    for k in exponents:
        cmd = [sys.executable, "-m", "lambfence.bench", family, str(2**k), "--seed", str(seed)]
        try:
            proc = subprocess.run(
                cmd,
                capture_output=True,
                text=True,
                env=env,
                # a few seconds of slack for interpreter start-up
                timeout=timeout + 5,
                preexec_fn=_limit_memory(int(memory_gb * 2**30)) if os.name == "posix" else None,
            )
        except subprocess.TimeoutExpired:
            result.failure = f"size 2^{k}: exceeded {timeout:g} s"
            break
        if proc.returncode != 0:
            tail = (proc.stderr.strip().splitlines() or ["?"])[-1]
            # a MemoryError under the cap often cannot even be printed
            if "MemoryError" in proc.stderr or "lost sys.stderr" in proc.stderr:
                tail = f"out of memory under the {memory_gb:g} GB cap"
            result.failure = f"size 2^{k}: worker failed ({tail})"
            break
        run = json.loads(proc.stdout)
        result.runs.append(run)
        if run["seconds"] >= timeout:
            result.failure = f"size 2^{k}: took {run['seconds']:.1f} s"
            break
    return result


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="python -m lambfence.bench")
    ap.add_argument("family", choices=sorted(FAMILIES))
    ap.add_argument("size", type=int)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    print(json.dumps(time_once(args.family, args.size, args.seed)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
