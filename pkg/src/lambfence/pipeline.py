"""End-to-end runs: scan, extend, chart-parse, expand."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Sequence

from .chart import ELAGraph, IGraph, build_ela_graph, chart_parse
from .enforce import EGraph, expand
from .grammar import ConstraintSet, Grammar, TokenTypeSpec
from .scanner import LexicalAnalysisGraph, Policy, ScanConfig, build_lexical_graph
from .specfile import LanguageSpec


@dataclass
class RunReport:
    token_count: int = 0
    path_count: int = 0
    implicit_node_count: int = 0
    tree_count: int = 0
    rejected_by_constraint: dict[str, int] = field(default_factory=dict)
    elapsed: dict[str, float] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "token_count": self.token_count,
            "path_count": self.path_count,
            "implicit_node_count": self.implicit_node_count,
            "tree_count": self.tree_count,
            "rejected_by_constraint": dict(sorted(self.rejected_by_constraint.items())),
            "elapsed": {k: round(v, 6) for k, v in self.elapsed.items()},
        }


@dataclass
class ParseResult:
    la: LexicalAnalysisGraph
    ela: ELAGraph
    igraph: IGraph
    egraph: EGraph
    report: RunReport

    @property
    def trees(self):
        return self.egraph.trees()


def parse_tokens_graph(
    la: LexicalAnalysisGraph,
    grammar: Grammar,
    constraints: ConstraintSet | None = None,
    report: RunReport | None = None,
) -> ParseResult:
    """Parse an existing lexical analysis graph with a normalized grammar."""
    report = report or RunReport()
    report.token_count = len(la.tokens)
    report.path_count = la.count_paths()
    t0 = time.perf_counter()
    ela = build_ela_graph(la)
    t1 = time.perf_counter()
    ig = chart_parse(ela, grammar)
    t2 = time.perf_counter()
    report.implicit_node_count = len(ig.nodes)
    eg = expand(ig, grammar, constraints)
    t3 = time.perf_counter()
    report.tree_count = len(eg.starting_nodes)
    report.rejected_by_constraint = dict(eg.rejected)
    report.elapsed.update({"ela": t1 - t0, "chart": t2 - t1, "enforce": t3 - t2})
    return ParseResult(la, ela, ig, eg, report)


def parse_text(
    text: str,
    token_specs: Sequence[TokenTypeSpec],
    grammar: Grammar,
    constraints: ConstraintSet | None = None,
    config: ScanConfig = ScanConfig(),
) -> ParseResult:
    """Scan and parse ``text``.  ``grammar`` must be normalized."""
    report = RunReport()
    t0 = time.perf_counter()
    la = build_lexical_graph(text, token_specs, config)
    report.elapsed["scan"] = time.perf_counter() - t0
    return parse_tokens_graph(la, grammar, constraints, report)


def parse_with_spec(spec: LanguageSpec, text: str, policy: Policy | str | None = None) -> ParseResult:
    config = spec.scan_config if policy is None else replace(spec.scan_config, policy=Policy(policy))
    return parse_text(text, spec.token_specs, spec.parser_grammar, spec.constraints, config)
