"""Ambiguity-preserving scanning and constraint-filtered chart parsing."""

from .chart import (
    ELAGraph,
    Handle,
    IGraph,
    ImplicitNode,
    NoParse,
    advance_handle,
    build_ela_graph,
    chart_parse,
)
from .enforce import AllTreesRejected, EGraph, EvaluatorFailure, ExplicitNode, expand
from .grammar import (
    Associativity,
    ConstraintSet,
    Grammar,
    Production,
    TokenTypeSpec,
    desugar_optionals,
    extract_epsilon_symbols,
    normalize,
    validate_grammar,
)
from .pipeline import ParseResult, RunReport, parse_text, parse_with_spec
from .regex import BadPattern, compile_matcher
from .scanner import (
    LexicalAnalysisGraph,
    Policy,
    ScanConfig,
    Token,
    UnscannableRegion,
    build_lexical_graph,
    compute_adjacency,
    scan_exploratory,
    scan_greedy,
)
from .specfile import LanguageSpec, SpecError, format_language_spec, load_language_spec, parse_language_spec

__version__ = "0.1.0"
