"""Reader and writer for the line-oriented language-spec format.

Example::

    %policy greedy
    %ignore /[ \\t\\r\\n]+/
    %tokens
    Integer  /(-|\\+)?[0-9]+/   prec=1
    Point    /\\./             prec=1 overrides=Integer
    %start Product
    %productions
    Product   ::= Reference Price | Price Reference ;
    Reference ::= [Hash] Integer Point Integer ;
    %constraints
    assoc   Expr.0 left ;
    prefer  Stmt.0 over Stmt.1 ;
    compose IfElse over If ;

Production ``k`` (0-based) of ``Lhs`` gets the id ``Lhs.k`` unless the
alternative ends with ``@label``, in which case the label is its id.  ``#``
starts a comment outside ``/regex/`` literals; ``\\/`` writes a slash inside one.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property

from .grammar import (
    Associativity,
    ConstraintSet,
    Grammar,
    Production,
    TokenTypeSpec,
    normalize,
    validate_grammar,
)
from .regex import BadPattern, compile_matcher
from .scanner import Policy, ScanConfig

__all__ = [
    "DuplicateToken",
    "LanguageSpec",
    "SpecDiagnostic",
    "SpecError",
    "SpecSyntaxError",
    "UnknownSymbol",
    "format_language_spec",
    "load_language_spec",
    "parse_language_spec",
]


@dataclass(frozen=True)
class SpecDiagnostic:
    line: int
    column: int
    message: str
    kind: str = "syntax"

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.message}"


class SpecError(Exception):
    def __init__(self, diagnostics: list[SpecDiagnostic]):
        self.diagnostics = diagnostics
        super().__init__("\n".join(str(d) for d in diagnostics))


class SpecSyntaxError(SpecError):
    pass


class UnknownSymbol(SpecError):
    pass


class DuplicateToken(SpecError):
    pass


_ERROR_CLASSES = {"syntax": SpecSyntaxError, "unknown": UnknownSymbol, "duplicate": DuplicateToken}


@dataclass(frozen=True)
class LanguageSpec:
    token_specs: tuple[TokenTypeSpec, ...]
    grammar: Grammar  # as written: optionals and epsilon alternatives intact
    constraints: ConstraintSet
    scan_config: ScanConfig

    @cached_property
    def parser_grammar(self) -> Grammar:
        """Desugared, epsilon-extracted grammar for the chart parser."""
        return normalize(self.grammar)


_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_PROD_ID = re.compile(r"[A-Za-z_][A-Za-z0-9_]*(\.[0-9]+)?")


class _Line:
    """Word splitter for one physical line; keeps columns for diagnostics."""

    def __init__(self, text: str, lineno: int):
        self.lineno = lineno
        self.words: list[tuple[str, int, bool]] = []  # (text, column, is_regex)
        self.error: SpecDiagnostic | None = None
        i = 0
        n = len(text)
        while i < n:
            c = text[i]
            if c.isspace():
                i += 1
            elif c == "#":
                break
            elif c == "/":
                j = i + 1
                buf = []
                while j < n and text[j] != "/":
                    if text[j] == "\\" and j + 1 < n:
                        if text[j + 1] == "/":
                            buf.append("/")
                        else:
                            buf.append(text[j : j + 2])
                        j += 2
                        continue
                    buf.append(text[j])
                    j += 1
                if j >= n:
                    self.error = SpecDiagnostic(lineno, i + 1, "unterminated /regex/ literal")
                    return
                self.words.append(("".join(buf), i + 1, True))
                i = j + 1
            elif c in "[]|;@":
                self.words.append((c, i + 1, False))
                i += 1
            elif text.startswith("::=", i):
                self.words.append(("::=", i + 1, False))
                i += 3
            else:
                j = i
                while j < n and not text[j].isspace() and text[j] not in "[]|;#/@" and not text.startswith("::=", j):
                    j += 1
                self.words.append((text[i:j], i + 1, False))
                i = j


def parse_language_spec(text: str) -> LanguageSpec:
    """Parse spec-file text; raises a :class:`SpecError` subclass on problems."""
    diags: list[SpecDiagnostic] = []

    def err(line: int, col: int, msg: str, kind: str = "syntax") -> None:
        diags.append(SpecDiagnostic(line, col, msg, kind))

    section = None
    policy = Policy.GREEDY
    ignore: str | None = ScanConfig().ignore
    start: tuple[str, int, int] | None = None
    tokens: list[TokenTypeSpec] = []
    token_pos: dict[str, tuple[int, int]] = {}
    override_refs: list[tuple[str, str, int, int]] = []
    statements: dict[str, list[list[tuple[str, int, int, bool]]]] = {"productions": [], "constraints": []}
    pending: list[tuple[str, int, int, bool]] = []
    pending_section = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _Line(raw, lineno)
        if line.error:
            diags.append(line.error)
            continue
        words = line.words
        if not words:
            continue
        head, col, is_re = words[0]
        if head.startswith("%") and not is_re:
            if pending:
                err(pending[0][1], pending[0][2], "statement not terminated with ';'")
                pending = []
            directive = head[1:]
            args = words[1:]
            if directive in ("tokens", "productions", "constraints"):
                section = directive
                if args:
                    err(lineno, args[0][1], f"unexpected text after %{directive}")
            elif directive == "policy":
                if len(args) != 1 or args[0][0] not in ("greedy", "exploratory"):
                    err(lineno, col, "%policy expects 'greedy' or 'exploratory'")
                else:
                    policy = Policy(args[0][0])
            elif directive == "ignore":
                if len(args) == 1 and args[0][2]:
                    ignore = args[0][0]
                    try:
                        compile_matcher(ignore)
                    except BadPattern as exc:
                        err(lineno, args[0][1] + 1 + exc.pos, f"bad %ignore pattern: {exc.reason}")
                elif len(args) == 1 and args[0][0] == "none":
                    ignore = None
                else:
                    err(lineno, col, "%ignore expects a /regex/ or 'none'")
            elif directive == "start":
                if len(args) != 1 or not _NAME.fullmatch(args[0][0]):
                    err(lineno, col, "%start expects one symbol name")
                else:
                    start = (args[0][0], lineno, args[0][1])
            else:
                err(lineno, col, f"unknown directive {head}")
            continue

        if section == "tokens":
            _parse_token_line(words, lineno, tokens, token_pos, override_refs, err)
        elif section in ("productions", "constraints"):
            if pending_section != section:
                pending = []
            pending_section = section
            for w, c, r in words:
                if w == ";" and not r:
                    if pending:
                        statements[section].append(pending)
                    pending = []
                else:
                    pending.append((w, lineno, c, r))
        else:
            err(lineno, col, "content outside of a section")
    if pending:
        err(pending[0][1], pending[0][2], "statement not terminated with ';'")

    token_names = {t.name for t in tokens}
    for owner, ref, ln, c in override_refs:
        if ref == owner:
            err(ln, c, f"token {owner!r} cannot override itself")
        elif ref not in token_names:
            err(ln, c, f"override names undeclared token {ref!r}", "unknown")

    productions, aliases, prod_refs = _parse_productions(statements["productions"], err)
    nonterminals = {p.lhs for p in productions}
    for sym in sorted(nonterminals & token_names):
        ln, c = token_pos[sym]
        err(ln, c, f"{sym!r} is declared as a token and defined by productions", "duplicate")
    for sym, ln, c in prod_refs:
        if sym not in nonterminals and sym not in token_names:
            err(ln, c, f"undeclared symbol {sym!r}", "unknown")

    if start is None:
        err(1, 1, "missing %start")
        start_symbol = ""
    else:
        start_symbol = start[0]
        if start_symbol not in nonterminals:
            kind = "syntax" if start_symbol in token_names else "unknown"
            err(start[1], start[2], f"start symbol {start_symbol!r} has no productions", kind)

    constraints = _parse_constraints(statements["constraints"], aliases, err)

    if diags:
        raise _ERROR_CLASSES[diags[0].kind](diags)

    grammar = Grammar.build(productions, start_symbol, token_names)
    for d in validate_grammar(normalize(grammar), constraints):
        if d.severity == "error":
            err(1, 1, d.message)
    if diags:
        raise _ERROR_CLASSES[diags[0].kind](diags)
    return LanguageSpec(tuple(tokens), grammar, constraints, ScanConfig(policy, ignore))


def _parse_token_line(words, lineno, tokens, token_pos, override_refs, err) -> None:
    name, col, is_re = words[0]
    if is_re or not _NAME.fullmatch(name):
        err(lineno, col, "expected a token name")
        return
    if len(words) < 2 or not words[1][2]:
        err(lineno, col, f"token {name!r} needs a /regex/ pattern")
        return
    pattern, pcol, _ = words[1]
    try:
        compile_matcher(pattern)
    except BadPattern as exc:
        err(lineno, pcol + 1 + exc.pos, f"bad pattern for {name!r}: {exc.reason}")
        return
    prec = 0
    overrides: list[str] = []
    for w, c, r in words[2:]:
        key, _, value = w.partition("=")
        if r or not value:
            err(lineno, c, f"unexpected {w!r} in token definition")
        elif key == "prec":
            try:
                prec = int(value)
            except ValueError:
                err(lineno, c, f"prec expects an integer, got {value!r}")
        elif key == "overrides":
            offset = c + len("overrides=")
            for part in value.split(","):
                override_refs.append((name, part, lineno, offset))
                overrides.append(part)
                offset += len(part) + 1
        else:
            err(lineno, c, f"unknown token attribute {key!r}")
    if name in token_pos:
        err(lineno, col, f"duplicate token {name!r}", "duplicate")
        return
    token_pos[name] = (lineno, col)
    tokens.append(TokenTypeSpec(name, pattern, prec, frozenset(overrides)))


def _parse_productions(statements, err):
    productions: list[Production] = []
    aliases: dict[str, str] = {}
    refs: list[tuple[str, int, int]] = []
    counts: dict[str, int] = defaultdict(int)
    ids: set[str] = set()
    for stmt in statements:
        (lhs, ln, c, r) = stmt[0]
        if r or not _NAME.fullmatch(lhs) or len(stmt) < 2 or stmt[1][0] != "::=":
            err(ln, c, "expected 'Lhs ::= alternatives ;'")
            continue
        alts: list[list[tuple[str, int, int, bool]]] = [[]]
        for w in stmt[2:]:
            if w[0] == "|" and not w[3]:
                alts.append([])
            else:
                alts[-1].append(w)
        for alt in alts:
            rhs: list[str] = []
            optional: set[int] = set()
            label = None
            i = 0
            ok = True
            while i < len(alt):
                w, wl, wc, wr = alt[i]
                if w == "@" and not wr:
                    if i + 1 >= len(alt) or not _NAME.fullmatch(alt[i + 1][0]) or i + 2 != len(alt):
                        err(wl, wc, "'@label' must end an alternative")
                        ok = False
                        break
                    label = alt[i + 1][0]
                    i += 2
                elif w == "[" and not wr:
                    if i + 2 >= len(alt) or alt[i + 2][0] != "]" or not _NAME.fullmatch(alt[i + 1][0]):
                        err(wl, wc, "optional element must be '[ Symbol ]'")
                        ok = False
                        break
                    optional.add(len(rhs))
                    rhs.append(alt[i + 1][0])
                    refs.append((alt[i + 1][0], alt[i + 1][1], alt[i + 1][2]))
                    i += 3
                elif not wr and _NAME.fullmatch(w):
                    rhs.append(w)
                    refs.append((w, wl, wc))
                    i += 1
                else:
                    err(wl, wc, f"unexpected {w!r} in production")
                    ok = False
                    break
            k = counts[lhs]
            counts[lhs] += 1
            if not ok:
                continue
            positional = f"{lhs}.{k}"
            pid = label or positional
            if pid in ids:
                err(ln, c, f"duplicate production id {pid!r}", "duplicate")
                continue
            ids.add(pid)
            aliases[positional] = pid
            aliases[pid] = pid
            productions.append(Production(lhs, tuple(rhs), pid, frozenset(optional)))
    return productions, aliases, refs


def _parse_constraints(statements, aliases, err) -> ConstraintSet:
    assoc: dict[str, Associativity] = {}
    selection: set[tuple[str, str]] = set()
    composition: set[tuple[str, str]] = set()

    def resolve(word) -> str | None:
        w, ln, c, r = word
        if r or w not in aliases:
            err(ln, c, f"unknown production {w!r}", "unknown")
            return None
        return aliases[w]

    for stmt in statements:
        kind, ln, c, _ = stmt[0]
        texts = [w[0] for w in stmt]
        if kind == "assoc":
            if len(stmt) != 3 or texts[2] not in ("left", "right", "non"):
                err(ln, c, "expected 'assoc <production> left|right|non ;'")
                continue
            pid = resolve(stmt[1])
            if pid is not None:
                assoc[pid] = Associativity(texts[2])
        elif kind in ("prefer", "compose"):
            if len(stmt) != 4 or texts[2] != "over":
                err(ln, c, f"expected '{kind} <production> over <production> ;'")
                continue
            a, b = resolve(stmt[1]), resolve(stmt[3])
            if a is None or b is None:
                continue
            if a == b:
                err(ln, c, f"{kind} pair ({a}, {b}) is reflexive")
                continue
            (selection if kind == "prefer" else composition).add((a, b))
        else:
            err(ln, c, f"unknown constraint {kind!r}")
    return ConstraintSet(assoc, frozenset(selection), frozenset(composition))


def load_language_spec(path) -> LanguageSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_language_spec(fh.read())


def _regex_literal(pattern: str) -> str:
    return "/" + pattern.replace("/", "\\/") + "/"


def format_language_spec(spec: LanguageSpec) -> str:
    """Write ``spec`` back out in the file format (custom matchers cannot be written)."""
    lines = [f"%policy {spec.scan_config.policy.value}"]
    ig = spec.scan_config.ignore
    lines.append(f"%ignore {_regex_literal(ig) if ig else 'none'}")
    lines.append("%tokens")
    for t in spec.token_specs:
        if not isinstance(t.pattern, str):
            raise ValueError(f"token {t.name!r} uses a custom matcher")
        line = f"{t.name} {_regex_literal(t.pattern)} prec={t.precedence}"
        if t.overrides:
            line += " overrides=" + ",".join(sorted(t.overrides))
        lines.append(line)
    lines.append(f"%start {spec.grammar.start}")
    lines.append("%productions")
    by_lhs: dict[str, list[Production]] = {}
    for p in spec.grammar.productions:
        by_lhs.setdefault(p.lhs, []).append(p)
    for lhs, prods in by_lhs.items():
        alts = []
        for k, p in enumerate(prods):
            parts = [f"[{s}]" if i in p.optional else s for i, s in enumerate(p.rhs)]
            if p.id != f"{lhs}.{k}":
                parts.append(f"@{p.id}")
            alts.append(" ".join(parts))
        lines.append(f"{lhs} ::= {' | '.join(alts)} ;")
    c = spec.constraints
    if c.associativity or c.selection or c.composition:
        lines.append("%constraints")
        for pid, a in sorted(c.associativity.items()):
            lines.append(f"assoc {pid} {a.value} ;")
        for a, b in sorted(c.selection):
            lines.append(f"prefer {a} over {b} ;")
        for a, b in sorted(c.composition):
            lines.append(f"compose {a} over {b} ;")
    return "\n".join(lines) + "\n"
