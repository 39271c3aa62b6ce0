"""A small regular-expression engine that reports every match length.

Backtracking engines only report one match per start position, but exploratory
scanning needs all of them.  Patterns are compiled to a Thompson NFA which is
run as a lazily built DFA; every position where the DFA state contains the
accepting NFA state yields a match length.

Supported syntax: literals, ``.``, concatenation, ``|``, ``(...)``, ``(?:...)``,
``?``, ``*``, ``+``, character classes with ranges and negation, and the
escapes ``\\d \\D \\w \\W \\s \\S \\t \\n \\r \\f \\v`` plus any escaped
punctuation.  Backreferences and lookaround are not supported.
"""

from __future__ import annotations

import string

__all__ = ["BadPattern", "RegexMatcher", "compile_matcher"]


class BadPattern(ValueError):
    def __init__(self, pattern: str, pos: int, reason: str):
        super().__init__(f"bad pattern {pattern!r} at {pos}: {reason}")
        self.pattern = pattern
        self.pos = pos
        self.reason = reason


_DIGITS = frozenset(string.digits)
_WORD = frozenset(string.ascii_letters + string.digits + "_")
_SPACE = frozenset(" \t\n\r\f\v")
_CONTROL = {"t": "\t", "n": "\n", "r": "\r", "f": "\f", "v": "\v"}


class CharSet:
    """A set of characters, possibly negated (complement of ``chars``)."""

    __slots__ = ("chars", "negated", "ranges")

    def __init__(self, chars=frozenset(), negated=False, ranges=()):
        self.chars = frozenset(chars)
        self.negated = negated
        self.ranges = tuple(ranges)

    def __contains__(self, ch: str) -> bool:
        hit = ch in self.chars or any(lo <= ch <= hi for lo, hi in self.ranges)
        return hit != self.negated


def _class_escape(c: str) -> CharSet | None:
    if c == "d":
        return CharSet(_DIGITS)
    if c == "D":
        return CharSet(_DIGITS, negated=True)
    if c == "w":
        return CharSet(_WORD)
    if c == "W":
        return CharSet(_WORD, negated=True)
    if c == "s":
        return CharSet(_SPACE)
    if c == "S":
        return CharSet(_SPACE, negated=True)
    return None


# AST nodes are tuples: ("set", CharSet) | ("cat", [..]) | ("alt", [..])
# | ("star", n) | ("plus", n) | ("opt", n) | ("empty",)


class _Parser:
    def __init__(self, pattern: str):
        self.p = pattern
        self.i = 0

    def fail(self, reason: str, pos: int | None = None):
        raise BadPattern(self.p, self.i if pos is None else pos, reason)

    def peek(self) -> str | None:
        return self.p[self.i] if self.i < len(self.p) else None

    def parse(self):
        node = self.alternation()
        if self.i < len(self.p):
            self.fail("unbalanced ')'")
        return node

    def alternation(self):
        branches = [self.concatenation()]
        while self.peek() == "|":
            self.i += 1
            branches.append(self.concatenation())
        return branches[0] if len(branches) == 1 else ("alt", branches)

    def concatenation(self):
        items = []
        while self.peek() not in (None, "|", ")"):
            items.append(self.quantified())
        if not items:
            return ("empty",)
        return items[0] if len(items) == 1 else ("cat", items)

    def quantified(self):
        start = self.i
        node = self.atom()
        while self.peek() in ("*", "+", "?"):
            op = self.p[self.i]
            self.i += 1
            if self.peek() == "?":
                # lazy modifier is meaningless when every length is reported
                self.i += 1
            node = ({"*": "star", "+": "plus", "?": "opt"}[op], node)
        if node is None:
            self.fail("nothing to repeat", start)
        return node

    def atom(self):
        c = self.peek()
        if c == "(":
            open_pos = self.i
            self.i += 1
            if self.p.startswith("?:", self.i):
                self.i += 2
            elif self.peek() == "?":
                self.fail("lookaround and group flags are not supported")
            node = self.alternation()
            if self.peek() != ")":
                self.fail("missing ')'", open_pos)
            self.i += 1
            return node
        if c == "[":
            return ("set", self.char_class())
        if c in ("*", "+", "?"):
            self.fail("nothing to repeat")
        if c in ("{", "}"):
            self.fail("counted repetition is not supported")
        if c in ("^", "$"):
            self.fail("anchors are not supported")
        self.i += 1
        if c == ".":
            return ("set", CharSet("\n", negated=True))
        if c == "\\":
            return ("set", self.escape(in_class=False))
        return ("set", CharSet(c))

    def escape(self, in_class: bool) -> CharSet:
        if self.i >= len(self.p):
            self.fail("dangling backslash", self.i - 1)
        c = self.p[self.i]
        self.i += 1
        cls = _class_escape(c)
        if cls is not None:
            return cls
        if c in _CONTROL:
            return CharSet(_CONTROL[c])
        if c.isdigit() and not in_class:
            self.fail("backreferences are not supported", self.i - 2)
        if c.isalnum():
            self.fail(f"unknown escape \\{c}", self.i - 2)
        return CharSet(c)

    def class_char(self) -> str | CharSet:
        c = self.peek()
        if c is None:
            self.fail("unterminated character class")
        self.i += 1
        if c == "\\":
            cs = self.escape(in_class=True)
            if len(cs.chars) == 1 and not cs.negated and not cs.ranges:
                return next(iter(cs.chars))
            return cs
        return c

    def char_class(self) -> CharSet:
        open_pos = self.i
        self.i += 1
        negated = False
        if self.peek() == "^":
            negated = True
            self.i += 1
        chars: set[str] = set()
        ranges: list[tuple[str, str]] = []
        subsets: list[CharSet] = []
        first = True
        while True:
            c = self.peek()
            if c is None:
                self.fail("unterminated character class", open_pos)
            if c == "]" and not first:
                self.i += 1
                break
            first = False
            lo = self.class_char()
            if isinstance(lo, CharSet):
                subsets.append(lo)
                continue
            if self.peek() == "-" and self.i + 1 < len(self.p) and self.p[self.i + 1] != "]":
                self.i += 1
                hi = self.class_char()
                if isinstance(hi, CharSet):
                    self.fail("bad range endpoint")
                if hi < lo:
                    self.fail("reversed range")
                ranges.append((lo, hi))
            else:
                chars.add(lo)
        if not subsets:
            return CharSet(chars, negated, ranges)
        # classes such as [\d\s] or [^\W_] combine member sets
        members = [CharSet(chars, False, ranges)] + subsets
        return _UnionSet(members, negated)


class _UnionSet(CharSet):
    __slots__ = ("members",)

    def __init__(self, members, negated):
        super().__init__(negated=negated)
        self.members = members

    def __contains__(self, ch: str) -> bool:
        return any(ch in m for m in self.members) != self.negated


class _NFA:
    """Thompson NFA: ``sets[s]`` is a CharSet edge, ``eps[s]`` epsilon edges."""

    def __init__(self):
        self.sets: list[CharSet | None] = []
        self.next: list[int | None] = []
        self.eps: list[list[int]] = []

    def state(self) -> int:
        self.sets.append(None)
        self.next.append(None)
        self.eps.append([])
        return len(self.sets) - 1

    def build(self, node) -> tuple[int, int]:
        kind = node[0]
        if kind == "set":
            s, t = self.state(), self.state()
            self.sets[s] = node[1]
            self.next[s] = t
            return s, t
        if kind == "empty":
            s = self.state()
            return s, s
        if kind == "cat":
            first_s, prev_t = self.build(node[1][0])
            for item in node[1][1:]:
                s, t = self.build(item)
                self.eps[prev_t].append(s)
                prev_t = t
            return first_s, prev_t
        if kind == "alt":
            s, t = self.state(), self.state()
            for branch in node[1]:
                bs, bt = self.build(branch)
                self.eps[s].append(bs)
                self.eps[bt].append(t)
            return s, t
        inner_s, inner_t = self.build(node[1])
        s, t = self.state(), self.state()
        self.eps[s].append(inner_s)
        self.eps[inner_t].append(t)
        if kind in ("star", "opt"):
            self.eps[s].append(t)
        if kind in ("star", "plus"):
            self.eps[inner_t].append(inner_s)
        return s, t

    def closure(self, states) -> frozenset[int]:
        seen = set(states)
        stack = list(states)
        while stack:
            for n in self.eps[stack.pop()]:
                if n not in seen:
                    seen.add(n)
                    stack.append(n)
        return frozenset(seen)


class RegexMatcher:
    """Compiled pattern answering "which prefixes of text[pos:] match fully"."""

    def __init__(self, pattern: str):
        self.pattern = pattern
        ast = _Parser(pattern).parse()
        self._nfa = _NFA()
        start, self._accept = self._nfa.build(ast)
        self._start = self._nfa.closure([start])
        self._trans: dict[tuple[frozenset[int], str], frozenset[int]] = {}

    def __repr__(self) -> str:
        return f"RegexMatcher({self.pattern!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, RegexMatcher) and other.pattern == self.pattern

    def __hash__(self) -> int:
        return hash(self.pattern)

    def _step(self, dstate: frozenset[int], ch: str) -> frozenset[int]:
        key = (dstate, ch)
        hit = self._trans.get(key)
        if hit is None:
            nfa = self._nfa
            moved = [nfa.next[s] for s in dstate if nfa.sets[s] is not None and ch in nfa.sets[s]]
            hit = nfa.closure(moved) if moved else frozenset()
            self._trans[key] = hit
        return hit

    def lengths(self, text: str, pos: int) -> frozenset[int]:
        """All L >= 1 such that the pattern fully matches text[pos:pos+L]."""
        found = []
        state = self._start
        accept = self._accept
        for i in range(pos, len(text)):
            state = self._step(state, text[i])
            if not state:
                break
            if accept in state:
                found.append(i + 1 - pos)
        return frozenset(found)

    def longest(self, text: str, pos: int) -> int:
        """Length of the longest non-empty match at ``pos``, 0 if none."""
        best = 0
        state = self._start
        accept = self._accept
        for i in range(pos, len(text)):
            state = self._step(state, text[i])
            if not state:
                break
            if accept in state:
                best = i + 1 - pos
        return best

    def matches_empty(self) -> bool:
        return self._accept in self._start


def compile_matcher(pattern: str) -> RegexMatcher:
    """Compile regular-expression text; raises :class:`BadPattern`."""
    return RegexMatcher(pattern)
