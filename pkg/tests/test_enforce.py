import pytest
from hypothesis import given, settings, strategies as st

from lambfence import (
    AllTreesRejected,
    ConstraintSet,
    EvaluatorFailure,
    ExplicitNode,
    Token,
    build_ela_graph,
    build_lexical_graph,
    chart_parse,
    compute_adjacency,
    expand,
    parse_with_spec,
)
from lambfence.enforce import (
    apply_custom_constraint,
    check_associativity,
    check_composition_precedence,
    check_selection_precedence,
)
from lambfence.oracles import catalan, oracle_enumerate_parses, oracle_filter_forest

from helpers import (
    expr_grammar,
    expr_tokens,
    grammar,
    grammar_inputs,
    grammars,
    parse_tokens,
    spec,
    straight,
)


def leaf(kind, text, start):
    return ExplicitNode.leaf(Token(start, start + len(text), kind, text))


def node(pid, symbol, *children, origin=None):
    return ExplicitNode(symbol, children[0].start, children[-1].end, pid, children, origin=origin)


def binary(left, right, pid="E.0"):
    plus = leaf("Plus", "+", left.end)
    return node(pid, "E", left, plus, right)


def num(i):
    return node("E.1", "E", leaf("Num", str(i), 2 * i))


LEFT = ConstraintSet(associativity={"E.0": "left"})
RIGHT = ConstraintSet(associativity={"E.0": "right"})


# -- end-to-end examples ---------------------------------------------------------


def test_prices_example_single_tree():
    result = parse_with_spec(spec("prices.lf"), "5.2 $ 8.4")
    (tree,) = result.trees
    assert tree.sexpr() == "Product(Reference(Integer:5 Point:. Integer:2) Price(Dollar:$ Decimal:8.4))"
    assert [(t.type, t.text) for t in tree.frontier()] == [
        ("Integer", "5"),
        ("Point", "."),
        ("Integer", "2"),
        ("Dollar", "$"),
        ("Decimal", "8.4"),
    ]


def test_cycle_single_tree():
    (tree,) = parse_with_spec(spec("cycle.lf"), "c").trees
    assert tree.sexpr() == "A(c:c)"


def test_same_span_memo_does_not_leak_through_history():
    # X and Y derive each other on one span; the root reaches both
    g = grammar(
        [("S", "X", "S.0"), ("S", "Y", "S.1"), ("X", "Y", "X.0"), ("X", "a", "X.1"), ("Y", "X", "Y.0"), ("Y", "a", "Y.1")],
        "S",
        {"a"},
    )
    word = straight(["a"])
    _, eg = parse_tokens(word, g)
    got = {t.sexpr() for t in eg.trees()}
    assert got == {"S(X(a:a))", "S(X(Y(a:a)))", "S(Y(a:a))", "S(Y(X(a:a)))"}
    assert {t.canonical() for t in eg.starting_nodes} == oracle_enumerate_parses(word, g)


@pytest.mark.parametrize("k", range(2, 9))
def test_unconstrained_count_is_catalan(k):
    toks = expr_tokens(k)
    _, eg = parse_tokens(toks, expr_grammar())
    assert len(eg.starting_nodes) == catalan(k - 1)
    assert {t.canonical() for t in eg.starting_nodes} == oracle_enumerate_parses(toks, expr_grammar())


def test_ten_operand_count_is_catalan():
    # ten operands have Catalan(9) binary bracketings, not 104857
    _, eg = parse_tokens(expr_tokens(10), expr_grammar())
    assert len(eg.starting_nodes) == catalan(9) == 4862


def left_leaning(tree):
    if tree.production != "E.0":
        return True
    right = tree.children[2]
    return right.production == "E.1" and left_leaning(tree.children[0])


@pytest.mark.parametrize("k", range(2, 11))
def test_left_associativity_unique_and_left_leaning(k):
    _, eg = parse_tokens(expr_tokens(k), expr_grammar(), LEFT)
    (tree,) = eg.starting_nodes
    assert left_leaning(tree)


def test_dangling_else_binds_inner():
    (tree,) = parse_with_spec(spec("dangling_else.lf"), "if e1 if e2 s1 else s2").trees
    assert tree.production == "If"
    inner = tree.children[2]
    assert inner.production == "IfElse"


def test_selection_precedence_output_statement():
    result = parse_with_spec(spec("output_statement.lf"), "output(var);")
    (tree,) = result.trees
    assert tree.production == "OutputStatement"
    assert result.report.rejected_by_constraint == {"selection": 1}


# -- individual checks -----------------------------------------------------------


def test_check_associativity_left_and_right():
    a, b, c = num(0), num(1), num(2)
    leaning_left = binary(binary(a, b), c)
    leaning_right = binary(a, binary(b, c))
    assert check_associativity(leaning_left, LEFT)
    assert not check_associativity(leaning_right, LEFT)
    assert check_associativity(leaning_right, RIGHT)
    assert not check_associativity(leaning_left, RIGHT)


def test_check_associativity_unconstrained_accepts():
    a, b, c = num(0), num(1), num(2)
    assert check_associativity(binary(a, binary(b, c)), ConstraintSet())


def test_check_associativity_non():
    lhs = node("Cmp.0", "Cmp", leaf("E", "x", 0))
    cmp = node("Cmp.0", "Cmp", lhs, leaf("Lt", "<", 1), leaf("E", "y", 2))
    assert not check_associativity(cmp, ConstraintSet(associativity={"Cmp.0": "non"}))
    flat = node("Cmp.0", "Cmp", leaf("E", "x", 0), leaf("Lt", "<", 1), leaf("E", "y", 2))
    assert check_associativity(flat, ConstraintSet(associativity={"Cmp.0": "non"}))


def test_check_associativity_through_desugared_variant():
    # a variant of the same source production counts as the same production
    a, b, c = num(0), num(1), num(2)
    inner = node("E.0/1", "E", b, leaf("Plus", "+", b.end), c, origin="E.0")
    cand = binary(a, inner)
    assert not check_associativity(cand, LEFT)


def if_node(pid, *kids):
    return node(pid, "Stmt", *kids)


def test_check_composition():
    cs = ConstraintSet(composition={("IfElse", "If")})
    s1 = node("Stmt.2", "Stmt", leaf("Act", "s1", 0))
    inner_if = if_node("If", leaf("If", "if", 0), leaf("Cond", "e", 1), s1)
    outer = if_node("IfElse", leaf("If", "if", 0), leaf("Cond", "e", 1), inner_if, leaf("Else", "else", 2), s1)
    assert not check_composition_precedence(outer, cs)
    assert check_composition_precedence(outer, ConstraintSet())
    third = if_node("IfElse", leaf("If", "if", 0), leaf("Cond", "e", 1), s1, leaf("Else", "else", 2), s1)
    assert check_composition_precedence(third, cs)


def test_check_selection():
    kids = (leaf("Ident", "output", 0), leaf("Semi", ";", 6))
    out = ExplicitNode("S", 0, 7, "OutputStatement", kids)
    call = ExplicitNode("S", 0, 7, "FunctionCall", kids)
    cs = ConstraintSet(selection={("OutputStatement", "FunctionCall")})
    assert check_selection_precedence([out, call], cs) == [out]
    assert check_selection_precedence([out, call], ConstraintSet()) == [out, call]
    other = ExplicitNode("S", 0, 7, "FunctionCall", (leaf("Ident", "output", 0), leaf("Semi", ";", 7)))
    assert check_selection_precedence([out, other], cs) == [out, other]


def test_check_selection_is_transitive():
    kids = (leaf("x", "x", 0),)
    a, b, c = (ExplicitNode("S", 0, 1, p, kids) for p in "abc")
    cs = ConstraintSet(selection={("a", "b"), ("b", "c")})
    assert check_selection_precedence([c, a], cs) == [a]


def test_custom_constraint():
    cand = num(0)
    assert apply_custom_constraint(cand, lambda n: True)
    assert apply_custom_constraint(cand, None)
    assert not apply_custom_constraint(cand, lambda n: False)


def distinct_integers(n):
    ints = [c.token.text for c in n.children if c.token is not None and c.symbol == "Integer"]
    return len(set(ints)) == len(ints)


def test_custom_evaluator_in_pipeline():
    s = spec("prices.lf")
    cs = ConstraintSet(custom={"Reference.0": distinct_integers})

    def run(text):
        la = build_lexical_graph(text, s.token_specs, s.scan_config)
        return expand(chart_parse(build_ela_graph(la), s.parser_grammar), s.parser_grammar, cs)

    assert len(run("5.2 $ 8.4").starting_nodes) == 1
    with pytest.raises(AllTreesRejected) as info:
        run("5.5 $ 8.4")
    assert info.value.rejected["custom"] >= 1
    assert set(info.value.reasons.values()) <= {"custom"}


def test_evaluator_failure_names_production():
    def boom(n):
        raise RuntimeError("bad")

    with pytest.raises(EvaluatorFailure) as info:
        parse_tokens(expr_tokens(2), expr_grammar(), ConstraintSet(custom={"E.0": boom}))
    assert info.value.production == "E.0"


def test_all_trees_rejected_reports_reason():
    with pytest.raises(AllTreesRejected) as info:
        parse_tokens(expr_tokens(3), expr_grammar(), ConstraintSet(associativity={"E.0": "non"}))
    assert set(info.value.reasons.values()) == {"associativity"}


# -- forest structure --------------------------------------------------------------


def test_forest_shares_subtrees():
    _, eg = parse_tokens(expr_tokens(4), expr_grammar())
    nodes = eg.nodes()
    assert len(nodes) == len({n.canonical() for n in nodes})
    by_canon = {}
    for root in eg.starting_nodes:
        for n in root.iter_nodes():
            assert by_canon.setdefault(n.canonical(), n) is n


def test_children_spans_ordered_and_contained():
    _, eg = parse_tokens(expr_tokens(5), expr_grammar())
    for n in eg.nodes():
        pos = n.start
        for c in n.children:
            assert pos <= c.start < c.end <= n.end
            pos = c.end


# -- properties -------------------------------------------------------------------


def canon(eg):
    return set() if eg is None else {t.canonical() for t in eg.starting_nodes}


@settings(max_examples=200)
@given(grammar_inputs(max_tokens=10))
def test_pipeline_matches_parse_enumerator(case):
    g, toks = case
    _, eg = parse_tokens(toks, g)
    assert canon(eg) == oracle_enumerate_parses(toks, g)


@st.composite
def constrained_cases(draw):
    g, toks = draw(grammar_inputs(max_tokens=10))
    ids = sorted({p.origin for p in g.productions} | {p.id for p in g.productions})
    pick = st.sampled_from(ids)
    assoc = draw(st.dictionaries(pick, st.sampled_from(["left", "right", "non"]), max_size=2))
    pairs = st.lists(st.tuples(pick, pick).filter(lambda ab: ab[0] != ab[1]), max_size=2)
    custom = {}
    for pid in draw(st.lists(pick, max_size=1)):
        width = draw(st.integers(1, 4))
        custom[pid] = lambda n, w=width: n.end - n.start != w
    cs = ConstraintSet(assoc, draw(pairs), draw(pairs), custom)
    return g, toks, cs


@settings(max_examples=200)
@given(constrained_cases())
def test_early_pruning_equals_post_filtering(case):
    g, toks, cs = case
    ig, free = parse_tokens(toks, g)
    if free is None:
        return
    try:
        early = canon(expand(ig, g, cs))
    except AllTreesRejected:
        early = set()
    assert early == oracle_filter_forest(free, ig, g, cs)


@settings(max_examples=100)
@given(grammar_inputs(max_tokens=8))
def test_memo_consistency_and_tree_validity(case):
    g, toks = case
    ig, eg = parse_tokens(toks, g)
    if eg is None:
        return
    again = expand(ig, g)
    assert canon(again) == canon(eg)
    assert [t.sexpr() for t in again.trees()] == [t.sexpr() for t in eg.trees()]
    paths = set(compute_adjacency(toks).paths())
    for tree in eg.starting_nodes:
        assert tuple(tree.frontier()) in paths
        assert tree.symbol == g.start


def cyclic_grammars():
    """Unit cycles of length 1..3 over S, A, B plus a terminal exit."""
    chains = {
        1: [("S", "S", "S.c")],
        2: [("S", "A", "S.c"), ("A", "S", "A.c")],
        3: [("S", "A", "S.c"), ("A", "B", "A.c"), ("B", "S", "B.c")],
    }
    exits = [
        [("S", "a", "S.x")],
        [("S", "S a", "S.x"), ("S", "a", "S.y")],
        [("S", "a S", "S.x"), ("S", "a", "S.y"), ("A", "a", "A.x")],
    ]
    for length, chain in chains.items():
        for extra in exits:
            yield length, grammar(chain + extra, "S", {"a"})


@pytest.mark.parametrize("length,g", list(cyclic_grammars()))
def test_cycle_safety(length, g):
    for n in range(1, 9):
        toks = straight(["a"] * n)
        _, eg = parse_tokens(toks, g)
        assert canon(eg) == oracle_enumerate_parses(toks, g)


@settings(max_examples=50)
@given(grammars(max_nts=3, max_prods=6), st.integers(1, 6))
def test_cycles_terminate_on_repeated_input(g, n):
    parse_tokens(straight(["a"] * n), g)


@st.composite
def operator_cases(draw):
    """Two binary operators over one operand type: ambiguity guaranteed."""
    rules = [("E", "E p E", "E.0"), ("E", "E t E", "E.1"), ("E", "n", "E.2")]
    if draw(st.booleans()):
        rules += [("E", "F", "E.3"), ("F", "E", "F.0")]
    g = grammar(rules, "E", {"n", "p", "t"})
    k = draw(st.integers(2, 5))
    ops = draw(st.lists(st.sampled_from("pt"), min_size=k - 1, max_size=k - 1))
    words = ["n"]
    for op in ops:
        words += [op, "n"]
    ids = [p.id for p in g.productions]
    pick = st.sampled_from(ids)
    pairs = st.lists(st.tuples(pick, pick).filter(lambda ab: ab[0] != ab[1]), max_size=3)
    assoc = draw(st.dictionaries(pick, st.sampled_from(["left", "right", "non"]), max_size=2))
    custom = {}
    if draw(st.booleans()):
        custom[draw(pick)] = lambda n: (n.end - n.start) % 4 != 3
    return g, straight(words), ConstraintSet(assoc, draw(pairs), draw(pairs), custom)


@settings(max_examples=200)
@given(operator_cases())
def test_early_pruning_equals_post_filtering_on_operators(case):
    g, toks, cs = case
    ig, free = parse_tokens(toks, g)
    try:
        early = canon(expand(ig, g, cs))
    except AllTreesRejected:
        early = set()
    assert early == oracle_filter_forest(free, ig, g, cs)
