import os
import re
import subprocess
import sys
from pathlib import Path

from lambfence import Token, build_ela_graph, build_lexical_graph, chart_parse, compute_adjacency
from lambfence.export import egraph_to_json, export_dot, la_to_json
from lambfence.pipeline import parse_with_spec

from helpers import PRICE_TOKENS, spec

EDGE = re.compile(r"^\s+\w+ -> \w+", re.M)
NODE = re.compile(r"^\s+\w+ \[", re.M)


def balanced(dot: str) -> bool:
    return dot.count("{") == dot.count("}") and dot.rstrip().endswith("}")


def test_empty_graph_dot():
    dot = export_dot(compute_adjacency([]))
    assert dot == "digraph G {\n}\n"


def test_single_token_dot():
    dot = export_dot(compute_adjacency([Token(0, 1, "x", "x")]))
    assert len(NODE.findall(dot)) == 1 and not EDGE.findall(dot)


def test_five_point_two_subgraph():
    toks = [Token(0, 1, "Integer", "5"), Token(1, 2, "Point", "."), Token(2, 3, "Integer", "2"), Token(0, 3, "Decimal", "5.2")]
    dot = export_dot(compute_adjacency(toks))
    assert len(NODE.findall(dot)) == 4
    assert len(EDGE.findall(dot)) == 2
    assert balanced(dot)


def test_ela_dot_marks_cores():
    ela = build_ela_graph(build_lexical_graph("5.2 $ 8.4", PRICE_TOKENS))
    dot = export_dot(ela)
    assert dot.count("shape=box") == len(ela.cores)
    assert '"core start"' in dot and '"core final"' in dot
    assert balanced(dot)


def test_igraph_and_egraph_dot():
    result = parse_with_spec(spec("prices.lf"), "5.2 $ 8.4")
    for graph in (result.igraph, result.egraph):
        dot = export_dot(graph)
        assert balanced(dot)
        assert "peripheries=2" in dot


def test_labels_are_escaped():
    dot = export_dot(compute_adjacency([Token(0, 1, "q", '"'), Token(1, 2, "b", "\\")]))
    assert '\\"' in dot and "\\\\" in dot
    assert "\n[" not in dot


def test_dot_is_byte_stable():
    s = spec("expr.lf")
    first = export_dot(parse_with_spec(s, "1+2+3+4").egraph)
    for _ in range(3):
        assert export_dot(parse_with_spec(s, "1+2+3+4").egraph) == first


def test_la_json_schema():
    data = la_to_json(build_lexical_graph("5.2 $ 8.4", PRICE_TOKENS))
    assert data["summary"] == {"tokens": 9, "paths": 4}
    assert len(data["start_tokens"]) == 2 and len(data["end_tokens"]) == 2
    ids = {t["id"] for t in data["tokens"]}
    assert all(a in ids and b in ids for a, b in data["edges"])


def test_egraph_json_shares_children():
    data = egraph_to_json(parse_with_spec(spec("expr.lf"), "1+2+3+4").egraph)
    assert len(data["roots"]) == 5
    referenced = [c for n in data["nodes"] for c in n.get("children", ())]
    # shared subtrees are referenced from several parents but stored once
    assert len(referenced) > len(set(referenced))
    assert len(data["nodes"]) == len({(n["symbol"], tuple(n["span"]), n.get("production"), tuple(n.get("children", ()))) for n in data["nodes"]})


def test_igraph_derivations_render_dotted_edges():
    s = spec("prices.lf")
    la = build_lexical_graph("5.2 $ 8.4", s.token_specs, s.scan_config)
    dot = export_dot(chart_parse(build_ela_graph(la), s.parser_grammar))
    assert "style=dotted" in dot


def test_dot_is_stable_across_processes():
    # string hashing is salted per process, so set iteration order differs
    code = (
        "import sys; sys.path.insert(0, sys.argv[1]);"
        "from helpers import spec; from lambfence.pipeline import parse_with_spec;"
        "from lambfence.export import export_dot;"
        "r = parse_with_spec(spec('expr.lf'), '1+2+3+4');"
        "sys.stdout.write(export_dot(r.igraph) + export_dot(r.egraph))"
    )
    tests_dir = str(Path(__file__).parent)
    outs = set()
    for seed in ("1", "2", "3"):
        env = {**os.environ, "PYTHONHASHSEED": seed}
        outs.add(subprocess.run([sys.executable, "-c", code, tests_dir], env=env, capture_output=True, text=True, check=True).stdout)
    assert len(outs) == 1
