"""DOT and JSON renderings of lexical graphs, extended graphs and parse forests.

Output is deterministic: nodes are ordered by span, then symbol.
"""

from __future__ import annotations

import hashlib
import json
from typing import Union

from .chart import ELAGraph, IGraph
from .enforce import EGraph, ExplicitNode
from .scanner import LexicalAnalysisGraph, Token


def _q(s: str) -> str:
    escaped = s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return f'"{escaped}"'


def _token_label(t: Token) -> str:
    return f"{t.type}\n{t.text}\n[{t.start},{t.end})"


def _token_ids(tokens) -> dict[Token, str]:
    return {t: f"t{i}" for i, t in enumerate(sorted(tokens))}


def export_dot(graph: Union[LexicalAnalysisGraph, ELAGraph, EGraph, IGraph], name: str = "G") -> str:
    if isinstance(graph, LexicalAnalysisGraph):
        return _la_dot(graph, name)
    if isinstance(graph, ELAGraph):
        return _ela_dot(graph, name)
    if isinstance(graph, EGraph):
        return _egraph_dot(graph, name)
    if isinstance(graph, IGraph):
        return _igraph_dot(graph, name)
    raise TypeError(f"cannot render {type(graph).__name__}")


def _la_dot(la: LexicalAnalysisGraph, name: str) -> str:
    ids = _token_ids(la.tokens)
    lines = [f"digraph {name} {{", "  rankdir=LR;"] if la.tokens else [f"digraph {name} {{"]
    for t in sorted(la.tokens):
        lines.append(f"  {ids[t]} [shape=ellipse, label={_q(_token_label(t))}];")
    for a, b in la.edges():
        lines.append(f"  {ids[a]} -> {ids[b]};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _ela_dot(ela: ELAGraph, name: str) -> str:
    ids = _token_ids(ela.tokens)
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for core in ela.cores:
        tag = "start" if core is ela.starting_core else "final" if core is ela.final_core else str(core.id)
        lines.append(f"  c{core.id} [shape=box, style=filled, fillcolor=gray80, label={_q('core ' + tag)}];")
    for t in sorted(ela.tokens):
        lines.append(f"  {ids[t]} [shape=ellipse, label={_q(_token_label(t))}];")
    for t in sorted(ela.tokens):
        lines.append(f"  c{ela.preceding_core[t].id} -> {ids[t]};")
        for core in sorted(ela.following_cores[t], key=lambda c: c.id):
            lines.append(f"  {ids[t]} -> c{core.id};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _igraph_dot(ig: IGraph, name: str) -> str:
    ids = _token_ids(ig.tokens)
    nodes = sorted(ig.nodes)
    nids = {n: f"n{i}" for i, n in enumerate(nodes)}
    lines = [f"digraph {name} {{"]
    for t in sorted(ig.tokens):
        lines.append(f"  {ids[t]} [shape=ellipse, label={_q(_token_label(t))}];")
    for n in nodes:
        peri = ", peripheries=2" if n in ig.starting_nodes else ""
        lines.append(f"  {nids[n]} [shape=box{peri}, label={_q(f'{n.symbol} [{n.start},{n.end})')}];")
    for n in nodes:
        kids = set()
        for _, children in ig.derivations[n]:
            kids.update(children)
        for k in sorted(kids, key=lambda k: (k.start, k.end, k.symbol)):
            target = ids[k] if isinstance(k, Token) else nids[k]
            lines.append(f"  {nids[n]} -> {target} [style=dotted];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _digests(nodes) -> dict[ExplicitNode, str]:
    """Stable structural fingerprint per node, children first, no recursion."""
    out: dict[ExplicitNode, str] = {}
    for root in nodes:
        stack = [root]
        while stack:
            n = stack[-1]
            if n in out:
                stack.pop()
                continue
            pending = [c for c in n.children if c not in out]
            if pending:
                stack.extend(pending)
                continue
            stack.pop()
            if n.token is not None:
                raw = f"{n.symbol}|{n.start}|{n.end}|{n.token.text}"
            else:
                raw = f"{n.production}|{n.symbol}|{n.start}|{n.end}|" + ",".join(out[c] for c in n.children)
            out[n] = hashlib.blake2b(raw.encode(), digest_size=12).hexdigest()
    return out


def _forest_order(eg: EGraph) -> list[ExplicitNode]:
    nodes = list(eg.nodes())
    digest = _digests(nodes)
    return sorted(nodes, key=lambda n: (n.start, n.end, n.symbol, n.production or "", digest[n]))


def _egraph_dot(eg: EGraph, name: str) -> str:
    order = _forest_order(eg)
    ids = {n: f"e{i}" for i, n in enumerate(order)}
    lines = [f"digraph {name} {{"]
    for n in order:
        if n.token is not None:
            lines.append(f"  {ids[n]} [shape=ellipse, label={_q(_token_label(n.token))}];")
        else:
            peri = ", peripheries=2" if n in eg.starting_nodes else ""
            label = f"{n.symbol} [{n.start},{n.end})\n{n.production}"
            lines.append(f"  {ids[n]} [shape=box{peri}, label={_q(label)}];")
    for n in order:
        for i, c in enumerate(n.children):
            lines.append(f"  {ids[n]} -> {ids[c]} [label={i}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def token_record(t: Token) -> dict:
    return {"type": t.type, "start": t.start, "end": t.end, "text": t.text}


def la_to_json(la: LexicalAnalysisGraph) -> dict:
    toks = sorted(la.tokens)
    index = {t: i for i, t in enumerate(toks)}
    return {
        "tokens": [dict(id=index[t], **token_record(t)) for t in toks],
        "edges": [[index[a], index[b]] for a, b in la.edges()],
        "start_tokens": sorted(index[t] for t in la.start_tokens),
        "end_tokens": sorted(index[t] for t in la.end_tokens),
        "summary": {"tokens": len(toks), "paths": la.count_paths()},
    }


def egraph_to_json(eg: EGraph) -> dict:
    """Forest as a node table; children refer to node ids so sharing is explicit."""
    order = _forest_order(eg)
    ids = {n: i for i, n in enumerate(order)}
    table = []
    for n in order:
        rec = {"id": ids[n], "symbol": n.symbol, "span": [n.start, n.end]}
        if n.token is not None:
            rec["token"] = token_record(n.token)
        else:
            rec["production"] = n.production
            rec["children"] = [ids[c] for c in n.children]
        table.append(rec)
    roots = sorted(ids[n] for n in eg.starting_nodes)
    return {"nodes": table, "roots": roots}


def dumps(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=False) + "\n"
