"""Scan and parse the product/price example, printing every stage."""

import argparse
from pathlib import Path

from lambfence import load_language_spec, parse_with_spec
from lambfence.export import export_dot

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--text", default="5.2 $ 8.4")
    ap.add_argument("--spec", default=str(DATA / "prices.lf"))
    ap.add_argument("--dot-dir", help="write la/igraph/egraph .dot files here")
    args = ap.parse_args()

    spec = load_language_spec(args.spec)
    result = parse_with_spec(spec, args.text)
    la = result.la

    print(f"input: {args.text!r}")
    print(f"tokens ({len(la.tokens)}):")
    for t in la.tokens:
        nxt = ", ".join(f"{b.type}:{b.text}" for b in sorted(la.following[t]))
        print(f"  {t.type:8} {t.text!r:6} [{t.start},{t.end})  -> {nxt or 'end'}")
    print(f"token sequences ({la.count_paths()}):")
    for path in la.paths():
        print("  " + " ".join(f"{t.type}:{t.text}" for t in path))
    print(f"implicit nodes: {sorted(result.igraph.nodes)}")
    print(f"trees ({len(result.trees)}):")
    for tree in result.trees:
        print("  " + tree.sexpr())
    print(f"report: {result.report.as_dict()}")

    if args.dot_dir:
        out = Path(args.dot_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, graph in [("la", la), ("igraph", result.igraph), ("egraph", result.egraph)]:
            (out / f"{name}.dot").write_text(export_dot(graph))
        print(f"wrote DOT files to {out}")


if __name__ == "__main__":
    main()
