"""Runtime against input size for the three benchmark input families.

Each size runs in a fresh process under a time limit and an address-space
cap; a family stops at its first failed size.  The fitted exponent is the
least-squares slope of log time against log input length.
"""

import argparse
import json

from lambfence.bench import FAMILIES, sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--family", action="append", choices=sorted(FAMILIES), help="default: all")
    ap.add_argument("--min-exp", type=int, default=8)
    ap.add_argument("--max-exp", type=int, default=13)
    ap.add_argument("--timeout", type=float, default=60.0)
    ap.add_argument("--memory-gb", type=float, default=3.0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", help="write all runs to this file")
    args = ap.parse_args()

    report = {}
    for name in args.family or list(FAMILIES):
        fam = FAMILIES[name]
        result = sweep(name, range(args.min_exp, args.max_exp + 1), args.timeout, args.memory_gb, args.seed)
        print(f"== {name} (bound {fam.bound})")
        for r in result.runs:
            print(f"  {r['chars']:>6} chars  {r['tokens']:>6} tokens  {r['implicit_nodes']:>9} nodes  {r['seconds']:>8.3f} s")
        exp = result.exponent
        print(f"  exponent: {'n/a' if exp is None else f'{exp:.2f}'}")
        if result.failure:
            print(f"  stopped: {result.failure}")
        report[name] = {"runs": result.runs, "exponent": exp, "failure": result.failure, "bound": fam.bound}
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(report, fh, indent=2)


if __name__ == "__main__":
    main()
