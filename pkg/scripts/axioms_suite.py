"""Seeded group-object and cogroup axiom checks with corruptions."""

import argparse
import json

from sqzext.cli import RunConfig, run


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--verbose", action="store_true")
    args = p.parse_args()
    code, out = run(RunConfig("axioms", seed=args.seed, count=args.count))
    for c in out["checks"]:
        print(f"[{c['verdict']}] {c['name']}")
        if args.verbose and "witness" in c:
            print("    " + json.dumps(c["witness"], sort_keys=True))
    print(out["status"])
    raise SystemExit(code)


if __name__ == "__main__":
    main()
