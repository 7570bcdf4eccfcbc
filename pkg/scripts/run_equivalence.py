"""Affine equivalence check on the standard (A, M) cases, one line per case."""

import argparse

from sqzext.cli import RunConfig, run

CASES = (("zmod:2", "regular"), ("zmod:3", "regular"), ("zmod:4", "zmod:2"), ("zmod:2", "zero"), ("prod:zmod:2,zmod:2", "zero"))


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--budget", type=int, default=10**7)
    args = p.parse_args()
    for base, mod in CASES:
        code, out = run(RunConfig("equiv", base=base, module=mod, budget=args.budget, timing=True))
        if code == 2:
            print(f"{base:22s} {mod:8s} error: {out['error']}")
            continue
        c = out["counts"]
        print(f"{base:22s} {mod:8s} {out['status']:4s} objects={c.get('extensions')} "
              f"classes={c.get('extension_classes')} morphisms={c.get('exal_morphisms')}/{c.get('torsor_morphisms')} {out['elapsed']:.2f}s")


if __name__ == "__main__":
    main()
