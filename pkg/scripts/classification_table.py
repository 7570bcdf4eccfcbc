"""Class counts from the extension search and the ring-side torsor search."""

import argparse

from sqzext.cli import parse_module_spec, parse_ring_spec
from sqzext.exal import classify_extensions
from sqzext.grouptor import classify_torsors, enumerate_torsors

RINGS = ("zmod:2", "zmod:3", "zmod:4", "zmod:5", "zmod:6", "prod:zmod:2,zmod:2")
MODULES = ("zero", "regular", "zmod:2")


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--max-order", type=int, default=9, help="skip pairs with |A||M| above this")
    args = p.parse_args()
    print(f"{'A':20s} {'M':8s} {'|A||M|':>6s} {'ext':>4s} {'tors':>4s}")
    for rs in RINGS:
        A = parse_ring_spec(rs)
        for ms in MODULES:
            try:
                M = parse_module_spec(ms, A)
            except ValueError:
                continue
            n = A.size * M.size
            if n > args.max_order:
                continue
            e = classify_extensions(A, M).count
            t = classify_torsors(enumerate_torsors(A, M)).count
            flag = "" if e == t else "  MISMATCH"
            print(f"{rs:20s} {ms:8s} {n:6d} {e:4d} {t:4d}{flag}")


if __name__ == "__main__":
    main()
