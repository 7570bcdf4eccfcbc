"""Scheme-level equivalence over Spec of small finite rings."""

import argparse

from sqzext.cli import RunConfig, run

CASES = (("zmod:2", "regular"), ("zmod:2", "zero"), ("zmod:4", "zmod:2"), ("zmod:6", "regular"), ("zmod:6", "zero"))


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--ring", help="run a single ring spec instead of the default list")
    p.add_argument("--module", default="regular")
    args = p.parse_args()
    cases = [(args.ring, args.module)] if args.ring else CASES
    for rs, ms in cases:
        code, out = run(RunConfig("scheme-equiv", base=f"spec-ring:{rs}", module=ms, timing=True))
        if code == 2:
            print(f"Spec {rs:10s} {ms:8s} error: {out['error']}")
            continue
        c = out["counts"]
        print(f"Spec {rs:10s} {ms:8s} {out['status']:4s} classes={c['thickening_classes']} "
              f"per_point={c['per_point_classes']} morphisms={c['thickening_morphisms']} {out['elapsed']:.2f}s")


if __name__ == "__main__":
    main()
