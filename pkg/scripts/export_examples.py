"""Write a few JSON objects for ``sqzext check`` into a directory."""

import argparse
import json
from pathlib import Path

from sqzext.corpus import glued_thickenings, missed_point_candidates, spec_instance, swapped_candidate
from sqzext.cotors import cotorsor_to_json, phi, thickening_to_json
from sqzext.exal import enumerate_extensions, extension_to_json
from sqzext.finalg import make_cyclic_ring, ring_to_json
from sqzext.modalg import regular_module


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("outdir", nargs="?", default="json_examples")
    out = Path(p.parse_args().outdir)
    out.mkdir(parents=True, exist_ok=True)
    Z2 = make_cyclic_ring(2)
    spec, M = spec_instance("zmod:6", "regular")
    T = glued_thickenings(spec.sheaf, M)[-1]
    objs = {
        "ring_z4.json": ring_to_json(make_cyclic_ring(4)),
        "extension_z4.json": extension_to_json(enumerate_extensions(Z2, regular_module(Z2))[-1]),
        "thickening_spec_z6.json": thickening_to_json(T),
        "cotorsor_spec_z6.json": cotorsor_to_json(phi(T)),
        "cotorsor_missed_point.json": cotorsor_to_json(missed_point_candidates()[1]),
        "cotorsor_swapped.json": cotorsor_to_json(swapped_candidate()),
    }
    for name, d in objs.items():
        (out / name).write_text(json.dumps(d) + "\n")
        print(out / name)


if __name__ == "__main__":
    main()
