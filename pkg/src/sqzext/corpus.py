"""Desk-scale test corpus: seeded random (A, M) pairs, structure corruptions,
and labelled cotorsor candidates."""

from __future__ import annotations

import random
from dataclasses import replace
from functools import lru_cache

import numpy as np

from . import cotors
from .finalg import FiniteRing, RingHom, enumerate_homs, enumerate_rings, make_cyclic_ring, product_ring
from .finspace import ContinuousMap, sierpinski
from .grouptor import GroupObjectStructure
from .modalg import FiniteModule, direct_sum, regular_module, restrict_scalars, zero_module
from .sheafspace import (
    CogroupStructure,
    ModuleSheaf,
    RingedSpaceMorphism,
    RingSheaf,
    module_on_spec,
    spec_finite_ring,
    spec_morphism,
)

MAX_RING_ORDER = 8


@lru_cache(maxsize=None)
def small_rings(max_order: int = MAX_RING_ORDER) -> tuple[FiniteRing, ...]:
    """One ring per isomorphism class, orders 2..max_order."""
    return tuple(R for n in range(2, max_order + 1) for R in enumerate_rings(n))


def modules_over(A: FiniteRing, max_size: int) -> list[FiniteModule]:
    """Zero, regular, quotients Z/k through a hom A -> Z/k, and pairwise sums, up to max_size."""
    base = [zero_module(A)]
    if A.size <= max_size:
        base.append(regular_module(A))
    for k in range(2, max_size + 1):
        Zk = make_cyclic_ring(k)
        for h in enumerate_homs(A, Zk):
            base.append(restrict_scalars(h, regular_module(Zk)))
    out, seen = [], set()
    for M in base + [direct_sum(M, N) for M in base for N in base if 1 < M.size * N.size <= max_size]:
        if M.size <= max_size and M.key not in seen:
            seen.add(M.key)
            out.append(M)
    return out


def random_pairs(seed: int, count: int, cap: int = 64) -> list[tuple[FiniteRing, FiniteModule]]:
    """``count`` pairs (A, M) with |A|·|M| <= cap, drawn from a single seed."""
    rng = random.Random(seed)
    rings = [R for R in small_rings() if R.size <= cap]
    out = []
    while len(out) < count:
        A = rng.choice(rings)
        mods = modules_over(A, cap // A.size)
        out.append((A, rng.choice(mods)))
    return out


def _flip(table: np.ndarray, rng: random.Random, size: int) -> tuple[np.ndarray, dict]:
    t = np.array(table)
    i = rng.randrange(len(t))
    new = rng.choice([v for v in range(size) if v != t[i]])
    where = {"index": i, "old": int(t[i]), "new": int(new)}
    t[i] = new
    return t, where


def corrupt_group_object(G: GroupObjectStructure, rng: random.Random) -> tuple[GroupObjectStructure, dict]:
    """Change one entry of e, plus or inv."""
    n = G.base.total.size
    if n < 2:
        raise ValueError("nothing to corrupt on a one-element ring")
    label = rng.choice(["e", "plus", "inv"])
    t, where = _flip(getattr(G, label), rng, n)
    bad = replace(G, **{label: t})
    bad.__dict__["square"] = G.square
    return bad, {"structure": label, **where}


def corrupt_cogroup(cg: CogroupStructure, rng: random.Random) -> tuple[CogroupStructure, dict]:
    """Change one entry of one comorphism of e, plus or inv on a random nonempty open."""
    label = rng.choice(["e", "plus", "inv"])
    mor: RingedSpaceMorphism = getattr(cg, label)
    opens = [W for W, h in sorted(mor.comorph.items()) if h.target.size > 1]
    W = rng.choice(opens)
    h = mor.comorph[W]
    t, where = _flip(h.map, rng, h.target.size)
    comorph = dict(mor.comorph)
    comorph[W] = RingHom(h.source, h.target, t)
    return replace(cg, **{label: replace(mor, comorph=comorph)}), {"structure": label, "open": W, **where}


def drop_second_summand(cg: CogroupStructure) -> CogroupStructure:
    """+ replaced by ((a, m1), (a, m2)) -> (a, m1)."""
    comorph = {W: RingHom(h.source, h.target, cg.square.fps[W].pairs[:, 0]) for W, h in cg.plus.comorph.items()}
    return replace(cg, plus=replace(cg.plus, comorph=comorph))



# --- ringed spaces and cotorsor candidates ----------------------------------


def sierpinski_instance() -> tuple[RingSheaf, ModuleSheaf]:
    """O(X) = Z/4 restricting to O({0}) = Z/2; M(X) = M({0}) = Z/2.  Ringed mode."""
    S = sierpinski()
    Z1, Z2, Z4 = make_cyclic_ring(1), make_cyclic_ring(2), make_cyclic_ring(4)
    secs = {S.index(()): Z1, S.index((0,)): Z2, S.index((0, 1)): Z4}
    sections = tuple(secs[i] for i in range(len(S.opens)))
    e, o, x = S.index(()), S.index((0,)), S.index((0, 1))
    res = {
        (e, e): RingHom(Z1, Z1, [0]),
        (o, o): RingHom(Z2, Z2, [0, 1]),
        (x, x): RingHom(Z4, Z4, [0, 1, 2, 3]),
        (o, e): RingHom(Z2, Z1, [0, 0]),
        (x, e): RingHom(Z4, Z1, [0, 0, 0, 0]),
        (x, o): RingHom(Z4, Z2, [0, 1, 0, 1]),
    }
    X = RingSheaf(S, sections, res)
    mods = {e: zero_module(Z1), o: regular_module(Z2), x: restrict_scalars(res[(x, o)], regular_module(Z2))}
    mres = {k: np.zeros(mods[k[0]].size, dtype=np.int64) if k[1] == e else np.arange(2) for k in res}
    return X, ModuleSheaf(X, tuple(mods[i] for i in range(len(S.opens))), mres)


def spec_instance(ring_spec: str, module_spec: str):
    from .cli import parse_module_spec, parse_ring_spec

    spec = spec_finite_ring(parse_ring_spec(ring_spec))
    return spec, module_on_spec(spec, parse_module_spec(module_spec, spec.ring))


SPEC_CASES = (("zmod:2", "regular"), ("zmod:2", "zero"), ("zmod:6", "regular"), ("zmod:4", "zmod:2"))


def glued_thickenings(X: RingSheaf, M: ModuleSheaf, budget=None) -> list:
    """Every thickening of a discrete X glued from stalk extensions."""
    from itertools import product as iproduct

    from .exal import enumerate_extensions

    n = X.space.points
    per = [enumerate_extensions(X.stalk(x), M.stalk(x), budget) for x in range(n)]
    return [cotors.glue_thickening(X, M, list(c)) for c in iproduct(*per)]


def missed_point_candidates() -> list:
    """Spec Z/2 -> Spec(Z/2 x Z/2) with the trivial coaction, for M = 0 and M = Z/2."""
    R2 = make_cyclic_ring(2)
    P, p1, _ = product_ring(R2, R2)
    sX, sY = spec_finite_ring(R2), spec_finite_ring(P)
    f = spec_morphism(p1, sX, sY)
    return [cotors.trivial_coaction_candidate(f, module_on_spec(sX, M)) for M in (zero_module(R2), regular_module(R2))]


def swapped_candidate():
    """Identity thickening of Spec(Z/2 x Z/2) with M = 0, tau moved by the swap of points."""
    R2 = make_cyclic_ring(2)
    P, _, _ = product_ring(R2, R2)
    sp = spec_finite_ring(P)
    C = cotors.phi(cotors.thickening_from_direct_sum(sp.sheaf, module_on_spec(sp, zero_module(P))))
    swap = ContinuousMap(C.tau.source.space, C.tau.target.space, tuple(reversed(C.tau.cmap.map)))
    bad = cotors.Cotorsor(C.f, C.module, replace(C.tau, cmap=swap))
    bad.__dict__["dsum"] = C.dsum
    bad.__dict__["coproduct"] = C.coproduct
    return bad


def corrupted_tau(C, rng: random.Random):
    """One entry of one tau comorphism changed."""
    opens = [W for W, h in sorted(C.tau.comorph.items()) if h.target.size > 1]
    W = rng.choice(opens)
    h = C.tau.comorph[W]
    t, _ = _flip(h.map, rng, h.target.size)
    comorph = dict(C.tau.comorph)
    comorph[W] = RingHom(h.source, h.target, t)
    bad = cotors.Cotorsor(C.f, C.module, replace(C.tau, comorph=comorph))
    bad.__dict__["dsum"] = C.dsum
    bad.__dict__["coproduct"] = C.coproduct
    return bad


def cotorsor_corpus(seed: int = 0) -> list[tuple[str, object]]:
    """Labelled cotorsors and near-misses used for cross-checking definitions."""
    rng = random.Random(seed)
    out = []
    for rs, ms in SPEC_CASES:
        spec, M = spec_instance(rs, ms)
        for k, T in enumerate(glued_thickenings(spec.sheaf, M)):
            C = cotors.phi(T)
            out.append((f"phi[{rs},{ms}][{k}]", C))
            out.append((f"corrupted[{rs},{ms}][{k}]", corrupted_tau(C, rng)))
        T = cotors.thickening_from_direct_sum(spec.sheaf, M)
        out.append((f"trivial-coaction[{rs},{ms}]", cotors.trivial_coaction_candidate(T.f, M)))
    X, M = sierpinski_instance()
    C = cotors.phi(cotors.thickening_from_direct_sum(X, M))
    out.append(("phi[sierpinski]", C))
    out.append(("corrupted[sierpinski]", corrupted_tau(C, rng)))
    for k, C in enumerate(missed_point_candidates()):
        out.append((f"missed-point[{k}]", C))
    out.append(("swapped", swapped_candidate()))
    return out
