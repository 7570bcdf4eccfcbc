"""The group object A+M -> A in rings over A, and M-torsors.

Actions are stored as tables on the fiber product (A+M) x_A B, built by
``finalg.fiber_product(pi_A, f)``: the element ((a, m), b) sits at index
``fp.index[a*|M| + m, b]``.  ``Torsor.act(m, b)`` reads off the table with the
redundant a = f(b) filled in.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .exal import Classification, _union_find_classes, trivial_extension, SquareZeroExtension
from .finalg import (
    FiberProduct,
    FiniteRing,
    RingHom,
    _frozen,
    compose,
    enumerate_homs,
    enumerate_rings,
    fiber_product,
    hom_from_json,
    hom_to_json,
    identity_hom,
    ideal_square_witness,
    is_surjective,
    iter_homs,
    kernel,
    verify_hom,
)
from .modalg import FiniteModule, module_from_json, module_to_json
from .report import Budget, Report, as_budget, not_applicable


# --- the group object -----------------------------------------------------


@dataclass(frozen=True, eq=False)
class GroupObjectStructure:
    base: SquareZeroExtension  # the trivial extension pi_A: A+M -> A
    e: np.ndarray  # A -> A+M
    plus: np.ndarray  # (A+M) x_A (A+M) -> A+M
    inv: np.ndarray  # A+M -> A+M

    @cached_property
    def square(self) -> FiberProduct:
        return fiber_product(self.base.f, self.base.f)


def group_object(A: FiniteRing, M: FiniteModule) -> GroupObjectStructure:
    triv = trivial_extension(A, M)
    m = M.size
    e = np.arange(A.size) * m
    fp = fiber_product(triv.f, triv.f)
    x, y = fp.pairs[:, 0], fp.pairs[:, 1]
    plus = (x // m) * m + M.add[x % m, y % m]
    t = np.arange(A.size * m)
    inv = (t // m) * m + M.neg[t % m]
    return GroupObjectStructure(triv, e, plus, inv)


def verify_group_object(G: GroupObjectStructure, names: dict[str, str] | None = None) -> Report:
    """Structure maps are morphisms over A and the five group diagrams commute."""
    nm = {k: k for k in ("associativity", "left_unit", "right_unit", "inverse", "commutativity")}
    nm.update(names or {})
    rep = Report("group object")
    T = G.base.total
    A = G.base.base
    pi = G.base.f.map
    fp = G.square
    P = fp.ring
    for label, src, tgt, table in (("e", A, T, G.e), ("plus", P, T, G.plus), ("inv", T, T, G.inv)):
        try:
            h = RingHom(src, tgt, table)
        except ValueError as exc:
            rep.add(f"{label}.well_formed", False, str(exc))
            return rep
        rep.extend(verify_hom(h), f"{label}.")
    w = np.nonzero(pi[G.e] != np.arange(A.size))[0]
    rep.add("e.over_A", len(w) == 0, int(w[0]) if len(w) else None)
    w = np.nonzero(pi[G.plus] != fp.diag.map)[0]
    rep.add("plus.over_A", len(w) == 0, tuple(fp.pairs[w[0]].tolist()) if len(w) else None)
    w = np.nonzero(pi[G.inv] != pi)[0]
    rep.add("inv.over_A", len(w) == 0, int(w[0]) if len(w) else None)
    if not rep.ok:
        return rep

    def plus(x, y):
        k = fp.index[x, y]
        return -1 if k < 0 else int(G.plus[k])

    n = T.size
    assoc = left = right = inverse = comm = None
    for x in range(n):
        ex = int(G.e[pi[x]])
        if left is None and plus(ex, x) != x:
            left = x
        if right is None and plus(x, ex) != x:
            right = x
        if inverse is None and (plus(x, int(G.inv[x])) != ex or plus(int(G.inv[x]), x) != ex):
            inverse = x
        for y in np.nonzero(pi == pi[x])[0]:
            y = int(y)
            if comm is None and plus(x, y) != plus(y, x):
                comm = (x, y)
            if assoc is None:
                for z in np.nonzero(pi == pi[x])[0]:
                    z = int(z)
                    if plus(plus(x, y), z) != plus(x, plus(y, z)):
                        assoc = (x, y, z)
                        break
    rep.add(nm["associativity"], assoc is None, assoc)
    rep.add(nm["left_unit"], left is None, left)
    rep.add(nm["right_unit"], right is None, right)
    rep.add(nm["inverse"], inverse is None, inverse)
    rep.add(nm["commutativity"], comm is None, comm)
    return rep


# --- torsors --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Torsor:
    f: RingHom  # B -> A
    module: FiniteModule
    tau: np.ndarray  # table on (A+M) x_A B

    def __post_init__(self):
        object.__setattr__(self, "tau", _frozen(self.tau))

    @cached_property
    def trivial(self) -> SquareZeroExtension:
        return trivial_extension(self.f.target, self.module)

    @cached_property
    def domain(self) -> FiberProduct:
        return fiber_product(self.trivial.f, self.f)

    @property
    def total(self) -> FiniteRing:
        return self.f.source

    def act(self, m: int, b: int) -> int:
        a = int(self.f.map[b])
        return int(self.tau[self.domain.at(a * self.module.size + m, b)])

    def act_table(self) -> np.ndarray:
        """(|M|, |B|) array of tau(m, b)."""
        msize = self.module.size
        rows = self.f.map[None, :] * msize + np.arange(msize)[:, None]
        return self.tau[self.domain.index[rows, np.arange(self.total.size)[None, :]]]

    @cached_property
    def key(self) -> bytes:
        return self.f.source.key + self.f.map.tobytes() + self.tau.tobytes()

    def __eq__(self, other):
        return (
            isinstance(other, Torsor)
            and self.key == other.key
            and self.f.target == other.f.target
            and self.module == other.module
        )

    def __hash__(self):
        return hash(self.key)


@dataclass(frozen=True)
class TorsorMorphism:
    h: RingHom
    source: Torsor
    target: Torsor


def verify_torsor(T: Torsor) -> Report:
    rep = Report("torsor")
    B, A = T.f.source, T.f.target
    missing = sorted(set(range(A.size)) - set(T.f.map.tolist()))
    rep.add("f_surjective", not missing, missing[0] if missing else None)
    if T.module.ring != A:
        rep.add("module_over_base", False)
        return rep
    fp = T.domain
    if T.tau.shape != (fp.ring.size,):
        rep.add("tau_shape", False, f"expected {fp.ring.size} entries, got {T.tau.shape}")
        return rep
    try:
        tau = RingHom(fp.ring, B, T.tau)
    except ValueError as exc:
        rep.add("tau_shape", False, str(exc))
        return rep
    rep.extend(verify_hom(tau), "tau.")
    w = np.nonzero(T.f.map[T.tau] != fp.diag.map)[0]
    rep.add("tau.over_A", len(w) == 0, tuple(fp.pairs[w[0]].tolist()) if len(w) else None)
    acts = T.act_table()
    w = np.nonzero(acts[0] != np.arange(B.size))[0]
    rep.add("identity", len(w) == 0, int(w[0]) if len(w) else None)
    # every (b1, b2) with f(b1) = f(b2) has exactly one m with tau(m, b2) = b1
    bad = None
    for b2 in range(B.size):
        counts = np.bincount(acts[:, b2], minlength=B.size)
        fiber = np.nonzero(T.f.map == T.f.map[b2])[0]
        off = [int(b1) for b1 in fiber if counts[b1] != 1]
        if off:
            bad = {"b1": off[0], "b2": b2, "solutions": int(counts[off[0]])}
            break
    rep.add("unique_transitivity", bad is None, bad)
    w = ideal_square_witness(kernel(T.f))
    rep.add("consequence.kernel_square_zero", w is None, w)
    return rep


def check_translation_lemma(T: Torsor, verified: Report | None = None) -> Report:
    """tau(m, b) = tau(m, 0) + b for all (m, b); n/a on non-torsors."""
    if not (verified or verify_torsor(T)).ok:
        return not_applicable("translation lemma", "input is not a torsor")
    rep = Report("translation lemma")
    acts = T.act_table()
    B = T.total
    expect = B.add[acts[:, 0][:, None], np.arange(B.size)[None, :]]
    w = np.argwhere(acts != expect)
    rep.add("translation", len(w) == 0, tuple(w[0].tolist()) if len(w) else None)
    return rep


def check_associativity_lemma(T: Torsor, verified: Report | None = None) -> Report:
    """tau(m1 + m2, b) = tau(m1, tau(m2, b)) for all (m1, m2, b); n/a on non-torsors."""
    if not (verified or verify_torsor(T)).ok:
        return not_applicable("associativity lemma", "input is not a torsor")
    rep = Report("associativity lemma")
    acts = T.act_table()
    M = T.module
    lhs = acts[M.add]  # (m1, m2, b)
    rhs = acts[np.arange(M.size)[:, None, None], acts[None, :, :]]
    w = np.argwhere(lhs != rhs)
    rep.add("associativity", len(w) == 0, tuple(w[0].tolist()) if len(w) else None)
    return rep


def is_torsor_morphism(h: RingHom, S: Torsor, T: Torsor) -> bool:
    if not np.array_equal(T.f.map[h.map], S.f.map):
        return False
    return bool(np.array_equal(h.map[S.act_table()], T.act_table()[:, h.map]))


def verify_torsor_morphism(mor: TorsorMorphism) -> Report:
    S, T, h = mor.source, mor.target, mor.h
    rep = Report("torsor morphism")
    ok = h.source == S.total and h.target == T.total
    rep.add("endpoints", ok)
    if not ok:
        return rep
    rep.extend(verify_hom(h), "h.")
    w = np.nonzero(T.f.map[h.map] != S.f.map)[0]
    rep.add("over_A", len(w) == 0, int(w[0]) if len(w) else None)
    w = np.argwhere(h.map[S.act_table()] != T.act_table()[:, h.map])
    rep.add("equivariant", len(w) == 0, {"m": int(w[0][0]), "b": int(w[0][1])} if len(w) else None)
    return rep


def torsor_homs(S: Torsor, T: Torsor, budget: Budget | int | None = None) -> list[TorsorMorphism]:
    return [TorsorMorphism(h, S, T) for h in iter_homs(S.total, T.total, budget=budget) if is_torsor_morphism(h, S, T)]


def identity_torsor_morphism(T: Torsor) -> TorsorMorphism:
    return TorsorMorphism(identity_hom(T.total), T, T)


def compose_torsor_morphisms(second: TorsorMorphism, first: TorsorMorphism) -> TorsorMorphism:
    return TorsorMorphism(compose(second.h, first.h), first.source, second.target)


# --- enumeration ----------------------------------------------------------


def enumerate_torsor_structures(f: RingHom, M: FiniteModule, budget: Budget | int | None = None) -> list[Torsor]:
    """Every action table on (A+M) x_A B making f an M-torsor.

    Candidates are the ring homs out of the fiber product, which already
    contain every valid tau; each is then run through ``verify_torsor``.
    """
    b = as_budget(budget)
    if not is_surjective(f):
        return []
    probe = Torsor(f, M, np.zeros(1, dtype=np.int64))
    fp = probe.domain
    out = []
    for tau in iter_homs(fp.ring, f.source, budget=b):
        T = Torsor(f, M, tau.map)
        T.__dict__["domain"] = fp
        if verify_torsor(T).ok:
            out.append(T)
    return out


def enumerate_torsors(A: FiniteRing, M: FiniteModule, budget: Budget | int | None = None) -> list[Torsor]:
    """All M-torsors whose total ring has order |A||M|, found from the ring side.

    Independent of the extension search: total rings come from
    ``finalg.enumerate_rings`` (one per isomorphism class), then every
    surjection onto A, then every action table.
    """
    b = as_budget(budget)
    n = A.size * M.size
    b.check_size(n, "torsor carrier")
    out = []
    for B in enumerate_rings(n, budget=b):
        for f in enumerate_homs(B, A, budget=b):
            if is_surjective(f):
                out.extend(enumerate_torsor_structures(f, M, budget=b))
    return out


def classify_torsors(torsors: list[Torsor], budget: Budget | int | None = None) -> Classification:
    b = as_budget(budget)

    def related(i, j):
        S, T = torsors[i], torsors[j]
        return any(is_torsor_morphism(h, S, T) for h in iter_homs(S.total, T.total, injective=True, budget=b))

    return Classification(torsors, _union_find_classes(len(torsors), related))


# --- serialization --------------------------------------------------------


def torsor_to_json(T: Torsor) -> dict:
    return {"f": hom_to_json(T.f), "module": module_to_json(T.module), "tau": T.tau.tolist()}


def torsor_from_json(d: dict) -> Torsor:
    return Torsor(hom_from_json(d["f"]), module_from_json(d["module"]), d["tau"])
