"""The functor from square-zero extensions to M-torsors, its inverse on objects,
and an exhaustive check that it is an equivalence at a fixed (A, M)."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .exal import (
    ExalMorphism,
    SquareZeroExtension,
    classify_extensions,
    enumerate_extensions,
    is_exal_morphism,
    verify_exal_morphism,
    verify_extension,
)
from .finalg import FiniteRing, is_bijective, iter_homs
from .grouptor import (
    Torsor,
    TorsorMorphism,
    check_associativity_lemma,
    check_translation_lemma,
    classify_torsors,
    enumerate_torsor_structures,
    is_torsor_morphism,
    verify_torsor,
    verify_torsor_morphism,
)
from .modalg import FiniteModule
from .report import Budget, ImplementationFault, as_budget


def psi(E: SquareZeroExtension) -> Torsor:
    """tau(m, b) = alpha(m) + b on the same f."""
    probe = Torsor(E.f, E.module, np.zeros(1, dtype=np.int64))
    fp = probe.domain
    msize = E.module.size
    tmod = fp.pairs[:, 0] % msize
    tau = E.total.add[E.alpha[tmod], fp.pairs[:, 1]]
    T = Torsor(E.f, E.module, tau)
    T.__dict__["domain"] = fp
    return T


def psi_on_morphism(mor: ExalMorphism) -> TorsorMorphism:
    return TorsorMorphism(mor.h, psi(mor.source), psi(mor.target))


def psi_inverse(T: Torsor, check: bool = True) -> SquareZeroExtension:
    """alpha(m) = tau(m, 0); the result is re-verified as an extension."""
    alpha = T.act_table()[:, 0]
    E = SquareZeroExtension(T.f, T.module, alpha)
    if check:
        rep = verify_extension(E)
        if not rep.ok:
            raise ImplementationFault(f"torsor did not yield an extension:\n{rep}")
    return E


@dataclass
class Verdict:
    ok: bool = True
    witnesses: list = field(default_factory=list)

    def fail(self, witness) -> None:
        self.ok = False
        if len(self.witnesses) < 10:
            self.witnesses.append(witness)

    def to_dict(self) -> dict:
        d = {"verdict": "pass" if self.ok else "fail"}
        if self.witnesses:
            d["witnesses"] = self.witnesses
        return d


@dataclass
class EquivalenceReport:
    faithful: Verdict = field(default_factory=Verdict)
    full: Verdict = field(default_factory=Verdict)
    ess_surj: Verdict = field(default_factory=Verdict)
    hom_counts: Verdict = field(default_factory=Verdict)
    round_trips: Verdict = field(default_factory=Verdict)
    lemmas: Verdict = field(default_factory=Verdict)
    five_lemma: Verdict = field(default_factory=Verdict)
    pairs: list = field(default_factory=list)
    counts: dict = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return all(v.ok for v in self.verdicts().values())

    def verdicts(self) -> dict[str, Verdict]:
        return {
            "faithful": self.faithful,
            "full": self.full,
            "ess_surj": self.ess_surj,
            "hom_counts": self.hom_counts,
            "round_trips": self.round_trips,
            "lemmas": self.lemmas,
            "five_lemma": self.five_lemma,
        }

    def to_dict(self) -> dict:
        d = {k: v.to_dict() for k, v in self.verdicts().items()}
        d["pairs"] = self.pairs
        d["counts"] = self.counts
        d["status"] = "pass" if self.ok else "fail"
        return d


def _hom_table(sources: list[FiniteRing], targets: list[FiniteRing], budget: Budget):
    cache: dict[tuple[bytes, bytes], list] = {}

    def homs(R, S):
        key = (R.key, S.key)
        if key not in cache:
            cache[key] = list(iter_homs(R, S, budget=budget))
        return cache[key]

    return homs


def verify_equivalence(A: FiniteRing, M: FiniteModule, budget: Budget | int | None = None) -> EquivalenceReport:
    """Exhaustively check that psi is fully faithful and essentially surjective.

    Objects on the extension side come from ``enumerate_extensions``; objects
    on the torsor side from ``enumerate_torsor_structures`` over every
    surjection f occurring there.  Hom-sets on both sides are found by
    filtering all ring homs between the total rings.
    """
    b = as_budget(budget)
    t0 = time.perf_counter()
    rep = EquivalenceReport()
    exts = enumerate_extensions(A, M, b)
    images = [psi(E) for E in exts]

    # psi lands in torsors; the two lemmas hold on each image
    for i, T in enumerate(images):
        vr = verify_torsor(T)
        if not vr.ok:
            rep.ess_surj.fail({"psi_not_torsor": i, "failures": [c.to_dict() for c in vr.failures()]})
        for lem in (check_translation_lemma(T, vr), check_associativity_lemma(T, vr)):
            if not lem.ok or not lem.applicable:
                rep.lemmas.fail({"object": i, "lemma": lem.subject})
        if psi_inverse(T) != exts[i]:
            rep.round_trips.fail({"psi_inverse(psi(E)) != E": i})

    # torsors from the torsor side, over the same underlying surjections
    torsors: list[Torsor] = []
    seen_f = set()
    for E in exts:
        k = (E.total.key, E.f.map.tobytes())
        if k not in seen_f:
            seen_f.add(k)
            torsors.extend(enumerate_torsor_structures(E.f, M, b))
    ext_index = {E.key: i for i, E in enumerate(exts)}
    for j, T in enumerate(torsors):
        vr = verify_torsor(T)
        for lem in (check_translation_lemma(T, vr), check_associativity_lemma(T, vr)):
            if not lem.ok or not lem.applicable:
                rep.lemmas.fail({"torsor": j, "lemma": lem.subject})
        E = psi_inverse(T)
        if psi(E) != T:
            rep.round_trips.fail({"psi(psi_inverse(T)) != T": j})
            rep.ess_surj.fail({"torsor": j})
        elif E.key not in ext_index:
            rep.ess_surj.fail({"torsor": j, "reason": "preimage not among enumerated extensions"})
    if len(torsors) != len(exts):
        rep.ess_surj.fail({"object_counts": [len(exts), len(torsors)]})

    homs = _hom_table([E.total for E in exts], [E.total for E in exts], b)
    n_exal = n_tors = 0
    for i, E in enumerate(exts):
        for j, F in enumerate(exts):
            S, T = images[i], images[j]
            ex, tx = [], []
            for h in homs(E.total, F.total):
                a = is_exal_morphism(h, E, F)
                t = is_torsor_morphism(h, S, T)
                if a:
                    ex.append(h)
                    # psi on morphisms keeps the map, so faithfulness is map identity
                    if psi_on_morphism(ExalMorphism(h, E, F)).h != h:
                        rep.faithful.fail({"E": i, "F": j})
                    if not verify_torsor_morphism(TorsorMorphism(h, S, T)).ok:
                        rep.full.fail({"E": i, "F": j, "lemma": "exal morphism not a torsor morphism", "map": h.map.tolist()})
                if t:
                    tx.append(h)
                    if not verify_exal_morphism(ExalMorphism(h, E, F)).ok:
                        rep.full.fail({"E": i, "F": j, "map": h.map.tolist()})
                if (a or t) and not is_bijective(h):
                    rep.five_lemma.fail({"E": i, "F": j, "map": h.map.tolist()})
            if len({h.map.tobytes() for h in ex}) != len(ex):
                rep.faithful.fail({"E": i, "F": j, "reason": "duplicate images"})
            n_exal += len(ex)
            n_tors += len(tx)
            rep.pairs.append({"E": i, "F": j, "homs_exal": len(ex), "homs_tors": len(tx)})
            if len(ex) != len(tx):
                rep.hom_counts.fail({"E": i, "F": j, "homs_exal": len(ex), "homs_tors": len(tx)})

    cl_e = classify_extensions(A, M, b, extensions=exts)
    cl_t = classify_torsors(torsors, b)
    if cl_e.count != cl_t.count:
        rep.ess_surj.fail({"class_counts": [cl_e.count, cl_t.count]})
    rep.counts = {
        "extensions": len(exts),
        "torsors": len(torsors),
        "extension_classes": cl_e.count,
        "torsor_classes": cl_t.count,
        "exal_morphisms": n_exal,
        "torsor_morphisms": n_tors,
        "pairs": len(rep.pairs),
    }
    rep.elapsed = time.perf_counter() - t0
    return rep
