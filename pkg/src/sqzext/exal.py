"""Square-zero extensions of a finite ring A by an A-module M.

An extension is a surjection f: B -> A with square-zero kernel together with
alpha: f_*M -> ker(f), an isomorphism of B-modules.  ``alpha`` is stored as a
table sending each element of M to an element of B.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product as iproduct

import numpy as np

from .finalg import (
    FiniteRing,
    RingHom,
    _frozen,
    compose,
    hom_from_json,
    hom_to_json,
    identity_hom,
    ideal_square_witness,
    is_bijective,
    iter_homs,
    kernel,
    verify_hom,
    verify_ring,
)
from .modalg import (
    FiniteModule,
    ModuleHom,
    iter_module_isos,
    kernel_as_B_module,
    module_from_json,
    module_to_json,
    restrict_scalars,
    verify_module_iso,
)
from .report import Budget, Report, as_budget


@dataclass(frozen=True, eq=False)
class SquareZeroExtension:
    f: RingHom
    module: FiniteModule
    alpha: np.ndarray

    def __post_init__(self):
        a = _frozen(self.alpha)
        if a.shape != (self.module.size,):
            raise ValueError("alpha must have one entry per module element")
        object.__setattr__(self, "alpha", a)

    @property
    def total(self) -> FiniteRing:
        return self.f.source

    @property
    def base(self) -> FiniteRing:
        return self.f.target

    @cached_property
    def key(self) -> bytes:
        return self.f.source.key + self.f.map.tobytes() + self.alpha.tobytes()

    def __eq__(self, other):
        return (
            isinstance(other, SquareZeroExtension)
            and self.key == other.key
            and self.f.target == other.f.target
            and self.module == other.module
        )

    def __hash__(self):
        return hash(self.key)


@dataclass(frozen=True)
class ExalMorphism:
    h: RingHom
    source: SquareZeroExtension
    target: SquareZeroExtension


def alpha_hom(E: SquareZeroExtension) -> ModuleHom:
    """alpha as a map of B-modules f_*M -> ker(f); raises if it misses the kernel."""
    K, els = kernel_as_B_module(E.f)
    pos = {int(e): i for i, e in enumerate(els)}
    try:
        table = [pos[int(b)] for b in E.alpha]
    except KeyError as exc:
        raise ValueError(f"alpha sends an element outside ker(f): {exc}") from None
    return ModuleHom(restrict_scalars(E.f, E.module), K, table)


def verify_extension(E: SquareZeroExtension) -> Report:
    rep = Report("square-zero extension")
    rep.extend(verify_hom(E.f), "f.")
    missing = sorted(set(range(E.base.size)) - set(E.f.map.tolist()))
    rep.add("surjective", not missing, missing[0] if missing else None)
    w = ideal_square_witness(kernel(E.f))
    rep.add("kernel_square_zero", w is None, w)
    outside = [m for m, b in enumerate(E.alpha.tolist()) if E.f.map[b] != 0]
    rep.add("alpha_into_kernel", not outside, outside[0] if outside else None)
    if E.module.ring != E.base:
        rep.add("module_over_base", False)
        return rep
    if not outside:
        rep.extend(verify_module_iso(alpha_hom(E)), "alpha.")
    return rep


def trivial_extension_ring(A: FiniteRing, M: FiniteModule) -> FiniteRing:
    """A + M on pairs (a, m) -> index a*|M| + m, with (a1,m1)(a2,m2) = (a1 a2, a1 m2 + a2 m1)."""
    m = M.size
    idx = np.arange(A.size * m)
    a, u = idx // m, idx % m
    add = A.add[a[:, None], a[None, :]] * m + M.add[u[:, None], u[None, :]]
    cross = M.add[M.act[a[:, None], u[None, :]], M.act[a[None, :], u[:, None]]]
    mul = A.mul[a[:, None], a[None, :]] * m + cross
    name = f"{A.name}+M" if A.name else ""
    return FiniteRing(add, mul, A.one * m, name)


def trivial_extension(A: FiniteRing, M: FiniteModule) -> SquareZeroExtension:
    if M.ring != A:
        raise ValueError("module is not over A")
    T = trivial_extension_ring(A, M)
    proj = RingHom(T, A, np.arange(T.size) // M.size)
    return SquareZeroExtension(proj, M, np.arange(M.size))


def verify_exal_morphism(mor: ExalMorphism) -> Report:
    E, F, h = mor.source, mor.target, mor.h
    rep = Report("exal morphism")
    ok_shape = h.source == E.total and h.target == F.total
    rep.add("endpoints", ok_shape)
    if not ok_shape:
        return rep
    rep.extend(verify_hom(h), "h.")
    w = np.nonzero(F.f.map[h.map] != E.f.map)[0]
    rep.add("over_A", len(w) == 0, int(w[0]) if len(w) else None)
    w = np.nonzero(h.map[E.alpha] != F.alpha)[0]
    rep.add("alpha_compatible", len(w) == 0, int(w[0]) if len(w) else None)
    return rep


def identity_morphism(E: SquareZeroExtension) -> ExalMorphism:
    return ExalMorphism(identity_hom(E.total), E, E)


def compose_morphisms(second: ExalMorphism, first: ExalMorphism) -> ExalMorphism:
    return ExalMorphism(compose(second.h, first.h), first.source, second.target)


def is_exal_morphism(h: RingHom, E: SquareZeroExtension, F: SquareZeroExtension) -> bool:
    return bool(np.array_equal(F.f.map[h.map], E.f.map) and np.array_equal(h.map[E.alpha], F.alpha))


def exal_homs(E: SquareZeroExtension, F: SquareZeroExtension, budget: Budget | int | None = None) -> list[ExalMorphism]:
    return [ExalMorphism(h, E, F) for h in iter_homs(E.total, F.total, budget=budget) if is_exal_morphism(h, E, F)]


# --- enumeration ----------------------------------------------------------


def _cocycle_ok(A: FiniteRing, M: FiniteModule, c: np.ndarray) -> bool:
    # c(x, y) + c(x + y, z) = c(y, z) + c(x, y + z)
    x = np.arange(A.size)
    lhs = M.add[c[:, :, None], c[A.add[:, :, None], x[None, None, :]]]
    rhs = M.add[c[None, :, :], c[x[:, None, None], A.add[None, :, :]]]
    return bool(np.array_equal(lhs, rhs))


def extension_from_cocycles(A: FiniteRing, M: FiniteModule, c: np.ndarray, d: np.ndarray) -> tuple[FiniteRing, RingHom]:
    """Ring on pairs (x, u) -> x*|M| + u with addition twisted by c and multiplication by d.

    (x1,u1) + (x2,u2) = (x1 + x2, u1 + u2 + c(x1,x2))
    (x1,u1) (x2,u2)   = (x1 x2, x1 u2 + x2 u1 + d(x1,x2))
    """
    m = M.size
    idx = np.arange(A.size * m)
    x, u = idx // m, idx % m
    X1, X2 = x[:, None], x[None, :]
    U1, U2 = u[:, None], u[None, :]
    add = A.add[X1, X2] * m + M.add[M.add[U1, U2], c[X1, X2]]
    cross = M.add[M.act[X1, U2], M.act[X2, U1]]
    mul = A.mul[X1, X2] * m + M.add[cross, d[X1, X2]]
    B = FiniteRing(add, mul, A.one * m)
    return B, RingHom(B, A, x)


def enumerate_extensions(A: FiniteRing, M: FiniteModule, budget: Budget | int | None = None) -> list[SquareZeroExtension]:
    """All extensions of A by M on the carrier A x M, each with every admissible alpha.

    Any extension B admits a set section s: A -> B with s(0) = 0, s(1) = 1, so
    B is isomorphic to a cocycle ring (see ``extension_from_cocycles``) with
    c(0, -) = 0, d(0, -) = d(1, -) = 0 and c, d symmetric.  We search those
    tables and keep the ones that are rings; the alphas are then all module
    isomorphisms f_*M -> ker(f).
    """
    b = as_budget(budget)
    if M.ring != A:
        raise ValueError("module is not over A")
    b.check_size(A.size * M.size, "extension carrier")
    n = A.size
    nonzero = [x for x in range(n) if x != 0]
    generic = [x for x in range(n) if x not in (0, A.one)]
    c_slots = [(i, j) for i in nonzero for j in nonzero if i <= j]
    d_slots = [(i, j) for i in generic for j in generic if i <= j]
    out: list[SquareZeroExtension] = []
    seen: set[bytes] = set()
    for cvals in iproduct(range(M.size), repeat=len(c_slots)):
        b.tick()
        c = np.zeros((n, n), dtype=np.int64)
        for (i, j), v in zip(c_slots, cvals):
            c[i, j] = c[j, i] = v
        if not _cocycle_ok(A, M, c):
            continue
        for dvals in iproduct(range(M.size), repeat=len(d_slots)):
            b.tick()
            d = np.zeros((n, n), dtype=np.int64)
            for (i, j), v in zip(d_slots, dvals):
                d[i, j] = d[j, i] = v
            B, f = extension_from_cocycles(A, M, c, d)
            if B.key in seen or not verify_ring(B).ok:
                continue
            seen.add(B.key)
            K, els = kernel_as_B_module(f)
            for iso in iter_module_isos(restrict_scalars(f, M), K, budget=b):
                out.append(SquareZeroExtension(f, M, els[iso.map]))
    return out


def _union_find_classes(n: int, related) -> list[list[int]]:
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if find(i) != find(j) and related(i, j):
                parent[find(j)] = find(i)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


@dataclass
class Classification:
    objects: list
    classes: list[list[int]]

    @property
    def count(self) -> int:
        return len(self.classes)

    def representatives(self):
        return [self.objects[c[0]] for c in self.classes]


def classify_extensions(A: FiniteRing, M: FiniteModule, budget: Budget | int | None = None,
                        extensions: list[SquareZeroExtension] | None = None) -> Classification:
    """Partition extensions into isomorphism classes of Exal(A, M).

    Every morphism of extensions is bijective, so 'related by some morphism'
    is already an equivalence relation; union-find over pairs suffices.
    The representative of each class is its least serialized member.
    """
    b = as_budget(budget)
    exts = enumerate_extensions(A, M, b) if extensions is None else extensions

    def related(i, j):
        E, F = exts[i], exts[j]
        return any(is_exal_morphism(h, E, F) for h in iter_homs(E.total, F.total, injective=True, budget=b))

    classes = _union_find_classes(len(exts), related)
    classes = [sorted(cl, key=lambda i: _serial(exts[i])) for cl in classes]
    classes.sort(key=lambda cl: _serial(exts[cl[0]]))
    return Classification(exts, classes)


def _serial(E: SquareZeroExtension) -> str:
    import json

    return json.dumps(extension_to_json(E), sort_keys=True, separators=(",", ":"))


def is_bijective_morphism(mor) -> bool:
    return is_bijective(mor.h)


# --- serialization --------------------------------------------------------


def extension_to_json(E: SquareZeroExtension) -> dict:
    return {"f": hom_to_json(E.f), "module": module_to_json(E.module), "alpha": E.alpha.tolist()}


def extension_from_json(d: dict) -> SquareZeroExtension:
    return SquareZeroExtension(hom_from_json(d["f"]), module_from_json(d["module"]), d["alpha"])


def classification_to_json(cl: Classification) -> dict:
    return {
        "classes": [{"representative": extension_to_json(cl.objects[c[0]]), "members": len(c)} for c in cl.classes],
        "total": len(cl.objects),
    }
