"""Sheaves of finite rings and modules on finite spaces, ringed-space morphisms,
Spec of a finite ring, X+M, coproducts under X and the cogroup on i_X.

Sections are stored on every open; ``res[(i, j)]`` restricts from
``opens[i]`` to ``opens[j]`` whenever ``opens[j] ⊆ opens[i]``.  Stalks are
sections over minimal opens, which on a finite space is the exact colimit.

Two modes.  In spec mode the space is discrete (Spec of a finite ring) and
every module sheaf is quasi-coherent automatically.  In ringed mode any
finite space is admitted and quasi-coherence is not checked; reports carry
the mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import product as iproduct

import numpy as np

from .exal import trivial_extension, trivial_extension_ring
from .finalg import (
    FiniteRing,
    RingHom,
    compose,
    fiber_product,
    idempotents,
    identity_hom,
    is_bijective,
    is_surjective,
    kernel,
    product_of,
    ring_from_json,
    ring_to_json,
    subset_ring,
    verify_hom,
    verify_ring,
)
from .finspace import (
    ContinuousMap,
    FinSpace,
    compose_maps,
    discrete,
    identity_map,
    is_closed_immersion_space,
    minimal_open,
    pushout,
    space_from_json,
    space_to_json,
    verify_continuous,
)
from .grouptor import GroupObjectStructure, verify_group_object
from .modalg import FiniteModule, ideal_module, module_from_json, module_to_json, verify_module
from .report import Budget, Report, as_budget


@dataclass(frozen=True, eq=False)
class RingSheaf:
    space: FinSpace
    sections: tuple[FiniteRing, ...]
    res: dict  # (i, j) -> RingHom

    def at(self, U) -> FiniteRing:
        return self.sections[self.space.index(U)]

    def restrict(self, i: int, j: int) -> np.ndarray:
        return self.res[(i, j)].map

    def stalk(self, x: int) -> FiniteRing:
        return self.sections[self.space.index(minimal_open(self.space, x))]

    @cached_property
    def key(self) -> bytes:
        parts = [R.key for R in self.sections]
        parts += [self.res[k].map.tobytes() for k in sorted(self.res)]
        return repr(self.space).encode() + b"|".join(parts)

    def __eq__(self, other):
        return isinstance(other, RingSheaf) and self.key == other.key

    def __hash__(self):
        return hash(self.key)


@dataclass(frozen=True, eq=False)
class ModuleSheaf:
    rings: RingSheaf
    sections: tuple[FiniteModule, ...]
    res: dict  # (i, j) -> np.ndarray

    @property
    def space(self) -> FinSpace:
        return self.rings.space

    def restrict(self, i: int, j: int) -> np.ndarray:
        return self.res[(i, j)]

    def stalk(self, x: int) -> FiniteModule:
        return self.sections[self.space.index(minimal_open(self.space, x))]

    @cached_property
    def key(self) -> bytes:
        parts = [M.key for M in self.sections] + [np.asarray(self.res[k]).tobytes() for k in sorted(self.res)]
        return self.rings.key + b"|".join(parts)


@dataclass(frozen=True, eq=False)
class RingedSpaceMorphism:
    source: RingSheaf  # X
    target: RingSheaf  # Y
    cmap: ContinuousMap
    comorph: dict  # V index in Y -> RingHom O_Y(V) -> O_X(f^-1 V)

    def at(self, V: int) -> RingHom:
        return self.comorph[V]

    def pre(self, V: int) -> int:
        """Index in X of the preimage of the open with index V in Y."""
        return self.source.space.index(self.cmap.preimage(self.target.space.opens[V]))

    @cached_property
    def key(self) -> bytes:
        parts = [self.comorph[k].map.tobytes() for k in sorted(self.comorph)]
        return self.source.key + self.target.key + repr(self.cmap.map).encode() + b"|".join(parts)

    def __eq__(self, other):
        return isinstance(other, RingedSpaceMorphism) and self.key == other.key

    def __hash__(self):
        return hash(self.key)


# --- verification ---------------------------------------------------------


def _families(space: FinSpace, i: int, stalk_sizes, stalk_res, budget: Budget):
    """Compatible families (s_x) over the points of opens[i]."""
    pts = sorted(space.opens[i])
    mins = {x: space.index(minimal_open(space, x)) for x in pts}
    budget.tick(math.prod(stalk_sizes(mins[x]) for x in pts))
    out = []
    for fam in iproduct(*[range(stalk_sizes(mins[x])) for x in pts]):
        ok = True
        for a, x in enumerate(pts):
            for c, y in enumerate(pts):
                if x != y and space.opens[mins[y]] <= space.opens[mins[x]]:
                    if stalk_res(mins[x], mins[y])[fam[a]] != fam[c]:
                        ok = False
                        break
            if not ok:
                break
        if ok:
            out.append(fam)
    return pts, mins, out


def _verify_presheaf(space, sections, res, is_ring: bool, budget: Budget) -> Report:
    rep = Report("sheaf")
    rep.add("empty_sections_zero", sections[space.empty].size == 1)
    missing = [(i, j) for i, U in enumerate(space.opens) for j, V in enumerate(space.opens) if V <= U and (i, j) not in res]
    rep.add("restrictions_present", not missing, missing[0] if missing else None)
    if missing:
        return rep

    def table(i, j):
        return res[(i, j)].map if is_ring else np.asarray(res[(i, j)])

    bad_id = next((i for i in range(len(space.opens)) if not np.array_equal(table(i, i), np.arange(sections[i].size))), None)
    rep.add("identity_restriction", bad_id is None, bad_id)
    bad_comp = None
    for (i, j) in res:
        for k in space.subopens(j):
            if not np.array_equal(table(j, k)[table(i, j)], table(i, k)):
                bad_comp = (i, j, k)
                break
        if bad_comp:
            break
    rep.add("restriction_composition", bad_comp is None, bad_comp)
    if is_ring:
        bad = next((k for k, h in sorted(res.items()) if not verify_hom(h).ok), None)
        rep.add("restrictions_are_homs", bad is None, bad)
    bad_glue = None
    for i in range(len(space.opens)):
        pts, mins, fams = _families(space, i, lambda j: sections[j].size, table, budget)
        if not pts:
            continue
        cols = np.stack([table(i, mins[x]) for x in pts], axis=1)
        got = [tuple(r) for r in cols.tolist()]
        if len(set(got)) != len(got):
            bad_glue = {"open": sorted(space.opens[i]), "problem": "not injective"}
            break
        if set(got) != set(fams):
            extra = sorted(set(fams) - set(got))
            bad_glue = {"open": sorted(space.opens[i]), "problem": "not surjective onto compatible families",
                        "family": list(extra[0]) if extra else None}
            break
    rep.add("gluing", bad_glue is None, bad_glue)
    return rep


def verify_sheaf(F: RingSheaf | ModuleSheaf, budget: Budget | int | None = None) -> Report:
    """Functoriality, zero ring on the empty set, and gluing over minimal opens."""
    b = as_budget(budget)
    if isinstance(F, RingSheaf):
        return _verify_presheaf(F.space, F.sections, F.res, True, b)
    rep = _verify_presheaf(F.space, F.sections, F.res, False, b)
    bad_ring = next((i for i, M in enumerate(F.sections) if M.ring != F.rings.sections[i]), None)
    rep.add("sections_over_ring_sections", bad_ring is None, bad_ring)
    bad_mod = next((i for i, M in enumerate(F.sections) if not verify_module(M).ok), None)
    rep.add("sections_are_modules", bad_mod is None, bad_mod)
    if bad_ring is None:
        bad = None
        for (i, j), r in F.res.items():
            ring_r = F.rings.restrict(i, j)
            Mi, Mj = F.sections[i], F.sections[j]
            r = np.asarray(r)
            if not np.array_equal(r[Mi.add], Mj.add[r[:, None], r[None, :]]) or not np.array_equal(r[Mi.act], Mj.act[ring_r][:, r]):
                bad = (i, j)
                break
        rep.add("restrictions_semilinear", bad is None, bad)
    return rep


def verify_morphism(f: RingedSpaceMorphism) -> Report:
    rep = Report("ringed-space morphism")
    rep.extend(verify_continuous(f.cmap), "cmap.")
    X, Y = f.source, f.target
    bad = None
    for V in range(len(Y.space.opens)):
        h = f.comorph.get(V)
        if h is None or h.source != Y.sections[V] or h.target != X.sections[f.pre(V)] or not verify_hom(h).ok:
            bad = sorted(Y.space.opens[V])
            break
    rep.add("comorphisms_are_homs", bad is None, bad)
    if bad is not None:
        return rep
    bad = None
    for (V, W) in Y.res:
        lhs = X.restrict(f.pre(V), f.pre(W))[f.comorph[V].map]
        rhs = f.comorph[W].map[Y.restrict(V, W)]
        if not np.array_equal(lhs, rhs):
            bad = (sorted(Y.space.opens[V]), sorted(Y.space.opens[W]))
            break
    rep.add("commutes_with_restriction", bad is None, bad)
    return rep


# --- basic constructions ---------------------------------------------------


def identity_morphism(X: RingSheaf) -> RingedSpaceMorphism:
    return RingedSpaceMorphism(X, X, identity_map(X.space), {V: identity_hom(R) for V, R in enumerate(X.sections)})


def compose_morphisms(g: RingedSpaceMorphism, f: RingedSpaceMorphism) -> RingedSpaceMorphism:
    """g after f; comorphism (g f)#(W) = f#(g^-1 W) ∘ g#(W)."""
    comorph = {W: compose(f.comorph[g.pre(W)], g.comorph[W]) for W in g.comorph}
    return RingedSpaceMorphism(f.source, g.target, compose_maps(g.cmap, f.cmap), comorph)


def pushforward(cmap: ContinuousMap, F: RingSheaf | ModuleSheaf):
    """(f_*F)(V) = F(f^-1 V)."""
    S, T = cmap.source, cmap.target
    pre = [S.index(cmap.preimage(V)) for V in T.opens]
    if isinstance(F, RingSheaf):
        secs = tuple(F.sections[pre[V]] for V in range(len(T.opens)))
        res = {(i, j): RingHom(secs[i], secs[j], F.restrict(pre[i], pre[j]))
               for i, U in enumerate(T.opens) for j, V in enumerate(T.opens) if V <= U}
        return RingSheaf(T, secs, res)
    rings = pushforward(cmap, F.rings)
    secs = tuple(F.sections[pre[V]] for V in range(len(T.opens)))
    res = {(i, j): np.asarray(F.restrict(pre[i], pre[j]))
           for i, U in enumerate(T.opens) for j, V in enumerate(T.opens) if V <= U}
    return ModuleSheaf(rings, secs, res)


def stalk(F: RingSheaf | ModuleSheaf, x: int):
    return F.stalk(x)


def stalk_map(f: RingedSpaceMorphism, x: int) -> RingHom:
    """f#_x: O_{Y,f(x)} -> O_{X,x} (comorphism at the minimal open, then restriction)."""
    X, Y = f.source, f.target
    V = Y.space.index(minimal_open(Y.space, f.cmap(x)))
    U = X.space.index(minimal_open(X.space, x))
    h = f.comorph[V]
    return RingHom(h.source, X.sections[U], X.restrict(f.pre(V), U)[h.map])


def decompose(F: RingSheaf | ModuleSheaf, i: int) -> tuple[list[int], np.ndarray]:
    """Points of opens[i] and the table section -> family of stalk indices."""
    pts = sorted(F.space.opens[i])
    if not pts:
        return pts, np.zeros((1, 0), dtype=np.int64)
    cols = [np.asarray(F.restrict(i, F.space.index(minimal_open(F.space, x)))) for x in pts]
    return pts, np.stack(cols, axis=1)


def kernel_sheaf(f: RingedSpaceMorphism) -> tuple[ModuleSheaf, dict]:
    """I_f = ker(f#: O_Y -> f_*O_X) as an O_Y-module; also the embeddings into O_Y."""
    Y = f.target
    secs, embeds = [], {}
    for V in range(len(Y.space.opens)):
        K, els = ideal_module(Y.sections[V], kernel(f.comorph[V]).elements)
        secs.append(K)
        embeds[V] = els
    res = {}
    for (V, W) in Y.res:
        pos = np.full(Y.sections[W].size, -1, dtype=np.int64)
        pos[embeds[W]] = np.arange(len(embeds[W]))
        res[(V, W)] = pos[Y.restrict(V, W)[embeds[V]]]
    return ModuleSheaf(Y, tuple(secs), res), embeds


def is_closed_immersion(f: RingedSpaceMorphism) -> bool:
    if not is_closed_immersion_space(f.cmap):
        return False
    return all(is_surjective(stalk_map(f, x)) for x in range(f.source.space.points))


# --- discrete (spec mode) constructions ---------------------------------------


def sheaf_from_stalks(stalks: list[FiniteRing], space: FinSpace | None = None) -> RingSheaf:
    """The sheaf on a discrete space whose sections over U are the product of stalks in U."""
    S = space or discrete(len(stalks))
    if not S.is_discrete():
        raise ValueError("sheaf_from_stalks needs a discrete space")
    secs, coords = [], []
    for U in S.opens:
        R, c = product_of([stalks[p] for p in sorted(U)])
        secs.append(R)
        coords.append(c)
    res = {}
    for i, U in enumerate(S.opens):
        pu = sorted(U)
        for j in S.subopens(i):
            pv = sorted(S.opens[j])
            if pv:
                dims = tuple(stalks[p].size for p in pv)
                m = np.ravel_multi_index(tuple(coords[i][:, pu.index(p)] for p in pv), dims)
            else:
                m = np.zeros(secs[i].size, dtype=np.int64)
            res[(i, j)] = RingHom(secs[i], secs[j], m)
    return RingSheaf(S, tuple(secs), res)


def module_sheaf_from_stalks(rings: RingSheaf, stalks: list[FiniteModule]) -> ModuleSheaf:
    S = rings.space
    if not S.is_discrete():
        raise ValueError("module_sheaf_from_stalks needs a discrete space")
    secs, coords = [], []
    for i, U in enumerate(S.opens):
        pts, rc = decompose(rings, i)
        mods = [stalks[p] for p in pts]
        dims = tuple(M.size for M in mods)
        n = math.prod(dims)
        mc = np.array(np.unravel_index(np.arange(n), dims)).T if pts else np.zeros((1, 0), np.int64)
        if pts:
            add = np.ravel_multi_index(tuple(M.add[mc[:, None, k], mc[None, :, k]] for k, M in enumerate(mods)), dims)
            act = np.ravel_multi_index(tuple(M.act[rc[:, None, k], mc[None, :, k]] for k, M in enumerate(mods)), dims)
        else:
            add = np.zeros((1, 1), dtype=np.int64)
            act = np.zeros((rings.sections[i].size, 1), dtype=np.int64)
        secs.append(FiniteModule(rings.sections[i], add, act))
        coords.append(mc)
    res = {}
    for i, U in enumerate(S.opens):
        pu = sorted(U)
        for j in S.subopens(i):
            pv = sorted(S.opens[j])
            if pv:
                dims = tuple(stalks[p].size for p in pv)
                res[(i, j)] = np.ravel_multi_index(tuple(coords[i][:, pu.index(p)] for p in pv), dims)
            else:
                res[(i, j)] = np.zeros(secs[i].size, dtype=np.int64)
    return ModuleSheaf(rings, tuple(secs), res)


def is_local(R: FiniteRing) -> bool:
    """Non-units form an ideal (equivalently a unique maximal ideal); the zero ring is not local."""
    if R.size == 1:
        return False
    units = (R.mul == R.one).any(axis=1)
    non = np.nonzero(~units)[0]
    return bool((~units[R.add[np.ix_(non, non)]]).all())


@dataclass(frozen=True, eq=False)
class SpecData:
    ring: FiniteRing
    sheaf: RingSheaf
    idempotents: tuple[int, ...]  # primitive idempotent of each point
    embeddings: tuple[np.ndarray, ...]  # stalk index -> element of R
    global_iso: RingHom  # R -> global sections


def primitive_idempotents(R: FiniteRing) -> list[int]:
    idem = [e for e in idempotents(R) if e != 0]
    return [e for e in idem if not any(f != e and int(R.mul[e, f]) == f for f in idem)]


def spec_finite_ring(R: FiniteRing) -> SpecData:
    """Points are the primitive idempotents e; the stalk at e is the local factor R·e."""
    if R.size == 1:
        raise ValueError("Spec of the zero ring is empty; pass a nonzero ring")
    if not verify_ring(R).ok:
        raise ValueError("input is not a commutative ring")
    prims = primitive_idempotents(R)
    stalks, embeds = [], []
    for e in prims:
        S, emb = subset_ring(R, set(R.mul[e].tolist()), e, f"{R.name}·{e}" if R.name else "")
        if not is_local(S):
            raise ValueError(f"local factor at idempotent {e} is not local")
        stalks.append(S)
        embeds.append(emb)
    sheaf = sheaf_from_stalks(stalks)
    full = sheaf.space.full
    pos = []
    for emb in embeds:
        p = np.full(R.size, -1, dtype=np.int64)
        p[emb] = np.arange(len(emb))
        pos.append(p)
    dims = tuple(s.size for s in stalks)
    g = np.ravel_multi_index(tuple(pos[k][R.mul[e]] for k, e in enumerate(prims)), dims)
    iso = RingHom(R, sheaf.sections[full], g)
    if not (verify_hom(iso).ok and is_bijective(iso)):
        raise ValueError("idempotent decomposition did not recover the ring")
    return SpecData(R, sheaf, tuple(prims), tuple(embeds), iso)


def module_on_spec(spec: SpecData, M: FiniteModule) -> ModuleSheaf:
    """The module sheaf with stalk e·M at the point e."""
    if M.ring != spec.ring:
        raise ValueError("module is not over the ring")
    stalks = []
    for k, e in enumerate(spec.idempotents):
        els = sorted(set(M.act[e].tolist()))
        pos = np.full(M.size, -1, dtype=np.int64)
        pos[els] = np.arange(len(els))
        ix = np.array(els)
        emb = spec.embeddings[k]
        stalks.append(FiniteModule(spec.sheaf.stalk(k), pos[M.add[np.ix_(ix, ix)]], pos[M.act[np.ix_(emb, ix)]]))
    return module_sheaf_from_stalks(spec.sheaf, stalks)


def spec_morphism(h: RingHom, source: SpecData, target: SpecData) -> RingedSpaceMorphism:
    """Spec S -> Spec R induced by h: R -> S.

    The point e' of Spec S goes to the unique primitive e of R with
    h(e) e' = e'.  On sections a family over V is lifted to R, pushed
    through h and restricted to the preimage.
    """
    R, S = h.source, h.target
    if source.ring != S or target.ring != R:
        raise ValueError("spec data do not match the hom")
    cmap = []
    for e2 in source.idempotents:
        hits = [k for k, e in enumerate(target.idempotents) if int(S.mul[h.map[e], e2]) == e2]
        if len(hits) != 1:
            raise ValueError("idempotent does not lie over a unique point")
        cmap.append(hits[0])
    cm = ContinuousMap(source.sheaf.space, target.sheaf.space, cmap)
    X, Y = source.sheaf, target.sheaf
    inv_x = np.empty(X.sections[X.space.full].size, dtype=np.int64)
    inv_x[source.global_iso.map] = np.arange(S.size)
    comorph = {}
    for V in range(len(Y.space.opens)):
        pts, coords = decompose(Y, V)
        lift = np.zeros(len(coords), dtype=np.int64)
        for k, p in enumerate(pts):
            lift = R.add[lift, target.embeddings[p][coords[:, k]]]
        U = X.space.index(cm.preimage(Y.space.opens[V]))
        comorph[V] = RingHom(Y.sections[V], X.sections[U], X.restrict(X.space.full, U)[source.global_iso.map[h.map[lift]]])
    return RingedSpaceMorphism(X, Y, cm, comorph)


# --- X + M, coproducts, cogroup, theta -----------------------------------------


@dataclass(frozen=True, eq=False)
class DirectSumSpace:
    sheaf: RingSheaf  # O_X + M
    i_X: RingedSpaceMorphism  # X -> X+M
    alpha: dict  # V -> table M(V) -> (O_X + M)(V), m -> (0, m)


def direct_sum_space(X: RingSheaf, M: ModuleSheaf) -> DirectSumSpace:
    if M.rings != X:
        raise ValueError("module sheaf is not over the structure sheaf")
    S = X.space
    secs = tuple(trivial_extension_ring(X.sections[i], M.sections[i]) for i in range(len(S.opens)))
    res = {}
    for (i, j), r in X.res.items():
        mi, mj = M.sections[i].size, M.sections[j].size
        t = np.arange(secs[i].size)
        res[(i, j)] = RingHom(secs[i], secs[j], r.map[t // mi] * mj + np.asarray(M.restrict(i, j))[t % mi])
    XM = RingSheaf(S, secs, res)
    proj = {i: RingHom(secs[i], X.sections[i], np.arange(secs[i].size) // M.sections[i].size) for i in range(len(S.opens))}
    i_X = RingedSpaceMorphism(X, XM, identity_map(S), proj)
    alpha = {i: np.arange(M.sections[i].size) for i in range(len(S.opens))}
    return DirectSumSpace(XM, i_X, alpha)


@dataclass(frozen=True, eq=False)
class Coproduct:
    sheaf: RingSheaf
    j_Y: RingedSpaceMorphism
    j_Z: RingedSpaceMorphism
    fg: RingedSpaceMorphism  # X -> Y +_X Z
    fps: dict  # W -> FiberProduct


def coproduct_under_X(f: RingedSpaceMorphism, g: RingedSpaceMorphism, check: bool = True) -> Coproduct:
    """Y +_X Z with structure sheaf (j_Y)_*O_Y x_{O_X} (j_Z)_*O_Z, openwise."""
    if f.source != g.source:
        raise ValueError("coproduct under X needs morphisms out of the same X")
    if check and not (is_closed_immersion(f) and is_closed_immersion(g)):
        raise ValueError("coproduct under X is only formed along closed immersions")
    X, Y, Z = f.source, f.target, g.target
    P, jy, jz = pushout(f.cmap, g.cmap)
    fps, secs = {}, []
    vy, vz = [], []
    for W in P.opens:
        a = Y.space.index(jy.preimage(W))
        c = Z.space.index(jz.preimage(W))
        fp = fiber_product(f.comorph[a], g.comorph[c])
        fps[len(secs)] = fp
        secs.append(fp.ring)
        vy.append(a)
        vz.append(c)
    res = {}
    for i, U in enumerate(P.opens):
        for j in P.subopens(i):
            pairs = fps[i].pairs
            m = fps[j].index[Y.restrict(vy[i], vy[j])[pairs[:, 0]], Z.restrict(vz[i], vz[j])[pairs[:, 1]]]
            res[(i, j)] = RingHom(secs[i], secs[j], m)
    C = RingSheaf(P, tuple(secs), res)
    j_Y = RingedSpaceMorphism(Y, C, jy, {W: fps[W].p1 for W in fps})
    j_Z = RingedSpaceMorphism(Z, C, jz, {W: fps[W].p2 for W in fps})
    fg = RingedSpaceMorphism(X, C, compose_maps(jy, f.cmap), {W: fps[W].diag for W in fps})
    return Coproduct(C, j_Y, j_Z, fg, fps)


@dataclass(frozen=True, eq=False)
class CogroupStructure:
    base: RingSheaf  # O_X
    module: ModuleSheaf
    dsum: DirectSumSpace
    square: Coproduct  # (X+M) +_X (X+M)
    e: RingedSpaceMorphism  # X+M -> X
    plus: RingedSpaceMorphism  # X+M -> (X+M) +_X (X+M)
    inv: RingedSpaceMorphism  # X+M -> X+M
    mode: str = "spec"


def cogroup_structure(X: RingSheaf, M: ModuleSheaf) -> CogroupStructure:
    ds = direct_sum_space(X, M)
    XM = ds.sheaf
    sq = coproduct_under_X(ds.i_X, ds.i_X)
    S = X.space
    e_co, inv_co, plus_co = {}, {}, {}
    for i in range(len(S.opens)):
        Mi = M.sections[i]
        m = Mi.size
        e_co[i] = RingHom(X.sections[i], XM.sections[i], np.arange(X.sections[i].size) * m)
        t = np.arange(XM.sections[i].size)
        inv_co[i] = RingHom(XM.sections[i], XM.sections[i], (t // m) * m + Mi.neg[t % m])
    # the square's points are numbered like X (pushout along identities)
    for W in range(len(sq.sheaf.space.opens)):
        i = S.index(sq.j_Y.cmap.preimage(sq.sheaf.space.opens[W]))
        m = M.sections[i].size
        pr = sq.fps[W].pairs
        plus_co[W] = RingHom(sq.sheaf.sections[W], XM.sections[i], (pr[:, 0] // m) * m + M.sections[i].add[pr[:, 0] % m, pr[:, 1] % m])
    e = RingedSpaceMorphism(XM, X, identity_map(S), e_co)
    inv = RingedSpaceMorphism(XM, XM, identity_map(S), inv_co)
    plus = RingedSpaceMorphism(XM, sq.sheaf, ContinuousMap(S, sq.sheaf.space, sq.j_Y.cmap.map), plus_co)
    mode = "spec" if S.is_discrete() else "ringed"
    return CogroupStructure(X, M, ds, sq, e, plus, inv, mode)


_CO_NAMES = {
    "associativity": "coassociativity",
    "left_unit": "left_counit",
    "right_unit": "right_counit",
    "inverse": "coinverse",
    "commutativity": "cocommutativity",
}


def verify_cogroup(cg: CogroupStructure) -> Report:
    """Morphism checks plus the dual cogroup diagrams, evaluated openwise on comorphisms."""
    rep = Report(f"cogroup ({cg.mode} mode)")
    S = cg.base.space
    for label, mor in (("e", cg.e), ("plus", cg.plus), ("inv", cg.inv)):
        rep.extend(verify_morphism(mor), f"{label}.")
        ident = list(mor.cmap.map) == list(range(S.points))
        rep.add(f"{label}.identity_on_points", ident, None if ident else list(mor.cmap.map))
    if not rep.ok:
        return rep
    sqS = cg.square.sheaf.space
    for i, U in enumerate(S.opens):
        W = sqS.index(frozenset(cg.square.j_Y.cmap.map[x] for x in U))
        A, Mi = cg.base.sections[i], cg.module.sections[i]
        G = GroupObjectStructure(trivial_extension(A, Mi), cg.e.comorph[i].map, cg.plus.comorph[W].map, cg.inv.comorph[i].map)
        G.__dict__["square"] = cg.square.fps[W]
        rep.extend(verify_group_object(G, _CO_NAMES), f"U{sorted(U)}.")
    return rep


@dataclass(frozen=True, eq=False)
class Theta:
    coproduct: Coproduct  # (X+M) +_X Y
    dsum: DirectSumSpace
    theta: RingedSpaceMorphism  # (X+M) +_X Y -> Y


def theta(f: RingedSpaceMorphism, M: ModuleSheaf, dsum: DirectSumSpace | None = None) -> Theta:
    """The map out of (X+M) +_X Y induced by (f ∘ e_M, id_Y)."""
    if not is_closed_immersion(f):
        raise ValueError("theta needs a closed immersion")
    ds = dsum or direct_sum_space(f.source, M)
    C = coproduct_under_X(ds.i_X, f)
    Y = f.target
    P = C.sheaf.space
    w = [-1] * P.points
    for y in range(Y.space.points):
        w[C.j_Z.cmap(y)] = y
    for x in range(f.source.space.points):
        w[C.j_Y.cmap(x)] = f.cmap(x)
    cm = ContinuousMap(P, Y.space, w)
    comorph = {}
    for V in range(len(Y.space.opens)):
        W = P.index(cm.preimage(Y.space.opens[V]))
        U = f.pre(V)
        m = M.sections[U].size
        fp = C.fps[W]
        s = np.arange(Y.sections[V].size)
        comorph[V] = RingHom(Y.sections[V], C.sheaf.sections[W], fp.index[f.comorph[V].map * m, s])
    return Theta(C, ds, RingedSpaceMorphism(C.sheaf, Y, cm, comorph))


def verify_theta(th: Theta, f: RingedSpaceMorphism, e: RingedSpaceMorphism) -> Report:
    """The two universal-property triangles: theta∘j_Y = id_Y and theta∘j_{X+M} = f∘e_M."""
    rep = Report("theta")
    rep.extend(verify_morphism(th.theta), "theta.")
    a = compose_morphisms(th.theta, th.coproduct.j_Z)
    rep.add("theta_after_j_Y_is_id", a == identity_morphism(f.target))
    b = compose_morphisms(th.theta, th.coproduct.j_Y)
    rep.add("theta_after_j_XM_is_f_after_e", b == compose_morphisms(f, e))
    return rep


def e_morphism(X: RingSheaf, M: ModuleSheaf, ds: DirectSumSpace) -> RingedSpaceMorphism:
    co = {i: RingHom(X.sections[i], ds.sheaf.sections[i], np.arange(X.sections[i].size) * M.sections[i].size)
          for i in range(len(X.space.opens))}
    return RingedSpaceMorphism(ds.sheaf, X, identity_map(X.space), co)


# --- serialization --------------------------------------------------------


def sheaf_to_json(F: RingSheaf) -> dict:
    return {
        "space": space_to_json(F.space),
        "sections": {str(i): ring_to_json(R) for i, R in enumerate(F.sections)},
        "res": {f"{i},{j}": h.map.tolist() for (i, j), h in sorted(F.res.items())},
    }


def sheaf_from_json(d: dict) -> RingSheaf:
    S = space_from_json(d["space"])
    # open indices in the file refer to the file's own open order
    file_opens = [frozenset(U) for U in d["space"]["opens"]]
    remap = {k: S.index(U) for k, U in enumerate(file_opens)}
    secs: list = [None] * len(S.opens)
    for k, R in d["sections"].items():
        secs[remap[int(k)]] = ring_from_json(R)
    if any(s is None for s in secs):
        raise ValueError("sheaf file is missing sections for some open")
    res = {}
    for k, m in d["res"].items():
        i, j = (remap[int(v)] for v in k.split(","))
        res[(i, j)] = RingHom(secs[i], secs[j], m)
    return RingSheaf(S, tuple(secs), res)


def module_sheaf_to_json(F: ModuleSheaf) -> dict:
    return {
        "rings": sheaf_to_json(F.rings),
        "sections": {str(i): module_to_json(M) for i, M in enumerate(F.sections)},
        "res": {f"{i},{j}": np.asarray(m).tolist() for (i, j), m in sorted(F.res.items())},
    }


def module_sheaf_from_json(d: dict) -> ModuleSheaf:
    R = sheaf_from_json(d["rings"])
    S = R.space
    remap = {k: S.index(U) for k, U in enumerate(frozenset(U) for U in d["rings"]["space"]["opens"])}
    secs: list = [None] * len(S.opens)
    for k, M in d["sections"].items():
        secs[remap[int(k)]] = module_from_json(M)
    res = {}
    for k, m in d["res"].items():
        i, j = (remap[int(v)] for v in k.split(","))
        res[(i, j)] = np.asarray(m, dtype=np.int64)
    return ModuleSheaf(R, tuple(secs), res)


def morphism_to_json(f: RingedSpaceMorphism) -> dict:
    return {
        "source": sheaf_to_json(f.source),
        "target": sheaf_to_json(f.target),
        "cmap": list(f.cmap.map),
        "comorph": {str(V): h.map.tolist() for V, h in sorted(f.comorph.items())},
    }


def morphism_from_json(d: dict) -> RingedSpaceMorphism:
    X, Y = sheaf_from_json(d["source"]), sheaf_from_json(d["target"])
    cm = ContinuousMap(X.space, Y.space, d["cmap"])
    file_opens = [frozenset(U) for U in d["target"]["space"]["opens"]]
    comorph = {}
    for k, m in d["comorph"].items():
        V = Y.space.index(file_opens[int(k)])
        comorph[V] = RingHom(Y.sections[V], X.sections[X.space.index(cm.preimage(Y.space.opens[V]))], m)
    return RingedSpaceMorphism(X, Y, cm, comorph)
