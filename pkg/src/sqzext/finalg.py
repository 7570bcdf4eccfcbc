"""Finite commutative rings with identity, given by explicit operation tables.

Carriers are always ``0..n-1`` with zero at index 0.  Every construction here
fixes a deterministic element order (lexicographic for products and fiber
products, least representative for quotients) so that serialized output is
reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import product as iproduct
from typing import Iterator, Sequence

import numpy as np

from .report import Budget, Report, as_budget


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.int64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FiniteRing:
    add: np.ndarray
    mul: np.ndarray
    one: int
    name: str = ""

    def __post_init__(self):
        add, mul = _frozen(self.add), _frozen(self.mul)
        n = add.shape[0]
        if add.shape != (n, n) or mul.shape != (n, n) or n < 1:
            raise ValueError("operation tables must be square and non-empty")
        if add.min() < 0 or add.max() >= n or mul.min() < 0 or mul.max() >= n:
            raise ValueError("operation table entry outside the carrier")
        if not 0 <= self.one < n:
            raise ValueError("identity index outside the carrier")
        object.__setattr__(self, "add", add)
        object.__setattr__(self, "mul", mul)
        object.__setattr__(self, "one", int(self.one))

    @property
    def size(self) -> int:
        return self.add.shape[0]

    @property
    def zero(self) -> int:
        return 0

    @cached_property
    def neg(self) -> np.ndarray:
        # neg[x] = the y with x + y = 0 (or -1 when the table has no inverse)
        out = np.full(self.size, -1, dtype=np.int64)
        rows, cols = np.nonzero(self.add == 0)
        for r, c in zip(rows[::-1], cols[::-1]):
            out[r] = c
        return out

    def sub(self, x: int, y: int) -> int:
        return int(self.add[x, self.neg[y]])

    def scalar(self, k: int, x: int) -> int:
        """k-fold sum of x for k >= 0."""
        acc = 0
        for _ in range(k):
            acc = int(self.add[acc, x])
        return acc

    @cached_property
    def key(self) -> bytes:
        return self.one.to_bytes(4, "little") + self.add.tobytes() + self.mul.tobytes()

    def __eq__(self, other):
        return isinstance(other, FiniteRing) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        label = self.name or "ring"
        return f"<FiniteRing {label} size={self.size}>"


@dataclass(frozen=True, eq=False)
class RingHom:
    source: FiniteRing
    target: FiniteRing
    map: np.ndarray

    def __post_init__(self):
        m = _frozen(self.map)
        if m.shape != (self.source.size,):
            raise ValueError("hom table must have one entry per source element")
        if m.min() < 0 or m.max() >= self.target.size:
            raise ValueError("hom table entry outside the target carrier")
        object.__setattr__(self, "map", m)

    def __call__(self, x: int) -> int:
        return int(self.map[x])

    def __eq__(self, other):
        return (
            isinstance(other, RingHom)
            and self.source == other.source
            and self.target == other.target
            and np.array_equal(self.map, other.map)
        )

    def __hash__(self):
        return hash((self.source, self.target, self.map.tobytes()))

    def __repr__(self):
        return f"<RingHom {self.source!r} -> {self.target!r} {self.map.tolist()}>"


@dataclass(frozen=True)
class Ideal:
    ring: FiniteRing
    elements: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(sorted(set(int(e) for e in self.elements))))

    def __contains__(self, x) -> bool:
        return int(x) in self.elements

    def __len__(self):
        return len(self.elements)


# --- constructors ---------------------------------------------------------


def make_cyclic_ring(n: int) -> FiniteRing:
    if n < 1:
        raise ValueError("n must be >= 1")
    r = np.arange(n)
    return FiniteRing((r[:, None] + r[None, :]) % n, (r[:, None] * r[None, :]) % n, 1 % n, f"Z/{n}")


def zero_ring() -> FiniteRing:
    return make_cyclic_ring(1)


def product_of(rings: Sequence[FiniteRing]) -> tuple[FiniteRing, np.ndarray]:
    """Product of several rings on lexicographically ordered tuples.

    Returns the ring and an ``(size, k)`` array decoding each index into its
    tuple of component indices.  The empty product is the zero ring.
    """
    dims = tuple(r.size for r in rings)
    n = math.prod(dims)
    coords = np.array(np.unravel_index(np.arange(n), dims)).T if rings else np.zeros((1, 0), np.int64)
    if not rings:
        return zero_ring(), coords
    add_parts, mul_parts = [], []
    for k, r in enumerate(rings):
        c = coords[:, k]
        add_parts.append(r.add[c[:, None], c[None, :]])
        mul_parts.append(r.mul[c[:, None], c[None, :]])
    add = np.ravel_multi_index(add_parts, dims)
    mul = np.ravel_multi_index(mul_parts, dims)
    one = int(np.ravel_multi_index([r.one for r in rings], dims))
    name = " x ".join(r.name or "?" for r in rings)
    return FiniteRing(add, mul, one, name), coords


def product_ring(R: FiniteRing, S: FiniteRing) -> tuple[FiniteRing, RingHom, RingHom]:
    P, coords = product_of([R, S])
    return P, RingHom(P, R, coords[:, 0]), RingHom(P, S, coords[:, 1])


def subset_ring(R: FiniteRing, elements: Sequence[int], one: int, name: str = "") -> tuple[FiniteRing, np.ndarray]:
    """Relabel a subset closed under the ring operations as a ring in its own right.

    ``one`` is the identity of the subset (e.g. an idempotent e for R·e).
    Returns the ring and the embedding array new index -> old index.
    """
    els = sorted(set(int(e) for e in elements))
    if els[0] != 0:
        raise ValueError("subset must contain zero")
    pos = np.full(R.size, -1, dtype=np.int64)
    pos[els] = np.arange(len(els))
    ix = np.array(els)
    add = pos[R.add[np.ix_(ix, ix)]]
    mul = pos[R.mul[np.ix_(ix, ix)]]
    if (add < 0).any() or (mul < 0).any():
        raise ValueError("subset is not closed under the ring operations")
    return FiniteRing(add, mul, int(pos[one]), name), ix


def identity_hom(R: FiniteRing) -> RingHom:
    return RingHom(R, R, np.arange(R.size))


def compose(g: RingHom, f: RingHom) -> RingHom:
    """g after f."""
    if f.target != g.source:
        raise ValueError("composition of non-composable homs")
    return RingHom(f.source, g.target, g.map[f.map])


# --- verification ---------------------------------------------------------


def _first(mask: np.ndarray):
    idx = np.argwhere(mask)
    return tuple(int(v) for v in idx[0]) if len(idx) else None


def verify_ring(R: FiniteRing) -> Report:
    """Exhaustive check of the commutative-ring-with-identity axioms."""
    rep = Report(f"ring {R.name or ''}".strip())
    n = R.size
    a, m = R.add, R.mul
    x = np.arange(n)
    rep.add("add_associative", (w := _first(a[a[:, :, None], x[None, None, :]] != a[x[:, None, None], a[None, :, :]])) is None, w)
    rep.add("add_commutative", (w := _first(a != a.T)) is None, w)
    rep.add("add_identity", (w := _first(a[0] != x)) is None, w)
    rep.add("add_inverse", (w := _first(R.neg < 0)) is None, w)
    rep.add("mul_associative", (w := _first(m[m[:, :, None], x[None, None, :]] != m[x[:, None, None], m[None, :, :]])) is None, w)
    rep.add("mul_commutative", (w := _first(m != m.T)) is None, w)
    rep.add("mul_identity", (w := _first(m[R.one] != x)) is None, w)
    lhs = m[x[:, None, None], a[None, :, :]]
    rhs = a[m[:, :, None], m[:, None, :]]
    rep.add("distributive", (w := _first(lhs != rhs)) is None, w)
    return rep


def verify_hom(h: RingHom) -> Report:
    R, S, f = h.source, h.target, h.map
    rep = Report("ring hom")
    rep.add("preserves_add", (w := _first(f[R.add] != S.add[f[:, None], f[None, :]])) is None, w)
    rep.add("preserves_mul", (w := _first(f[R.mul] != S.mul[f[:, None], f[None, :]])) is None, w)
    rep.add("preserves_one", int(f[R.one]) == S.one, None if int(f[R.one]) == S.one else R.one)
    return rep


def is_hom(h: RingHom) -> bool:
    f = h.map
    R, S = h.source, h.target
    return (
        int(f[R.one]) == S.one
        and np.array_equal(f[R.add], S.add[f[:, None], f[None, :]])
        and np.array_equal(f[R.mul], S.mul[f[:, None], f[None, :]])
    )


def is_surjective(h: RingHom) -> bool:
    return len(np.unique(h.map)) == h.target.size


def is_bijective(h: RingHom) -> bool:
    return h.source.size == h.target.size and is_surjective(h)


# --- ideals, kernels, quotients ------------------------------------------


def verify_ideal(I: Ideal) -> Report:
    R = I.ring
    els = np.array(I.elements, dtype=np.int64)
    mask = np.zeros(R.size, dtype=bool)
    mask[els] = True
    rep = Report("ideal")
    rep.add("contains_zero", bool(mask[0]))
    w = _first(~mask[R.add[np.ix_(els, els)]])
    rep.add("closed_add", w is None, None if w is None else (int(els[w[0]]), int(els[w[1]])))
    w = _first(~mask[R.neg[els]])
    rep.add("closed_neg", w is None, None if w is None else int(els[w[0]]))
    w = _first(~mask[R.mul[:, els]])
    rep.add("absorbs_mul", w is None, None if w is None else (w[0], int(els[w[1]])))
    return rep


def kernel(h: RingHom) -> Ideal:
    return Ideal(h.source, tuple(int(i) for i in np.nonzero(h.map == 0)[0]))


def ideal_square_witness(I: Ideal):
    """A pair x, y in I with x*y != 0, or None if I^2 = 0."""
    els = np.array(I.elements)
    w = _first(I.ring.mul[np.ix_(els, els)] != 0)
    return None if w is None else (int(els[w[0]]), int(els[w[1]]))


def ideal_square_is_zero(I: Ideal) -> bool:
    return ideal_square_witness(I) is None


def quotient_ring(R: FiniteRing, I: Ideal) -> tuple[FiniteRing, RingHom]:
    if not verify_ideal(I).ok:
        raise ValueError("subset is not an ideal")
    cls = np.full(R.size, -1, dtype=np.int64)
    reps = []
    for x in range(R.size):
        if cls[x] >= 0:
            continue
        k = len(reps)
        reps.append(x)
        for i in I.elements:
            cls[R.add[x, i]] = k
    r = np.array(reps)
    add = cls[R.add[np.ix_(r, r)]]
    mul = cls[R.mul[np.ix_(r, r)]]
    Q = FiniteRing(add, mul, int(cls[R.one]), f"{R.name}/I" if R.name else "")
    return Q, RingHom(R, Q, cls)


# --- fiber products -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FiberProduct:
    ring: FiniteRing
    p1: RingHom
    p2: RingHom
    diag: RingHom  # f x g : B x_A C -> A
    pairs: np.ndarray  # index -> (b, c)
    index: np.ndarray  # (b, c) -> index, -1 off the fiber product

    def at(self, b: int, c: int) -> int:
        k = int(self.index[b, c])
        if k < 0:
            raise KeyError((b, c))
        return k


def fiber_product(f: RingHom, g: RingHom) -> FiberProduct:
    """B x_A C on pairs (b, c) with f(b) = g(c), in lexicographic pair order."""
    if f.target != g.target:
        raise ValueError("fiber product needs homs with a common target")
    B, C = f.source, g.source
    bs, cs = np.nonzero(f.map[:, None] == g.map[None, :])
    pairs = np.stack([bs, cs], axis=1)
    index = np.full((B.size, C.size), -1, dtype=np.int64)
    index[bs, cs] = np.arange(len(bs))
    add = index[B.add[bs[:, None], bs[None, :]], C.add[cs[:, None], cs[None, :]]]
    mul = index[B.mul[bs[:, None], bs[None, :]], C.mul[cs[:, None], cs[None, :]]]
    P = FiniteRing(add, mul, int(index[B.one, C.one]), f"{B.name} x_A {C.name}")
    pairs.setflags(write=False)
    index.setflags(write=False)
    return FiberProduct(P, RingHom(P, B, bs), RingHom(P, C, cs), RingHom(P, f.target, f.map[bs]), pairs, index)


# --- invariants and search ------------------------------------------------


def additive_orders(R: FiniteRing) -> np.ndarray:
    orders = np.zeros(R.size, dtype=np.int64)
    for x in range(R.size):
        acc, k = x, 1
        while acc != 0:
            acc = int(R.add[acc, x])
            k += 1
        orders[x] = k
    return orders


def characteristic(R: FiniteRing) -> int:
    return int(additive_orders(R)[R.one])


def idempotents(R: FiniteRing) -> list[int]:
    return [int(x) for x in np.nonzero(np.diag(R.mul) == np.arange(R.size))[0]]


def invariants(R: FiniteRing) -> tuple:
    orders = additive_orders(R)
    sq_zero = int((np.diag(R.mul) == 0).sum())
    units = int((R.mul == R.one).any(axis=1).sum())
    return (R.size, int(orders[R.one]), tuple(sorted(orders.tolist())), len(idempotents(R)), sq_zero, units)


def additive_generators(R: FiniteRing) -> list[int]:
    """Greedy generating set of (R, +), starting with the identity."""
    span = np.zeros(R.size, dtype=bool)
    span[0] = True
    gens = []
    for x in [R.one] + list(range(R.size)):
        if span[x]:
            continue
        gens.append(x)
        new = span.copy()
        for s in np.nonzero(span)[0]:
            cur = int(s)
            while True:
                cur = int(R.add[cur, x])
                if new[cur]:
                    break
                new[cur] = True
        span = new
    return gens


def _extend_additive(src_add, tgt_add, img, g, t, order) -> np.ndarray | None:
    """Extend a partial additive map from span(S) to span(S, g) with g -> t."""
    img = img.copy()
    for s in np.nonzero(img >= 0)[0]:
        cur, curimg = int(s), int(img[s])
        for _ in range(order):
            cur = int(src_add[cur, g])
            curimg = int(tgt_add[curimg, t])
            if img[cur] < 0:
                img[cur] = curimg
            elif img[cur] != curimg:
                return None
    return img


def iter_additive_maps(src_add, tgt_add, gens, first=None, injective=False, budget: Budget | None = None) -> Iterator[np.ndarray]:
    """All additive maps between finite abelian groups, by images of generators.

    ``first`` pins the image of ``gens[0]`` (used to force 1 -> 1).
    """
    n_src, n_tgt = src_add.shape[0], tgt_add.shape[0]
    tgt_order = _orders(tgt_add)
    src_order = _orders(src_add)

    def rec(i, img):
        if i == len(gens):
            if injective and len(np.unique(img)) != n_src:
                return
            yield img
            return
        g = gens[i]
        cands = [first] if (i == 0 and first is not None) else range(n_tgt)
        for t in cands:
            if budget is not None:
                budget.tick()
            if src_order[g] % tgt_order[t]:
                continue
            nxt = _extend_additive(src_add, tgt_add, img, g, t, int(src_order[g]))
            if nxt is None:
                continue
            if injective and len(np.unique(nxt[nxt >= 0])) != int((nxt >= 0).sum()):
                continue
            yield from rec(i + 1, nxt)

    start = np.full(n_src, -1, dtype=np.int64)
    start[0] = 0
    yield from rec(0, start)


def _orders(add: np.ndarray) -> np.ndarray:
    n = add.shape[0]
    orders = np.zeros(n, dtype=np.int64)
    for x in range(n):
        acc, k = x, 1
        while acc != 0:
            acc = int(add[acc, x])
            k += 1
        orders[x] = k
    return orders


def iter_homs(R: FiniteRing, S: FiniteRing, injective: bool = False, budget: Budget | int | None = None) -> Iterator[RingHom]:
    b = as_budget(budget)
    gens = additive_generators(R)
    if not gens:  # R is the zero ring
        if S.size == 1:
            yield RingHom(R, S, np.zeros(1, dtype=np.int64))
        return
    first = S.one if gens[0] == R.one else None
    for img in iter_additive_maps(R.add, S.add, gens, first=first, injective=injective, budget=b):
        if int(img[R.one]) != S.one:
            continue
        if np.array_equal(img[R.mul], S.mul[img[:, None], img[None, :]]):
            yield RingHom(R, S, img)


def enumerate_homs(R: FiniteRing, S: FiniteRing, budget: Budget | int | None = None) -> list[RingHom]:
    """All identity-preserving ring homs R -> S in deterministic order."""
    return list(iter_homs(R, S, budget=budget))


def ring_isomorphic(R: FiniteRing, S: FiniteRing, budget: Budget | int | None = None) -> RingHom | None:
    """A witness isomorphism R -> S, or None when none exists."""
    if R.size != S.size:
        return None
    if R == S:
        return identity_hom(R)
    if invariants(R) != invariants(S):
        return None
    for h in iter_homs(R, S, injective=True, budget=budget):
        return h
    return None


def enumerate_rings(n: int, budget: Budget | int | None = None) -> list[FiniteRing]:
    """All commutative unital rings of order n, one per isomorphism class.

    The additive group runs over invariant-factor decompositions
    d_1 | ... | d_k (largest factor first).  The identity has additive order
    equal to the exponent, so it can be taken as the generator of the
    largest cyclic factor; the remaining products g_i g_j (2 <= i <= j) range
    over all elements killed by gcd(d_i, d_j).
    """
    b = as_budget(budget)
    if n == 1:
        return [zero_ring()]
    found: list[FiniteRing] = []
    for dims in _invariant_factor_types(n):
        k = len(dims)
        coords = np.array(np.unravel_index(np.arange(n), dims)).T if k else np.zeros((1, 0), np.int64)
        d = np.array(dims, dtype=np.int64)
        add = np.ravel_multi_index(tuple(((coords[:, None, i] + coords[None, :, i]) % d[i]) for i in range(k)), dims)
        free = [(i, j) for i in range(1, k) for j in range(i, k)]
        one = int(np.ravel_multi_index(tuple(int(i == 0) for i in range(k)), dims)) if k else 0
        options = []
        for i, j in free:
            gcd = math.gcd(dims[i], dims[j])
            options.append([e for e in range(n) if ((coords[e] * gcd) % d == 0).all()])
        for choice in iproduct(*options):
            b.tick()
            table = {}
            for i in range(k):
                table[(0, i)] = table[(i, 0)] = np.eye(k, dtype=np.int64)[i]
            for (i, j), e in zip(free, choice):
                table[(i, j)] = table[(j, i)] = coords[e]
            prod = np.zeros((n, n, k), dtype=np.int64)
            for i in range(k):
                for j in range(k):
                    prod += (coords[:, None, i] * coords[None, :, j])[:, :, None] * table[(i, j)][None, None, :]
            prod %= d
            mul = np.ravel_multi_index(tuple(prod[:, :, i] for i in range(k)), dims)
            R = FiniteRing(add, mul, one)
            if not verify_ring(R).ok:
                continue
            if any(ring_isomorphic(R, F, budget=b) is not None for F in found):
                continue
            found.append(R)
    return found


def _invariant_factor_types(n: int) -> list[tuple[int, ...]]:
    if n == 1:
        return [()]
    primes = {}
    m, p = n, 2
    while m > 1:
        while m % p == 0:
            primes[p] = primes.get(p, 0) + 1
            m //= p
        p += 1
    per_prime = [[(q, part) for part in _partitions(e)] for q, e in sorted(primes.items())]
    out = []
    for combo in iproduct(*per_prime):
        length = max(len(part) for _, part in combo)
        factors = [1] * length
        for q, part in combo:
            for i, e in enumerate(part):
                factors[i] *= q**e
        out.append(tuple(factors))
    return out


def _partitions(e: int, largest: int | None = None) -> list[tuple[int, ...]]:
    largest = e if largest is None else largest
    if e == 0:
        return [()]
    out = []
    for first in range(min(e, largest), 0, -1):
        for rest in _partitions(e - first, first):
            out.append((first,) + rest)
    return out


# --- serialization --------------------------------------------------------


def ring_to_json(R: FiniteRing) -> dict:
    return {"size": R.size, "one": R.one, "add": R.add.tolist(), "mul": R.mul.tolist()}


def ring_from_json(d: dict) -> FiniteRing:
    R = FiniteRing(d["add"], d["mul"], d["one"], d.get("name", ""))
    if R.size != d["size"]:
        raise ValueError("declared size does not match the tables")
    return R


def hom_to_json(h: RingHom) -> dict:
    return {"source": ring_to_json(h.source), "target": ring_to_json(h.target), "map": h.map.tolist()}


def hom_from_json(d: dict) -> RingHom:
    return RingHom(ring_from_json(d["source"]), ring_from_json(d["target"]), d["map"])
