"""Finite modules over finite rings and the module maps used by extensions."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .finalg import (
    FiniteRing,
    RingHom,
    _first,
    _frozen,
    _orders,
    enumerate_homs,
    iter_additive_maps,
    kernel,
    ideal_square_witness,
    is_surjective,
)
from .report import Budget, Report, as_budget


class LiftDependenceError(ValueError):
    """The A-action on ker(f) depends on the chosen lift (kernel not square-zero)."""

    code = "lift-dependence"


class NotSurjectiveError(ValueError):
    code = "not-surjective"


@dataclass(frozen=True, eq=False)
class FiniteModule:
    ring: FiniteRing
    add: np.ndarray
    act: np.ndarray  # act[r, m] = r . m

    def __post_init__(self):
        add, act = _frozen(self.add), _frozen(self.act)
        n = add.shape[0]
        if add.shape != (n, n) or act.shape != (self.ring.size, n):
            raise ValueError("module tables have the wrong shape")
        if add.min() < 0 or add.max() >= n or act.min() < 0 or act.max() >= n:
            raise ValueError("module table entry outside the carrier")
        object.__setattr__(self, "add", add)
        object.__setattr__(self, "act", act)

    @property
    def size(self) -> int:
        return self.add.shape[0]

    @cached_property
    def neg(self) -> np.ndarray:
        out = np.full(self.size, -1, dtype=np.int64)
        rows, cols = np.nonzero(self.add == 0)
        for r, c in zip(rows[::-1], cols[::-1]):
            out[r] = c
        return out

    @cached_property
    def key(self) -> bytes:
        return self.ring.key + self.add.tobytes() + self.act.tobytes()

    def __eq__(self, other):
        return isinstance(other, FiniteModule) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"<FiniteModule size={self.size} over {self.ring!r}>"


@dataclass(frozen=True, eq=False)
class ModuleHom:
    source: FiniteModule
    target: FiniteModule
    map: np.ndarray

    def __post_init__(self):
        m = _frozen(self.map)
        if m.shape != (self.source.size,) or m.min() < 0 or m.max() >= self.target.size:
            raise ValueError("module hom table does not fit its source/target")
        object.__setattr__(self, "map", m)

    def __eq__(self, other):
        return (
            isinstance(other, ModuleHom)
            and self.source == other.source
            and self.target == other.target
            and np.array_equal(self.map, other.map)
        )

    def __hash__(self):
        return hash((self.source, self.target, self.map.tobytes()))


# --- constructors ---------------------------------------------------------


def zero_module(R: FiniteRing) -> FiniteModule:
    return FiniteModule(R, [[0]], np.zeros((R.size, 1), dtype=np.int64))


def regular_module(R: FiniteRing) -> FiniteModule:
    return FiniteModule(R, R.add, R.mul)


def direct_sum(M: FiniteModule, N: FiniteModule) -> FiniteModule:
    if M.ring != N.ring:
        raise ValueError("direct sum of modules over different rings")
    a, b = M.size, N.size
    idx = np.arange(a * b)
    i, j = idx // b, idx % b
    add = M.add[i[:, None], i[None, :]] * b + N.add[j[:, None], j[None, :]]
    act = M.act[:, i] * b + N.act[:, j]
    return FiniteModule(M.ring, add, act)


def restrict_scalars(f: RingHom, M: FiniteModule) -> FiniteModule:
    """f_*M: the A-module M viewed over B through f: B -> A."""
    if M.ring != f.target:
        raise ValueError("module is not over the target of the hom")
    return FiniteModule(f.source, M.add, M.act[f.map])


def cyclic_module(R: FiniteRing, n: int) -> FiniteModule:
    """Z/n as an R-module through the unique ring hom R -> Z/n."""
    from .finalg import make_cyclic_ring

    Zn = make_cyclic_ring(n)
    homs = enumerate_homs(R, Zn)
    if len(homs) != 1:
        raise ValueError(f"Z/{n} is not canonically a module over {R.name or 'this ring'}")
    return restrict_scalars(homs[0], regular_module(Zn))


def ideal_module(R: FiniteRing, elements) -> tuple[FiniteModule, np.ndarray]:
    """An ideal of R as an R-module; also returns new index -> element of R."""
    els = np.array(sorted(set(int(e) for e in elements)), dtype=np.int64)
    pos = np.full(R.size, -1, dtype=np.int64)
    pos[els] = np.arange(len(els))
    add = pos[R.add[np.ix_(els, els)]]
    act = pos[R.mul[:, els]]
    if (add < 0).any() or (act < 0).any():
        raise ValueError("subset is not an ideal")
    return FiniteModule(R, add, act), els


def kernel_as_B_module(f: RingHom) -> tuple[FiniteModule, np.ndarray]:
    return ideal_module(f.source, kernel(f).elements)


def kernel_as_A_module(f: RingHom) -> tuple[FiniteModule, np.ndarray]:
    """ker(f) as a module over A = target of f, via a . b = b' b for any lift b'.

    Every lift is tried; if two lifts disagree a ``LiftDependenceError`` is
    raised (which happens exactly when the kernel is not square-zero).
    """
    if not is_surjective(f):
        raise NotSurjectiveError("kernel_as_A_module needs a surjective hom")
    B, A = f.source, f.target
    K, els = kernel_as_B_module(f)
    act = np.full((A.size, len(els)), -1, dtype=np.int64)
    for b in range(B.size):
        a = int(f.map[b])
        row = K.act[b]
        if act[a, 0] < 0:
            act[a] = row
        elif not np.array_equal(act[a], row):
            j = int(np.nonzero(act[a] != row)[0][0])
            raise LiftDependenceError(
                f"a={a}: lifts disagree on kernel element {int(els[j])}; "
                f"square witness {ideal_square_witness(kernel(f))}"
            )
    return FiniteModule(A, K.add, act), els


# --- verification ---------------------------------------------------------


def verify_module(M: FiniteModule) -> Report:
    rep = Report("module")
    R, a, act = M.ring, M.add, M.act
    n = M.size
    x = np.arange(n)
    rep.add("add_associative", (w := _first(a[a[:, :, None], x[None, None, :]] != a[x[:, None, None], a[None, :, :]])) is None, w)
    rep.add("add_commutative", (w := _first(a != a.T)) is None, w)
    rep.add("add_identity", (w := _first(a[0] != x)) is None, w)
    rep.add("add_inverse", (w := _first(M.neg < 0)) is None, w)
    rep.add("unital", (w := _first(act[R.one] != x)) is None, w)
    # r(m1 + m2) = r m1 + r m2
    rep.add("distributes_over_module_add", (w := _first(act[:, a] != a[act[:, :, None], act[:, None, :]])) is None, w)
    # (r1 + r2) m = r1 m + r2 m
    rep.add("distributes_over_ring_add", (w := _first(act[R.add] != a[act[:, None, :], act[None, :, :]])) is None, w)
    # (r1 r2) m = r1 (r2 m)
    rep.add("associative_action", (w := _first(act[R.mul] != act[np.arange(R.size)[:, None, None], act[None, :, :]])) is None, w)
    return rep


def verify_module_hom(h: ModuleHom) -> Report:
    M, N, f = h.source, h.target, h.map
    rep = Report("module hom")
    rep.add("same_ring", M.ring == N.ring)
    if M.ring != N.ring:
        return rep
    rep.add("additive", (w := _first(f[M.add] != N.add[f[:, None], f[None, :]])) is None, w)
    rep.add("action_compatible", (w := _first(f[M.act] != N.act[:, f])) is None, w)
    return rep


def verify_module_iso(h: ModuleHom) -> Report:
    """Every violated law with a witness, or a clean pass."""
    rep = verify_module_hom(h)
    rep.subject = "module iso"
    f = h.map
    seen: dict[int, int] = {}
    clash = None
    for m, v in enumerate(f.tolist()):
        if v in seen:
            clash = (seen[v], m)
            break
        seen[v] = m
    rep.add("injective", clash is None, clash)
    missing = sorted(set(range(h.target.size)) - set(f.tolist()))
    rep.add("surjective", not missing, missing[0] if missing else None)
    return rep


def iter_module_isos(M: FiniteModule, N: FiniteModule, budget: Budget | int | None = None):
    if M.ring != N.ring or M.size != N.size:
        return
    b = as_budget(budget)
    gens = _module_generators(M)
    if not gens:
        yield ModuleHom(M, N, np.zeros(1, dtype=np.int64))
        return
    for img in iter_additive_maps(M.add, N.add, gens, injective=True, budget=b):
        if np.array_equal(img[M.act], N.act[:, img]):
            yield ModuleHom(M, N, img)


def enumerate_module_isos(M: FiniteModule, N: FiniteModule, budget: Budget | int | None = None) -> list[ModuleHom]:
    return list(iter_module_isos(M, N, budget))


def _module_generators(M: FiniteModule) -> list[int]:
    span = np.zeros(M.size, dtype=bool)
    span[0] = True
    gens = []
    for x in range(M.size):
        if span[x]:
            continue
        gens.append(x)
        new = span.copy()
        for s in np.nonzero(span)[0]:
            cur = int(s)
            while True:
                cur = int(M.add[cur, x])
                if new[cur]:
                    break
                new[cur] = True
        span = new
    return gens


def module_orders(M: FiniteModule) -> np.ndarray:
    return _orders(M.add)


# --- serialization --------------------------------------------------------


def module_to_json(M: FiniteModule) -> dict:
    from .finalg import ring_to_json

    return {"ring": ring_to_json(M.ring), "size": M.size, "add": M.add.tolist(), "act": M.act.tolist()}


def module_from_json(d: dict) -> FiniteModule:
    from .finalg import ring_from_json

    M = FiniteModule(ring_from_json(d["ring"]), d["add"], d["act"])
    if M.size != d["size"]:
        raise ValueError("declared size does not match the tables")
    return M
