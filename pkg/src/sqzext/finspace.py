"""Finite topological spaces given by their explicit family of open sets."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, product as iproduct

from .report import Report


def _canon(opens) -> tuple[frozenset, ...]:
    return tuple(sorted({frozenset(int(p) for p in U) for U in opens}, key=lambda U: (len(U), sorted(U))))


@dataclass(frozen=True)
class FinSpace:
    points: int
    opens: tuple[frozenset, ...]

    def __post_init__(self):
        object.__setattr__(self, "opens", _canon(self.opens))

    @cached_property
    def _index(self) -> dict[frozenset, int]:
        return {U: i for i, U in enumerate(self.opens)}

    def index(self, U) -> int:
        return self._index[frozenset(U)]

    def is_open(self, U) -> bool:
        return frozenset(U) in self._index

    @property
    def full(self) -> int:
        return self.index(range(self.points))

    @property
    def empty(self) -> int:
        return self.index(())

    def subopens(self, i: int) -> list[int]:
        """Indices of opens contained in opens[i] (including itself)."""
        U = self.opens[i]
        return [j for j, V in enumerate(self.opens) if V <= U]

    def is_discrete(self) -> bool:
        return len(self.opens) == 2**self.points


@dataclass(frozen=True)
class ContinuousMap:
    source: FinSpace
    target: FinSpace
    map: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "map", tuple(int(p) for p in self.map))
        if len(self.map) != self.source.points or any(not 0 <= p < self.target.points for p in self.map):
            raise ValueError("point map does not fit source/target")

    def preimage(self, V) -> frozenset:
        V = set(V)
        return frozenset(x for x, y in enumerate(self.map) if y in V)

    def image(self) -> frozenset:
        return frozenset(self.map)

    def __call__(self, x: int) -> int:
        return self.map[x]


def discrete(n: int) -> FinSpace:
    pts = range(n)
    return FinSpace(n, [c for k in range(n + 1) for c in combinations(pts, k)])


def indiscrete(n: int) -> FinSpace:
    return FinSpace(n, [(), tuple(range(n))])


def sierpinski() -> FinSpace:
    return FinSpace(2, [(), (0,), (0, 1)])


def identity_map(S: FinSpace) -> ContinuousMap:
    return ContinuousMap(S, S, tuple(range(S.points)))


def compose_maps(g: ContinuousMap, f: ContinuousMap) -> ContinuousMap:
    return ContinuousMap(f.source, g.target, tuple(g.map[x] for x in f.map))


def verify_space(S: FinSpace) -> Report:
    rep = Report("finite space")
    rep.add("has_empty", S.is_open(()))
    rep.add("has_full", S.is_open(range(S.points)))
    rep.add("within_points", all(U <= frozenset(range(S.points)) for U in S.opens))
    bad_u = bad_i = None
    for U, V in combinations(S.opens, 2):
        if bad_u is None and not S.is_open(U | V):
            bad_u = (sorted(U), sorted(V))
        if bad_i is None and not S.is_open(U & V):
            bad_i = (sorted(U), sorted(V))
    rep.add("closed_under_union", bad_u is None, bad_u)
    rep.add("closed_under_intersection", bad_i is None, bad_i)
    return rep


def verify_continuous(f: ContinuousMap) -> Report:
    rep = Report("continuous map")
    bad = next((sorted(V) for V in f.target.opens if not f.source.is_open(f.preimage(V))), None)
    rep.add("preimages_open", bad is None, bad)
    return rep


def is_continuous(f: ContinuousMap) -> bool:
    return verify_continuous(f).ok


def minimal_open(S: FinSpace, x: int) -> frozenset:
    if not 0 <= x < S.points:
        raise ValueError("point outside the space")
    out = frozenset(range(S.points))
    for U in S.opens:
        if x in U:
            out &= U
    return out


def is_closed(S: FinSpace, C) -> bool:
    return S.is_open(frozenset(range(S.points)) - frozenset(C))


def is_closed_immersion_space(f: ContinuousMap) -> bool:
    """Injective, closed image, homeomorphism onto the image with the subspace topology."""
    if len(set(f.map)) != len(f.map) or not is_continuous(f):
        return False
    if not is_closed(f.target, f.image()):
        return False
    subspace = {frozenset(f.preimage(V)) for V in f.target.opens}
    return subspace == set(f.source.opens)


def pushout(f: ContinuousMap, g: ContinuousMap) -> tuple[FinSpace, ContinuousMap, ContinuousMap]:
    """Y +_X Z for f: X -> Y, g: X -> Z.

    Points are the classes of Y ⊔ Z under f(x) ~ g(x): first the classes that
    meet Y (ordered by least Y member), then the remaining Z classes (by
    least Z member).  Opens are the sets whose preimages in Y and Z are open.
    """
    if f.source != g.source:
        raise ValueError("pushout needs maps from a common source")
    Y, Z = f.target, g.target
    ny, nz = Y.points, Z.points
    parent = list(range(ny + nz))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for x in range(f.source.points):
        a, b = find(f.map[x]), find(ny + g.map[x])
        if a != b:
            parent[max(a, b)] = min(a, b)
    label: dict[int, int] = {}
    for i in range(ny + nz):
        r = find(i)
        if r not in label:
            label[r] = len(label)
    jy = tuple(label[find(i)] for i in range(ny))
    jz = tuple(label[find(ny + i)] for i in range(nz))
    n = len(label)
    opens = []
    for bits in iproduct((0, 1), repeat=n):
        W = {p for p in range(n) if bits[p]}
        if Y.is_open({y for y in range(ny) if jy[y] in W}) and Z.is_open({z for z in range(nz) if jz[z] in W}):
            opens.append(W)
    P = FinSpace(n, opens)
    return P, ContinuousMap(Y, P, jy), ContinuousMap(Z, P, jz)


def pushout_mediator(jy: ContinuousMap, jz: ContinuousMap, u: ContinuousMap, v: ContinuousMap) -> ContinuousMap | None:
    """The unique continuous w with w∘jy = u and w∘jz = v, or None."""
    P = jy.target
    w = [-1] * P.points
    for src, tgt in ((jy, u), (jz, v)):
        for i, p in enumerate(src.map):
            if w[p] not in (-1, tgt.map[i]):
                return None
            w[p] = tgt.map[i]
    if -1 in w:
        return None
    m = ContinuousMap(P, u.target, tuple(w))
    return m if is_continuous(m) else None


def space_to_json(S: FinSpace) -> dict:
    return {"points": S.points, "opens": [sorted(U) for U in S.opens]}


def space_from_json(d: dict) -> FinSpace:
    return FinSpace(d["points"], [tuple(U) for U in d["opens"]])
