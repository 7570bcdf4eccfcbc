from itertools import product

from hypothesis import given
from hypothesis import strategies as st

from sqzext.finspace import (
    ContinuousMap,
    FinSpace,
    discrete,
    identity_map,
    indiscrete,
    is_closed_immersion_space,
    is_continuous,
    minimal_open,
    pushout,
    pushout_mediator,
    sierpinski,
    space_from_json,
    space_to_json,
    verify_space,
)


def generated_topology(n, seeds):
    opens = {frozenset(), frozenset(range(n))} | {frozenset(s) for s in seeds}
    changed = True
    while changed:
        changed = False
        for U in list(opens):
            for V in list(opens):
                for W in (U | V, U & V):
                    if W not in opens:
                        opens.add(W)
                        changed = True
    return FinSpace(n, opens)


@st.composite
def spaces(draw):
    n = draw(st.integers(1, 4))
    seeds = draw(st.lists(st.sets(st.integers(0, n - 1)), max_size=4))
    return generated_topology(n, seeds)


@given(spaces())
def test_generated_spaces_are_spaces(S):
    assert verify_space(S).ok
    for x in range(S.points):
        U = minimal_open(S, x)
        assert S.is_open(U) and x in U


@given(spaces())
def test_identity_is_continuous(S):
    assert is_continuous(identity_map(S))


def test_not_a_topology():
    assert not verify_space(FinSpace(3, [(), (0,), (1,), (0, 1, 2)])).ok


def test_sierpinski_minimal_opens():
    S = sierpinski()
    assert minimal_open(S, 0) == {0}
    assert minimal_open(S, 1) == {0, 1}


def test_continuity():
    S = sierpinski()
    assert is_continuous(ContinuousMap(S, S, (1, 1)))
    assert not is_continuous(ContinuousMap(S, S, (1, 0)))
    assert is_continuous(ContinuousMap(discrete(2), S, (1, 0)))
    assert not is_continuous(ContinuousMap(indiscrete(2), S, (1, 0)))


def test_closed_immersions():
    pt = discrete(1)
    S = sierpinski()
    assert not is_closed_immersion_space(ContinuousMap(pt, S, (0,)))  # open point
    assert is_closed_immersion_space(ContinuousMap(pt, S, (1,)))
    assert is_closed_immersion_space(identity_map(S))
    assert not is_closed_immersion_space(ContinuousMap(discrete(2), S, (0, 1)))


def test_wedge_pushout():
    pt = discrete(1)
    f = ContinuousMap(pt, discrete(2), (0,))
    P, jy, jz = pushout(f, f)
    assert P.points == 3
    assert jy.map == (0, 1) and jz.map == (0, 2)
    assert P.is_discrete()


def test_pushout_along_identity_is_target():
    S = sierpinski()
    pt = discrete(1)
    f = ContinuousMap(pt, S, (1,))
    P, jy, jz = pushout(f, identity_map(pt))
    assert P.points == 2 and set(P.opens) == set(S.opens)


def test_pushout_universal_property_exhaustive():
    # every cocone into a small target space factors uniquely
    pt = discrete(1)
    S = sierpinski()
    f = ContinuousMap(pt, S, (1,))
    g = ContinuousMap(pt, S, (1,))
    P, jy, jz = pushout(f, g)
    for T in (discrete(2), sierpinski(), indiscrete(2), discrete(1)):
        for u in product(range(T.points), repeat=2):
            for v in product(range(T.points), repeat=2):
                U, V = ContinuousMap(S, T, u), ContinuousMap(S, T, v)
                if not (is_continuous(U) and is_continuous(V)) or u[1] != v[1]:
                    continue
                w = pushout_mediator(jy, jz, U, V)
                assert w is not None
                candidates = [c for c in product(range(T.points), repeat=P.points)
                              if is_continuous(ContinuousMap(P, T, c))
                              and all(c[jy(y)] == u[y] for y in range(2))
                              and all(c[jz(z)] == v[z] for z in range(2))]
                assert candidates == [w.map]


def test_json_round_trip():
    S = sierpinski()
    assert space_from_json(space_to_json(S)) == S
