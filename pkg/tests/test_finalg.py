from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sqzext.finalg import (
    FiniteRing,
    Ideal,
    RingHom,
    enumerate_homs,
    enumerate_rings,
    fiber_product,
    hom_from_json,
    hom_to_json,
    idempotents,
    ideal_square_is_zero,
    is_hom,
    kernel,
    make_cyclic_ring,
    product_of,
    product_ring,
    quotient_ring,
    ring_from_json,
    ring_isomorphic,
    ring_to_json,
    verify_hom,
    verify_ideal,
    verify_ring,
    zero_ring,
)


def brute_force_homs(R, S):
    # every map with 0 -> 0, filtered by the hom axioms
    out = []
    for rest in product(range(S.size), repeat=R.size - 1):
        h = RingHom(R, S, (0,) + rest)
        if is_hom(h):
            out.append(h.map.tobytes())
    return sorted(out)


@given(st.integers(1, 12))
def test_cyclic_rings_are_rings(n):
    assert verify_ring(make_cyclic_ring(n)).ok


@given(st.lists(st.integers(1, 4), min_size=1, max_size=3))
def test_products_are_rings(ns):
    R, coords = product_of([make_cyclic_ring(n) for n in ns])
    assert verify_ring(R).ok
    assert R.size == int(np.prod(ns))
    assert len({tuple(c) for c in coords.tolist()}) == R.size


def test_broken_mul_table_fails_with_witness():
    R = make_cyclic_ring(4)
    mul = np.array(R.mul)
    mul[2, 3] = mul[3, 2] = 1
    rep = verify_ring(FiniteRing(R.add, mul, 1))
    assert not rep.ok
    assert all(c.witness is not None for c in rep.failures())


def test_zero_ring_hom_rules():
    Z = zero_ring()
    for n in (1, 2, 3, 4):
        R = make_cyclic_ring(n)
        assert len(enumerate_homs(R, Z)) == 1
        assert len(enumerate_homs(Z, R)) == (1 if n == 1 else 0)


@pytest.mark.parametrize("r,s", [(2, 2), (4, 2), (2, 4), (6, 3), (6, 2), (3, 2), (4, 4)])
def test_hom_enumeration_matches_brute_force(r, s):
    R, S = make_cyclic_ring(r), make_cyclic_ring(s)
    assert sorted(h.map.tobytes() for h in enumerate_homs(R, S)) == brute_force_homs(R, S)


def test_hom_enumeration_on_products_matches_brute_force():
    Z2 = make_cyclic_ring(2)
    P, _, _ = product_ring(Z2, Z2)
    for R, S in ((P, Z2), (P, P), (make_cyclic_ring(4), P)):
        assert sorted(h.map.tobytes() for h in enumerate_homs(R, S)) == brute_force_homs(R, S)


def test_small_hom_counts():
    assert len(enumerate_homs(make_cyclic_ring(4), make_cyclic_ring(2))) == 1
    assert len(enumerate_homs(make_cyclic_ring(2), make_cyclic_ring(3))) == 0


def test_isomorphism_search():
    Z6 = make_cyclic_ring(6)
    P, _, _ = product_ring(make_cyclic_ring(2), make_cyclic_ring(3))
    iso = ring_isomorphic(Z6, P)
    assert iso is not None and verify_hom(iso).ok
    Q, _, _ = product_ring(make_cyclic_ring(2), make_cyclic_ring(2))
    assert ring_isomorphic(make_cyclic_ring(4), Q) is None


def test_idempotents_of_z6():
    assert idempotents(make_cyclic_ring(6)) == [0, 1, 3, 4]


def test_quotient_and_kernel():
    Z4 = make_cyclic_ring(4)
    I = Ideal(Z4, [0, 2])
    assert verify_ideal(I).ok
    Q, q = quotient_ring(Z4, I)
    assert Q.size == 2 and ring_isomorphic(Q, make_cyclic_ring(2)) is not None
    assert sorted(kernel(q).elements) == [0, 2]
    assert ideal_square_is_zero(kernel(q))
    assert not verify_ideal(Ideal(Z4, [0, 1])).ok


def test_fiber_product_of_z4_over_z2():
    Z4, Z2 = make_cyclic_ring(4), make_cyclic_ring(2)
    q = enumerate_homs(Z4, Z2)[0]
    fp = fiber_product(q, q)
    assert fp.ring.size == 8
    assert verify_ring(fp.ring).ok
    for h in (fp.p1, fp.p2, fp.diag):
        assert verify_hom(h).ok
    # brute-force count of agreeing pairs
    assert fp.ring.size == sum(q(b) == q(c) for b in range(4) for c in range(4))


def test_ring_counts_by_order():
    # one ring per isomorphism class; pairwise non-isomorphic
    for n, expected in ((2, 1), (3, 1), (4, 4), (9, 4)):
        rings = enumerate_rings(n)
        assert len(rings) == expected
        for i, R in enumerate(rings):
            assert verify_ring(R).ok
            for S in rings[i + 1:]:
                assert ring_isomorphic(R, S) is None


def test_order_eight_contains_named_rings():
    rings = enumerate_rings(8)
    assert len(rings) == 10
    Z2, Z4 = make_cyclic_ring(2), make_cyclic_ring(4)
    named = [make_cyclic_ring(8), product_of([Z4, Z2])[0], product_of([Z2, Z2, Z2])[0]]
    for R in named:
        assert sum(ring_isomorphic(R, S) is not None for S in rings) == 1


def test_json_round_trip():
    R = product_ring(make_cyclic_ring(2), make_cyclic_ring(3))[0]
    assert ring_from_json(ring_to_json(R)) == R
    h = enumerate_homs(make_cyclic_ring(4), make_cyclic_ring(2))[0]
    assert hom_from_json(hom_to_json(h)) == h
