import numpy as np
import pytest

from sqzext.exal import (
    ExalMorphism,
    SquareZeroExtension,
    classify_extensions,
    compose_morphisms,
    enumerate_extensions,
    exal_homs,
    extension_from_json,
    extension_to_json,
    identity_morphism,
    trivial_extension,
    verify_exal_morphism,
    verify_extension,
)
from sqzext.finalg import enumerate_homs, is_bijective, make_cyclic_ring, product_ring
from sqzext.modalg import cyclic_module, regular_module, zero_module

Z2, Z3, Z4 = make_cyclic_ring(2), make_cyclic_ring(3), make_cyclic_ring(4)
CASES = [(Z2, regular_module(Z2)), (Z3, regular_module(Z3)), (Z4, cyclic_module(Z4, 2))]


def z4_extension(alpha_one=2):
    f = enumerate_homs(Z4, Z2)[0]
    return SquareZeroExtension(f, regular_module(Z2), [0, alpha_one])


def test_z4_over_z2_passes():
    assert verify_extension(z4_extension()).ok


def test_alpha_outside_kernel_fails():
    rep = verify_extension(z4_extension(alpha_one=1))
    assert not rep.get("alpha_into_kernel").ok
    assert rep.get("alpha_into_kernel").witness == 1


def test_non_square_zero_kernel_fails():
    P, p1, _ = product_ring(Z2, Z2)
    # kernel {(0,0),(0,1)} squares to itself
    E = SquareZeroExtension(p1, regular_module(Z2), [0, 1])
    rep = verify_extension(E)
    assert not rep.get("kernel_square_zero").ok


@pytest.mark.parametrize("A,M", CASES + [(Z2, zero_module(Z2))])
def test_trivial_extension(A, M):
    assert verify_extension(trivial_extension(A, M)).ok


@pytest.mark.parametrize("A,M,count,classes", [
    (Z2, regular_module(Z2), 2, 2),
    (Z3, regular_module(Z3), 18, 3),
    (Z4, cyclic_module(Z4, 2), 8, 2),
    (Z2, zero_module(Z2), 1, 1),
])
def test_enumeration_and_classes(A, M, count, classes):
    exts = enumerate_extensions(A, M)
    assert len(exts) == count
    assert len(set(exts)) == count
    assert all(verify_extension(E).ok for E in exts)
    cl = classify_extensions(A, M, extensions=exts)
    assert cl.count == classes
    assert sorted(i for c in cl.classes for i in c) == list(range(count))


def test_classification_is_deterministic():
    a = classify_extensions(Z3, regular_module(Z3))
    b = classify_extensions(Z3, regular_module(Z3))
    assert a.classes == b.classes


@pytest.mark.parametrize("A,M", CASES)
def test_every_morphism_is_bijective(A, M):
    exts = enumerate_extensions(A, M)
    for E in exts:
        for F in exts:
            for mor in exal_homs(E, F):
                assert verify_exal_morphism(mor).ok
                assert is_bijective(mor.h)


def test_identity_and_composition():
    exts = enumerate_extensions(Z3, regular_module(Z3))
    E = exts[0]
    assert verify_exal_morphism(identity_morphism(E)).ok
    for F in exts:
        for m1 in exal_homs(E, F):
            for m2 in exal_homs(F, E):
                assert verify_exal_morphism(compose_morphisms(m2, m1)).ok


def test_wrong_direction_alpha_fails_morphism_check():
    E = z4_extension()
    T = trivial_extension(Z2, regular_module(Z2))
    # Z/4 and Z/2[e] are not isomorphic, so no morphisms
    assert exal_homs(E, T) == []
    bogus = ExalMorphism(E.f, E, E)
    assert not verify_exal_morphism(bogus).ok


def test_json_round_trip():
    E = z4_extension()
    assert extension_from_json(extension_to_json(E)) == E
    assert np.array_equal(extension_from_json(extension_to_json(E)).alpha, [0, 2])
