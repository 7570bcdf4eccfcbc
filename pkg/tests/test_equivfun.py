import pytest

from sqzext.equivfun import psi, psi_inverse, psi_on_morphism, verify_equivalence
from sqzext.exal import SquareZeroExtension, compose_morphisms, enumerate_extensions, exal_homs, identity_morphism
from sqzext.finalg import enumerate_homs, make_cyclic_ring
from sqzext.grouptor import check_translation_lemma, verify_torsor, verify_torsor_morphism
from sqzext.modalg import cyclic_module, regular_module, zero_module

Z2, Z3, Z4 = make_cyclic_ring(2), make_cyclic_ring(3), make_cyclic_ring(4)


@pytest.mark.parametrize("A,M,classes", [
    (Z2, regular_module(Z2), 2),
    (Z3, regular_module(Z3), 3),
    (Z4, cyclic_module(Z4, 2), 2),
    (Z2, zero_module(Z2), 1),
])
def test_equivalence(A, M, classes):
    rep = verify_equivalence(A, M)
    assert rep.ok, rep.to_dict()
    assert rep.counts["extension_classes"] == rep.counts["torsor_classes"] == classes
    assert rep.counts["exal_morphisms"] == rep.counts["torsor_morphisms"]


def test_psi_formula_on_z4():
    f = enumerate_homs(Z4, Z2)[0]
    E = SquareZeroExtension(f, regular_module(Z2), [0, 2])
    T = psi(E)
    assert verify_torsor(T).ok
    # tau(m, b) = alpha(m) + b
    for m in range(2):
        for b in range(4):
            assert T.act(m, b) == (E.alpha[m] + b) % 4
    assert check_translation_lemma(T).ok
    assert psi_inverse(T) == E


def test_psi_is_functorial():
    exts = enumerate_extensions(Z3, regular_module(Z3))
    E = exts[0]
    idm = psi_on_morphism(identity_morphism(E))
    assert idm.source == idm.target == psi(E)
    for F in exts[:6]:
        for m1 in exal_homs(E, F):
            assert verify_torsor_morphism(psi_on_morphism(m1)).ok
            for m2 in exal_homs(F, E):
                assert psi_on_morphism(compose_morphisms(m2, m1)).h == compose_morphisms(m2, m1).h
