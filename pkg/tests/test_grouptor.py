import random

import numpy as np
import pytest

from sqzext.corpus import corrupt_group_object, random_pairs
from sqzext.equivfun import psi
from sqzext.exal import enumerate_extensions, trivial_extension
from sqzext.finalg import enumerate_homs, is_bijective, make_cyclic_ring, product_ring
from sqzext.grouptor import (
    Torsor,
    check_associativity_lemma,
    check_translation_lemma,
    classify_torsors,
    enumerate_torsor_structures,
    enumerate_torsors,
    group_object,
    torsor_from_json,
    torsor_homs,
    torsor_to_json,
    verify_group_object,
    verify_torsor,
    verify_torsor_morphism,
)
from sqzext.modalg import cyclic_module, regular_module, zero_module

Z2, Z3, Z4 = make_cyclic_ring(2), make_cyclic_ring(3), make_cyclic_ring(4)
CASES = [(Z2, regular_module(Z2)), (Z3, regular_module(Z3)), (Z4, cyclic_module(Z4, 2))]


@pytest.mark.parametrize("A,M", random_pairs(seed=1, count=10))
def test_group_object_random(A, M):
    assert verify_group_object(group_object(A, M)).ok


def test_corruptions_rejected_with_witness():
    rng = random.Random(7)
    G = group_object(Z4, cyclic_module(Z4, 2))
    for _ in range(10):
        bad, where = corrupt_group_object(G, rng)
        rep = verify_group_object(bad)
        assert not rep.ok
        assert any(c.witness is not None for c in rep.failures()), where


@pytest.mark.parametrize("A,M", CASES)
def test_ring_side_and_cocycle_side_agree(A, M):
    # torsors from enumerate_rings vs psi of cocycle extensions
    ring_side = enumerate_torsors(A, M)
    exts = enumerate_extensions(A, M)
    assert classify_torsors(ring_side).count == classify_torsors([psi(E) for E in exts]).count


def test_torsor_structure_counts():
    f = enumerate_homs(Z4, Z2)[0]
    assert len(enumerate_torsor_structures(f, regular_module(Z2))) == 1
    triv = trivial_extension(Z3, regular_module(Z3))
    assert len(enumerate_torsor_structures(triv.f, regular_module(Z3))) == 2
    P, p1, _ = product_ring(Z2, Z2)
    assert enumerate_torsor_structures(p1, regular_module(Z2)) == []


@pytest.mark.parametrize("A,M", CASES)
def test_lemmas_on_every_torsor(A, M):
    for T in enumerate_torsors(A, M):
        vr = verify_torsor(T)
        assert vr.ok
        assert check_translation_lemma(T, vr).ok
        assert check_associativity_lemma(T, vr).ok


def test_lemmas_not_applicable_on_non_torsors():
    E = trivial_extension(Z2, regular_module(Z2))
    T = psi(E)
    bad = Torsor(T.f, T.module, np.zeros_like(T.tau))
    assert not verify_torsor(bad).ok
    assert not check_translation_lemma(bad).applicable


def test_non_square_zero_kernel_gives_consequence_witness():
    P, p1, _ = product_ring(Z2, Z2)
    T = Torsor(p1, zero_module(Z2), np.arange(4))
    rep = verify_torsor(T)
    assert not rep.get("consequence.kernel_square_zero").ok
    assert rep.get("consequence.kernel_square_zero").witness is not None


def test_torsor_morphisms_bijective():
    ts = enumerate_torsors(Z3, regular_module(Z3))
    for S in ts:
        for T in ts:
            for mor in torsor_homs(S, T):
                assert verify_torsor_morphism(mor).ok and is_bijective(mor.h)


def test_json_round_trip():
    T = psi(trivial_extension(Z2, regular_module(Z2)))
    assert torsor_from_json(torsor_to_json(T)) == T
