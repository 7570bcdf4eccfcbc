import random

import numpy as np
import pytest

from sqzext.corpus import corrupt_cogroup, drop_second_summand, sierpinski_instance, spec_instance
from sqzext.finalg import (
    RingHom,
    enumerate_homs,
    enumerate_rings,
    fiber_product,
    is_bijective,
    make_cyclic_ring,
    product_ring,
)
from sqzext.finspace import ContinuousMap, discrete, minimal_open
from sqzext.grouptor import group_object
from sqzext.modalg import regular_module
from sqzext.sheafspace import (
    RingSheaf,
    cogroup_structure,
    coproduct_under_X,
    direct_sum_space,
    e_morphism,
    identity_morphism,
    is_closed_immersion,
    kernel_sheaf,
    module_on_spec,
    morphism_from_json,
    morphism_to_json,
    pushforward,
    sheaf_from_json,
    sheaf_from_stalks,
    sheaf_to_json,
    spec_finite_ring,
    spec_morphism,
    stalk,
    theta,
    verify_cogroup,
    verify_morphism,
    verify_sheaf,
    verify_theta,
)

Z1, Z2, Z3, Z4 = (make_cyclic_ring(n) for n in (1, 2, 3, 4))


def z4_immersion():
    q = enumerate_homs(Z4, Z2)[0]
    return spec_morphism(q, spec_finite_ring(Z2), spec_finite_ring(Z4))


# --- sheaves ---------------------------------------------------------------


def test_product_sections_pass():
    assert verify_sheaf(sheaf_from_stalks([Z2, Z2])).ok


def test_diagonal_sections_fail_gluing():
    S = discrete(2)
    good = sheaf_from_stalks([Z2, Z2])
    full = S.full
    secs = list(good.sections)
    secs[full] = Z2
    res = dict(good.res)
    for j in S.subopens(full):
        res[(full, j)] = RingHom(Z2, secs[j], [0, 1] if secs[j].size == 2 else [0, 0])
    rep = verify_sheaf(RingSheaf(S, tuple(secs), res))
    assert not rep.get("gluing").ok
    assert rep.get("gluing").witness["problem"] == "not surjective onto compatible families"


def test_one_point_space():
    assert verify_sheaf(sheaf_from_stalks([Z4])).ok
    S = discrete(1)
    bad = RingSheaf(S, (Z2, Z4), {(0, 0): RingHom(Z2, Z2, [0, 1]), (1, 1): RingHom(Z4, Z4, range(4)),
                                  (1, 0): RingHom(Z4, Z2, [0, 1, 0, 1])})
    assert not verify_sheaf(bad).get("empty_sections_zero").ok


def test_pushforward_examples():
    F = sheaf_from_stalks([Z2, Z3])
    assert pushforward(identity_morphism(F).cmap, F) == F
    pt = sheaf_from_stalks([Z4])
    inc = ContinuousMap(pt.space, discrete(2), (0,))
    sky = pushforward(inc, pt)
    assert verify_sheaf(sky).ok
    assert sky.at({1}).size == 1 and sky.at({0}).size == 4
    collapse = ContinuousMap(F.space, discrete(1), (0, 0))
    assert pushforward(collapse, F).at({0}).size == 6


def test_stalks():
    sp = spec_finite_ring(make_cyclic_ring(6))
    assert sp.idempotents == (3, 4)
    assert stalk(sp.sheaf, 0).size == 2
    X, _ = sierpinski_instance()
    assert stalk(X, 1) == X.at({0, 1})
    assert stalk(sheaf_from_stalks([Z2, Z3]), 1) == Z3


def test_spec_examples():
    d6 = spec_finite_ring(make_cyclic_ring(6))
    assert [d6.sheaf.stalk(x).size for x in range(d6.sheaf.space.points)] == [2, 3]
    assert spec_finite_ring(Z4).sheaf.space.points == 1
    d = spec_finite_ring(Z2)
    assert d.sheaf.space.points == 1 and d.sheaf.stalk(0) == Z2
    with pytest.raises(ValueError):
        spec_finite_ring(Z1)


def test_kernel_sheaf_examples():
    X = spec_finite_ring(Z2).sheaf
    K, _ = kernel_sheaf(identity_morphism(X))
    assert all(M.size == 1 for M in K.sections)
    _, M = spec_instance("zmod:2", "regular")
    ds = direct_sum_space(X, M)
    K, embeds = kernel_sheaf(ds.i_X)
    for V in range(len(X.space.opens)):
        assert embeds[V].tolist() == ds.alpha[V].tolist()
    K, embeds = kernel_sheaf(z4_immersion())
    assert embeds[K.space.full].tolist() == [0, 2]
    assert verify_sheaf(K).ok


@pytest.mark.parametrize("rs,ms,size", [("zmod:2", "regular", 4), ("zmod:2", "zero", 2), ("zmod:6", "regular", 36)])
def test_direct_sum_space(rs, ms, size):
    spec, M = spec_instance(rs, ms)
    ds = direct_sum_space(spec.sheaf, M)
    assert verify_sheaf(ds.sheaf).ok
    assert ds.sheaf.sections[ds.sheaf.space.full].size == size
    assert verify_morphism(ds.i_X).ok


# --- coproducts ------------------------------------------------------------


def test_coproduct_of_i_x_with_itself():
    spec, M = spec_instance("zmod:6", "regular")
    ds = direct_sum_space(spec.sheaf, M)
    C = coproduct_under_X(ds.i_X, ds.i_X)
    assert verify_sheaf(C.sheaf).ok
    for U in range(len(spec.sheaf.space.opens)):
        fp = fiber_product(ds.i_X.comorph[U], ds.i_X.comorph[U])
        assert C.sheaf.sections[U] == fp.ring


def test_coproduct_with_identity_returns_target():
    f = z4_immersion()
    C = coproduct_under_X(f, identity_morphism(f.source))
    assert C.sheaf.space.points == f.target.space.points
    assert all(is_bijective(h) for h in C.j_Y.comorph.values())


def test_coproduct_of_two_z4_immersions():
    f = z4_immersion()
    C = coproduct_under_X(f, f)
    assert C.sheaf.sections[C.sheaf.space.full].size == 8
    for j in (C.j_Y, C.j_Z, C.fg):
        assert verify_morphism(j).ok


def test_coproduct_universal_property_on_cocones():
    f = z4_immersion()
    C = coproduct_under_X(f, f)
    full = C.sheaf.space.full
    q = f.comorph[f.target.space.full]
    for T in [R for n in (2, 4, 8) for R in enumerate_rings(n)]:
        for u in enumerate_homs(T, Z4):
            for v in enumerate_homs(T, Z4):
                if not np.array_equal(q.map[u.map], q.map[v.map]):
                    continue
                mediators = [w for w in enumerate_homs(T, C.sheaf.sections[full])
                             if np.array_equal(C.j_Y.comorph[full].map[w.map], u.map)
                             and np.array_equal(C.j_Z.comorph[full].map[w.map], v.map)]
                assert len(mediators) == 1


def test_comparison_maps_at_closed_immersion_are_isos():
    P, p1, _ = product_ring(Z2, Z2)
    f = spec_morphism(p1, spec_finite_ring(Z2), spec_finite_ring(P))
    assert is_closed_immersion(f)
    X, Y = f.source, f.target
    for x in range(X.space.points):
        V = Y.space.index(minimal_open(Y.space, f.cmap(x)))
        U = X.space.index(minimal_open(X.space, x))
        assert is_bijective(RingHom(X.sections[f.pre(V)], X.sections[U], X.restrict(f.pre(V), U)))


# --- cogroup and theta -----------------------------------------------------


@pytest.mark.parametrize("rs,ms", [("zmod:2", "regular"), ("zmod:6", "regular"), ("zmod:2", "zero"), ("zmod:4", "zmod:2")])
def test_cogroup_passes_and_matches_group_object(rs, ms):
    spec, M = spec_instance(rs, ms)
    cg = cogroup_structure(spec.sheaf, M)
    assert verify_cogroup(cg).ok
    for U in range(len(spec.sheaf.space.opens)):
        G = group_object(spec.sheaf.sections[U], M.sections[U])
        assert np.array_equal(cg.plus.comorph[U].map, G.plus)
        assert np.array_equal(cg.e.comorph[U].map, G.e)
        assert np.array_equal(cg.inv.comorph[U].map, G.inv)


def test_cogroup_ringed_mode():
    X, M = sierpinski_instance()
    cg = cogroup_structure(X, M)
    rep = verify_cogroup(cg)
    assert rep.ok and "ringed" in rep.subject


def test_dropped_summand_fails_counit():
    spec, M = spec_instance("zmod:2", "regular")
    rep = verify_cogroup(drop_second_summand(cogroup_structure(spec.sheaf, M)))
    counit = [c for c in rep.failures() if "counit" in c.name]
    assert counit and counit[0].witness is not None


def test_cogroup_corruptions_rejected():
    rng = random.Random(3)
    spec, M = spec_instance("zmod:6", "regular")
    cg = cogroup_structure(spec.sheaf, M)
    for _ in range(6):
        bad, where = corrupt_cogroup(cg, rng)
        rep = verify_cogroup(bad)
        assert not rep.ok and any(c.witness is not None for c in rep.failures()), where


def test_theta_triangles():
    f = z4_immersion()
    M = module_on_spec(spec_finite_ring(Z2), regular_module(Z2))
    th = theta(f, M)
    ds = th.dsum
    assert verify_theta(th, f, e_morphism(f.source, M, ds)).ok


def test_theta_identity_degenerate():
    spec, M = spec_instance("zmod:2", "zero")
    f = identity_morphism(spec.sheaf)
    th = theta(f, M)
    assert verify_theta(th, f, e_morphism(spec.sheaf, M, th.dsum)).ok


def test_json_round_trips():
    F = sheaf_from_stalks([Z2, Z3])
    assert sheaf_from_json(sheaf_to_json(F)) == F
    f = z4_immersion()
    assert morphism_from_json(morphism_to_json(f)) == f
