from itertools import product

import pytest
from hypothesis import given, strategies as st

from thetakit.core import MonotoneMap
from thetakit.delta import DeltaOracle
from thetakit.fixtures import build_non_functorial, non_elegant
from thetakit.presheaf import (
    Presheaf, PresheafError, PresheafMap, boundary, check_e_prime, classify_points, dumps,
    empty_presheaf, ez_decompose, find_representing, image_presheaf, inclusion, latching, loads,
    map_image_class, product_presheaf, pushout_presheaf, relative_latching_mono,
    representable_map, strong_pushout, sub_presheaf, terminal_presheaf, yoneda,
)
from thetakit.theta import theta_tower
from thetakit.unionfind import UnionFind

delta = DeltaOracle()
theta2 = theta_tower(2)


def m(*values, target):
    return MonotoneMap(len(values) - 1, target, tuple(values))


def test_yoneda_counts_and_nondegenerate_points():
    F1 = yoneda(delta, 1, 3)
    F1.validate()
    assert F1.size(1) == 3
    assert F1.counts() == [k + 2 for k in range(4)]
    assert classify_points(F1).nondegenerate[1] == (m(0, 1, target=1),)


def test_nondegenerate_points_of_representables_are_plus_maps():
    for c in range(3):
        F = yoneda(delta, c, 3)
        pc = classify_points(F)
        for d in F.objects:
            plus = {f for f in delta.hom(d, c) if len(set(f.values)) == d + 1}
            assert set(pc.nondegenerate[d]) == plus


def test_product_of_two_intervals():
    F1 = yoneda(delta, 1, 3)
    sq = product_presheaf(F1, F1)
    sq.validate()
    assert sq.counts() == [(k + 2) ** 2 for k in range(4)]
    assert classify_points(sq).nd_counts() == [4, 5, 2, 0]


def test_pushout_over_empty_is_coproduct():
    X, Y = yoneda(delta, 1, 2), yoneda(delta, 2, 2)
    Z = empty_presheaf(delta, 2)
    f = PresheafMap(Z, X, {c: {} for c in Z.objects})
    g = PresheafMap(Z, Y, {c: {} for c in Z.objects})
    P, inl, inr = pushout_presheaf(f, g)
    P.validate()
    assert P.counts() == [a + b for a, b in zip(X.counts(), Y.counts())]
    assert inl.is_mono() and inr.is_mono()


def test_pushout_of_a_map_with_itself_is_its_target():
    s = m(0, 0, 1, target=1)
    F = representable_map(delta, s, 3)
    P, inl, inr = pushout_presheaf(F, F)
    P.validate()
    assert P.counts() == yoneda(delta, 1, 3).counts() and inl.is_epi()


def test_ez_decompose_examples():
    F1 = yoneda(delta, 1, 3)
    dec = ez_decompose(F1, 2, m(0, 1, 1, target=1))
    assert dec.unique
    assert dec.sigma == m(0, 1, 1, target=1)
    assert dec.y == m(0, 1, target=1)
    x = m(0, 1, target=1)
    dec = ez_decompose(F1, 1, x)
    assert dec.sigma == delta.identity(1) and dec.y == x


def test_every_point_of_a_representable_decomposes_once():
    for c in range(5):
        F = yoneda(delta, c, 4)
        pc = classify_points(F)
        for t in F.objects:
            for x in F(t):
                assert len(ez_decompose(F, t, x, pc).pairs) == 1


def test_check_e_prime_examples():
    assert check_e_prime(terminal_presheaf(delta, 3), 2)
    assert check_e_prime(yoneda(delta, 2, 3), 3)
    bad = terminal_presheaf(non_elegant(), 1)
    verdict = check_e_prime(bad, "a")
    assert not verdict
    assert verdict.witness["kind"] == "collision"
    assert len(verdict.witness["pairs"]) == 2


def test_latching_examples():
    F1 = yoneda(delta, 1, 3)
    assert len(latching(F1, 0)) == 0
    sq = product_presheaf(F1, F1)
    for c in sq.objects:
        L = latching(sq, c)
        assert L.q_bijective
    assert len(latching(sq, 1)) == 4


def test_relative_latching_identity_and_empty():
    Y = product_presheaf(yoneda(delta, 1, 3), yoneda(delta, 1, 3))
    ident = PresheafMap(Y, Y, {c: {y: y for y in Y(c)} for c in Y.objects})
    empty = empty_presheaf(delta, 3)
    from_empty = PresheafMap(empty, Y, {c: {} for c in Y.objects})
    for c in Y.objects:
        assert relative_latching_mono(ident, c)
        assert bool(relative_latching_mono(from_empty, c)) == latching(Y, c).q_bijective


def test_relative_latching_boundary_inclusion():
    dF1 = boundary(delta, 1, 3)
    assert dF1.counts() == [2, 2, 2, 2]
    f = inclusion(dF1, yoneda(delta, 1, 3))
    for c in range(4):
        assert relative_latching_mono(f, c)


def test_relative_latching_requires_mono():
    s = m(0, 0, target=0)
    with pytest.raises(PresheafError):
        relative_latching_mono(representable_map(delta, s, 2), 1)


def test_strong_pushout_examples():
    s = m(0, 0, 1, target=1)
    res = strong_pushout(delta, s, s)
    assert res.ok and res.apex == 1
    assert delta.is_identity(res.tau1) and delta.is_identity(res.tau2)
    res = strong_pushout(delta, m(0, 0, 1, target=1), m(0, 1, 1, target=1))
    assert res.ok and res.apex == 0
    assert res.tau1 == res.tau2 == m(0, 0, target=0)


def test_strong_pushouts_exist_in_theta2():
    for c in theta2.objects(3):
        minus = theta2.minus_from(c)
        for s1, s2 in product(minus, repeat=2):
            assert strong_pushout(theta2, s1, s2).ok


def test_strong_pushout_fails_for_non_elegant_fixture():
    o = non_elegant()
    p, q = o.arrows["p"], o.arrows["q"]
    res = strong_pushout(o, p, q)
    assert not res.ok


def test_yoneda_image_classes():
    s0 = m(0, 0, target=0)
    assert map_image_class(representable_map(delta, s0, 3)) == "epi"
    d0 = m(1, target=1)
    assert map_image_class(representable_map(delta, d0, 3)) == "mono"
    assert map_image_class(representable_map(delta, delta.identity(2), 3)) == "both"


def test_image_of_idempotent_is_representable():
    eps = m(0, 0, target=1)
    image = image_presheaf(representable_map(delta, eps, 1))
    found = find_representing(image)
    assert found is not None and found[0] == 0


def test_validation_rejects_bad_tables():
    with pytest.raises(PresheafError) as err:
        build_non_functorial()
    assert err.value.witness["objects"]
    F = yoneda(delta, 1, 1)
    with pytest.raises(PresheafError):
        Presheaf(delta, 1, {0: F(0)}, F.action)
    action = dict(F.action)
    action.pop(delta.identity(0))
    with pytest.raises(PresheafError):
        Presheaf(delta, 1, F.elements, action)


def test_sub_presheaf_must_be_closed():
    F = yoneda(delta, 1, 2)
    with pytest.raises(PresheafError):
        sub_presheaf(F, lambda c, x: c == 1)


@pytest.mark.parametrize("make", [
    lambda: yoneda(delta, 2, 3),
    lambda: product_presheaf(yoneda(delta, 1, 2), yoneda(delta, 2, 2)),
    lambda: pushout_presheaf(representable_map(delta, m(0, 0, 1, target=1), 2),
                             representable_map(delta, m(0, 1, 1, target=1), 2))[0],
    lambda: boundary(theta2, theta2.objects(2)[2], 2),
    lambda: yoneda(theta_tower(1, "delta"), theta_tower(1, "delta").objects(2)[2], 2),
])
def test_json_roundtrip(make):
    X = make()
    text = dumps(X)
    Y = loads(text)
    assert dumps(Y) == text
    assert Y.counts() == X.counts()
    assert classify_points(Y).nd_counts() == classify_points(X).nd_counts()


def naive_classes(n, pairs):
    cls = {i: {i} for i in range(n)}
    for a, b in pairs:
        if cls[a] is not cls[b]:
            merged = cls[a] | cls[b]
            for x in merged:
                cls[x] = merged
    return {i: min(cls[i]) for i in range(n)}


@given(st.integers(1, 30).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))))))
def test_union_find_matches_naive_merging(case):
    n, pairs = case
    uf = UnionFind(n)
    for a, b in pairs:
        uf.union(a, b)
    assert uf.roots() == [naive_classes(n, pairs)[i] for i in range(n)]
