from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from thetakit.core import (
    FactorizationError, MonotoneMap, MorphismTerm, MultiMorphism, ObjectTerm, TermError,
    TerminalOracle, parse_term, slot_ranges,
)
from thetakit.delta import DeltaOracle, compose_delta, factorize_delta
from thetakit.theta import (
    ThetaOracle, gather, morphism_from_delta, morphism_to_delta, object_from_delta, object_to_delta,
    scatter, theta1_delta_equiv, theta_tower,
)

theta1 = theta_tower(1)
theta2 = theta_tower(2)
theta_delta = theta_tower(1, "delta")
delta = DeltaOracle()


def obj(text, level=None):
    return parse_term(text, level)


def level2_map(dom, cod, alpha, blocks):
    """A Theta_2 morphism whose inner components are given by their simplex values."""
    c, d = obj(dom, 2), obj(cod, 2)
    a = MonotoneMap(c.arity, d.arity, tuple(alpha))
    built = []
    for i, (rng, blk) in enumerate(zip(slot_ranges(a.values), blocks)):
        src = c.children[i].arity
        built.append(tuple(morphism_from_delta(MonotoneMap(src, d.children[j - 1].arity, tuple(v)))
                           for j, v in zip(rng, blk)))
    return MorphismTerm(2, c, d, a, tuple(built)).validate()


def mono(*values, target):
    return MonotoneMap(len(values) - 1, target, tuple(values))


def test_tower_levels_and_names():
    assert theta_tower(0).name == "1"
    assert theta2.level == 2
    assert theta_delta.name == "Theta(delta)"
    with pytest.raises(ValueError):
        theta_tower(1, "sets")


def test_gather_scatter_inverse_exhaustively():
    for counts in product(range(3), repeat=3):
        flat = list(range(sum(counts)))
        parts = scatter(flat, counts)
        assert [len(p) for p in parts] == list(counts)
        assert [x for p in parts for x in p] == flat
    with pytest.raises(ValueError):
        scatter([1, 2, 3], [1, 1])


def test_gather_collects_member_major():
    f = level2_map("[2]([1](*),[0]())", "[2]([1](*),[1](*))", [0, 1, 2], [[[0, 1]], [[1]]])
    g = level2_map("[2]([1](*),[0]())", "[2]([1](*),[1](*))", [0, 2, 2], [[[0, 1], [1, 1]], []])
    flat, counts = gather([f, g], 1)
    assert counts == [1, 2]
    assert [morphism_to_delta(x).values for x in flat] == [(0, 1), (0, 1), (1, 1)]
    flat, counts = gather([f, g], 2)
    assert counts == [1, 0]


def test_hom_of_degree_zero_object_is_identity():
    c = obj("[0]()", 2)
    assert theta2.hom(c, c) == [theta2.identity(c)]


def test_hom_sizes_match_slot_products():
    """Independent count: sum over alpha of the product of inner hom sizes in each slot."""
    objs = theta2.objects(3)
    for c in objs:
        for d in objs:
            total = 0
            for a in delta.hom(c.arity, d.arity):
                size = 1
                for i, rng in enumerate(slot_ranges(a.values)):
                    for j in rng:
                        size *= len(theta1.hom(c.children[i], d.children[j - 1]))
                total += size
            assert len(theta2.hom(c, d)) == total
            assert len(set(theta2.hom(c, d))) == total


def test_level2_composition_example():
    f = level2_map("[1]([1](*))", "[1]([2](*,*))", [0, 1], [[[0, 2]]])
    g = level2_map("[1]([2](*,*))", "[1]([1](*))", [0, 1], [[[0, 1, 1]]])
    h = theta2.compose(g, f)
    assert morphism_to_delta(h.blocks[0][0]).values == compose_delta(mono(0, 1, 1, target=1), mono(0, 2, target=2)).values
    assert morphism_to_delta(h.blocks[0][0]).values == (0, 1)


def test_compose_rejects_mismatch():
    f = theta2.identity(obj("[1]([1](*))"))
    g = theta2.identity(obj("[1]([0]())"))
    with pytest.raises(TermError):
        theta2.compose(g, f)


def test_minus_examples():
    assert theta2.is_minus(theta2.identity(obj("[2]([1](*),[0]())")))
    f = level2_map("[1]([1](*))", "[1]([0]())", [0, 1], [[[0, 0]]])
    assert theta2.is_minus(f)
    g = level2_map("[1]([0]())", "[1]([1](*))", [0, 1], [[[1]]])
    assert not theta2.is_minus(g)


def test_plus_examples():
    for c in theta2.objects(3):
        assert theta2.is_plus(MultiMorphism(c, (theta2.identity(c),)))
        assert theta2.is_plus(MultiMorphism(c, ())) == (theta2.degree(c) == 0)


def test_factorize_examples():
    c = obj("[2](*,*)")
    f = morphism_from_delta(mono(0, 0, 2, target=2))
    fact = theta1.factorize(MultiMorphism(c, (f,)))
    assert fact.minus.alpha.values == (0, 0, 1)
    assert fact.plus.components[0].alpha.values == (0, 2)

    c = obj("[1]([0]())")
    fact = theta2.factorize(MultiMorphism(c, ()))
    assert fact.middle == obj("[0]()", 2)
    assert fact.minus.alpha.values == (0, 0)
    assert fact.minus.blocks == ((),)
    assert fact.plus == MultiMorphism(obj("[0]()", 2), ())

    c = obj("[2]([1](*),[0]())")
    fam = MultiMorphism(c, (theta2.identity(c),))
    fact = theta2.factorize(fam)
    assert theta2.is_identity(fact.minus)
    assert fact.plus == fam


def test_inner_factorization_failure_is_reported():
    class Broken(TerminalOracle):
        def factorize(self, fam):
            raise FactorizationError("no")

    broken = ThetaOracle(Broken())
    c = broken.objects(1)[1]
    with pytest.raises(FactorizationError, match="inner"):
        broken.factorize(MultiMorphism(c, (broken.identity(c),)))


def test_dictionary_examples():
    assert object_to_delta(obj("[2](*,*)")) == 2
    assert object_from_delta(2) == obj("[2](*,*)")
    assert len(theta1.hom(obj("[1](*)"), obj("[1](*)"))) == 3
    maps = theta1.hom(obj("[2](*,*)"), obj("[1](*)"))
    assert len(maps) == 4
    assert sorted(f.alpha.values for f in maps if theta1.is_minus(f)) == [(0, 0, 1), (0, 1, 1)]
    assert sorted(f.values for f in delta.hom(2, 1) if delta.is_minus(f)) == [(0, 0, 1), (0, 1, 1)]


@pytest.mark.parametrize("max_degree,valence", [(3, 2), (5, 1)])
def test_theta1_matches_delta(max_degree, valence):
    mismatches, stats = theta1_delta_equiv(max_degree, valence)
    assert mismatches == []
    assert stats["objects"] == max_degree + 1


def test_theta1_equiv_reports_mismatch():
    class Shifted(DeltaOracle):
        def is_minus(self, f):
            return not super().is_minus(f)

    mismatches, _ = theta1_delta_equiv(2, 1, delta=Shifted())
    assert mismatches and mismatches[0]["kind"] == "minus"


# -- properties over random morphisms -----------------------------------------

ORACLES = {"theta2": theta2, "theta_delta": theta_delta, "theta3": theta_tower(3)}
OBJECTS = {name: o.objects(3) for name, o in ORACLES.items()}


@st.composite
def chains(draw, length):
    name = draw(st.sampled_from(sorted(ORACLES)))
    o, objs = ORACLES[name], OBJECTS[name]
    path = [draw(st.sampled_from(objs))]
    maps = []
    for _ in range(length):
        options = [(d, f) for d in objs for f in o.hom(path[-1], d)]
        d, f = draw(st.sampled_from(options))
        path.append(d)
        maps.append(f)
    return o, maps


@st.composite
def families(draw):
    name = draw(st.sampled_from(sorted(ORACLES)))
    o, objs = ORACLES[name], OBJECTS[name]
    c = draw(st.sampled_from(objs))
    out = [f for d in objs for f in o.hom(c, d)]
    members = draw(st.lists(st.sampled_from(out), max_size=3))
    return o, MultiMorphism(c, tuple(members))


@settings(max_examples=150, deadline=None)
@given(chains(3))
def test_associativity(chain):
    o, (f, g, h) = chain
    assert o.compose(h, o.compose(g, f)) == o.compose(o.compose(h, g), f)


@settings(max_examples=100, deadline=None)
@given(chains(1))
def test_identity_laws(chain):
    o, (f,) = chain
    assert o.compose(o.identity(f.cod), f) == f
    assert o.compose(f, o.identity(f.dom)) == f
    assert f.validate() is f


@settings(max_examples=200, deadline=None)
@given(families())
def test_factorization_properties(sample):
    o, fam = sample
    fact = o.factorize(fam)
    assert o.is_minus(fact.minus)
    assert o.is_plus(fact.plus)
    assert fact.minus.cod == fact.middle == fact.plus.domain
    assert [o.compose(h, fact.minus) for h in fact.plus] == list(fam)
    assert o.degree(fact.middle) <= o.degree(fam.domain)
    if o.is_plus(fam):
        assert o.is_identity(fact.minus) and fact.plus == fam


@settings(max_examples=100, deadline=None)
@given(families())
def test_factorization_alpha_matches_delta(sample):
    o, fam = sample
    fact = o.factorize(fam)
    sigma, deltas = factorize_delta(MultiMorphism(fam.domain.arity, tuple(f.alpha for f in fam)))
    assert fact.minus.alpha == sigma
    assert tuple(h.alpha for h in fact.plus) == deltas.components


def test_objects_over_delta_have_integer_leaves():
    objs = theta_delta.objects(2)
    assert ObjectTerm(1, (1,)) in objs
    assert all(isinstance(x, int) for c in objs for x in c.children)
