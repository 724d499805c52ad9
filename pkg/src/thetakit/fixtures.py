"""Small hand-built categories and deliberately broken variants of real ones.

The broken variants are negative controls: each one violates exactly one
property, and the matching verifier has to reject it with a witness.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .core import Factorization, FactorizationError, MultiMorphism, ReedyOracle
from .delta import DeltaOracle, MonotoneMap
from .presheaf import Presheaf, yoneda


@dataclass(frozen=True)
class Arrow:
    name: str
    dom: str
    cod: str

    def __str__(self):
        return self.name


class TableOracle(ReedyOracle):
    """A finite category given by explicit composition tables.

    ``composites`` maps ``(g, f)`` names to the name of ``g . f``; composites
    with an identity are filled in automatically.  Plus families are the
    families of ``plus`` arrows that are jointly monic, together with the
    empty family at every object of degree 0.  ``factorize`` searches.
    """

    def __init__(self, name, degrees, arrows, composites, minus, plus):
        super().__init__()
        self.name = name
        self.degrees = dict(degrees)
        self.arrows = {n: Arrow(n, d, c) for n, (d, c) in arrows.items()}
        self.ids = {c: Arrow(f"id_{c}", c, c) for c in self.degrees}
        for a in self.ids.values():
            self.arrows[a.name] = a
        self.table = {}
        for (g, f), h in composites.items():
            self.table[self.arrows[g], self.arrows[f]] = self.arrows[h]
        for f in self.arrows.values():
            self.table[self.ids[f.cod], f] = f
            self.table[f, self.ids[f.dom]] = f
        self.minus = {self.arrows[n] for n in minus} | set(self.ids.values())
        self.plus = {self.arrows[n] for n in plus} | set(self.ids.values())

    def objects(self, max_degree):
        return sorted((c for c, d in self.degrees.items() if d <= max_degree),
                      key=lambda c: (self.degrees[c], c))

    def degree(self, obj):
        return self.degrees[obj]

    def _hom(self, c, d):
        return sorted((f for f in self.arrows.values() if f.dom == c and f.cod == d), key=lambda f: f.name)

    def compose(self, g, f):
        if f.cod != g.dom:
            raise ValueError("not composable")
        try:
            return self.table[g, f]
        except KeyError:
            raise FactorizationError(f"no composite for {g} . {f}") from None

    def identity(self, c):
        return self.ids[c]

    def is_minus(self, f):
        return f in self.minus

    def jointly_monic(self, fam):
        c = fam.domain
        for t in self.degrees:
            images = {tuple(self.compose(f, x) for f in fam.components) for x in self.hom(t, c)}
            if len(images) != len(self.hom(t, c)):
                return False
        return True

    def is_plus(self, fam):
        if not fam.components:
            return self.degrees[fam.domain] == 0
        return all(f in self.plus for f in fam.components) and self.jointly_monic(fam)

    def factorize(self, fam):
        c = fam.domain
        found = []
        for g in self.minus_from(c):
            options = [[h for h in self.hom(g.cod, f.cod) if self.compose(h, g) == f] for f in fam.components]
            for hs in product(*options):
                plus = MultiMorphism(g.cod, tuple(hs))
                if self.is_plus(plus):
                    found.append(Factorization(g, g.cod, plus))
        if len(found) != 1:
            raise FactorizationError(f"{len(found)} factorizations")
        return found[0]


def non_elegant():
    """Two parallel minus maps ``p, q: a -> b`` with a common section ``i``.

    The pushout of ``Fp`` and ``Fq`` is not representable, and ``p`` and ``q``
    have the same section set.
    """
    return TableOracle(
        "non-elegant",
        {"a": 1, "b": 0},
        {"p": ("a", "b"), "q": ("a", "b"), "i": ("b", "a"), "e1": ("a", "a"), "e2": ("a", "a")},
        {
            ("p", "i"): "id_b", ("q", "i"): "id_b",
            ("i", "p"): "e1", ("i", "q"): "e2",
            ("p", "e1"): "p", ("p", "e2"): "q", ("q", "e1"): "p", ("q", "e2"): "q",
            ("e1", "e1"): "e1", ("e1", "e2"): "e2", ("e2", "e1"): "e1", ("e2", "e2"): "e2",
            ("e1", "i"): "i", ("e2", "i"): "i",
        },
        minus={"p", "q"},
        plus={"i"},
    )


def sectionless():
    """A single minus map ``p: a -> b`` with no morphism back."""
    return TableOracle("sectionless", {"a": 1, "b": 0}, {"p": ("a", "b")}, {}, minus={"p"}, plus=())


class BrokenComposition(DeltaOracle):
    """Delta with one composite redirected to another map of the same hom-set."""

    name = "delta-broken-composition"

    def __init__(self, g=(1, 1), f=(0, 0), wrong=(0, 0)):
        super().__init__()
        self.g = MonotoneMap(1, 1, g)
        self.f = MonotoneMap(1, 1, f)
        self.wrong = MonotoneMap(1, 1, wrong)

    def compose(self, g, f):
        if g == self.g and f == self.f:
            return self.wrong
        return super().compose(g, f)


class ExtraPlus(DeltaOracle):
    """Delta where the degeneracy ``[1] -> [0]`` is also declared plus."""

    name = "delta-extra-plus"

    def __init__(self):
        super().__init__()
        self.extra = MonotoneMap(1, 0, (0, 0))

    def is_plus(self, fam):
        if fam.components == (self.extra,):
            return True
        return super().is_plus(fam)


def non_functorial(c=1, max_degree=2):
    """Elements and action of ``Fc`` with one action entry redirected.

    Returns ``(oracle, max_degree, elements, action)`` for the ``Presheaf``
    constructor, which is expected to reject it.
    """
    oracle = DeltaOracle()
    F = yoneda(oracle, c, max_degree)
    action = {a: dict(table) for a, table in F.action.items()}
    # the face [0] -> [1] hitting 1, acting on the constant map at 0
    d = MonotoneMap(0, 1, (1,))
    x = MonotoneMap(1, c, (0, 0))
    action[d][x] = next(y for y in F(0) if y != action[d][x])
    return oracle, max_degree, dict(F.elements), action


def build_non_functorial():
    oracle, N, elements, action = non_functorial()
    return Presheaf(oracle, N, elements, action)
