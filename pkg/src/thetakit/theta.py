"""The Theta construction, generic over any multi-Reedy oracle.

An object ``[m](c1..cm)`` has degree ``m + sum deg(ci)``.  A morphism
``(alpha, blocks)`` into ``[n](d1..dn)`` has, for each source index i, one
inner morphism ``c_i -> d_j`` per target index ``alpha(i-1) < j <= alpha(i)``.
"""

from __future__ import annotations

from itertools import product

from .core import (
    ONE, STAR, Factorization, FactorizationError, MorphismTerm, MultiMorphism, ObjectTerm,
    ReedyOracle, TermError, TerminalOracle, bracket_objects, object_key, slot_ranges,
)
from .delta import (
    DeltaOracle, compose_delta, factorize_delta, identity_map, is_minus_delta,
    is_plus_family_delta,
)


_DELTA = DeltaOracle()


def gather(members, i):
    """Inner components of all family members at source index ``i`` (1-based).

    Returns the flat list (member-major, then target index) and the number
    contributed by each member, which is what ``scatter`` needs to undo it.
    """
    flat = []
    counts = []
    for f in members:
        block = f.blocks[i - 1]
        flat.extend(block)
        counts.append(len(block))
    return flat, counts


def scatter(flat, counts):
    out = []
    pos = 0
    for n in counts:
        out.append(tuple(flat[pos:pos + n]))
        pos += n
    if pos != len(flat):
        raise ValueError("counts do not cover the flat list")
    return out


class ThetaOracle(ReedyOracle):
    def __init__(self, inner: ReedyOracle):
        super().__init__()
        self.inner = inner
        self.level = inner.level + 1
        self.name = f"Theta({inner.name})"
        self._inner_plus = {}
        self._inner_factorize = {}

    def objects(self, max_degree):
        return bracket_objects(self.level, self.inner.objects(max_degree), max_degree)

    def _hom(self, c, d):
        inner_hom = self.inner.hom
        dc, cc = d.children, c.children
        for alpha in self._alphas(c.arity, d.arity):
            ranges = slot_ranges(alpha.values)
            slots = [inner_hom(cc[i], dc[j - 1]) for i, rng in enumerate(ranges) for j in rng]
            sizes = [len(r) for r in ranges]
            for choice in product(*slots):
                blocks = tuple(scatter(choice, sizes))
                yield MorphismTerm(self.level, c, d, alpha, blocks)

    def _alphas(self, m, n):
        return _DELTA.hom(m, n)

    def identity(self, c):
        inner_id = self.inner.identity
        return MorphismTerm(self.level, c, c, identity_map(c.arity),
                            tuple((inner_id(x),) for x in c.children))

    def is_identity(self, f):
        if f.dom != f.cod:
            return False
        v = f.alpha.values
        if v != tuple(range(len(v))):
            return False
        return all(self.inner.is_identity(b[0]) for b in f.blocks)

    def compose(self, g, f):
        if f.cod != g.dom:
            raise TermError("composable morphisms must meet at a common object")
        inner = self.inner.compose
        av = f.alpha.values
        blocks = []
        for i, rng in enumerate(slot_ranges(av)):
            fi = f.blocks[i]
            block = []
            for fij, j in zip(fi, rng):
                for gjk in g.blocks[j - 1]:
                    block.append(inner(gjk, fij))
            blocks.append(tuple(block))
        return MorphismTerm(self.level, f.dom, g.cod, compose_delta(g.alpha, f.alpha), tuple(blocks))

    def is_minus(self, f):
        if not is_minus_delta(f.alpha):
            return False
        inner = self.inner.is_minus
        return all(inner(b[0]) for b in f.blocks if b)

    def is_plus(self, fam):
        c = fam.domain
        members = fam.components
        if not is_plus_family_delta(MultiMorphism(c.arity, tuple(f.alpha for f in members))):
            return False
        cache = self._inner_plus
        for i in range(1, c.arity + 1):
            flat, _ = gather(members, i)
            inner_fam = MultiMorphism(c.children[i - 1], tuple(flat))
            ok = cache.get(inner_fam)
            if ok is None:
                ok = cache[inner_fam] = self.inner.is_plus(inner_fam)
            if not ok:
                return False
        return True

    def factorize(self, fam):
        c = fam.domain
        members = fam.components
        sigma, deltas = factorize_delta(MultiMorphism(c.arity, tuple(f.alpha for f in members)))
        sv = sigma.values
        k = sigma.target
        minus_blocks = [()] * c.arity
        mid_children = [None] * k
        plus_blocks = [[None] * k for _ in members]
        for i in range(1, c.arity + 1):
            if sv[i - 1] == sv[i]:
                continue
            j = sv[i]
            flat, counts = gather(members, i)
            inner_fam = MultiMorphism(c.children[i - 1], tuple(flat))
            inner = self._inner_factorize.get(inner_fam)
            if inner is None:
                try:
                    inner = self.inner.factorize(inner_fam)
                except FactorizationError as err:
                    raise FactorizationError(f"inner factorization failed at index {i}: {err}") from err
                self._inner_factorize[inner_fam] = inner
            minus_blocks[i - 1] = (inner.minus,)
            mid_children[j - 1] = inner.middle
            for s, part in enumerate(scatter(inner.plus.components, counts)):
                plus_blocks[s][j - 1] = part
        mid = ObjectTerm(self.level, tuple(mid_children))
        g = MorphismTerm(self.level, c, mid, sigma, tuple(minus_blocks))
        h = tuple(MorphismTerm(self.level, mid, f.cod, delta, tuple(pb))
                  for f, delta, pb in zip(members, deltas.components, plus_blocks))
        return Factorization(g, mid, MultiMorphism(mid, h))


def theta_tower(level: int, inner: str = "terminal") -> ReedyOracle:
    """Theta applied ``level`` times to the terminal category or to Delta."""
    if inner not in ("terminal", "delta"):
        raise ValueError(f"unknown inner oracle {inner!r}")
    oracle = TerminalOracle() if inner == "terminal" else DeltaOracle()
    for _ in range(level):
        oracle = ThetaOracle(oracle)
    return oracle


# -- the dictionary Theta(1) ~ Delta ----------------------------------------

def object_to_delta(obj: ObjectTerm) -> int:
    return obj.arity


def object_from_delta(n: int) -> ObjectTerm:
    return ObjectTerm(1, (STAR,) * n)


def morphism_to_delta(f: MorphismTerm):
    return f.alpha


def morphism_from_delta(a) -> MorphismTerm:
    blocks = tuple((ONE,) * len(r) for r in slot_ranges(a.values))
    return MorphismTerm(1, object_from_delta(a.source), object_from_delta(a.target), a, blocks)


def theta1_delta_equiv(max_degree: int, valence: int = 1, theta=None, delta=None):
    """Check the dictionary between Theta(1) and Delta up to ``max_degree``.

    Returns ``(mismatches, stats)``; ``mismatches`` is empty on success and
    otherwise lists counterexamples in discovery order.
    """
    theta = theta or ThetaOracle(TerminalOracle())
    delta = delta or DeltaOracle()
    mismatches = []
    stats = {"objects": 0, "morphisms": 0, "composites": 0, "families": 0}

    t_objs = theta.objects(max_degree)
    d_objs = delta.objects(max_degree)
    mapped = [object_to_delta(c) for c in t_objs]
    if sorted(mapped) != d_objs or len(set(mapped)) != len(mapped):
        mismatches.append({"kind": "objects", "theta": [str(c) for c in t_objs], "delta": d_objs})
    for c in t_objs:
        stats["objects"] += 1
        if object_from_delta(object_to_delta(c)) != c:
            mismatches.append({"kind": "object-roundtrip", "object": str(c)})
        if theta.degree(c) != delta.degree(object_to_delta(c)):
            mismatches.append({"kind": "degree", "object": str(c)})

    for c in t_objs:
        for d in t_objs:
            th = theta.hom(c, d)
            dh = delta.hom(object_to_delta(c), object_to_delta(d))
            image = [morphism_to_delta(f) for f in th]
            stats["morphisms"] += len(th)
            if len(th) != len(dh) or set(image) != set(dh):
                mismatches.append({"kind": "hom", "domain": str(c), "codomain": str(d),
                                   "theta": len(th), "delta": len(dh)})
                continue
            for f in th:
                if morphism_from_delta(morphism_to_delta(f)) != f:
                    mismatches.append({"kind": "morphism-roundtrip", "domain": str(c)})
                if theta.is_minus(f) != delta.is_minus(f.alpha):
                    mismatches.append({"kind": "minus", "domain": str(c), "codomain": str(d),
                                       "alpha": list(f.alpha.values)})

    for a in t_objs:
        for b in t_objs:
            for c in t_objs:
                for f in theta.hom(a, b):
                    for g in theta.hom(b, c):
                        stats["composites"] += 1
                        lhs = morphism_to_delta(theta.compose(g, f))
                        rhs = delta.compose(g.alpha, f.alpha)
                        if lhs != rhs:
                            mismatches.append({"kind": "compose", "f": list(f.alpha.values),
                                               "g": list(g.alpha.values)})

    for c in t_objs:
        out = [f for d in t_objs for f in theta.hom(c, d)]
        for u in range(valence + 1):
            for members in product(out, repeat=u):
                stats["families"] += 1
                t_plus = theta.is_plus(MultiMorphism(c, members))
                d_plus = delta.is_plus(MultiMorphism(c.arity, tuple(f.alpha for f in members)))
                if t_plus != d_plus:
                    mismatches.append({"kind": "plus", "domain": str(c),
                                       "family": [list(f.alpha.values) for f in members]})
    return mismatches, stats
