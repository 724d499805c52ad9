"""The simplex category as a multi-Reedy oracle.

Minus-maps are the surjections; a family out of ``[m]`` is plus when it is
jointly monic.  Maps out of ``[k]`` are determined by their values and
``[0]`` separates points, so joint monicity is injectivity of
``i -> (a_1(i), ..., a_u(i))``.
"""

from __future__ import annotations

from itertools import combinations_with_replacement
from math import comb

from .core import Factorization, MonotoneMap, MultiMorphism, ReedyOracle, TermError


def identity_map(n: int) -> MonotoneMap:
    return MonotoneMap(n, n, tuple(range(n + 1)))


def compose_delta(g: MonotoneMap, f: MonotoneMap) -> MonotoneMap:
    if g.source != f.target:
        raise TermError(f"cannot compose [{f.source}]->[{f.target}] with [{g.source}]->[{g.target}]")
    gv = g.values
    return MonotoneMap(f.source, g.target, tuple(gv[i] for i in f.values))


def is_minus_delta(f: MonotoneMap) -> bool:
    v = f.values
    if v[0] != 0 or v[-1] != f.target:
        return False
    return all(v[i] - v[i - 1] <= 1 for i in range(1, len(v)))


def _check_family(fam: MultiMorphism):
    for a in fam.components:
        if a.source != fam.domain:
            raise TermError("family members must all start at the domain")


def is_plus_family_delta(fam: MultiMorphism) -> bool:
    _check_family(fam)
    if not fam.components:
        return fam.domain == 0
    rows = list(zip(*(a.values for a in fam.components)))
    # monotone, so injective iff consecutive points are separated
    return all(rows[i] != rows[i - 1] for i in range(1, len(rows)))


def factorize_delta(fam: MultiMorphism) -> tuple[MonotoneMap, MultiMorphism]:
    """Collapse the fibres of the product map: surjection then jointly monic family."""
    _check_family(fam)
    m = fam.domain
    if not fam.components:
        return MonotoneMap(m, 0, (0,) * (m + 1)), MultiMorphism(0, ())
    rows = list(zip(*(a.values for a in fam.components)))
    sigma = [0]
    reps = [0]  # first element of each fibre
    for i in range(1, m + 1):
        if rows[i] != rows[i - 1]:
            reps.append(i)
        sigma.append(len(reps) - 1)
    k = len(reps) - 1
    deltas = tuple(MonotoneMap(k, a.target, tuple(a.values[r] for r in reps))
                   for a in fam.components)
    return MonotoneMap(m, k, tuple(sigma)), MultiMorphism(k, deltas)


def hom_count_delta(m: int, n: int) -> int:
    return comb(m + n + 1, m + 1)


class DeltaOracle(ReedyOracle):
    name = "delta"
    level = 0

    def objects(self, max_degree):
        return list(range(max_degree + 1))

    def _hom(self, m, n):
        return (MonotoneMap(m, n, v) for v in combinations_with_replacement(range(n + 1), m + 1))

    def compose(self, g, f):
        return compose_delta(g, f)

    def identity(self, c):
        return identity_map(c)

    def is_identity(self, f):
        return f.source == f.target and f.values == tuple(range(f.source + 1))

    def is_minus(self, f):
        return is_minus_delta(f)

    def is_plus(self, fam):
        return is_plus_family_delta(fam)

    def factorize(self, fam):
        sigma, deltas = factorize_delta(fam)
        return Factorization(sigma, sigma.target, deltas)
