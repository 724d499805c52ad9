"""Finite tabulated presheaves on a degree-truncated oracle.

A presheaf stores, for every object ``c`` of degree <= ``max_degree``, a
tuple of points ``X(c)``, and for every morphism ``a: e -> c`` between such
objects the function ``X(a): X(c) -> X(e)`` as a dict.

Truncation: point classification, latching objects and decompositions at
``c`` only look at minus-maps out of ``c``, whose codomains have degree
<= deg(c), so they are exact whenever deg(c) <= max_degree.  Mono/epi and
representability checks quantify over the bounded objects only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

from .core import (
    MonotoneMap, MorphismTerm, MultiMorphism, ReedyOracle, TerminalOracle, Verdict, parse_morphism, parse_term,
    render_object, render_term, morphism_to_json,
)
from .delta import DeltaOracle
from .theta import ThetaOracle, theta_tower
from .unionfind import UnionFind


class PresheafError(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class Injected:
    """A point of a pushout: the representative node ``point`` on ``side``."""

    side: str
    point: object


def point_label(p) -> str:
    if isinstance(p, str):
        return p
    if isinstance(p, Injected):
        return f"{p.side}:{point_label(p.point)}"
    if isinstance(p, tuple):
        return json.dumps([point_label(q) for q in p], separators=(",", ":"))
    if isinstance(p, (MonotoneMap, MorphismTerm)):
        return render_term(p)
    return str(p)


@lru_cache(maxsize=None)
def bounded_morphisms(oracle, max_degree):
    objs = oracle.objects(max_degree)
    return [(e, c, a) for e in objs for c in objs for a in oracle.hom(e, c)]


class Presheaf:
    def __init__(self, oracle: ReedyOracle, max_degree: int, elements, action, validate=True):
        self.oracle = oracle
        self.max_degree = max_degree
        self.objects = oracle.objects(max_degree)
        self.elements = dict(elements)
        self.action = action
        if validate:
            self.validate()

    def __call__(self, c):
        return self.elements[c]

    def act(self, a, x):
        """``X(a)(x)`` for ``a: e -> c`` and ``x`` in ``X(c)``."""
        return self.action[a][x]

    def size(self, c):
        return len(self.elements[c])

    def counts(self):
        return [len(self.elements[c]) for c in self.objects]

    def validate(self):
        oracle = self.oracle
        objs = self.objects
        missing = [render_object(c) for c in objs if c not in self.elements]
        if missing:
            raise PresheafError(f"no elements listed for {missing}", {"objects": missing})
        sets = {}
        for c in objs:
            pts = self.elements[c]
            sets[c] = set(pts)
            if len(sets[c]) != len(pts):
                raise PresheafError(f"repeated points at {render_object(c)}")
        omitted = []
        for e, c, a in bounded_morphisms(oracle, self.max_degree):
            table = self.action.get(a)
            if table is None:
                omitted.append({"dom": render_object(e), "cod": render_object(c), "mor": morphism_to_json(a)})
                continue
            if set(table) != sets[c] or not set(table.values()) <= sets[e]:
                raise PresheafError(f"action of {render_term(a)} is not a function "
                                    f"X({render_object(c)}) -> X({render_object(e)})",
                                    {"mor": morphism_to_json(a)})
        if omitted:
            raise PresheafError(f"action table omits {len(omitted)} morphisms", {"omitted": omitted})
        for c in objs:
            ident = self.action[oracle.identity(c)]
            for x in self.elements[c]:
                if ident[x] != x:
                    raise PresheafError(f"identity of {render_object(c)} moves {point_label(x)}",
                                        {"object": render_object(c), "point": point_label(x)})
        for a in objs:
            for b in objs:
                for beta in oracle.hom(a, b):
                    xb = self.action[beta]
                    for c in objs:
                        for alpha in oracle.hom(b, c):
                            xa = self.action[alpha]
                            comp = self.action[oracle.compose(alpha, beta)]
                            for x in self.elements[c]:
                                if comp[x] != xb[xa[x]]:
                                    raise PresheafError(
                                        "action is not functorial",
                                        {"alpha": morphism_to_json(alpha), "beta": morphism_to_json(beta),
                                         "objects": [render_object(a), render_object(b), render_object(c)],
                                         "point": point_label(x)})
        return self


class PresheafMap:
    """Components ``f(c): X(c) -> Y(c)`` as dicts."""

    def __init__(self, source: Presheaf, target: Presheaf, components, validate=True):
        self.source = source
        self.target = target
        self.components = components
        if validate:
            self.validate()

    def __call__(self, c, x):
        return self.components[c][x]

    def validate(self):
        X, Y = self.source, self.target
        if X.oracle is not Y.oracle or X.max_degree != Y.max_degree:
            raise PresheafError("presheaf map between different truncations")
        for c in X.objects:
            comp = self.components[c]
            ys = set(Y(c))
            if set(comp) != set(X(c)) or not set(comp.values()) <= ys:
                raise PresheafError(f"component at {render_object(c)} is not a function")
        for e, c, a in bounded_morphisms(X.oracle, X.max_degree):
            fe, fc = self.components[e], self.components[c]
            for x in X(c):
                if fe[X.act(a, x)] != Y.act(a, fc[x]):
                    raise PresheafError("map is not natural",
                                        {"mor": morphism_to_json(a), "point": point_label(x)})
        return self

    def injective_at(self, c):
        comp = self.components[c]
        return len(set(comp.values())) == len(comp)

    def surjective_at(self, c):
        return set(self.components[c].values()) == set(self.target(c))

    def is_mono(self):
        return all(self.injective_at(c) for c in self.source.objects)

    def is_epi(self):
        return all(self.surjective_at(c) for c in self.source.objects)


def map_image_class(f: PresheafMap) -> str:
    mono, epi = f.is_mono(), f.is_epi()
    if mono and epi:
        return "both"
    return "mono" if mono else "epi" if epi else "neither"


# -- constructions -----------------------------------------------------------

@lru_cache(maxsize=None)
def yoneda(oracle: ReedyOracle, c, max_degree: int) -> Presheaf:
    """``(Fc)(d) = hom(d, c)``, acting by precomposition."""
    objs = oracle.objects(max_degree)
    elements = {d: tuple(oracle.hom(d, c)) for d in objs}
    compose = oracle.compose
    action = {}
    for e, d, a in bounded_morphisms(oracle, max_degree):
        action[a] = {x: compose(x, a) for x in elements[d]}
    return Presheaf(oracle, max_degree, elements, action, validate=False)


def representable_map(oracle, f, max_degree) -> PresheafMap:
    """``Ff: F(dom f) -> F(cod f)`` by postcomposition."""
    X = yoneda(oracle, f.dom, max_degree)
    Y = yoneda(oracle, f.cod, max_degree)
    compose = oracle.compose
    comps = {t: {x: compose(f, x) for x in X(t)} for t in X.objects}
    return PresheafMap(X, Y, comps, validate=False)


def empty_presheaf(oracle, max_degree) -> Presheaf:
    objs = oracle.objects(max_degree)
    action = {a: {} for _, _, a in bounded_morphisms(oracle, max_degree)}
    return Presheaf(oracle, max_degree, {c: () for c in objs}, action, validate=False)


def product_presheaf(*factors: Presheaf) -> Presheaf:
    if not factors:
        raise ValueError("product of no presheaves needs an explicit oracle; use terminal_presheaf")
    X0 = factors[0]
    oracle, N = X0.oracle, X0.max_degree
    for X in factors:
        if X.oracle is not oracle or X.max_degree != N:
            raise PresheafError("factors live on different truncations")
    elements = {}
    for c in X0.objects:
        pts = [()]
        for X in factors:
            pts = [p + (x,) for p in pts for x in X(c)]
        elements[c] = tuple(pts)
    action = {}
    for e, c, a in bounded_morphisms(oracle, N):
        tables = [X.action[a] for X in factors]
        action[a] = {p: tuple(t[x] for t, x in zip(tables, p)) for p in elements[c]}
    return Presheaf(oracle, N, elements, action, validate=False)


def terminal_presheaf(oracle, max_degree) -> Presheaf:
    objs = oracle.objects(max_degree)
    action = {a: {(): ()} for _, _, a in bounded_morphisms(oracle, max_degree)}
    return Presheaf(oracle, max_degree, {c: ((),) for c in objs}, action, validate=False)


def pushout_presheaf(f: PresheafMap, g: PresheafMap):
    """Pointwise pushout of ``X <- Z -> Y``; returns ``(P, inl, inr)``."""
    X, Y, Z = f.target, g.target, f.source
    if g.source is not Z and g.source.elements != Z.elements:
        raise PresheafError("pushout legs must share their source")
    oracle, N = X.oracle, X.max_degree
    elements, rep = {}, {}
    for c in X.objects:
        nodes = [Injected("inl", x) for x in X(c)] + [Injected("inr", y) for y in Y(c)]
        pos = {node: i for i, node in enumerate(nodes)}
        uf = UnionFind(len(nodes))
        for z in Z(c):
            uf.union(pos[Injected("inl", f(c, z))], pos[Injected("inr", g(c, z))])
        roots = uf.roots()
        rep[c] = {node: nodes[roots[i]] for i, node in enumerate(nodes)}
        elements[c] = tuple(nodes[i] for i in sorted(set(roots)))
    action = {}
    for e, c, a in bounded_morphisms(oracle, N):
        table = {}
        for r in elements[c]:
            src = X if r.side == "inl" else Y
            table[r] = rep[e][Injected(r.side, src.act(a, r.point))]
        action[a] = table
    P = Presheaf(oracle, N, elements, action, validate=False)
    inl = PresheafMap(X, P, {c: {x: rep[c][Injected("inl", x)] for x in X(c)} for c in X.objects},
                      validate=False)
    inr = PresheafMap(Y, P, {c: {y: rep[c][Injected("inr", y)] for y in Y(c)} for c in X.objects},
                      validate=False)
    return P, inl, inr


def sub_presheaf(X: Presheaf, keep) -> Presheaf:
    """Restrict ``X`` to the points selected by ``keep(c, x)``; must be closed under the action."""
    elements = {c: tuple(x for x in X(c) if keep(c, x)) for c in X.objects}
    members = {c: set(pts) for c, pts in elements.items()}
    action = {}
    for e, c, a in bounded_morphisms(X.oracle, X.max_degree):
        table = {x: X.act(a, x) for x in elements[c]}
        for x, y in table.items():
            if y not in members[e]:
                raise PresheafError("selection is not closed under the action",
                                    {"mor": morphism_to_json(a), "point": point_label(x)})
        action[a] = table
    return Presheaf(X.oracle, X.max_degree, elements, action, validate=False)


def inclusion(X: Presheaf, Y: Presheaf) -> PresheafMap:
    """Inclusion of a sub-presheaf whose points are points of ``Y``."""
    comps = {}
    for c in X.objects:
        ys = set(Y(c))
        for x in X(c):
            if x not in ys:
                raise PresheafError(f"{point_label(x)} is not a point of the target at {render_object(c)}",
                                    {"object": render_object(c), "point": point_label(x)})
        comps[c] = {x: x for x in X(c)}
    return PresheafMap(X, Y, comps)


def boundary(oracle, c, max_degree) -> Presheaf:
    """Sub-presheaf of ``Fc`` of maps whose plus part is not the identity of ``c``."""
    Fc = yoneda(oracle, c, max_degree)

    def keep(t, x):
        return not oracle.is_identity(oracle.factorize(_single(oracle, x)).plus.components[0])
    return sub_presheaf(Fc, keep)


def _single(oracle, f):
    return MultiMorphism(f.dom, (f,))


def image_presheaf(f: PresheafMap) -> Presheaf:
    images = {c: set(f.components[c].values()) for c in f.target.objects}
    return sub_presheaf(f.target, lambda c, y: y in images[c])


def find_representing(X: Presheaf, candidates=None):
    """An object ``e`` and point ``z`` whose classifying map ``Fe -> X`` is bijective
    at every bounded object, or None."""
    oracle = X.oracle
    for e in candidates if candidates is not None else X.objects:
        Fe = yoneda(oracle, e, X.max_degree)
        if Fe.counts() != X.counts():
            continue
        for z in X(e):
            if all(len({X.act(phi, z) for phi in Fe(t)}) == X.size(t) for t in X.objects):
                return e, z
    return None


# -- degenerate points, decompositions, latching -----------------------------

@dataclass
class PointClass:
    objects: list
    degenerate: dict
    nondegenerate: dict

    def nd_counts(self):
        return [len(self.nondegenerate[c]) for c in self.objects]

    def dg_counts(self):
        return [len(self.degenerate[c]) for c in self.objects]


def classify_points(X: Presheaf) -> PointClass:
    oracle = X.oracle
    dg, nd = {}, {}
    for c in X.objects:
        hit = set()
        for s in oracle.minus_from(c):
            if oracle.is_identity(s):
                continue
            table = X.action[s]
            hit.update(table[y] for y in X(s.cod))
        dg[c] = tuple(x for x in X(c) if x in hit)
        nd[c] = tuple(x for x in X(c) if x not in hit)
    return PointClass(list(X.objects), dg, nd)


@dataclass
class EZDecomposition:
    obj: object
    point: object
    pairs: list

    @property
    def unique(self):
        return len(self.pairs) == 1

    @property
    def sigma(self):
        return self.pairs[0][0] if self.unique else None

    @property
    def y(self):
        return self.pairs[0][1] if self.unique else None


def ez_decompose(X: Presheaf, c, x, classes: PointClass | None = None) -> EZDecomposition:
    """All ``(sigma: c -> d minus, y non-degenerate)`` with ``X(sigma)(y) = x``."""
    classes = classes or classify_points(X)
    pairs = []
    for s in X.oracle.minus_from(c):
        table = X.action[s]
        for y in classes.nondegenerate[s.cod]:
            if table[y] == x:
                pairs.append((s, y))
    return EZDecomposition(c, x, pairs)


def check_e_prime(X: Presheaf, c, classes: PointClass | None = None) -> Verdict:
    """Is ``(d, y, a) -> X(a)(y)`` a bijection onto ``X(c)``?"""
    classes = classes or classify_points(X)
    seen = {}
    for s in X.oracle.minus_from(c):
        table = X.action[s]
        for y in classes.nondegenerate[s.cod]:
            x = table[y]
            if x in seen:
                return Verdict(False, {"kind": "collision", "point": point_label(x),
                                       "pairs": [_pair_json(*seen[x]), _pair_json(s, y)]})
            seen[x] = (s, y)
    for x in X(c):
        if x not in seen:
            return Verdict(False, {"kind": "uncovered", "point": point_label(x)})
    return Verdict(True)


def _pair_json(s, y):
    return {"sigma": morphism_to_json(s), "codomain": render_object(s.cod), "point": point_label(y)}


@dataclass
class LatchingObject:
    obj: object
    nodes: list
    node_class: dict
    classes: list
    p: dict
    degenerate: tuple

    def __len__(self):
        return len(self.classes)

    @property
    def q_surjective(self):
        return set(self.p.values()) == set(self.degenerate)

    @property
    def q_injective(self):
        return len(set(self.p.values())) == len(self.classes)

    @property
    def q_bijective(self):
        return self.q_surjective and self.q_injective

    def class_of(self, sigma, x):
        return self.node_class[(sigma, x)]


def latching(X: Presheaf, c, point_classes: PointClass | None = None) -> LatchingObject:
    """Colimit of ``X(d)`` over the non-identity minus-maps ``c -> d``."""
    oracle = X.oracle
    sigmas = [s for s in oracle.minus_from(c) if not oracle.is_identity(s)]
    nodes = [(s, x) for s in sigmas for x in X(s.cod)]
    pos = {node: i for i, node in enumerate(nodes)}
    uf = UnionFind(len(nodes))
    compose = oracle.compose
    for s in sigmas:
        for b in oracle.minus_from(s.cod):
            if oracle.is_identity(b):
                continue
            s2 = compose(b, s)
            table = X.action[b]
            for x2 in X(b.cod):
                uf.union(pos[(s2, x2)], pos[(s, table[x2])])
    roots = uf.roots()
    classes = sorted(set(roots))
    node_class = {node: roots[i] for i, node in enumerate(nodes)}
    p = {r: X.act(*nodes[r]) for r in classes}
    point_classes = point_classes or classify_points(X)
    return LatchingObject(c, nodes, node_class, classes, p, point_classes.degenerate[c])


def relative_latching_mono(f: PresheafMap, c) -> Verdict:
    """Is ``X(c) +_{L_c X} L_c Y -> Y(c)`` injective?  ``f`` must be a monomorphism."""
    X, Y = f.source, f.target
    for t in X.objects:
        if not f.injective_at(t):
            raise PresheafError(f"map is not injective at {render_object(t)}",
                                {"object": render_object(t)})
    LX, LY = latching(X, c), latching(Y, c)
    xs = X(c)
    n = len(xs)
    ly_pos = {r: n + i for i, r in enumerate(LY.classes)}
    x_pos = {x: i for i, x in enumerate(xs)}
    uf = UnionFind(n + len(LY.classes))
    for r in LX.classes:
        s, x = LX.nodes[r]
        image = LY.class_of(s, f(s.cod, x))
        uf.union(x_pos[LX.p[r]], ly_pos[image])
    fc = f.components[c]
    seen = {}
    for i, root in enumerate(uf.roots()):
        if root != i:
            continue
        value = fc[xs[i]] if i < n else LY.p[LY.classes[i - n]]
        if value in seen:
            return Verdict(False, {"object": render_object(c), "point": point_label(value)})
        seen[value] = i
    return Verdict(True)


# -- strong pushouts ---------------------------------------------------------

@dataclass
class StrongPushout:
    ok: bool
    apex: object = None
    tau1: object = None
    tau2: object = None
    candidates: int = 0
    pushout_counts: list | None = None


def strong_pushout(oracle, sigma1, sigma2, max_degree=None) -> StrongPushout:
    """Search for minus ``tau_s: d_s -> e`` with ``tau1 sigma1 = tau2 sigma2`` whose
    comparison map from the presheaf pushout of ``F sigma1, F sigma2`` to ``Fe`` is
    bijective at all bounded objects."""
    if sigma1.dom != sigma2.dom:
        raise ValueError("the two minus-maps must share a domain")
    if not (oracle.is_minus(sigma1) and oracle.is_minus(sigma2)):
        raise ValueError("strong pushouts are taken along minus-maps")
    c = sigma1.dom
    N = oracle.degree(c) if max_degree is None else max_degree
    P, inl, inr = pushout_presheaf(representable_map(oracle, sigma1, N),
                                   representable_map(oracle, sigma2, N))
    d1, d2 = sigma1.cod, sigma2.cod
    bound = min(oracle.degree(d1), oracle.degree(d2))
    compose = oracle.compose
    tried = 0
    for e in oracle.objects(bound):
        Fe = yoneda(oracle, e, N)
        if Fe.counts() != P.counts():
            continue
        for t1 in oracle.hom(d1, e):
            if not oracle.is_minus(t1):
                continue
            for t2 in oracle.hom(d2, e):
                if not oracle.is_minus(t2) or compose(t1, sigma1) != compose(t2, sigma2):
                    continue
                tried += 1
                if all(len({compose(t1 if r.side == "inl" else t2, r.point) for r in P(t)}) == P.size(t)
                       for t in P.objects):
                    return StrongPushout(True, e, t1, t2, tried, P.counts())
    return StrongPushout(False, candidates=tried, pushout_counts=P.counts())


# -- JSON --------------------------------------------------------------------

def oracle_signature(oracle):
    level, base = 0, oracle
    while isinstance(base, ThetaOracle):
        level += 1
        base = base.inner
    if isinstance(base, TerminalOracle):
        return level, "terminal"
    if isinstance(base, DeltaOracle):
        return level, "delta"
    raise PresheafError(f"presheaves on {oracle!r} have no file format")


def presheaf_to_json(X: Presheaf) -> dict:
    level, inner = oracle_signature(X.oracle)
    out = {"level": level, "max_degree": X.max_degree}
    if inner != "terminal":
        out["inner"] = inner
    out["elements"] = {render_object(c): [point_label(x) for x in X(c)] for c in X.objects}
    action = []
    for e, c, a in bounded_morphisms(X.oracle, X.max_degree):
        table = X.action[a]
        action.append({"dom": render_object(e), "cod": render_object(c), "mor": morphism_to_json(a),
                       "map": {point_label(x): point_label(table[x]) for x in X(c)}})
    out["action"] = action
    return out


def dumps(X: Presheaf) -> str:
    return json.dumps(presheaf_to_json(X), separators=(",", ":"), ensure_ascii=False) + "\n"


_ORACLES = {}


def shared_oracle(level, inner="terminal"):
    """One oracle per signature, so presheaves loaded from files share caches."""
    key = (level, inner)
    if key not in _ORACLES:
        _ORACLES[key] = theta_tower(level, inner)
    return _ORACLES[key]


def presheaf_from_json(data, oracle=None) -> Presheaf:
    level = data["level"]
    inner = data.get("inner", "terminal")
    oracle = oracle or shared_oracle(level, inner)
    N = data["max_degree"]

    def obj(text):
        return parse_term(text, level=level)

    elements = {}
    for text, pts in data["elements"].items():
        elements[obj(text)] = tuple(pts)
    action = {}
    for entry in data["action"]:
        a = parse_morphism(entry["mor"], obj(entry["dom"]), obj(entry["cod"]))
        action[a] = dict(entry["map"])
    return Presheaf(oracle, N, elements, action)


def loads(text: str, oracle=None) -> Presheaf:
    return presheaf_from_json(json.loads(text), oracle)
