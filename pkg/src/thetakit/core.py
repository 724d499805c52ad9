"""Terms for objects and morphisms, the oracle interface, and shared helpers.

Objects of the iterated Theta construction are bracket terms
``[m](c1,...,cm)`` whose children live one level down; the level-0 object is
``*``.  Objects of the simplex category are plain ints ``n`` standing for
``[n] = {0,...,n}``.  Morphisms carry their endpoints so that terms from
different hom-sets never compare equal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np


class TermError(ValueError):
    """Malformed term text or a term that fails its structural invariants."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class FactorizationError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class ObjectTerm:
    level: int
    children: tuple = ()
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.level < 0:
            raise TermError("negative level")
        if self.level == 0 and self.children:
            raise TermError("the level-0 object has no children")
        for child in self.children:
            if isinstance(child, ObjectTerm) and child.level != self.level - 1:
                raise TermError(
                    f"child {render_object(child)} has level {child.level}, "
                    f"expected {self.level - 1}")
        object.__setattr__(self, "_hash", hash((self.level, self.children)))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, ObjectTerm):
            return NotImplemented
        return self._hash == other._hash and self.level == other.level and self.children == other.children

    @property
    def arity(self) -> int:
        return len(self.children)

    def __str__(self):
        return render_object(self)


STAR = ObjectTerm(0)


@dataclass(frozen=True, eq=False)
class MonotoneMap:
    """A weakly increasing map ``[source] -> [target]`` given by its values."""

    source: int
    target: int
    values: tuple
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(self.values) ^ (self.target << 20))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, MonotoneMap):
            return NotImplemented
        return (self._hash == other._hash and self.values == other.values
                and self.source == other.source and self.target == other.target)

    @property
    def dom(self):
        return self.source

    @property
    def cod(self):
        return self.target

    def __getitem__(self, i):
        return self.values[i]

    def validate(self):
        if len(self.values) != self.source + 1:
            raise TermError(f"map out of [{self.source}] needs {self.source + 1} values")
        prev = 0
        for v in self.values:
            if not prev <= v <= self.target:
                raise TermError(f"values {list(self.values)} are not a monotone map into [{self.target}]")
            prev = v
        return self


@dataclass(frozen=True, eq=False)
class MorphismTerm:
    """A morphism ``(alpha, blocks)`` of a Theta category, or the unique
    level-0 morphism (``alpha`` is None, no blocks).

    ``blocks[i-1]`` lists the components ``c_i -> d_j`` for
    ``alpha(i-1) < j <= alpha(i)``.
    """

    level: int
    dom: Any
    cod: Any
    alpha: MonotoneMap | None = None
    blocks: tuple = ()
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((self.dom, self.cod, self.alpha, self.blocks)))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, MorphismTerm):
            return NotImplemented
        return (self._hash == other._hash and self.level == other.level and self.alpha == other.alpha
                and self.blocks == other.blocks and self.dom == other.dom and self.cod == other.cod)

    def validate(self):
        if self.level == 0:
            if self.alpha is not None or self.blocks or self.dom != STAR or self.cod != STAR:
                raise TermError("level-0 morphism must be the identity of *")
            return self
        c, d = self.dom, self.cod
        a = self.alpha
        if a is None or a.source != c.arity or a.target != d.arity:
            raise TermError("alpha does not match the arities of the endpoints")
        a.validate()
        if len(self.blocks) != c.arity:
            raise TermError(f"expected {c.arity} blocks, got {len(self.blocks)}")
        for i, rng in enumerate(slot_ranges(a.values)):
            block = self.blocks[i]
            if len(block) != len(rng):
                raise TermError(f"block {i + 1} has {len(block)} entries, alpha asks for {len(rng)}")
            for comp, j in zip(block, rng):
                if comp.dom != c.children[i] or comp.cod != d.children[j - 1]:
                    raise TermError(f"component ({i + 1},{j}) has the wrong endpoints")
                comp.validate()
        return self


ONE = MorphismTerm(0, STAR, STAR)


@dataclass(frozen=True)
class MultiMorphism:
    """A finite list of morphisms out of a common domain (possibly empty)."""

    domain: Any
    components: tuple = ()

    def __post_init__(self):
        c = self.domain
        for f in self.components:
            if f.dom is not c and f.dom != c:
                raise TermError("components of a multimorphism must share the domain")

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    @property
    def targets(self):
        return tuple(f.cod for f in self.components)


@dataclass(frozen=True)
class Factorization:
    minus: Any
    middle: Any
    plus: MultiMorphism


class Verdict:
    """Boolean outcome that carries an optional counterexample."""

    def __init__(self, ok, witness=None):
        self.ok = bool(ok)
        self.witness = witness

    def __bool__(self):
        return self.ok

    def __repr__(self):
        return f"Verdict({self.ok}, witness={self.witness!r})"


def slot_ranges(values: Sequence[int]) -> list[range]:
    """Target indices ``alpha(i-1)+1 .. alpha(i)`` owned by each source index i >= 1.

    >>> [list(r) for r in slot_ranges((0, 0, 2))]
    [[], [1, 2]]
    """
    return [range(values[i - 1] + 1, values[i] + 1) for i in range(1, len(values))]


# -- degrees and object enumeration -----------------------------------------

def degree(obj) -> int:
    if isinstance(obj, int):
        return obj
    if obj.level == 0:
        return 0
    return obj.arity + sum(degree(c) for c in obj.children)


def object_key(obj):
    """Canonical sort key: degree, then arity, then children recursively."""
    if isinstance(obj, int):
        return (obj, 0, ())
    return (degree(obj), obj.arity, tuple(object_key(c) for c in obj.children))


def bracket_objects(level: int, inner_objects: Sequence, max_degree: int) -> list[ObjectTerm]:
    """All ``[m](c1..cm)`` with ``m + sum deg(ci) <= max_degree`` over the given children."""
    by_degree = [(degree(c), c) for c in inner_objects]
    out = []

    def fill(prefix, slots, budget):
        if slots == 0:
            out.append(ObjectTerm(level, tuple(prefix)))
            return
        for deg, c in by_degree:
            if deg <= budget:
                prefix.append(c)
                fill(prefix, slots - 1, budget - deg)
                prefix.pop()

    for m in range(max_degree + 1):
        fill([], m, max_degree - m)
    out.sort(key=object_key)
    return out


def enumerate_objects(level: int, max_degree: int) -> list[ObjectTerm]:
    """Objects of Theta^level(1) of degree at most ``max_degree``, canonically ordered."""
    if level == 0:
        return [STAR]
    return bracket_objects(level, enumerate_objects(level - 1, max_degree), max_degree)


# -- oracle interface --------------------------------------------------------

class ReedyOracle:
    """A multi-Reedy category presented by enumeration and decision procedures.

    Subclasses provide ``objects``, ``_hom``, ``compose``, ``identity``,
    ``is_minus``, ``is_plus`` and ``factorize``; hom-sets are memoized here.
    """

    name = "oracle"
    level = 0

    def __init__(self):
        self._homs = {}
        self._minus_from = {}

    def __getstate__(self):
        # caches are rebuilt on demand rather than shipped to worker processes
        return {k: ({} if k.startswith("_") and isinstance(v, dict) else v)
                for k, v in self.__dict__.items()}

    def objects(self, max_degree: int) -> list:
        raise NotImplementedError

    def degree(self, obj) -> int:
        return degree(obj)

    def hom(self, c, d) -> list:
        key = (c, d)
        homs = self._homs
        if key not in homs:
            homs[key] = list(self._hom(c, d))
        return homs[key]

    def _hom(self, c, d) -> Iterable:
        raise NotImplementedError

    def compose(self, g, f):
        """``g`` after ``f``."""
        raise NotImplementedError

    def identity(self, c):
        raise NotImplementedError

    def is_minus(self, f) -> bool:
        raise NotImplementedError

    def is_plus(self, fam: MultiMorphism) -> bool:
        raise NotImplementedError

    def factorize(self, fam: MultiMorphism) -> Factorization:
        raise NotImplementedError

    def is_identity(self, f) -> bool:
        return f.dom == f.cod and f == self.identity(f.dom)

    def minus_from(self, c) -> list:
        """All minus-maps out of ``c``, identity included (codomains have degree <= deg c)."""
        if c not in self._minus_from:
            self._minus_from[c] = [
                f for d in self.objects(self.degree(c)) for f in self.hom(c, d) if self.is_minus(f)
            ]
        return self._minus_from[c]

    def parse_object(self, text: str):
        return parse_term(text)

    def render_object(self, obj) -> str:
        return render_object(obj)

    def __repr__(self):
        return self.name


class TerminalOracle(ReedyOracle):
    """The terminal category: one object ``*`` of degree 0, every family is plus."""

    name = "1"
    level = 0

    def objects(self, max_degree):
        return [STAR]

    def _hom(self, c, d):
        return [ONE]

    def compose(self, g, f):
        return ONE

    def identity(self, c):
        return ONE

    def is_minus(self, f):
        return True

    def is_plus(self, fam):
        return True

    def factorize(self, fam):
        return Factorization(ONE, STAR, MultiMorphism(STAR, tuple(fam.components)))


def enumerate_hom(oracle: ReedyOracle, c, d) -> list:
    return oracle.hom(c, d)


def sections(oracle: ReedyOracle, f) -> list:
    """All ``b: cod f -> dom f`` with ``f b = id``."""
    ident = oracle.identity(f.cod)
    return [b for b in oracle.hom(f.cod, f.dom) if oracle.compose(f, b) == ident]


# -- term text and JSON ------------------------------------------------------

def render_object(obj) -> str:
    if isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return f"[{obj}]"
    if obj.level == 0:
        return "*"
    return f"[{obj.arity}](" + ",".join(render_object(c) for c in obj.children) + ")"


def morphism_to_json(f):
    if isinstance(f, MonotoneMap):
        return list(f.values)
    if not isinstance(f, MorphismTerm):
        return str(f)
    if f.level == 0:
        return "1"
    return {
        "alpha": list(f.alpha.values),
        "blocks": [[morphism_to_json(x) for x in block] for block in f.blocks],
    }


def render_morphism(f) -> str:
    return json.dumps(morphism_to_json(f), separators=(",", ":"))


def render_term(term) -> str:
    if isinstance(term, (str, int, ObjectTerm)):
        return render_object(term)
    return render_morphism(term)


class _Parser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch):
        if self.peek() != ch:
            found = repr(self.peek()) if self.peek() else "end of input"
            raise TermError(f"expected {ch!r}, found {found}", self.pos)
        self.pos += 1

    def nat(self):
        start = self.pos
        while self.peek().isdigit():
            self.pos += 1
        if start == self.pos:
            raise TermError("expected a natural number", start)
        return int(self.text[start:self.pos])

    def node(self):
        # raw trees: "*" | ("delta", n) | (m, [children], position)
        start = self.pos
        if self.peek() == "*":
            self.pos += 1
            return "*"
        self.expect("[")
        m = self.nat()
        self.expect("]")
        if self.peek() != "(":
            return ("delta", m)
        self.pos += 1
        children = []
        if self.peek() != ")":
            children.append(self.node())
            while self.peek() == ",":
                self.pos += 1
                children.append(self.node())
        self.expect(")")
        if len(children) != m:
            raise TermError(f"bracket [{m}] has {len(children)} children", start)
        return (m, children, start)


def _min_level(node):
    if node == "*":
        return 0
    if node[0] == "delta":
        return 0
    _, children, _ = node
    return 1 + max((_min_level(c) for c in children), default=0)


def _build(node, level):
    if node == "*":
        if level != 0:
            raise TermError(f"'*' cannot appear at level {level}")
        return STAR
    if node[0] == "delta":
        if level != 0:
            raise TermError(f"simplex-category object [{node[1]}] cannot appear at level {level}")
        return node[1]
    m, children, start = node
    if level < 1:
        raise TermError("bracket term cannot appear at level 0", start)
    return ObjectTerm(level, tuple(_build(c, level - 1) for c in children))


def parse_term(text: str, level: int | None = None):
    """Parse ``*``, ``[n]`` (a simplex-category object) or ``[m](c1,...,cm)``.

    The childless ``[0]()`` fits any positive level, so the level is inferred
    as the smallest consistent one unless given.
    """
    text = text.strip()
    p = _Parser(text)
    node = p.node()
    if p.pos != len(text):
        raise TermError("trailing input", p.pos)
    if level is None:
        level = _min_level(node)
        if node != "*" and node[0] == "delta":
            return node[1]
    return _build(node, level)


def parse_morphism(data, dom, cod):
    """Rebuild a morphism from its JSON form, given its endpoints."""
    if isinstance(data, str) and data.strip()[:1] in "[{":
        data = json.loads(data)
    if isinstance(dom, int):
        if not isinstance(data, list):
            raise TermError("simplex-category morphisms are lists of values")
        return MonotoneMap(dom, cod, tuple(int(v) for v in data)).validate()
    if dom.level == 0:
        if data not in ("1", 1):
            raise TermError("the level-0 morphism is written \"1\"")
        return ONE
    if not isinstance(data, dict) or set(data) != {"alpha", "blocks"}:
        raise TermError("morphism must be an object with keys alpha and blocks")
    alpha = MonotoneMap(dom.arity, cod.arity, tuple(data["alpha"])).validate()
    ranges = slot_ranges(alpha.values)
    if len(data["blocks"]) != len(ranges):
        raise TermError(f"expected {len(ranges)} blocks")
    blocks = []
    for i, (rng, raw) in enumerate(zip(ranges, data["blocks"])):
        if len(raw) != len(rng):
            raise TermError(f"block {i + 1} must have {len(rng)} entries")
        blocks.append(tuple(parse_morphism(x, dom.children[i], cod.children[j - 1])
                            for x, j in zip(raw, rng)))
    return MorphismTerm(dom.level, dom, cod, alpha, tuple(blocks)).validate()


# -- materialized truncations ------------------------------------------------

class Truncation:
    """Objects of degree <= ``max_degree`` with integer-indexed hom-sets.

    Composition tables are built lazily as numpy arrays:
    ``table(a, b, c)[g, f]`` is the index in ``hom(a, c)`` of ``g . f``.
    """

    def __init__(self, oracle: ReedyOracle, max_degree: int):
        self.oracle = oracle
        self.max_degree = max_degree
        self.objects = oracle.objects(max_degree)
        self.index = {c: i for i, c in enumerate(self.objects)}
        self.degrees = [oracle.degree(c) for c in self.objects]
        n = len(self.objects)
        self.homs = [[oracle.hom(c, d) for d in self.objects] for c in self.objects]
        self._mor_index = {}
        self._tables = {}
        self._minus = {}
        self.n = n

    def mor_index(self, a, b):
        key = (a, b)
        if key not in self._mor_index:
            self._mor_index[key] = {f: k for k, f in enumerate(self.homs[a][b])}
        return self._mor_index[key]

    def locate(self, f):
        """(a, b, k) for a morphism term, or None if it leaves the truncation."""
        a = self.index.get(f.dom)
        b = self.index.get(f.cod)
        if a is None or b is None:
            return None
        k = self.mor_index(a, b).get(f)
        return None if k is None else (a, b, k)

    def table(self, a, b, c):
        key = (a, b, c)
        tab = self._tables.get(key)
        if tab is None:
            compose = self.oracle.compose
            index = self.mor_index(a, c)
            fs, gs = self.homs[a][b], self.homs[b][c]
            tab = np.empty((len(gs), len(fs)), dtype=np.int64)
            for gi, g in enumerate(gs):
                for fi, f in enumerate(fs):
                    h = compose(g, f)
                    try:
                        tab[gi, fi] = index[h]
                    except KeyError:
                        raise FactorizationError(
                            f"composite {render_term(h)} is missing from its hom-set") from None
            self._tables[key] = tab
        return tab

    def minus_flags(self, a, b):
        key = (a, b)
        if key not in self._minus:
            is_minus = self.oracle.is_minus
            self._minus[key] = [is_minus(f) for f in self.homs[a][b]]
        return self._minus[key]

    def identity_index(self, a):
        return self.mor_index(a, a)[self.oracle.identity(self.objects[a])]

    def morphism_count(self):
        return sum(len(h) for row in self.homs for h in row)
