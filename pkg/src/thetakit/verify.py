"""Exhaustive, witness-producing verifiers over degree-truncated oracles.

Every verifier quantifies over all objects of degree <= ``max_degree`` (and
all families of valence <= ``valence``) and never samples.  Reports are
deterministic; failing reports carry replayable witnesses.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations_with_replacement, product
from math import comb

import numpy as np

from .core import (
    FactorizationError, MultiMorphism, Truncation, morphism_to_json, render_object,
)
from .delta import DeltaOracle, is_plus_family_delta
from .presheaf import (
    check_e_prime, classify_points, ez_decompose,
    point_label, product_presheaf, pushout_presheaf, representable_map, strong_pushout, yoneda,
)

MAX_WITNESSES = 20


@dataclass
class VerificationReport:
    check: str
    oracle: str
    bounds: dict
    passed: bool = True
    witnesses: list = field(default_factory=list)
    failures: Counter = field(default_factory=Counter)
    stats: Counter = field(default_factory=Counter)
    notes: list = field(default_factory=list)

    def fail(self, kind, **witness):
        self.passed = False
        self.failures[kind] += 1
        if len(self.witnesses) < MAX_WITNESSES:
            self.witnesses.append({"kind": kind, **witness})

    def merge(self, other: "VerificationReport"):
        self.passed = self.passed and other.passed
        self.failures.update(other.failures)
        self.stats.update(other.stats)
        room = MAX_WITNESSES - len(self.witnesses)
        self.witnesses.extend(other.witnesses[:max(room, 0)])

    def to_dict(self):
        return {
            "check": self.check,
            "oracle": self.oracle,
            "bounds": self.bounds,
            "verdict": "pass" if self.passed else "fail",
            "failures": dict(sorted(self.failures.items())),
            "stats": dict(sorted(self.stats.items())),
            "notes": self.notes,
            "witnesses": self.witnesses,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    def to_text(self):
        bounds = ", ".join(f"{k}={v}" for k, v in self.bounds.items())
        lines = [f"{self.check} on {self.oracle} ({bounds}): {'PASS' if self.passed else 'FAIL'}"]
        for k, v in sorted(self.stats.items()):
            lines.append(f"  {k}: {v}")
        for note in self.notes:
            lines.append(f"  note: {note}")
        for k, v in sorted(self.failures.items()):
            lines.append(f"  failures[{k}]: {v}")
        for w in self.witnesses:
            lines.append("  witness: " + json.dumps(w, separators=(",", ":")))
        return "\n".join(lines)


def _mor(f):
    return {"dom": render_object(f.dom), "cod": render_object(f.cod), "mor": morphism_to_json(f)}


def _family(c, members):
    return {"domain": render_object(c), "family": [_mor(f) for f in members]}


# -- category laws -----------------------------------------------------------

def verify_category(oracle, max_degree) -> VerificationReport:
    report = VerificationReport("category", oracle.name, {"max_degree": max_degree})
    T = Truncation(oracle, max_degree)
    n = T.n
    report.stats["objects"] = n
    report.stats["morphisms"] = T.morphism_count()
    tables = {}

    def table(a, b, c):
        if (a, b, c) not in tables:
            try:
                tables[a, b, c] = T.table(a, b, c)
            except FactorizationError as err:
                tables[a, b, c] = None
                report.fail("composite-outside-hom", objects=[render_object(T.objects[i]) for i in (a, b, c)],
                            message=str(err))
        return tables[a, b, c]

    for a in range(n):
        try:
            ida = T.identity_index(a)
        except KeyError:
            report.fail("identity-missing", object=render_object(T.objects[a]))
            continue
        for b in range(n):
            m = len(T.homs[a][b])
            right = table(a, a, b)
            left = table(a, b, b)
            if right is None or left is None:
                continue
            idb = T.identity_index(b)
            bad = np.nonzero(right[:, ida] != np.arange(m))[0]
            bad_left = np.nonzero(left[idb, :] != np.arange(m))[0]
            for k in list(bad[:1]) + list(bad_left[:1]):
                report.fail("identity-law", morphism=_mor(T.homs[a][b][k]))
            report.stats["identity_checks"] += 2 * m

    for a, b, c, d in product(range(n), repeat=4):
        t_abc, t_acd, t_bcd, t_abd = table(a, b, c), table(a, c, d), table(b, c, d), table(a, b, d)
        if any(t is None for t in (t_abc, t_acd, t_bcd, t_abd)):
            continue
        if 0 in t_abc.shape or 0 in t_bcd.shape:
            continue
        lhs = t_acd[:, t_abc]            # h . (g . f)  as [h, g, f]
        rhs = t_abd[t_bcd]               # (h . g) . f  as [h, g, f]
        report.stats["triples"] += lhs.size
        diff = np.argwhere(lhs != rhs)
        if len(diff):
            h, g, f = diff[0]
            report.fail("associativity", f=_mor(T.homs[a][b][f]), g=_mor(T.homs[b][c][g]),
                        h=_mor(T.homs[c][d][h]), count=int(len(diff)))
    return report


# -- multi-Reedy axioms ------------------------------------------------------

class _Outs:
    """Concatenated hom-sets out of one object, indexed by a single integer."""

    def __init__(self, T, a):
        sizes = [len(T.homs[a][b]) for b in range(T.n)]
        self.offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(np.int64)
        self.size = int(sum(sizes))
        self.target = np.repeat(np.arange(T.n), sizes)
        self.local = np.concatenate([np.arange(s) for s in sizes]) if self.size else np.zeros(0, np.int64)
        self.terms = [f for b in range(T.n) for f in T.homs[a][b]]


class _MultiReedy:
    def __init__(self, oracle, max_degree, valence):
        self.oracle = oracle
        self.T = Truncation(oracle, max_degree)
        self.U = valence
        self.outs = [_Outs(self.T, a) for a in range(self.T.n)]
        self.degs = np.array(self.T.degrees)
        self._premaps = {}
        self._out_index = {}

    def premap_matrix(self, a, d):
        """Row k maps out(d) into out(a) by precomposing with the k-th map ``a -> d``."""
        key = (a, d)
        if key not in self._premaps:
            T, oa = self.T, self.outs[a]
            blocks = [oa.offsets[b] + T.table(a, d, b).T for b in range(T.n) if T.homs[d][b]]
            width = self.outs[d].size
            self._premaps[key] = (np.concatenate(blocks, axis=1) if blocks
                                  else np.zeros((len(T.homs[a][d]), width), dtype=np.int64))
        return self._premaps[key]

    def out_index(self, a):
        if a not in self._out_index:
            self._out_index[a] = {f: i for i, f in enumerate(self.outs[a].terms)}
        return self._out_index[a]

    def plus_rows(self, a):
        oracle, c, oa = self.oracle, self.T.objects[a], self.outs[a]
        rows = {}
        for u in range(self.U + 1):
            keep = [digits for digits in product(range(oa.size), repeat=u)
                    if oracle.is_plus(MultiMorphism(c, tuple(oa.terms[i] for i in digits)))]
            rows[u] = np.array(keep, dtype=np.int64).reshape(len(keep), u)
        return rows

    def check_object(self, a, plus):
        """Every check whose quantifier starts at object ``a``."""
        oracle, T, U = self.oracle, self.T, self.U
        c, oa, deg_a = T.objects[a], self.outs[a], T.degrees[a]
        report = VerificationReport("multireedy", oracle.name, {})
        st = report.stats
        st["objects"] += 1
        ida = T.identity_index(a)
        id_out = int(oa.offsets[a] + ida)
        plus_sets = {1: set(map(tuple, plus[a][1].tolist()))} if U >= 1 else {}

        # minus-maps out of a: degree, identity, closure, unique map to degree 0
        minus_out = []
        to_zero = 0
        for e in range(T.n):
            flags = T.minus_flags(a, e)
            for k, flag in enumerate(flags):
                if not flag:
                    continue
                f = T.homs[a][e][k]
                minus_out.append((e, k))
                st["minus_maps"] += 1
                if T.degrees[e] == 0:
                    to_zero += 1
                is_id = e == a and k == ida
                if T.degrees[e] > deg_a or (T.degrees[e] == deg_a) != is_id:
                    report.fail("minus-degree", morphism=_mor(f))
                if (int(oa.offsets[e] + k),) in plus_sets.get(1, ()) and not is_id:
                    report.fail("minus-and-plus", morphism=_mor(f))
        if to_zero != 1:
            report.fail("minus-to-degree-zero", object=render_object(c), count=to_zero)
        if not T.minus_flags(a, a)[ida]:
            report.fail("identity-not-minus", object=render_object(c))
        if U >= 1 and (id_out,) not in plus_sets[1]:
            report.fail("identity-not-plus", object=render_object(c))
        for e, k in minus_out:
            for b in range(T.n):
                flags_eb = T.minus_flags(e, b)
                flags_ab = T.minus_flags(a, b)
                tab = T.table(a, e, b)
                for g, flag in enumerate(flags_eb):
                    if flag:
                        st["minus_composites"] += 1
                        if not flags_ab[tab[g, k]]:
                            report.fail("minus-not-closed", f=_mor(T.homs[a][e][k]), g=_mor(T.homs[e][b][g]))

        # plus families: degree inequality, valence-1 equality case
        for u in range(U + 1):
            rows = plus[a][u]
            st["plus_families"] += len(rows)
            if u == 0:
                if len(rows) != (1 if deg_a == 0 else 0):
                    report.fail("empty-family", object=render_object(c), plus=bool(len(rows)))
                continue
            total = self.degs[oa.target[rows]].sum(axis=1)
            for r in np.nonzero(total < deg_a)[0][:3]:
                report.fail("plus-degree", **_family(c, [oa.terms[i] for i in rows[r]]))
            if u == 1:
                eq = np.nonzero((total == deg_a) & (rows[:, 0] != id_out))[0]
                for r in eq[:3]:
                    report.fail("plus-degree-equality", morphism=_mor(oa.terms[rows[r, 0]]))

        # brute-force uniqueness: every (minus g, plus family h) pair is pushed
        # onto the code of h.g; each family code must be hit exactly once
        N = oa.size
        owners = {}
        for u in range(U + 1):
            counts = np.zeros(N ** u, dtype=np.int64)
            owner = np.full(N ** u, -1, dtype=np.int64)
            owner_h = np.zeros(N ** u, dtype=np.int64)
            powers = N ** np.arange(u - 1, -1, -1, dtype=np.int64)
            for m_id, (e, k) in enumerate(minus_out):
                rows = plus[e][u]
                if not len(rows):
                    continue
                pm = self.premap_matrix(a, e)[k]
                codes = pm[rows] @ powers if u else np.zeros(len(rows), dtype=np.int64)
                counts += np.bincount(codes, minlength=N ** u)
                owner[codes] = m_id
                owner_h[codes] = rows @ (self.outs[e].size ** np.arange(u - 1, -1, -1, dtype=np.int64))
                st["factorization_candidates"] += len(rows)
            for code in np.nonzero(counts != 1)[0][:3]:
                digits = np.unravel_index(code, (N,) * u) if u else ()
                members = [oa.terms[int(i)] for i in digits]
                report.fail("factorization-count", count=int(counts[code]), **_family(c, members))
            report.stats["factorization_count_failures"] += int((counts != 1).sum())
            owner[counts != 1] = -1
            owners[u] = (owner.tolist(), owner_h.tolist())

        # the factorization returned for every family must be that unique pair
        minus_id = {T.homs[a][e][k]: m_id for m_id, (e, k) in enumerate(minus_out)}
        factorize = oracle.factorize
        terms = oa.terms
        for u in range(U + 1):
            owner, owner_h = owners[u]
            for code, digits in enumerate(product(range(N), repeat=u)):
                members = tuple(terms[i] for i in digits)
                st["families"] += 1
                try:
                    fact = factorize(MultiMorphism(c, members))
                except Exception as err:
                    report.fail("factorize-raised", message=str(err), **_family(c, members))
                    continue
                m_id = minus_id.get(fact.minus)
                if m_id is None:
                    report.fail("minus-part-not-minus", minus=_mor(fact.minus), **_family(c, members))
                    continue
                if owner[code] < 0:
                    continue  # already counted as a uniqueness failure
                hs = fact.plus.components
                e = minus_out[m_id][0]
                index_e = self.out_index(e)
                size_e = self.outs[e].size
                try:
                    hcode = 0
                    for h in hs:
                        hcode = hcode * size_e + index_e[h]
                except KeyError:
                    hcode = -1
                if (m_id != owner[code] or hcode != owner_h[code] or len(hs) != u
                        or fact.middle != T.objects[e] or fact.plus.domain != T.objects[e]):
                    report.fail("factorization-mismatch", minus=_mor(fact.minus),
                                plus=[_mor(h) for h in hs], **_family(c, members))

        # plus families closed under multi-composition (total valence <= U)
        plus_codes = {w: np.sort(_encode(plus[a][w], N)) for w in range(U + 1)}
        for u in range(1, U + 1):
            rows = plus[a][u]
            if not len(rows):
                continue
            targets = oa.target[rows]
            keys, group = np.unique(targets, axis=0, return_inverse=True)
            group = group.ravel()
            for key_id, key in enumerate(keys):
                grp = rows[group == key_id]
                for vs in _valence_splits(u, U):
                    if any(not len(plus[int(d)][v]) for d, v in zip(key, vs)):
                        continue
                    w = sum(vs)
                    # per member s: codes in out(a) of (f_s . g) for every plus family g at cod(f_s)
                    subs = []
                    for s, (d, v) in enumerate(zip(key, vs)):
                        d = int(d)
                        pm = self.premap_matrix(a, d)[oa.local[grp[:, s]]]
                        sub_rows = plus[d][v]
                        subs.append(_encode(pm[:, sub_rows], N) if v
                                    else np.zeros((len(grp), len(sub_rows)), dtype=np.int64))
                    width = int(np.prod([sub.shape[1] for sub in subs]))
                    step = max(1, 4_000_000 // max(width, 1))
                    for lo in range(0, len(grp), step):
                        codes = np.zeros((min(step, len(grp) - lo), 1), dtype=np.int64)
                        for sub, v in zip(subs, vs):
                            part = sub[lo:lo + step]
                            codes = (codes[:, :, None] * N ** v + part[:, None, :]).reshape(len(part), -1)
                        st["plus_composites"] += codes.size
                        ok = _member(plus_codes[w], codes)
                        if not ok.all():
                            r, col = np.argwhere(~ok)[0]
                            digits = np.unravel_index(int(codes[r, col]), (N,) * w) if w else ()
                            report.fail("plus-not-closed",
                                        outer=_family(c, [oa.terms[i] for i in grp[lo + r]]),
                                        **_family(c, [oa.terms[int(i)] for i in digits]))
        return report


def _encode(rows, base):
    """Base-``base`` codes of digit rows along the last axis."""
    v = rows.shape[-1]
    return rows @ (base ** np.arange(v - 1, -1, -1, dtype=np.int64)) if v else np.zeros(rows.shape[:-1], np.int64)


def _member(sorted_codes, codes):
    if not len(sorted_codes):
        return np.zeros(codes.shape, dtype=bool)
    pos = np.minimum(np.searchsorted(sorted_codes, codes), len(sorted_codes) - 1)
    return sorted_codes[pos] == codes


def _valence_splits(u, U):
    for vs in product(range(U + 1), repeat=u):
        if sum(vs) <= U:
            yield vs


_WORKER = {}


def _worker_init(oracle, max_degree, valence, plus):
    _WORKER["job"] = _MultiReedy(oracle, max_degree, valence)
    _WORKER["plus"] = plus


def _worker_check(a):
    return _WORKER["job"].check_object(a, _WORKER["plus"])


def verify_multi_reedy(oracle, max_degree, valence=2, jobs=1, sample=None) -> VerificationReport:
    """Factorization existence, validity and uniqueness for every family of
    valence <= ``valence``, degree inequalities, closure of both classes."""
    job = _MultiReedy(oracle, max_degree, valence)
    T = job.T
    report = VerificationReport("multireedy", oracle.name, {"max_degree": max_degree, "valence": valence})
    plus = {a: job.plus_rows(a) for a in range(T.n)}
    if jobs > 1:
        with ProcessPoolExecutor(jobs, initializer=_worker_init,
                                 initargs=(oracle, max_degree, valence, plus)) as pool:
            parts = list(pool.map(_worker_check, range(T.n)))
    else:
        parts = [job.check_object(a, plus) for a in range(T.n)]
    for part in parts:
        report.merge(part)
    report.stats["morphisms"] = T.morphism_count()
    if sample is not None:
        _sample_factorizations(oracle, max_degree + 2, valence, sample, report)
    return report


def _sample_factorizations(oracle, max_degree, valence, seed, report, count=200):
    """Random families above the exhaustive bound; recorded in stats, never in the verdict."""
    rng = random.Random(seed)
    objs = oracle.objects(max_degree)
    ok = 0
    for _ in range(count):
        c = rng.choice(objs)
        members = []
        for _ in range(rng.randint(0, valence)):
            d = rng.choice(objs)
            hom = oracle.hom(c, d)
            if hom:
                members.append(rng.choice(hom))
        fact = oracle.factorize(MultiMorphism(c, tuple(members)))
        good = (oracle.is_minus(fact.minus) and oracle.is_plus(fact.plus)
                and all(oracle.compose(h, fact.minus) == f for h, f in zip(fact.plus, members)))
        ok += good
    report.stats["sample_seed"] = seed
    report.stats["sample_families"] = count
    report.stats["sample_ok"] = ok
    report.notes.append(f"sampled families at degree <= {max_degree} do not affect the verdict")


# -- EZ conditions, idempotents ----------------------------------------------

def verify_ez(oracle, max_degree) -> VerificationReport:
    report = VerificationReport("ez", oracle.name, {"max_degree": max_degree})
    T = Truncation(oracle, max_degree)
    homs_nonempty = True
    for a in range(T.n):
        for b in range(T.n):
            if not T.homs[a][b]:
                homs_nonempty = False
            flags = T.minus_flags(a, b)
            if not any(flags):
                continue
            tab = T.table(b, a, b)  # [sigma, beta] -> sigma . beta
            idb = T.identity_index(b)
            seen = {}
            for k, flag in enumerate(flags):
                if not flag:
                    continue
                sigma = T.homs[a][b][k]
                report.stats["minus_maps"] += 1
                gamma = frozenset(np.nonzero(tab[k] == idb)[0].tolist())
                report.stats["sections"] += len(gamma)
                if not gamma:
                    report.fail("EZ1", morphism=_mor(sigma))
                for s in gamma:
                    beta = T.homs[b][a][s]
                    if not oracle.is_plus(MultiMorphism(beta.dom, (beta,))):
                        report.fail("section-not-plus", morphism=_mor(sigma), section=_mor(beta))
                if gamma in seen:
                    report.fail("EZ2", first=_mor(T.homs[a][b][seen[gamma]]), second=_mor(sigma))
                seen.setdefault(gamma, k)
    report.stats["homs_nonempty"] = int(homs_nonempty)
    report.notes.append(f"hom-sets between bounded objects all non-empty: {homs_nonempty}")
    return report


def split_idempotent(oracle, eps):
    """Split ``eps = sig . rho`` with ``rho`` minus, ``sig`` plus and ``rho . sig = id``."""
    if eps.dom != eps.cod or oracle.compose(eps, eps) != eps:
        raise ValueError("not an idempotent endomorphism")
    fact = oracle.factorize(MultiMorphism(eps.dom, (eps,)))
    rho, sig = fact.minus, fact.plus.components[0]
    if oracle.compose(rho, sig) != oracle.identity(fact.middle):
        raise FactorizationError("rho . sigma is not the identity")
    if oracle.compose(sig, rho) != eps:
        raise FactorizationError("sigma . rho does not recover the idempotent")
    return rho, sig


def verify_idempotents(oracle, max_degree, retracts=True) -> VerificationReport:
    """Every bounded idempotent ``eps`` splits; optionally the image of ``F eps``
    is represented by the splitting object, i.e. at every bounded ``t`` the maps
    ``eps . x`` are exactly the ``sig . phi``, each hit once."""
    report = VerificationReport("idempotents", oracle.name, {"max_degree": max_degree})
    T = Truncation(oracle, max_degree)
    for a in range(T.n):
        tab = T.table(a, a, a)
        for k in range(len(T.homs[a][a])):
            if tab[k, k] != k:
                continue
            eps = T.homs[a][a][k]
            report.stats["idempotents"] += 1
            try:
                rho, sig = split_idempotent(oracle, eps)
            except (ValueError, FactorizationError) as err:
                report.fail("split", morphism=_mor(eps), message=str(err))
                continue
            if not retracts:
                continue
            report.stats["retracts"] += 1
            loc = T.locate(sig)
            if loc is None:
                report.fail("retract-outside-truncation", morphism=_mor(eps))
                continue
            d, _, sk = loc
            for t in range(T.n):
                image = set(T.table(t, a, a)[k].tolist())
                through = T.table(t, d, a)[sk].tolist()
                if len(set(through)) != len(through) or set(through) != image:
                    report.fail("retract-not-representable", morphism=_mor(eps),
                                test_object=render_object(T.objects[t]))
                    break
    return report


# -- elegance ----------------------------------------------------------------

def e_sweep(X, report=None, label=""):
    """(E) pointwise via ``ez_decompose`` and (E') per object; returns (E holds, agreement)."""
    classes = classify_points(X)
    holds, agree = True, True
    for t in X.objects:
        pointwise = True
        for x in X(t):
            dec = ez_decompose(X, t, x, classes)
            if not dec.unique:
                pointwise = False
                if report is not None:
                    report.fail("E", presheaf=label, object=render_object(t), point=point_label(x),
                                pairs=len(dec.pairs))
        prime = check_e_prime(X, t, classes)
        if report is not None:
            report.stats["points"] += X.size(t)
        holds = holds and pointwise
        if bool(prime) != pointwise:
            agree = False
            if report is not None:
                report.fail("E-vs-E'", presheaf=label, object=render_object(t))
    return holds, agree


def verify_elegance_sp(oracle, max_degree) -> VerificationReport:
    """(SP) for every pair of minus-maps out of every bounded object, cross-checked
    against (E)/(E') on the representables and on every pushout that was built."""
    report = VerificationReport("sp", oracle.name, {"max_degree": max_degree})
    N = max_degree
    sp_ok = True
    e_ok = True
    for c in oracle.objects(max_degree):
        minus = oracle.minus_from(c)
        for s1, s2 in combinations_with_replacement(minus, 2):
            report.stats["pairs"] += 1
            res = strong_pushout(oracle, s1, s2, N)
            if not res.ok:
                sp_ok = False
                report.fail("SP", sigma1=_mor(s1), sigma2=_mor(s2), candidates=res.candidates)
            elif oracle.compose(res.tau1, s1) != oracle.compose(res.tau2, s2):
                sp_ok = False
                report.fail("SP-square", sigma1=_mor(s1), sigma2=_mor(s2))
            P, _, _ = pushout_presheaf(representable_map(oracle, s1, N), representable_map(oracle, s2, N))
            holds, agree = e_sweep(P, report, label=f"pushout {json.dumps(_mor(s1))} {json.dumps(_mor(s2))}")
            report.stats["presheaves"] += 1
            e_ok = e_ok and holds
        Fc = yoneda(oracle, c, N)
        holds, agree = e_sweep(Fc, report, label=f"F{render_object(c)}")
        report.stats["presheaves"] += 1
        e_ok = e_ok and holds
    report.stats["sp_holds"] = int(sp_ok)
    report.stats["e_holds"] = int(e_ok)
    if sp_ok != e_ok:
        report.fail("SP-vs-E", sp=sp_ok, e=e_ok)
    report.notes.append(f"presheaves truncated at degree {N}; representability checked on bounded objects")
    return report


# -- Yoneda images of minus maps and plus families ---------------------------

def verify_F_classes(oracle, max_degree, valence=2) -> VerificationReport:
    """Minus-maps have epi Yoneda image, plus families have mono image, and (for
    single morphisms) conversely, all tested at the bounded objects."""
    report = VerificationReport("fclasses", oracle.name, {"max_degree": max_degree, "valence": valence})
    report.notes.append(f"bounded: images tested at objects of degree <= {max_degree}")
    T = Truncation(oracle, max_degree)
    n = T.n
    for a in range(n):
        c = T.objects[a]
        outs = [(b, k) for b in range(n) for k in range(len(T.homs[a][b]))]

        # single morphisms, both directions
        for b, k in outs:
            f = T.homs[a][b][k]
            epi = all(len(set(T.table(t, a, b)[k].tolist())) == len(T.homs[t][b]) for t in range(n))
            mono = all(len(set(T.table(t, a, b)[k].tolist())) == len(T.homs[t][a]) for t in range(n))
            minus = T.minus_flags(a, b)[k]
            plus = oracle.is_plus(MultiMorphism(c, (f,)))
            report.stats["morphisms"] += 1
            if minus and not epi:
                report.fail("minus-not-epi", morphism=_mor(f))
            if epi and not minus:
                report.fail("epi-not-minus", morphism=_mor(f))
            if plus and not mono:
                report.fail("plus-not-mono", morphism=_mor(f))
            if mono and not plus:
                report.fail("mono-not-plus", morphism=_mor(f))

        # plus families of every valence <= bound are jointly mono
        for u in range(valence + 1):
            if u == 1:
                continue
            for fam in product(outs, repeat=u):
                members = tuple(T.homs[a][b][k] for b, k in fam)
                if not oracle.is_plus(MultiMorphism(c, members)):
                    continue
                report.stats["plus_families"] += 1
                for t in range(n):
                    size = len(T.homs[t][a])
                    if u == 0:
                        ok = size <= 1
                    else:
                        cols = [T.table(t, a, b)[k] for b, k in fam]
                        ok = len(set(zip(*(col.tolist() for col in cols)))) == size
                    if not ok:
                        report.fail("plus-family-not-mono", test_object=render_object(T.objects[t]),
                                    **_family(c, members))
                        break
    return report


# -- prisms ------------------------------------------------------------------

def prism_correspondence(m, factors, delta=None) -> VerificationReport:
    """Jointly monic families ``[m] -> [n1],...,[nr]`` against non-degenerate
    m-cells of ``F[n1] x ... x F[nr]``."""
    delta = delta or DeltaOracle()
    report = VerificationReport("prism", delta.name, {"m": m, "factors": list(factors)})
    homs = [delta.hom(m, n) for n in factors]
    plus = sum(1 for fam in product(*homs) if is_plus_family_delta(MultiMorphism(m, tuple(fam))))
    X = product_presheaf(*(yoneda(delta, n, m) for n in factors))
    nd = len(classify_points(X).nondegenerate[m])
    report.stats["plus_families"] = plus
    report.stats["nondegenerate_cells"] = nd
    if len(factors) == 1:
        report.stats["injections"] = comb(factors[0] + 1, m + 1)
        if plus != comb(factors[0] + 1, m + 1):
            report.fail("injections", plus=plus)
    if plus != nd:
        report.fail("prism", plus=plus, nondegenerate=nd)
    return report


def verify_theta1_delta(max_degree, valence=1) -> VerificationReport:
    from .theta import theta1_delta_equiv
    report = VerificationReport("equiv-delta", "Theta(1) vs delta", {"max_degree": max_degree, "valence": valence})
    mismatches, stats = theta1_delta_equiv(max_degree, valence)
    report.stats.update(stats)
    for w in mismatches:
        report.fail(w.pop("kind"), **w)
    return report
