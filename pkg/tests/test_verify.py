import json
from itertools import product

import pytest

from thetakit.core import MonotoneMap, MultiMorphism, TerminalOracle, parse_morphism, parse_term
from thetakit.delta import DeltaOracle
from thetakit.fixtures import BrokenComposition, ExtraPlus, non_elegant, sectionless
from thetakit.theta import theta_tower
from thetakit.verify import (
    MAX_WITNESSES, VerificationReport, e_sweep, prism_correspondence, split_idempotent,
    verify_category, verify_elegance_sp, verify_ez, verify_F_classes, verify_idempotents,
    verify_multi_reedy, verify_theta1_delta,
)
from thetakit.presheaf import yoneda

delta = DeltaOracle()
theta2 = theta_tower(2)


@pytest.mark.parametrize("oracle,D", [(TerminalOracle(), 3), (delta, 3), (theta2, 2), (theta_tower(1, "delta"), 2)])
def test_category_laws_hold(oracle, D):
    report = verify_category(oracle, D)
    assert report.passed, report.to_text()
    assert report.stats["triples"] > 0


def test_broken_composition_gives_triple_witness():
    report = verify_category(BrokenComposition(), 2)
    assert not report.passed
    w = next(w for w in report.witnesses if w["kind"] == "associativity")
    f, g, h = (parse_morphism(w[k]["mor"], parse_term(w[k]["dom"]), parse_term(w[k]["cod"])) for k in "fgh")
    broken = BrokenComposition()
    assert broken.compose(h, broken.compose(g, f)) != broken.compose(broken.compose(h, g), f)


@pytest.mark.parametrize("oracle,D", [(TerminalOracle(), 2), (delta, 3), (theta_tower(1), 3), (theta2, 3),
                                      (theta_tower(1, "delta"), 2), (theta_tower(3), 3)])
def test_multi_reedy_small(oracle, D):
    report = verify_multi_reedy(oracle, D, 2)
    assert report.passed, report.to_text()
    assert report.stats["families"] == report.stats["factorization_candidates"]


def test_multi_reedy_valence_three():
    assert verify_multi_reedy(delta, 2, 3).passed


def test_extra_plus_map_breaks_uniqueness():
    report = verify_multi_reedy(ExtraPlus(), 2, 2)
    assert not report.passed
    assert report.failures["factorization-count"] > 0
    w = next(w for w in report.witnesses if w["kind"] == "factorization-count")
    assert w["count"] == 2
    fam = [parse_morphism(x["mor"], parse_term(x["dom"]), parse_term(x["cod"])) for x in w["family"]]
    assert [f.values for f in fam] == [(0, 0)]


def test_parallel_run_matches_serial():
    serial = verify_multi_reedy(theta2, 2, 2)
    parallel = verify_multi_reedy(theta2, 2, 2, jobs=2)
    assert serial.to_json() == parallel.to_json()


def test_sample_does_not_change_verdict():
    report = verify_multi_reedy(delta, 2, 2, sample=7)
    assert report.passed
    assert report.stats["sample_ok"] == report.stats["sample_families"]
    again = verify_multi_reedy(delta, 2, 2, sample=7)
    assert again.to_json() == report.to_json()


def test_ez_passes_and_fails():
    assert verify_ez(delta, 4).passed
    assert verify_ez(theta2, 3).passed
    assert verify_ez(TerminalOracle(), 3).passed
    report = verify_ez(non_elegant(), 1)
    assert not report.passed and report.failures["EZ2"] == 1
    report = verify_ez(sectionless(), 1)
    assert not report.passed and report.failures["EZ1"] == 1
    assert report.stats["homs_nonempty"] == 0


def test_split_idempotent_example():
    eps = MonotoneMap(1, 1, (0, 0))
    rho, sig = split_idempotent(delta, eps)
    assert rho.values == (0, 0) and sig.values == (0,)
    assert delta.compose(rho, sig) == delta.identity(0)
    rho, sig = split_idempotent(delta, delta.identity(2))
    assert delta.is_identity(rho) and delta.is_identity(sig)
    with pytest.raises(ValueError):
        split_idempotent(delta, MonotoneMap(0, 1, (0,)))
    with pytest.raises(ValueError):
        split_idempotent(delta, MonotoneMap(2, 2, (0, 0, 1)))


def test_idempotents_split():
    for oracle in (delta, theta2, theta_tower(1, "delta")):
        report = verify_idempotents(oracle, 3)
        assert report.passed, report.to_text()
        assert report.stats["idempotents"] == report.stats["retracts"]


def test_elegance_passes_and_agrees():
    for oracle, D in ((delta, 3), (theta2, 2)):
        report = verify_elegance_sp(oracle, D)
        assert report.passed, report.to_text()
        assert report.stats["sp_holds"] == report.stats["e_holds"] == 1


def test_non_elegant_fixture_rejected_by_both_routes():
    report = verify_elegance_sp(non_elegant(), 1)
    assert not report.passed
    assert report.failures["SP"] == 1 and report.failures["E"] >= 1
    assert report.stats["sp_holds"] == report.stats["e_holds"] == 0
    w = next(w for w in report.witnesses if w["kind"] == "SP")
    assert {w["sigma1"]["mor"], w["sigma2"]["mor"]} == {"p", "q"}


def test_e_sweep_on_representables():
    holds, agree = e_sweep(yoneda(delta, 2, 3))
    assert holds and agree


def test_F_classes():
    assert verify_F_classes(delta, 3, 2).passed
    assert verify_F_classes(theta2, 2, 2).passed
    report = verify_F_classes(ExtraPlus(), 2, 1)
    assert not report.passed and report.failures["plus-not-mono"] == 1


@pytest.mark.parametrize("m,factors,count", [(1, [1, 1], 5), (2, [1, 1], 2), (0, [1, 1], 4), (1, [2], 3)])
def test_prism_examples(m, factors, count):
    report = prism_correspondence(m, factors)
    assert report.passed
    assert report.stats["plus_families"] == report.stats["nondegenerate_cells"] == count


def test_prism_injections():
    for m in range(4):
        for n in range(4):
            assert prism_correspondence(m, [n]).passed


def test_equivalence_report():
    report = verify_theta1_delta(3, 1)
    assert report.passed and report.stats["objects"] == 4


def test_report_rendering_and_witness_cap():
    report = VerificationReport("demo", "x", {"max_degree": 1})
    for i in range(MAX_WITNESSES + 5):
        report.fail("kind", index=i)
    assert len(report.witnesses) == MAX_WITNESSES
    assert report.failures["kind"] == MAX_WITNESSES + 5
    data = json.loads(report.to_json())
    assert data["verdict"] == "fail" and data["bounds"] == {"max_degree": 1}
    assert report.to_text().startswith("demo on x (max_degree=1): FAIL")


def test_factorization_stats_count_every_family():
    report = verify_multi_reedy(delta, 2, 2)
    outs = [sum(len(delta.hom(a, b)) for b in range(3)) for a in range(3)]
    assert report.stats["families"] == sum(1 + n + n * n for n in outs)
    assert report.stats["plus_families"] == sum(
        1 for a in range(3) for u in range(3)
        for fam in product([f for b in range(3) for f in delta.hom(a, b)], repeat=u)
        if delta.is_plus(MultiMorphism(a, fam)))
