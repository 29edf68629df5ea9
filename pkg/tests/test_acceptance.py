"""Acceptance suite: one test per criterion, exact values, stated runtime caps.

Every equality is exact rational arithmetic (tolerance zero).  Each test
prints a single PASS line when its criterion holds; assertion failures
mark the criterion failed.
"""

import json
import time
from fractions import Fraction

from weiltate.classifier import (
    NOT_APPLICABLE,
    PASS,
    SCHT_APPLICABLE,
    LemmaInstance,
    classify_orbits,
    honda_tate_endomorphism,
    predicted_signature,
    verify_lemma_suite,
    weil_tate_submotives,
)
from weiltate.cli import classify_scenario_doc, slope_oracle_rows
from weiltate.forge import forge_totally_real, scenario_main, scenario_ramified, scenario_split
from weiltate.galois import index2_overgroups
from weiltate.slopes import (
    fix_of_slope,
    fixer_by_definition,
    frobenius_rank,
    is_p_potentially_in,
    minimal_field_index,
    potential_by_valuation_grouping,
)

HALF = Fraction(1, 2)


def report(criterion: str) -> None:
    print(f"ACCEPTANCE {criterion}: PASS")


def test_criterion_1_main4_exotic_orbit():
    start = time.monotonic()
    scn = scenario_main(4, 5)
    rep = classify_orbits(scn.model, scn.slopes, phi=scn.phi)
    assert len(rep.exotic) == 1
    (exotic,) = rep.exotic
    assert exotic.weight == 4
    assert exotic.rank == 2
    orbit_sets = {frozenset(m) for m in exotic.orbit}
    assert frozenset({0, 1, 2, 3}) in orbit_sets  # G-conjugate to {1,2,3,4}
    assert exotic.hodge_type == (3, 1)
    assert exotic.hodge_balanced is False
    assert rep.mildly_exotic is True
    assert rep.scht_verdict == SCHT_APPLICABLE
    elapsed = time.monotonic() - start
    assert elapsed < 10, f"runtime {elapsed:.2f}s exceeds 10s"
    report("1 (main g=4: unique rank-2 exotic orbit, hodge (3,1), mildly exotic)")


def test_criterion_2_main6_exotic_orbit():
    start = time.monotonic()
    scn = scenario_main(6, 5)
    rep = classify_orbits(scn.model, scn.slopes, phi=scn.phi, subset_cap=16)
    assert len(rep.exotic) == 1
    (exotic,) = rep.exotic
    assert exotic.weight == 6
    assert exotic.rank == 2
    assert exotic.hodge_type == (4, 2)
    elapsed = time.monotonic() - start
    assert elapsed < 120, f"runtime {elapsed:.2f}s exceeds 120s"
    report("2 (main g=6: unique rank-2 exotic orbit, hodge (4,2))")


def test_criterion_3_ramified3_invariants_and_exotic():
    scn = scenario_ramified(3, 5)
    end = honda_tate_endomorphism(scn.model, scn.slopes)
    assert sorted(p.invariant for p in end.local_invariants) == [0, HALF, HALF]
    assert end.index == 2
    assert not end.commutative
    assert end.frobenius_field_degree == 6
    assert end.abelian_variety_dim == 6

    rep = classify_orbits(scn.model, scn.slopes)
    assert len(rep.exotic) == 1
    (exotic,) = rep.exotic

    entries = weil_tate_submotives(scn.model, scn.slopes)
    assert len(entries) == 2
    fix = fix_of_slope(scn.model, scn.slopes)
    in_frobenius_field = [e for e in entries if fix <= e.subgroup]
    assert len(in_frobenius_field) == 1  # the unique imaginary quadratic subfield of F
    (inner,) = in_frobenius_field
    assert inner.is_tate and inner.is_exotic
    exotic_orbit = {frozenset(m) for m in exotic.orbit}
    assert frozenset(inner.determinant_set) in exotic_orbit

    (outer,) = [e for e in entries if not fix <= e.subgroup]
    assert outer.is_tate and outer.is_lefschetz_bearing and not outer.is_exotic
    report("3 (ramified g'=3: invariants {1/2,1/2,0}, m=2, unique exotic = det over Q1, "
           "second determinant Tate but Lefschetz)")


def test_criterion_4_split3_two_exotic():
    scn = scenario_split(3, 5)
    end = honda_tate_endomorphism(scn.model, scn.slopes)
    assert end.commutative
    assert end.frobenius_field_degree == 12
    rep = classify_orbits(scn.model, scn.slopes)
    assert len(rep.exotic) == 2
    assert all(o.rank == 2 for o in rep.exotic)
    report("4 (split g'=3: commutative, [F:Q]=12, two rank-2 exotic orbits)")


def test_criterion_5_frobenius_ranks():
    assert frobenius_rank(scenario_main(4, 5).model, scenario_main(4, 5).slopes) == 3
    assert frobenius_rank(scenario_main(6, 5).model, scenario_main(6, 5).slopes) == 5
    scn = scenario_ramified(3, 5)
    assert frobenius_rank(scn.model, scn.slopes) == 2
    scn = scenario_split(3, 5)
    assert frobenius_rank(scn.model, scn.slopes) == 4
    report("5 (frobenius ranks g-1 / g-1 / g/2-1 / g-2)")


def test_criterion_6_slope_oracle_equivalence():
    # presets first
    for scn in (scenario_main(4, 5), scenario_main(6, 5), scenario_ramified(3, 5),
                scenario_split(3, 5)):
        model, s = scn.model, scn.slopes
        fix = fix_of_slope(model, s)
        assert fix == fixer_by_definition(model, s)
        assert (model.group.degree) % minimal_field_index(model, s) == 0
        for Z in index2_overgroups(model.group, model.H) + [model.H, fix]:
            assert is_p_potentially_in(model, s, Z) == potential_by_valuation_grouping(
                model, s, Z
            )
    # 100 seeded random admissible slope vectors per degree
    mismatches = 0
    total = 0
    for g in (2, 3, 4):
        rows = slope_oracle_rows(g, 100, seed=29)
        total += len(rows)
        mismatches += sum(not r["all_pass"] for r in rows)
    assert total == 300
    assert mismatches == 0
    report("6 (slope-machinery oracle equivalence: presets + 300 random instances, zero mismatches)")


def test_criterion_7_lemma_suite():
    instances = []
    for scn in (scenario_main(4, 5), scenario_main(6, 5), scenario_ramified(3, 5),
                scenario_split(3, 5)):
        instances.append(
            LemmaInstance(label=scn.name, model=scn.model, slopes=scn.slopes, family=scn.family)
        )
    rows = verify_lemma_suite(instances)
    assert all(r.status in (PASS, NOT_APPLICABLE) for r in rows)
    by_key = {(r.instance, r.lemma): r.status for r in rows}
    # the partition lemma holds on every (mildly exotic) preset
    for scn_name in ("main-g4-p5", "main-g6-p5", "ramified-gp3-p5", "split-gp3-p5"):
        assert by_key[(scn_name, "exotic_partition")] == PASS
    # half-weight minimum and uniqueness hold in the noncommutative setting
    assert by_key[("ramified-gp3-p5", "half_weight_minimum")] == PASS
    assert by_key[("ramified-gp3-p5", "exotic_uniqueness")] == PASS
    # the main family has a unique exotic orbit
    assert by_key[("main-g4-p5", "main_family_unique_exotic")] == PASS
    assert by_key[("main-g6-p5", "main_family_unique_exotic")] == PASS
    report("7 (lemma suite: partition, half-weight minimum, uniqueness, main-family "
           "uniqueness all PASS)")


def test_criterion_8_duality_and_signature():
    for scn in (scenario_main(4, 5), scenario_main(6, 5), scenario_ramified(3, 5),
                scenario_split(3, 5)):
        rep = classify_orbits(scn.model, scn.slopes)
        assert rep.tate_dims == tuple(reversed(rep.tate_dims))
    scn = scenario_main(4, 5)
    rep = classify_orbits(scn.model, scn.slopes)
    assert rep.tate_dims[:3] == (1, 4, 8)
    assert predicted_signature(rep, 4) == (5, 3)
    assert any("Tate classes" in note for note in rep.notes)
    report("8 (rho_k = rho_{g-k} everywhere; main g=4 rho=(1,4,8), signature (5,3))")


def test_criterion_9_forge_certificates():
    for g, p, l, lp in ((4, 5, 7, 11), (6, 7, 11, 13)):
        seen = set()
        for seed in range(10):
            start = time.monotonic()
            f = forge_totally_real(g, p, l, lp, seed=seed)
            elapsed = time.monotonic() - start
            assert elapsed < 30, f"forging ({g},{p},{l},{lp}) seed {seed} took {elapsed:.1f}s"
            c = f.certificates
            assert c.pattern_at_p == ((g, 1),)
            assert c.pattern_at_l == ((g, 1),)
            assert c.roots_at_lp == g - 2
            assert c.pattern_at_lp == ((1, g - 2), (2, 1))
            assert c.real_root_count == g
            assert c.galois_is_sg
            seen.add(f.poly)
        assert len(seen) == 10, f"outputs for ({g},{p},{l},{lp}) are not pairwise distinct"
    report("9 (forge: 2 configurations x 10 seeds, all certificates pass, outputs distinct)")


def test_criterion_10_determinism():
    scn = scenario_ramified(3, 5)
    docs = []
    for workers in (1, 3):
        doc = classify_scenario_doc(scn, workers=workers)
        docs.append(json.dumps(doc, sort_keys=True, indent=2))
    assert docs[0] == docs[1]
    again = json.dumps(classify_scenario_doc(scenario_ramified(3, 5), workers=1),
                       sort_keys=True, indent=2)
    assert again == docs[0]

    a = forge_totally_real(4, 5, 7, 11, seed=7)
    b = forge_totally_real(4, 5, 7, 11, seed=7)
    assert a == b
    report("10 (byte-identical structured reports across reruns and worker counts)")
