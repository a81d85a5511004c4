"""Acceptance criteria 1-9, each checked at its stated tolerance.

Every test logs one PASS/FAIL line (collected in the terminal summary) and
then asserts the same outcome, so a criterion that does not hold fails here.
"""

import json
import random
from dataclasses import replace

import pytest

from qdissect.appell_lerch import (
    RULES,
    ALParams,
    SignedMonomial as M,
    al_rewrite,
    al_series,
    cor36_expand,
    difference_term,
    expression_series,
)
from qdissect.catalog import CATALOG, NAMES, first_mismatch, verify_entry
from qdissect.cli import appendix_row
from qdissect.dsl import _sum_ast, _summands, eval_monomials, parse, render
from qdissect.errors import NonGenericParameters, NotModular, QDissectError
from qdissect.manifest import check, load, run, run_all
from qdissect.prover import ORD, check_modular, cusp_count, cusps_gamma1, normalize_identity, prove
from qdissect.theta import expand


@pytest.fixture(scope="module")
def manifest():
    return load()


def vanishes(series) -> bool:
    return series.first_nonzero() is None


def describe_failures(reports):
    out = []
    for rep in reports:
        text = f"{rep.label} fails at q^{rep.first_failure}" if rep.first_failure is not None else f"{rep.label} {rep.status}"
        if rep.corrected is not None:
            text += f" (corrected form {rep.corrected.status})"
        out.append(text)
    return "; ".join(out)


# 1 ---------------------------------------------------------------------------


def test_criterion_1_catalogue_equivalence(acceptance_log):
    failing = [name for name in NAMES if not verify_entry(name, 150)]
    detail = "; ".join(
        f"{name} differs at q^{first_mismatch(name, 151)}"
        + (", corrected representation holds" if verify_entry(name, 150, corrected=True) else "")
        for name in failing
    )
    acceptance_log(1, "16 Eulerian series equal their Appell-Lerch forms to q^150", not failing, detail)
    assert not failing, detail


# 2 ---------------------------------------------------------------------------


def test_criterion_2_verification_table(manifest, acceptance_log):
    records = [r for r in manifest.records if r.mode == "prover" and r.minus_B is not None]
    assert len(records) == 29
    reports = run_all(records)
    rows = [appendix_row(r, rep) for r, rep in zip(records, reports)]
    bad = [row for row in rows if not row["match"]]
    for row in bad:
        # full audit trail for every mismatch
        print(json.dumps(row, indent=None))
    notes = [
        f"{row['label']}: listed -B = {row['listed_minus_B']}, computed "
        + (row["computed_minus_B"] if "computed_minus_B" in row else row.get("message", "-").split(":")[0])
        for row in bad
    ]
    rho = next(row for row in rows if row["label"] == "lem 2d rho_6")
    notes.append(f"lem 2d rho_6 verified through q^{rho['verified_order']} (listed m = 136, worked proof says 139)")
    passed = not bad
    acceptance_log(2, f"verification table: {len(rows) - len(bad)}/{len(rows)} rows reproduced", passed, "; ".join(notes))
    assert passed, "; ".join(notes)


# 3 ---------------------------------------------------------------------------


def test_criterion_3_worked_proof(manifest, acceptance_log):
    r = manifest["lem 2d rho_6"]
    inst = normalize_identity(eval_monomials(r.lhs), eval_monomials(r.rhs), r.level, label=r.label)
    cert = prove(inst, check_through=139)
    passed = (
        cert.level == 48
        and cert.B == -40
        and cert.required_order == 41
        and cert.status == "proved"
        and cert.verified_order >= 139
    )
    detail = f"N = {cert.level}, B = {cert.B}, required order {cert.required_order}, vanishing through q^{cert.verified_order}"
    acceptance_log(3, "worked proof of lem 2d rho_6 replicated", passed, detail)
    assert passed, detail


# 4 ---------------------------------------------------------------------------


def test_criterion_4_dissection_identities(manifest, acceptance_log):
    records = [r for r in manifest.records if r.label[:3] in ("2d-", "3d-") and "chain" not in r.label]
    assert {r.mode for r in records} == {"series", "residue_series"}
    reports = [run(r, order=120) for r in records]
    failing = [rep for rep in reports if rep.status != "proved"]
    detail = describe_failures(failing)
    acceptance_log(4, f"{len(records) - len(failing)}/{len(records)} 2- and 3-dissections hold to q^119", not failing, detail)
    assert not failing, detail


# 5 ---------------------------------------------------------------------------


def test_criterion_5_progression_sweep(manifest, acceptance_log):
    records = [r for r in manifest.records if r.progression is not None]
    assert len(records) >= 40
    assert {(4, 1), (8, 2), (8, 3), (8, 6), (9, 3), (9, 1), (9, 4)} <= {r.progression for r in records}
    reports = [run(r, order=100) for r in records]
    failing = [rep for rep in reports if rep.status != "proved"]
    detail = describe_failures(failing)
    acceptance_log(5, f"{len(records) - len(failing)}/{len(records)} progression identities hold to q^99", not failing, detail)
    assert not failing, detail


# 6 ---------------------------------------------------------------------------

BATTERY = [
    ALParams(M(1, 1), 4, M(1, 2)),
    ALParams(M(1, 0), 4, M(1, 3)),
    ALParams(M(-1, 1), 4, M(-1, 0)),
    ALParams(M(1, 1), 3, M(-1, 0)),
    ALParams(M(1, 0), 3, M(-1, 1)),
    ALParams(M(1, 0), 6, M(1, 1)),
    ALParams(M(1, 2), 6, M(-1, 0)),
    ALParams(M(-1, 3), 8, M(-1, 0)),
    ALParams(M(1, 2), 8, M(1, 1)),
    ALParams(M(1, 12), 36, M(-1, 0)),
    ALParams(M(1, 0), 36, M(-1, 12)),
    ALParams(M(1, -12), 36, M(-1, 0)),
]


def random_generic_triples(count, seed=2024):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        period = rng.randint(1, 9)
        x, z1, z0 = (M(rng.choice((1, -1)), rng.randint(-7, 7)) for _ in range(3))
        try:
            out.append((ALParams(x, period, z1), ALParams(x, period, z0), difference_term(x, period, z1, z0)))
        except QDissectError:
            continue
    return out


def test_criterion_6_transformation_calculus(acceptance_log):
    problems = []
    rule_checks = 0
    for rule in RULES:
        for p in BATTERY:
            try:
                e = al_rewrite(p, rule)
            except QDissectError:
                continue
            rule_checks += 1
            if not vanishes(al_series(p, 80) - expression_series(e, 80)):
                problems.append(f"{rule} on {p.render()}")
    for p1, p0, d in random_generic_triples(10):
        if not vanishes(al_series(p1, 80) - al_series(p0, 80) - expand(d, 80)):
            problems.append(f"difference formula for {p1.render()} vs z0 = {p0.z.render()}")
    split_checks = 0
    params = [t.params for e in CATALOG.values() for t in e.working_rep.al_terms]
    for p in params:
        for n in (2, 3):
            for zp in (M(-1, 0), M(-1, 1), M(1, 1)):
                try:
                    e = cor36_expand(p, n, zp)
                except NonGenericParameters:
                    continue
                split_checks += 1
                if not vanishes(al_series(p, 120) - expression_series(e, 120)):
                    problems.append(f"split n={n} of {p.render()}")
                break
            else:
                problems.append(f"no generic z' for {p.render()}")
    detail = f"{rule_checks} rule instances, 10 difference instances, {split_checks} splits" + (
        "; " + "; ".join(problems) if problems else ""
    )
    acceptance_log(6, "elementary rules, difference formula and n-fold split hold", not problems, detail)
    assert not problems, detail


# 7 ---------------------------------------------------------------------------


def test_criterion_7_valence_degree_oracle(manifest, acceptance_log):
    problems, checked, non_modular = [], 0, []
    levels = set()
    for r in manifest.records:
        if r.mode != "prover":
            continue
        levels.add(r.level)
        for rec in filter(None, (r, r.corrected_record())):
            try:
                inst = normalize_identity(eval_monomials(rec.lhs), eval_monomials(rec.rhs), rec.level)
            except QDissectError as exc:
                non_modular.append(f"{rec.label} ({type(exc).__name__})")
                continue
            cusps = cusps_gamma1(rec.level)
            for m in inst.monomials:
                try:
                    check_modular(m, rec.level)
                except NotModular:
                    non_modular.append(rec.label)
                    continue
                checked += 1
                if sum(ORD(m, d, rec.level) for d in cusps) != 0:
                    problems.append(f"{rec.label}: {m.render()}")
    for N in sorted(levels):
        if len(cusps_gamma1(N)) != cusp_count(N):
            problems.append(f"cusp count at N = {N}")
    # only as-printed typo rows may contain terms that are not weight-zero eta quotients
    typo_rows = {r.label for r in manifest.records if r.expect == "known_discrepancy"}
    stray = [x for x in non_modular if x.split(" (")[0] not in typo_rows]
    problems += [f"non-modular term in {x}" for x in stray]
    detail = f"{checked} monomials, levels {sorted(levels)}"
    if non_modular:
        detail += f"; skipped as not weight-zero eta quotients: {', '.join(sorted(set(non_modular)))}"
    if problems:
        detail += "; " + "; ".join(problems)
    acceptance_log(7, "sum of ORD over cusps is 0; cusp counts match the closed formula", not problems, detail)
    assert not problems, detail


# 8 ---------------------------------------------------------------------------

ELEMENTARY = ["eq:v01", "eq:v02", "eq:v03", "2d-V08 chain a", "2d-V08 chain b", "2d-V08"]


def test_criterion_8_elementary_identities(manifest, acceptance_log):
    reports = [run(manifest[label], order=100) for label in ELEMENTARY]
    failing = [rep for rep in reports if rep.status != "proved"]
    detail = describe_failures(failing)
    acceptance_log(8, "McIntosh relations and the 2d-V08 chain hold to q^99", not failing, detail)
    assert not failing, detail


# 9 ---------------------------------------------------------------------------


def flip_sign(text: str, index: int) -> str:
    terms = list(_summands(parse(text)))
    sign, node = terms[index]
    terms[index] = (-sign, node)
    return render(_sum_ast(terms))


def sample_records(manifest, seed=9):
    rng = random.Random(seed)
    proved = [r for r in manifest.records if r.expect == "proved"]
    prover = [r for r in proved if r.mode == "prover"]
    other = [r for r in proved if r.mode != "prover"]
    return rng.sample(prover, 4) + rng.sample(other, 6)


def test_criterion_9_mutation_robustness(manifest, acceptance_log):
    sampled = sample_records(manifest)
    problems, mutants = [], 0
    for rec in sampled:
        for side in ("lhs", "rhs"):
            text = getattr(rec, side)
            for i in range(len(list(_summands(parse(text))))):
                mutant = replace(rec, **{side: flip_sign(text, i)}, expect="proved")
                rep = check(mutant, None, 10)
                mutants += 1
                if rep.status != "expansion_failed" or not isinstance(rep.first_failure, int):
                    problems.append(f"{rec.label} {side}[{i}]: {rep.status} {rep.first_failure} {rep.message}")
    detail = f"{mutants} single-sign mutants of {', '.join(r.label for r in sampled)}"
    if problems:
        detail += "; " + "; ".join(problems)
    acceptance_log(9, "every single sign flip is caught with a first failing index", not problems, detail)
    assert not problems, detail


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
