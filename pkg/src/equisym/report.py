"""Reproduction reports: every claim check, keyed and machine-readable.

build_report(p) runs the whole battery for one prime and returns a plain
dict (JSON-serializable, deterministically ordered).  Each claim entry
carries an "ok" flag; the report's top-level "ok" is their conjunction.
Claim keys are stable identifiers used by the CLI and the acceptance suite.
"""

from __future__ import annotations

from . import __version__
from .actions import (
    classify_base_family,
    classify_triangle_family,
    pairing_map_orbits,
    phi_n,
    theta_k,
)
from .extensions import (
    bounds_report,
    classify_h_family,
    decide_extensions,
    no_order_18p2,
    triangle_restriction_stratum,
)
from .groups import (
    concrete_group,
    spec_g,
    spec_gprime,
    spec_h1,
    spec_h2,
    subgroups_isomorphic_to_g,
)
from .pencil import (
    diagonal_point_stabilizer,
    fermat_member_check,
    fixed_points_on_curve,
    generator_matrices,
    matrix_group_isomorphism,
    preserves_pencil,
    singular_members_report,
    total_lattice_fixed_points,
)
from .quotients import (
    compare_with_published,
    fixed_points,
    fixed_points_of_subgroup,
    induced_signature,
    is_cyclic_n_gonal,
    named_subgroups,
    quotient_table,
    double_account_check,
)
from .signatures import Signature, rh_genus

# brute-force automorphism group sizes, pinned as regression constants
AUT_ORDER = {5: 600, 7: 1764, 11: 7260, 13: 12168}

SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_valid_p(p: int) -> bool:
    if p < 5:
        return False
    return all(p % q for q in range(2, int(p**0.5) + 1))


def claim_genus_formula(p: int) -> dict:
    expected = (p - 1) * (2 * p - 1)
    base = rh_genus(6 * p * p, Signature(0, (2, 2, 3, p)))
    lattice = rh_genus(p * p, Signature(0, (p,) * 6))
    fermat = rh_genus(24 * p * p, Signature(0, (2, 3, 4 * p)))
    return {
        "ok": base == lattice == fermat == expected,
        "genus": expected,
        "from_base_signature": base,
        "from_lattice_signature": lattice,
        "from_fermat_signature": fermat,
    }


def claim_element_census(p: int) -> dict:
    group = concrete_group(spec_g(p))
    by = group.elements_by_order
    involutions = len(by.get(2, ()))
    order3 = len(by.get(3, ()))
    orderp = len(by.get(p, ()))
    aut = len(group.automorphisms)
    ok = (
        involutions == 3 * p
        and order3 == 2 * p * p
        and orderp == p * p - 1
        and aut == AUT_ORDER.get(p, aut)
    )
    return {
        "ok": ok,
        "order": group.order,
        "involutions": involutions,
        "order_3": order3,
        "order_p": orderp,
        "aut_order": aut,
    }


def claim_presentations(p: int) -> dict:
    rows = {}
    ok = True
    for name, spec, order in (
        ("G", spec_g(p), 6 * p * p),
        ("Gprime", spec_gprime(p), 24 * p * p),
        ("H1", spec_h1(p), 12 * p * p),
        ("H2", spec_h2(p), 12 * p * p),
    ):
        group = concrete_group(spec)
        verified = group.verify_presentation()
        rows[name] = {"order": group.order, "relators_hold": verified}
        ok = ok and verified and group.order == order
    return {"ok": ok, "groups": rows}


def claim_strata(p: int) -> dict:
    fam = classify_base_family(p)
    bound = (p + 1) // 2 if p % 3 == 1 else (p - 1) // 2
    labels = [s.label for s in fam.strata]
    all_theta = all(lab is not None and lab.startswith("theta_") for lab in labels)
    group = fam.group
    same_01 = fam.locate(theta_k(group, 0)) == fam.locate(theta_k(group, 1))
    same_2top = fam.locate(theta_k(group, 2)) == fam.locate(theta_k(group, p - 1))
    pairing = pairing_map_orbits(p)
    ok = all_theta and fam.stratum_count <= bound and same_01 and same_2top
    if p == 5:
        ok = ok and fam.stratum_count == 2
    return {
        "ok": ok,
        "epimorphism_count": len(fam.vectors),
        "stratum_count": fam.stratum_count,
        "bound": bound,
        "labels": labels,
        "orbit_sizes": [s.size for s in fam.strata],
        "theta0_equiv_theta1": same_01,
        "theta2_equiv_theta_top": same_2top,
        "pairing_class_count": len(pairing.theta_classes),
        "pairing_fixed_points": list(pairing.theta_fixed_points),
        "notes": list(pairing.notes),
    }


def claim_quotient_table(p: int) -> dict:
    group = concrete_group(spec_g(p))
    genus_x = (p - 1) * (2 * p - 1)
    per_k = {}
    ok = True
    for k in range(1, p - 1):
        v = theta_k(group, k)
        table = quotient_table(v, k)
        comparison = compare_with_published(table, group)
        double = all(
            double_account_check(genus_x, induced_signature(v, sub))
            for _name, sub in named_subgroups(group)
        )
        ok = ok and comparison.matches and double
        per_k[str(k)] = {
            "matches": comparison.matches,
            "double_accounting": double,
            "conjugate_lines": list(comparison.conjugate_ls),
            "printed_selector_diffs": list(comparison.printed_selector_diffs),
            "published_deviations": list(comparison.published_deviations),
            "mismatches": list(comparison.mismatches),
        }
    return {"ok": ok, "per_k": per_k}


def claim_fixed_points(p: int) -> dict:
    group = concrete_group(spec_g(p))
    v = theta_k(group, 1)
    lattice = group.subgroup_from_words(["a", "b"])
    comb = fixed_points_of_subgroup(v, lattice)
    comb_ok = comb.total_points == 6 * p and set(comb.stabilizer_orders) == {p}
    geoms = {}
    geo_ok = True
    for t in (0, 3):
        geo = total_lattice_fixed_points(p, t)
        per_element_ok = True
        for i in range(p):
            for j in range(p):
                if (i, j) == (0, 0):
                    continue
                counts = fixed_points_on_curve(p, t, (i, j))
                geometric = sum(rec.count for rec in counts)
                combinatorial = fixed_points(v, (i, j, 0, 0))
                if geometric != combinatorial:
                    per_element_ok = False
        geoms[str(t)] = {
            "total": geo["total"],
            "stabilizer_order": geo["stabilizer_order"],
            "per_element_match": per_element_ok,
        }
        geo_ok = geo_ok and geo["total"] == 6 * p and per_element_ok
    return {
        "ok": comb_ok and geo_ok,
        "combinatorial_total": comb.total_points,
        "combinatorial_stabilizers": sorted(set(comb.stabilizer_orders)),
        "geometric": geoms,
    }


def claim_gonality(p: int) -> dict:
    fam = classify_base_family(p)
    results = {}
    ok = True
    for s in fam.strata:
        res = is_cyclic_n_gonal(s.representative)
        results[s.label or "?"] = res.is_cyclic_n_gonal
        ok = ok and not res.is_cyclic_n_gonal
    return {"ok": ok, "per_stratum": results}


def claim_extensions(p: int) -> dict:
    rep = decide_extensions(p)
    delta0_idx, phi1_idx = triangle_restriction_stratum(p)
    expected = {("theta_1", "Gprime"), ("theta_1", "H1"), ("theta_2", "H2")}
    checks = {
        "h1_orbit_count": rep.h_orbit_counts["H1"],
        "h2_orbit_count": rep.h_orbit_counts["H2"],
        "extension_map": [list(e) for e in rep.extensions],
        "fermat_lands_in": list(rep.fermat_strata),
        "delta0_restriction_is_phi1": delta0_idx == phi1_idx,
    }
    ok = (
        rep.h_orbit_counts == {"H1": 1, "H2": 1}
        and set(rep.extensions) == expected
        and rep.fermat_strata == ("theta_1",)
        and delta0_idx == phi1_idx
    )
    caveats = list(rep.caveats)
    if p == 11:
        # computed but outside the published claims; report, do not judge
        return {"ok": True, "outside_published_claims": True, **checks, "caveats": caveats}
    return {"ok": ok, **checks, "caveats": caveats}


def claim_order_18p2(p: int) -> dict:
    impossible, solutions = no_order_18p2(p)
    ok = impossible if p != 5 else (not impossible and (2, 3, 90) in solutions)
    out = {
        "ok": ok,
        "impossible": impossible,
        "solutions": [list(s) for s in solutions],
        "bounds": bounds_report(p),
    }
    if p == 5:
        out["caveat"] = (
            "arithmetic alone does not exclude order 18p^2 at p = 5; the "
            "published argument appeals to an external genus-36 database"
        )
    return out


def claim_triangle(p: int) -> dict:
    fam = classify_triangle_family(p)
    expected = 2 + (p - 3) // 2
    labels = [s.label for s in fam.strata]
    all_phi = all(lab is not None and lab.startswith("phi_") for lab in labels)
    group = fam.group
    pairing_ok = True
    for n in range(2, p - 1):
        ninv = pow(n, -1, p)
        if fam.locate(phi_n(group, n)) != fam.locate(phi_n(group, ninv)):
            pairing_ok = False
    phi1_separate = fam.locate(phi_n(group, 1)) != fam.locate(phi_n(group, p - 1))
    ok = all_phi and pairing_ok and phi1_separate
    if p != 11:
        ok = ok and fam.stratum_count == expected
    return {
        "ok": ok,
        "epimorphism_count": len(fam.vectors),
        "class_count": fam.stratum_count,
        "expected_count": expected,
        "labels": labels,
        "inverse_pairing_confirmed": pairing_ok,
        "outside_published_claims": p == 11,
    }


def claim_curve(p: int) -> dict:
    gens = generator_matrices(p)
    symbolic = all(preserves_pencil(p, p, m) for m in gens.values())
    iso = matrix_group_isomorphism(p)
    fermat = fermat_member_check(p)
    singular = singular_members_report(p)
    diag = diagonal_point_stabilizer(p, 3)
    ok = (
        symbolic
        and iso.group_order == 6 * p * p
        and fermat["isomorphic_to_Z2p2_D3"]
        and singular["members"]["2"]["square_identity"]
        and singular["members"]["-1"]["all_points_singular"]
        and singular["members"]["-1"]["all_points_nodes"]
        and singular["members"]["-2"]["z0_points_singular"]
        and singular["members"]["inf"]["coordinate_points_singular"]
        and diag["stabilizer_order"] == 2
    )
    return {
        "ok": ok,
        "generators_preserve_pencil": symbolic,
        "matrix_group_order": iso.group_order,
        "fermat_member": fermat,
        "singular_members": singular,
        "diagonal_point": {
            "t": str(diag["t"]),
            "lambda": str(diag["lambda"]),
            "stabilizer_order": diag["stabilizer_order"],
        },
    }


def claim_subgroup_conjugacy(p: int) -> dict:
    result = subgroups_isomorphic_to_g(p)
    ok = result.class_count == 1 if p == 5 else True
    return {
        "ok": ok,
        "class_count": result.class_count,
        "subgroups_found": sum(len(c) for c in result.classes),
        "expected_single_class_checked": p == 5,
    }


CLAIMS = (
    ("genus_formula", claim_genus_formula),
    ("element_census", claim_element_census),
    ("presentations", claim_presentations),
    ("strata", claim_strata),
    ("quotient_table", claim_quotient_table),
    ("fixed_points", claim_fixed_points),
    ("gonality", claim_gonality),
    ("extensions", claim_extensions),
    ("order_18p2", claim_order_18p2),
    ("triangle", claim_triangle),
    ("curve", claim_curve),
    ("subgroup_conjugacy", claim_subgroup_conjugacy),
)


def build_report(p: int, only: tuple[str, ...] | None = None) -> dict:
    claims = {}
    caveats = []
    for key, fn in CLAIMS:
        if only is not None and key not in only:
            continue
        entry = fn(p)
        claims[key] = entry
        for field in ("caveat", "caveats"):
            value = entry.get(field)
            if isinstance(value, str):
                caveats.append(f"{key}: {value}")
            elif isinstance(value, list):
                caveats.extend(f"{key}: {v}" for v in value)
    return {
        "schema_version": 1,
        "tool_version": __version__,
        "p": p,
        "genus": (p - 1) * (2 * p - 1),
        "ok": all(entry["ok"] for entry in claims.values()),
        "claims": claims,
        "caveats": caveats,
    }


def render_markdown(report: dict) -> str:
    lines = [
        f"# Reproduction report, p = {report['p']}",
        "",
        f"- genus: {report['genus']}",
        f"- overall: {'PASS' if report['ok'] else 'FAIL'}",
        "",
    ]
    for key, entry in report["claims"].items():
        status = "PASS" if entry["ok"] else "FAIL"
        lines.append(f"## {key}: {status}")
        for field, value in entry.items():
            if field == "ok":
                continue
            lines.append(f"- {field}: {_compact(value)}")
        lines.append("")
    if report["caveats"]:
        lines.append("## caveats")
        for c in report["caveats"]:
            lines.append(f"- {c}")
        lines.append("")
    return "\n".join(lines)


def _compact(value, depth: int = 0):
    if isinstance(value, dict):
        inner = ", ".join(f"{k}: {_compact(v, depth + 1)}" for k, v in value.items())
        return "{" + inner + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(str(_compact(v, depth + 1)) for v in value) + "]"
    return value
