"""Actions of the order-12p^2 and 24p^2 supergroups, and their restrictions.

The two order-12p^2 extensions H1 (central) and H2 (lattice-inverting) act
with triangle signature (0; 2, 6, 2p); the order-24p^2 group G' = G(2p) acts
with (0; 2, 3, 4p).  Restricting along explicit subgroup words in the
triangle generators produces actions of an index-2 or index-4 copy of G(p),
which are then located inside the classified (0;2,2,3,p) and (0;3,2p,2p)
families.  A stratum "extends" to a supergroup exactly when some supergroup
action restricts into it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .actions import (
    FamilyClassification,
    GeneratingVector,
    Stratum,
    Theta1,
    Theta2,
    classified_family,
    classify_base_family,
    classify_triangle_family,
    phi_n,
)
from .groups import (
    ConcreteGroup,
    IsoMap,
    concrete_group,
    find_isomorphism,
    spec_g,
    spec_gprime,
    spec_h1,
    spec_h2,
)
from .signatures import Signature, index_from_areas
from .words import evaluate, parse_word


class OrderMismatch(ValueError):
    """A restriction word evaluated to an element of the wrong order."""


class NonTrivialProduct(ValueError):
    """The restricted tuple does not multiply to the identity."""


class IndexMismatch(ValueError):
    """The image subgroup's index disagrees with the area-ratio index."""


# subgroup words in the canonical triangle generators z1, z2, z3
FERMAT_WORDS = ("z2^2 z1 z2", "z2 z1 z2^2", "z1 z2^2 z1", "z3^-4")
ALPHA_WORDS = ("z1", "z2 z1 z2^-1", "z2^2", "z3^2")
DELTA0_WORDS = ("z2^2", "z3", "z1 z3 z1^-1")


@dataclass(frozen=True)
class RestrictionDatum:
    supergroup_vector: GeneratingVector
    subgroup_words: tuple[str, ...]
    expected_signature: Signature


@dataclass(frozen=True)
class RestrictedVector:
    images: tuple
    subgroup_elements: tuple
    index: int

    def as_vector(self, group: ConcreteGroup) -> GeneratingVector:
        periods = tuple(group.element_order(g) for g in self.images)
        return GeneratingVector(group, periods, self.images)


def restrict(datum: RestrictionDatum) -> RestrictedVector:
    """Evaluate the subgroup words on the supergroup vector and validate."""
    v = datum.supergroup_vector
    group = v.group
    names = tuple(f"z{i + 1}" for i in range(len(v.elements)))
    bindings = dict(zip(names, v.elements))
    images = tuple(
        evaluate(parse_word(text, names), bindings, group)
        for text in datum.subgroup_words
    )
    expected = datum.expected_signature.periods
    got = tuple(group.element_order(g) for g in images)
    if got != expected:
        raise OrderMismatch(f"orders {got}, expected {expected}")
    prod = group.identity
    for g in images:
        prod = group.mul(prod, g)
    if prod != group.identity:
        raise NonTrivialProduct("restricted tuple has nontrivial product")
    sub = group.closure(images)
    index = group.order // len(sub)
    area_index = index_from_areas(datum.expected_signature, v.signature())
    if Fraction(index) != area_index:
        raise IndexMismatch(f"subgroup index {index}, area ratio {area_index}")
    return RestrictedVector(images, tuple(sorted(sub)), index)


# ----------------------------------------------------------------------
# classification of the supergroup actions


@lru_cache(maxsize=None)
def classify_h_family(p: int, which: str) -> FamilyClassification:
    """The (0; 2, 6, 2p) family of H1 or H2, labelled by Theta_1 / Theta_2."""
    if which == "H1":
        group = concrete_group(spec_h1(p))
        named_vector, label = Theta1(group), "Theta_1"
    elif which == "H2":
        group = concrete_group(spec_h2(p))
        named_vector, label = Theta2(group), "Theta_2"
    else:
        raise ValueError("which must be 'H1' or 'H2'")
    fam = classified_family(group, Signature(0, (2, 6, 2 * p)))
    labels = {fam.locate(named_vector): label}
    strata = tuple(
        Stratum(s.representative, s.size, labels.get(i))
        for i, s in enumerate(fam.strata)
    )
    return FamilyClassification(group, fam.signature, fam.vectors, strata, fam.stratum_of)


@lru_cache(maxsize=None)
def classify_fermat_family(p: int) -> FamilyClassification:
    """The (0; 2, 3, 4p) family of G' = G(2p)."""
    group = concrete_group(spec_gprime(p))
    return classified_family(group, Signature(0, (2, 3, 4 * p)))


def fermat_action(p: int) -> GeneratingVector:
    """(S R^2, A R^2, A B S R): the canonical (0;2,3,4p) action of G(2p)."""
    group = concrete_group(spec_gprime(p))
    elems = ((0, 0, 5, 0), (1, 0, 2, 0), (1, 1, 4, 0))
    v = GeneratingVector(group, (2, 3, 4 * p), elems)
    v.validate()
    return v


# ----------------------------------------------------------------------
# locating restrictions inside the base families


@lru_cache(maxsize=None)
def _iso_cache(p: int) -> dict:
    return {}


def _identify_subgroup(
    ambient: ConcreteGroup, sub_elements: tuple, p: int
) -> IsoMap:
    """Isomorphism from an order-6p^2 subgroup onto the abstract G(p), cached
    per distinct subgroup (restrictions of equivalent actions share images)."""
    cache = _iso_cache(p)
    key = (id(ambient), frozenset(sub_elements))
    iso = cache.get(key)
    if iso is None:
        iso = find_isomorphism(ambient, sub_elements, spec_g(p))
        if iso is None:
            raise IndexMismatch("image subgroup is not isomorphic to G(p)")
        cache[key] = iso
    return iso


def locate_restriction(
    datum: RestrictionDatum, family: FamilyClassification, p: int
) -> int:
    """Stratum index of the restricted action inside the given G(p) family.

    The stratum is independent of which isomorphism identifies the image
    subgroup with G(p): two identifications differ by Aut(G(p)).
    """
    restricted = restrict(datum)
    iso = _identify_subgroup(
        datum.supergroup_vector.group, restricted.subgroup_elements, p
    )
    mapped = iso.apply_vector(restricted.images)
    vec = GeneratingVector(
        family.group,
        tuple(family.group.element_order(g) for g in mapped),
        mapped,
    )
    return family.locate(vec)


# ----------------------------------------------------------------------
# which strata extend


@dataclass(frozen=True)
class ExtensionReport:
    p: int
    base_strata_labels: tuple[str, ...]
    h_orbit_counts: dict  # 'H1'/'H2' -> number of Aut-classes of (0;2,6,2p)
    extensions: tuple[tuple[str, str], ...]  # (stratum label, supergroup name)
    fermat_strata: tuple[str, ...]  # strata hit by (0;2,3,4p) restrictions
    caveats: tuple[str, ...]

    def as_json(self) -> dict:
        return {
            "p": self.p,
            "strata": list(self.base_strata_labels),
            "h_orbit_counts": dict(self.h_orbit_counts),
            "extensions": [
                {"from": lab, "to": sup} for lab, sup in self.extensions
            ],
            "fermat_strata": list(self.fermat_strata),
            "caveats": list(self.caveats),
        }


def decide_extensions(p: int) -> ExtensionReport:
    """Restriction-search over every supergroup epimorphism.

    A (0;2,2,3,p) stratum extends to H1/H2/G' exactly when some enumerated
    supergroup action restricts (along the alpha- or Fermat-words) into it.
    """
    base = classify_base_family(p)
    base_sig = Signature(0, (2, 2, 3, p))
    extensions: set[tuple[str, str]] = set()
    h_counts = {}
    for which in ("H1", "H2"):
        fam = classify_h_family(p, which)
        h_counts[which] = fam.stratum_count
        hit: set[int] = set()
        for v in fam.vectors:
            datum = RestrictionDatum(v, ALPHA_WORDS, base_sig)
            hit.add(locate_restriction(datum, base, p))
        for idx in hit:
            extensions.add((_label(base, idx), which))
    fermat = classify_fermat_family(p)
    fermat_hits: set[int] = set()
    for v in fermat.vectors:
        datum = RestrictionDatum(v, FERMAT_WORDS, base_sig)
        fermat_hits.add(locate_restriction(datum, base, p))
    for idx in fermat_hits:
        extensions.add((_label(base, idx), "Gprime"))
    caveats = []
    if p == 11:
        caveats.append(
            "p = 11 lies outside the published uniqueness claims; computed anyway"
        )
    return ExtensionReport(
        p,
        tuple(s.label or "?" for s in base.strata),
        h_counts,
        tuple(sorted(extensions)),
        tuple(sorted(_label(base, i) for i in fermat_hits)),
        tuple(caveats),
    )


def _label(family: FamilyClassification, idx: int) -> str:
    label = family.strata[idx].label
    return label if label is not None else f"stratum_{idx}"


def triangle_restriction_stratum(p: int) -> tuple[int, int]:
    """Strata of: the Delta_0 restriction of Theta_1, and of phi_1.

    Both land in the (0; 3, 2p, 2p) family of G(p); equality is the word-level
    content of the Y_1 ~ Z_1 identification.
    """
    tri = classify_triangle_family(p)
    h1 = classify_h_family(p, "H1")
    theta1 = Theta1(h1.group)
    datum = RestrictionDatum(theta1, DELTA0_WORDS, Signature(0, (3, 2 * p, 2 * p)))
    idx = locate_restriction(datum, tri, p)
    return idx, tri.locate(phi_n(tri.group, 1))


# ----------------------------------------------------------------------
# the order-18p^2 exclusion and the global bounds


def no_order_18p2(p: int) -> tuple[bool, tuple[tuple[int, int, int], ...]]:
    """Bounded search for period triples with 1/m1+1/m2+1/m3 = (7p+3)/(9p).

    Returns (impossible, solutions): an order-18p^2 action on the family
    would force a triangle signature satisfying that equation.
    """
    target = Fraction(7 * p + 3, 9 * p)
    solutions = []
    m1 = 2
    while Fraction(3, m1) >= target:
        if Fraction(1, m1) < target:
            rem1 = target - Fraction(1, m1)
            m2 = max(m1, int(1 / rem1) - 1)
            while Fraction(2, m2) >= rem1:
                if m2 >= m1 and Fraction(1, m2) < rem1:
                    rem2 = rem1 - Fraction(1, m2)
                    if rem2 > 0 and rem2.numerator == 1 and rem2.denominator >= m2:
                        solutions.append((m1, m2, int(rem2.denominator)))
                m2 += 1
        m1 += 1
    return (not solutions, tuple(sorted(solutions)))


def bounds_report(p: int) -> dict:
    """The automorphism-order ladder for genus (p-1)(2p-1) surfaces."""
    genus = (p - 1) * (2 * p - 1)
    impossible, sols = no_order_18p2(p)
    ladder = {
        2: {"order": 12 * p * p, "realized_by": ["H1", "H2"]},
        3: {
            "order": 18 * p * p,
            "diophantine_solutions": [list(t) for t in sols],
            "excluded_by_arithmetic": impossible,
        },
        4: {"order": 24 * p * p, "realized_by": ["Gprime (the t=0 member)"]},
    }
    caveats = []
    if not impossible:
        caveats.append(
            "the arithmetic admits period triples at p = 5; the published "
            "exclusion of order 18p^2 there rests on an external genus-36 "
            "database fact that is out of scope and not recomputed"
        )
    return {
        "p": p,
        "genus": genus,
        "hurwitz_bound": 84 * (genus - 1),
        "plane_curve_bound": 24 * p * p,
        "lambda_ladder": ladder,
        "caveats": caveats,
    }
