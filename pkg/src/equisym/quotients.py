"""Intermediate quotients X/H: induced signatures, fixed points, gonality.

Given an action described by a generating vector and a subgroup H <= G, the
branch data of X/H -> X/G is read off the cycles of right multiplication by
each vector entry on the coset space H\\G; a cycle of length l under an
order-m entry contributes a point with cone order m/l (recorded when > 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .actions import GeneratingVector
from .groups import ConcreteGroup, SubgroupHandle


class SubgroupNotContained(ValueError):
    """The subgroup is not made of elements of the vector's group."""


class IdentityElement(ValueError):
    """Fixed points of the identity are the whole surface."""


@dataclass(frozen=True)
class InducedCover:
    """Genus and branch data of X/H, plus the per-branch cycle structure."""

    genus: int
    cone_orders: tuple[int, ...]
    branch_cycles: tuple[tuple[int, ...], ...]  # cycle lengths per branch index
    subgroup_order: int
    index: int

    @property
    def signature_key(self) -> tuple[int, tuple[int, ...]]:
        return (self.genus, self.cone_orders)


def induced_signature(v: GeneratingVector, sub: SubgroupHandle) -> InducedCover:
    group = v.group
    for g in sub.elements:
        if g not in group.element_index:
            raise SubgroupNotContained(f"{g!r} not in {group.spec}")
    lookup = group.coset_lookup(sub, side="right")
    index = group.order // sub.order
    cone = []
    all_cycles = []
    total_defect = 0
    for entry, period in zip(v.elements, v.periods):
        # right multiplication is well-defined on right cosets, so any
        # representative of a coset yields the same image coset
        perm = [0] * index
        for g, cid in lookup.items():
            perm[cid] = lookup[group.mul(g, entry)]
        cycles = _cycle_lengths(perm)
        all_cycles.append(tuple(sorted(cycles)))
        for length in cycles:
            total_defect += length - 1
            if period % length:
                raise AssertionError("cycle length must divide the period")
            if period // length > 1:
                cone.append(period // length)
        if sum(cycles) != index:
            raise AssertionError("cycles must partition the cosets")
    genus2 = 2 - 2 * index + total_defect  # = 2 g_H, from RH over genus 0
    if genus2 % 2:
        raise AssertionError("non-integral quotient genus")
    return InducedCover(
        genus=genus2 // 2,
        cone_orders=tuple(sorted(cone)),
        branch_cycles=tuple(all_cycles),
        subgroup_order=sub.order,
        index=index,
    )


def _cycle_lengths(perm: list[int]) -> list[int]:
    seen = [False] * len(perm)
    lengths = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        n = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = perm[i]
            n += 1
        lengths.append(n)
    return lengths


def double_account_check(genus_x: int, cover: InducedCover) -> bool:
    """Riemann-Hurwitz for X -> X/H must agree with the coset-orbit genus."""
    rhs = Fraction(2 * cover.genus - 2) + sum(
        (1 - Fraction(1, m) for m in cover.cone_orders), Fraction(0)
    )
    return Fraction(2 * genus_x - 2) == cover.subgroup_order * rhs


# ----------------------------------------------------------------------
# the standard subgroup table for the (0; 2,2,3,p) action


def line_subgroup(group: ConcreteGroup, l: int) -> SubgroupHandle:
    """<a b^l> inside the lattice."""
    return group.subgroup_generated([(1, l % group.m, 0, 0)])


def conjugate_line_parameters(group: ConcreteGroup, k: int) -> tuple[int, ...]:
    """All l with <a b^l> conjugate to <a b^k> (the cross-ratio orbit of k)."""
    line = line_subgroup(group, k)
    out = []
    for l in range(group.m):
        if group.subgroups_conjugate(line_subgroup(group, l), line):
            out.append(l)
    return tuple(out)


@dataclass(frozen=True)
class TableRow:
    name: str
    order: int
    genus: int
    cone_orders: tuple[int, ...]
    k_dependent: bool = False


@dataclass(frozen=True)
class QuotientTable:
    p: int
    k: int
    rows: tuple[TableRow, ...]

    def to_markdown(self) -> str:
        lines = [
            "| H | order | genus | ramification |",
            "| --- | --- | --- | --- |",
        ]
        for row in self.rows:
            lines.append(
                f"| {row.name} | {row.order} | {row.genus} | {_ram_text(row.cone_orders)} |"
            )
        return "\n".join(lines)

    def to_csv(self) -> str:
        lines = ["subgroup,order,genus,ramification"]
        for row in self.rows:
            ram = _ram_text(row.cone_orders)
            lines.append(f'"{row.name}",{row.order},{row.genus},"{ram}"')
        return "\n".join(lines)

    def to_json(self) -> list[dict]:
        return [
            {
                "subgroup": row.name,
                "order": row.order,
                "genus": row.genus,
                "cone_orders": list(row.cone_orders),
            }
            for row in self.rows
        ]


def _ram_text(cone_orders: tuple[int, ...]) -> str:
    if not cone_orders:
        return "(-)"
    return "(" + ",".join(str(m) for m in cone_orders) + ")"


def named_subgroups(group: ConcreteGroup) -> list[tuple[str, SubgroupHandle]]:
    """The fixed subgroup list of the quotient table, in table order."""
    p = group.m
    out = [(f"<ab^{l}>", line_subgroup(group, l)) for l in range(p)]
    texts = [
        ("<s>", ["s"]),
        ("<b,s>", ["b", "s"]),
        ("<a,b>", ["a", "b"]),
        ("<r>", ["r"]),
        ("<s,r>", ["s", "r"]),
        ("<as>", ["a s"]),
        ("<a,b,r>", ["a", "b", "r"]),
        ("<a,b,s>", ["a", "b", "s"]),
    ]
    for name, gens in texts:
        out.append((name, group.subgroup_from_words(gens)))
    return out


def quotient_table(v: GeneratingVector, k: int) -> QuotientTable:
    """Genus and ramification of X/H for every subgroup in the standard list."""
    group = v.group
    p = group.m
    k_dep = {f"<ab^{l}>" for l in range(p)} | {"<b,s>", "<as>"}
    rows = []
    for name, sub in named_subgroups(group):
        cover = induced_signature(v, sub)
        rows.append(
            TableRow(name, sub.order, cover.genus, cover.cone_orders, name in k_dep)
        )
    return QuotientTable(p, k, tuple(rows))


def line_stabilizer_order(group: ConcreteGroup, l: int) -> int:
    """Number of dihedral classes whose conjugation maps <a b^l> to itself."""
    line = line_subgroup(group, l)
    target = line.element_set
    count = 0
    for d in range(6):
        rep = (0, 0, d, 0)
        gi = group.inv(rep)
        if all(group.mul(group.mul(rep, h), gi) in target for h in line.generators):
            count += 1
    return count


def line_row_prediction(group: ConcreteGroup, k: int, l: int) -> tuple[int, tuple[int, ...]]:
    """Independent prediction for the <a b^l> row, via the normalizer count.

    If the line is not conjugate to <a b^k> the quotient is unramified of
    genus 2(p-1).  Otherwise, with s = |dihedral stabilizer of the line|, the
    branch-p fiber has s*p one-point cycles, so the quotient carries s*p cone
    points of order p and genus (2 - 2p + (6 - s)(p - 1)) / 2 + p - 1 ...
    computed here directly from the cycle defect.
    """
    p = group.m
    if not group.subgroups_conjugate(line_subgroup(group, l), line_subgroup(group, k)):
        return (2 * (p - 1), ())
    s = line_stabilizer_order(group, l)
    # defect: 3p + 3p (involution branches) + 4p (order-3) + (6-s)(p-1)
    genus2 = 2 - 2 * (6 * p) + 10 * p + (6 - s) * (p - 1)
    if genus2 % 2:
        raise AssertionError("normalizer prediction must be integral")
    return (genus2 // 2, (p,) * (s * p))


def expected_quotient_rows(p: int, k: int) -> dict:
    """Transcription of the published table for the k-independent rows and
    the k-dependent branches of <b,s> and <as>; the published <a b^l> branch
    values are (2(p-1), unramified) for l != k and (p-1, p repeated 2p times)
    for l = k."""
    rows: dict[str, tuple[int, tuple[int, ...]]] = {}
    for l in range(p):
        if l == k:
            rows[f"<ab^{l}>"] = (p - 1, (p,) * (2 * p))
        else:
            rows[f"<ab^{l}>"] = (2 * (p - 1), ())
    rows["<s>"] = ((p - 1) ** 2, (2,) * (2 * p))
    if k == 1:
        bs = ((p - 1) // 2, (2, 2) + (p,) * p)
    else:
        bs = (p - 1, (2, 2))
    rows["<b,s>"] = bs
    rows["<as>"] = bs
    rows["<a,b>"] = (0, (p,) * 6)
    rows["<r>"] = ((2 * p - 1) * (p - 1) // 3, (3, 3))
    rows["<s,r>"] = ((p - 1) * (p - 2) // 3, tuple(sorted((2,) * (2 * p) + (3,))))
    rows["<a,b,r>"] = (0, (3, 3, p, p))
    rows["<a,b,s>"] = (0, tuple(sorted((2, 2, p, p, p))))
    return rows


@dataclass(frozen=True)
class TableComparison:
    """Computed table vs the published one, with deviations itemized.

    The published <a b^l> branch condition "k = l" is coarse: the quotient is
    ramified exactly when the lines are conjugate, and the printed values
    assume the line's dihedral stabilizer has order 2.  Rows where the
    published data differ from the engine are accepted only when they match the
    independent normalizer prediction; those are listed in
    published_deviations rather than mismatches.
    """

    matches: bool
    mismatches: tuple[str, ...]
    conjugate_ls: tuple[int, ...]
    printed_selector_diffs: tuple[int, ...]  # l conjugate to k but l != k
    published_deviations: tuple[str, ...]  # verified engine/printed differences


def compare_with_published(table: QuotientTable, group: ConcreteGroup) -> TableComparison:
    p = table.p
    conj = conjugate_line_parameters(group, table.k)
    published = expected_quotient_rows(p, table.k)
    mismatches = []
    deviations = []
    for row in table.rows:
        computed = (row.genus, row.cone_orders)
        if row.name.startswith("<ab^"):
            l = int(row.name[4:-1])
            predicted = line_row_prediction(group, table.k, l)
            if computed != predicted:
                mismatches.append(
                    f"{row.name}: computed {computed}, normalizer predicts {predicted}"
                )
                continue
            printed = published[row.name]
            if computed != printed:
                deviations.append(
                    f"{row.name}: engine/normalizer give genus {computed[0]} with "
                    f"{len(computed[1])} cone points, published row says genus "
                    f"{printed[0]} with {len(printed[1])}"
                )
            continue
        want = published[row.name]
        if computed != want:
            mismatches.append(
                f"{row.name}: computed genus {row.genus} ram {row.cone_orders}, "
                f"published {want[0]} ram {want[1]}"
            )
    diffs = tuple(l for l in conj if l != table.k)
    return TableComparison(
        not mismatches, tuple(mismatches), conj, diffs, tuple(deviations)
    )


# ----------------------------------------------------------------------
# fixed points


def fixed_points(v: GeneratingVector, g) -> int:
    """Number of fixed points of g on X: cosets t<g_j> with t^-1 g t in <g_j>."""
    group = v.group
    if g == group.identity:
        raise IdentityElement("fixed points of the identity are all of X")
    group.check_element(g)
    total = 0
    for entry in v.elements:
        stab = group.subgroup_generated([entry])
        total += _fixed_in_fiber(group, stab, g)
    return total


def _fixed_in_fiber(group, stab: SubgroupHandle, g) -> int:
    count = 0
    covered: set = set()
    for t in group.elements:
        if t in covered:
            continue
        covered.update(group.mul(t, h) for h in stab.elements)
        if group.mul(group.mul(group.inv(t), g), t) in stab.element_set:
            count += 1
    return count


@dataclass(frozen=True)
class SubgroupFixedPoints:
    total_points: int
    stabilizer_orders: tuple[int, ...]  # multiset over the fixed points


def fixed_points_of_subgroup(v: GeneratingVector, sub: SubgroupHandle) -> SubgroupFixedPoints:
    """Distinct points of X fixed by some nontrivial element of `sub`."""
    group = v.group
    sub_set = sub.element_set
    orders = []
    for entry in v.elements:
        stab = group.subgroup_generated([entry])
        covered: set = set()
        for t in group.elements:
            if t in covered:
                continue
            covered.update(group.mul(t, h) for h in stab.elements)
            ti = group.inv(t)
            point_stab = {
                h for h in stab.elements if group.mul(group.mul(t, h), ti) in sub_set
            }
            if len(point_stab) > 1:
                orders.append(len(point_stab))
    return SubgroupFixedPoints(len(orders), tuple(sorted(orders)))


# ----------------------------------------------------------------------
# gonality


@dataclass(frozen=True)
class GonalityResult:
    is_cyclic_n_gonal: bool
    witness: SubgroupHandle | None


def is_cyclic_n_gonal(v: GeneratingVector) -> GonalityResult:
    """Whether some nontrivial cyclic subgroup yields quotient genus 0.

    Complete when the group is the full automorphism group of the surface;
    only cyclic subgroups of the given group are examined.
    """
    group = v.group
    seen: set[frozenset] = set()
    for g in group.elements:
        if g == group.identity:
            continue
        sub = group.subgroup_generated([g])
        key = sub.element_set
        if key in seen:
            continue
        seen.add(key)
        if induced_signature(v, sub).genus == 0:
            return GonalityResult(True, sub)
    return GonalityResult(False, None)
