"""Surface-kernel epimorphisms onto the concrete groups and their strata.

A genus-0 action is a tuple (g_1, ..., g_r) with product 1, exact orders
(m_1, ..., m_r) and generating the whole group.  Topological equivalence is
the orbit relation under sphere braid moves together with Aut(G);
equisymmetric strata are those orbits, named by canonical representatives.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .groups import Automorphism, ConcreteGroup, concrete_group, spec_g
from .signatures import Signature


class UnsupportedSignature(ValueError):
    """Only genus-0 quotient signatures are enumerated."""


class InvalidIndex(ValueError):
    """A named-vector index fell outside its allowed range."""


class NotAnEpimorphism(ValueError):
    """A constructed tuple failed the generating-vector invariants."""


Vector = tuple  # tuple of group elements, periods implied by element orders


@dataclass(frozen=True)
class GeneratingVector:
    group: ConcreteGroup
    periods: tuple[int, ...]
    elements: tuple

    def signature(self) -> Signature:
        return Signature(0, self.periods)

    def serialize(self) -> str:
        body = " | ".join(self.group.serialize_element(g) for g in self.elements)
        return f"{self.signature().text()} {body}"

    def as_json(self) -> dict:
        return {
            "signature": self.signature().text(),
            "elements": [self.group.serialize_element(g) for g in self.elements],
        }

    def validate(self) -> None:
        group = self.group
        if len(self.periods) != len(self.elements):
            raise NotAnEpimorphism("period/element length mismatch")
        prod = group.identity
        for g, m in zip(self.elements, self.periods):
            if group.element_order(g) != m:
                raise NotAnEpimorphism(
                    f"{group.serialize_element(g)} has order "
                    f"{group.element_order(g)}, expected {m}"
                )
            prod = group.mul(prod, g)
        if prod != group.identity:
            raise NotAnEpimorphism("product of entries is not the identity")
        if not group.generates(self.elements):
            raise NotAnEpimorphism("entries do not generate the group")


def vector(group: ConcreteGroup, elements) -> GeneratingVector:
    """Wrap raw elements, reading the periods off their orders, and validate."""
    elements = tuple(elements)
    v = GeneratingVector(
        group, tuple(group.element_order(g) for g in elements), elements
    )
    v.validate()
    return v


def enumerate_skes(group: ConcreteGroup, sig: Signature) -> list[GeneratingVector]:
    """All surface-kernel epimorphisms for a genus-0 signature, in lex order."""
    return [
        GeneratingVector(group, sig.periods, elems)
        for elems in _enumerate_raw(group, sig)
    ]


def _enumerate_raw(group: ConcreteGroup, sig: Signature) -> tuple[Vector, ...]:
    if sig.h != 0:
        raise UnsupportedSignature(f"quotient genus must be 0, got {sig.h}")
    periods = sig.periods
    r = len(periods)
    if r < 3:
        raise UnsupportedSignature("need at least three periods")
    pools = [group.elements_by_order.get(m, ()) for m in periods[:-1]]
    last_order = periods[-1]
    omap = group.order_map
    inv = group.inv
    mul = group.mul
    out = []
    for head in itertools.product(*pools):
        prod = head[0]
        for g in head[1:]:
            prod = mul(prod, g)
        last = inv(prod)
        if omap[last] != last_order:
            continue
        elems = head + (last,)
        if group.generates(elems):
            out.append(elems)
    return tuple(out)


def braid_move(v: GeneratingVector, i: int) -> GeneratingVector:
    """Positions (i, i+1), 1-based: (g_i, g_{i+1}) -> (g_i g_{i+1} g_i^-1, g_i)."""
    elems, periods = _braid_raw(v.group, v.elements, i - 1)
    return GeneratingVector(v.group, periods, elems)


def braid_move_inverse(v: GeneratingVector, i: int) -> GeneratingVector:
    """Positions (i, i+1), 1-based: (g_i, g_{i+1}) -> (g_{i+1}, g_{i+1}^-1 g_i g_{i+1})."""
    elems, periods = _braid_raw_inv(v.group, v.elements, i - 1)
    return GeneratingVector(v.group, periods, elems)


def _braid_raw(group, elems: Vector, i: int) -> tuple[Vector, tuple[int, ...]]:
    if not 0 <= i < len(elems) - 1:
        raise IndexError(f"braid position out of range: {i + 1}")
    x, y = elems[i], elems[i + 1]
    twisted = group.mul(group.mul(x, y), group.inv(x))
    new = elems[:i] + (twisted, x) + elems[i + 2 :]
    return new, tuple(group.element_order(g) for g in new)


def _braid_raw_inv(group, elems: Vector, i: int) -> tuple[Vector, tuple[int, ...]]:
    if not 0 <= i < len(elems) - 1:
        raise IndexError(f"braid position out of range: {i + 1}")
    x, y = elems[i], elems[i + 1]
    twisted = group.mul(group.mul(group.inv(y), x), y)
    new = elems[:i] + (y, twisted) + elems[i + 2 :]
    return new, tuple(group.element_order(g) for g in new)


# ----------------------------------------------------------------------
# classification into equisymmetric strata


@dataclass(frozen=True)
class Stratum:
    representative: GeneratingVector
    size: int
    label: str | None = None


def classify(
    vectors: list[GeneratingVector],
    automorphisms: tuple[Automorphism, ...] | None = None,
    labeller=None,
) -> list[Stratum]:
    """Partition vectors into orbits under braid moves and Aut(G).

    The orbit walk passes through states whose period order differs from the
    input's; only input vectors count toward orbit sizes, and the canonical
    representative is the lexicographic minimum among input members.
    """
    if not vectors:
        return []
    group = vectors[0].group
    raw = [v.elements for v in vectors]
    orbits = _orbit_partition(group, raw, _aut_generators(group, automorphisms))
    strata = []
    for members in orbits:
        rep = min(members)
        periods = tuple(group.element_order(g) for g in rep)
        stratum = Stratum(GeneratingVector(group, periods, rep), len(members))
        strata.append(stratum)
    strata.sort(key=lambda s: s.representative.elements)
    if labeller is not None:
        strata = [
            Stratum(s.representative, s.size, labeller(s.representative))
            for s in strata
        ]
    return strata


def _aut_generators(group, automorphisms) -> tuple[Automorphism, ...]:
    """Use the certified small generating set when given the full Aut list."""
    if automorphisms is None:
        return group.automorphism_generators
    full = tuple(automorphisms)
    if len(full) == len(group.automorphisms) and set(full) == set(group.automorphisms):
        return group.automorphism_generators
    return full


def _orbit_partition(group, raw, aut_gens):
    """Orbits of the input vectors; states encoded as ints to bound memory."""
    mul, inv = group.mul, group.inv
    index = group.element_index
    shift = len(group.elements).bit_length()
    r = len(raw[0])
    positions = tuple(range(r - 1))

    def encode(state):
        code = 0
        for g in state:
            code = (code << shift) | index[g]
        return code

    member = {encode(state): state for state in raw}
    seen: set[int] = set()
    orbits = []
    for seed in raw:
        seed_code = encode(seed)
        if seed_code in seen:
            continue
        seen.add(seed_code)
        frontier = [seed]
        members = [seed]
        while frontier:
            nxt = []
            for state in frontier:
                images = []
                for i in positions:
                    x, y = state[i], state[i + 1]
                    images.append(
                        state[:i] + (mul(mul(x, y), inv(x)), x) + state[i + 2 :]
                    )
                    images.append(
                        state[:i] + (y, mul(mul(inv(y), x), y)) + state[i + 2 :]
                    )
                for phi in aut_gens:
                    images.append(tuple(phi.apply(g) for g in state))
                for img in images:
                    code = encode(img)
                    if code not in seen:
                        seen.add(code)
                        nxt.append(img)
                        if code in member:
                            members.append(img)
            frontier = nxt
        orbits.append(members)
    return orbits


# ----------------------------------------------------------------------
# the named representative vectors


def theta_k(group: ConcreteGroup, k: int) -> GeneratingVector:
    """(s, sr, a^k b^(k-1) r^2, a b^k) on (0; 2,2,3,p).

    Indices 1..p-2 name the strata; 0 and p-1 also make sense and appear in
    the stratum identifications theta_0 ~ theta_1, theta_2 ~ theta_{p-1}.
    """
    p = group.m
    if group.extended or not 0 <= k <= p - 1:
        raise InvalidIndex(f"k must lie in 0..{p - 1}")
    elems = (
        (0, 0, 3, 0),                       # s
        (0, 0, 4, 0),                       # sr
        (k % p, (k - 1) % p, 2, 0),         # a^k b^(k-1) r^2
        (1, k % p, 0, 0),                   # a b^k
    )
    v = GeneratingVector(group, (2, 2, 3, p), elems)
    v.validate()
    return v


def phi_n(group: ConcreteGroup, n: int) -> GeneratingVector:
    """(a^(1-n) b r^2, b s r, b^n s r^2) on (0; 3, 2p, 2p)."""
    p = group.m
    if group.extended or not 1 <= n <= p - 1:
        raise InvalidIndex(f"n must lie in 1..{p - 1}")
    elems = (
        ((1 - n) % p, 1, 2, 0),             # a^(1-n) b r^2
        (0, 1, 4, 0),                       # b s r
        (0, n % p, 5, 0),                   # b^n s r^2
    )
    v = GeneratingVector(group, (3, 2 * p, 2 * p), elems)
    v.validate()
    return v


def Theta1(group: ConcreteGroup) -> GeneratingVector:
    """(S, ARC, B^-1 S R C) on (0; 2, 6, 2p) for the central extension."""
    p = group.m
    elems = ((0, 0, 3, 0), (1, 0, 1, 1), (0, p - 1, 4, 1))
    v = GeneratingVector(group, (2, 6, 2 * p), elems)
    v.validate()
    return v


def Theta2(group: ConcreteGroup) -> GeneratingVector:
    """(S, ARC, B S R C) on (0; 2, 6, 2p) for the inverting extension."""
    p = group.m
    elems = ((0, 0, 3, 0), (1, 0, 1, 1), (0, 1 % p, 4, 1))
    v = GeneratingVector(group, (2, 6, 2 * p), elems)
    v.validate()
    return v


# ----------------------------------------------------------------------
# index pairings predicted for the two families


@dataclass(frozen=True)
class PairingOrbits:
    p: int
    theta_classes: tuple[tuple[int, ...], ...]  # classes of i ~ (1-i)^-1 on 0..p-1
    theta_fixed_points: tuple[int, ...]
    phi_orbits: tuple[tuple[int, ...], ...]  # orbits of n ~ n^-1 on 2..p-2
    notes: tuple[str, ...]


def pairing_map_orbits(p: int) -> PairingOrbits:
    """Orbit partitions of the two index pairings.

    theta: equivalence closure of i ~ (1-i)^{-1} mod p.  The map escapes
    {2..p-2} (it sends 2 to p-1), so classes are computed on all of
    {0..p-1}; the discrepancy is recorded in the notes.
    phi: n ~ n^{-1} on {2..p-2}.
    """
    parent = list(range(p))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    fixed = []
    for i in range(p):
        if i == 1:
            continue
        fi = pow(1 - i, -1, p)
        union(i, fi)
        if fi == i and 2 <= i <= p - 2:
            fixed.append(i)
    classes: dict[int, list[int]] = {}
    for i in range(p):
        classes.setdefault(find(i), []).append(i)
    theta_classes = tuple(tuple(cls) for _root, cls in sorted(classes.items()))

    seen = set()
    phi_orbits = []
    for n in range(2, p - 1):
        if n in seen:
            continue
        ninv = pow(n, -1, p)
        orbit = tuple(sorted({n, ninv}))
        seen.update(orbit)
        phi_orbits.append(orbit)

    notes = (
        "the theta pairing i -> (1-i)^-1 maps 2 to p-1, outside {2..p-2}; "
        "classes are therefore computed on {0..p-1}",
    )
    return PairingOrbits(p, theta_classes, tuple(fixed), tuple(phi_orbits), notes)


# ----------------------------------------------------------------------
# cached family classifications


@dataclass(frozen=True)
class FamilyClassification:
    group: ConcreteGroup
    signature: Signature
    vectors: tuple[GeneratingVector, ...]
    strata: tuple[Stratum, ...]
    stratum_of: dict  # raw element tuple -> stratum index (into strata)

    @property
    def stratum_count(self) -> int:
        return len(self.strata)

    def locate(self, v: GeneratingVector) -> int:
        try:
            return self.stratum_of[v.elements]
        except KeyError:
            raise NotAnEpimorphism(
                f"{v.serialize()} is not in the enumerated family"
            ) from None


def classified_family(group: ConcreteGroup, sig: Signature) -> FamilyClassification:
    """Enumerate and classify one genus-0 family (single orbit computation)."""
    vectors = enumerate_skes(group, sig)
    raw = [v.elements for v in vectors]
    orbits = _orbit_partition(group, raw, group.automorphism_generators)
    orbits.sort(key=min)
    lookup: dict = {}
    strata = []
    for idx, members in enumerate(orbits):
        rep = min(members)
        strata.append(
            Stratum(GeneratingVector(group, sig.periods, rep), len(members))
        )
        for elems in members:
            lookup[elems] = idx
    return FamilyClassification(group, sig, tuple(vectors), tuple(strata), lookup)


def _label_family(fam: FamilyClassification, named) -> FamilyClassification:
    """Attach 'first named vector that lands here' labels to each stratum."""
    labels: dict[int, str] = {}
    for name, vec in named:
        idx = fam.locate(vec)
        labels.setdefault(idx, name)
    strata = tuple(
        Stratum(s.representative, s.size, labels.get(i))
        for i, s in enumerate(fam.strata)
    )
    return FamilyClassification(fam.group, fam.signature, fam.vectors, strata, fam.stratum_of)


@lru_cache(maxsize=None)
def classify_base_family(p: int) -> FamilyClassification:
    """The (0; 2,2,3,p) family of G(p), strata labelled theta_k."""
    group = concrete_group(spec_g(p))
    fam = classified_family(group, Signature(0, (2, 2, 3, p)))
    named = [
        (f"theta_{k}", theta_k(group, k))
        for k in list(range(1, p - 1)) + [0, p - 1]
    ]
    return _label_family(fam, named)


@lru_cache(maxsize=None)
def classify_triangle_family(p: int) -> FamilyClassification:
    """The (0; 3, 2p, 2p) family of G(p), strata labelled phi_n."""
    group = concrete_group(spec_g(p))
    fam = classified_family(group, Signature(0, (3, 2 * p, 2 * p)))
    named = [(f"phi_{n}", phi_n(group, n)) for n in range(1, p)]
    return _label_family(fam, named)
