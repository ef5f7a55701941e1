"""Exact arithmetic for the lattice-by-dihedral groups Z_m^2 x| D3.

The family: G(m) = Z_m^2 x| D3 presented on generators a, b (lattice), s, r
(dihedral), optionally extended by an involution c that is either central or
inverts the lattice.  Every element has the normal form

    a^x b^y * d * c^e      with d in {1, r, r2, s, sr, sr2},

stored as the tuple (x, y, d, e) with d indexed 0..5 and e in {0, 1}.
Multiplication is a twisted product: the dihedral part acts on the lattice
through 2x2 integer matrices that are *derived* from the defining relators
(not hard-coded), then locked in place by verify_presentation.

All operations are pure functions of immutable values and safe to call from
any number of threads; enumerations return deterministically ordered results.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

from . import words
from .words import evaluate, parse_word


class SpecMismatch(ValueError):
    """Elements from different group specs were combined."""


class RelatorFailure(ValueError):
    """A claimed presentation or generator matching failed to verify."""


class Extension(Enum):
    NONE = "none"
    CENTRAL = "central"
    INVERTING = "inverting"


DIHEDRAL_SYMBOLS = ("1", "r", "r2", "s", "sr", "sr2")  # index = 3*eps + i for s^eps r^i

Element = tuple[int, int, int, int]


def _dihedral_mul_table() -> tuple[int, ...]:
    # s^e1 r^i1 * s^e2 r^i2 = s^(e1+e2) r^(+-i1 + i2), the sign flipped by e2.
    table = []
    for d1 in range(6):
        e1, i1 = divmod(d1, 3)
        for d2 in range(6):
            e2, i2 = divmod(d2, 3)
            i = (i2 - i1) % 3 if e2 else (i1 + i2) % 3
            table.append(3 * (e1 ^ e2) + i)
    return tuple(table)


_DMUL = _dihedral_mul_table()
_DINV = tuple(3 * (d // 3) + ((3 - d % 3) % 3 if d < 3 else d % 3) for d in range(6))

Mat = tuple[int, int, int, int]  # row-major 2x2


def _mat_mul(p: Mat, q: Mat) -> Mat:
    return (
        p[0] * q[0] + p[1] * q[2],
        p[0] * q[1] + p[1] * q[3],
        p[2] * q[0] + p[3] * q[2],
        p[2] * q[1] + p[3] * q[3],
    )


def _mat_apply(mat: Mat, x: int, y: int) -> tuple[int, int]:
    return (mat[0] * x + mat[1] * y, mat[2] * x + mat[3] * y)


_ID2: Mat = (1, 0, 0, 1)

# Relators of the presentation that pin down the twisted product (the pure
# power relators constrain nothing about the action).
_TWIST_RELATORS = ("r a r^-1 a b", "r b r^-1 a^-1", "s a s a b", "[s, b]")
_CENTRAL_RELATORS = ("[c, a]", "[c, b]", "[s, c]", "[r, c]")
_INVERTING_RELATORS = ("(c a)^2", "(c b)^2", "[s, c]", "[r, c]")


class _RawModel:
    """The same twisted product over an un-reduced Z^2 lattice.

    Only used while deriving the action matrices: a relator that vanishes here
    vanishes modulo every m.
    """

    identity = (0, 0, 0, 0)

    def __init__(self, mat_r: Mat, mat_s: Mat, lattice_sign: int = 1):
        mats = []
        for d in range(6):
            e, i = divmod(d, 3)
            mat = _ID2
            for _ in range(i):
                mat = _mat_mul(mat, mat_r)
            if e:
                mat = _mat_mul(mat_s, mat)
            mats.append(mat)
        self._mats = tuple(mats)
        self._sign = lattice_sign

    def mul(self, g, h):
        x1, y1, d1, e1 = g
        x2, y2, d2, e2 = h
        if e1 and self._sign < 0:
            x2, y2 = -x2, -y2
        tx, ty = _mat_apply(self._mats[d1], x2, y2)
        return (x1 + tx, y1 + ty, _DMUL[6 * d1 + d2], e1 ^ e2)

    def inv(self, g):
        x, y, d, e = g
        di = _DINV[d]
        tx, ty = _mat_apply(self._mats[di], x, y)
        if not (e and self._sign < 0):
            tx, ty = -tx, -ty
        return (tx, ty, di, e)

    def power(self, g, n):
        if n < 0:
            return self.power(self.inv(g), -n)
        out = self.identity
        base = g
        while n:
            if n & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            n >>= 1
        return out


_RAW_GENS = {"a": (1, 0, 0, 0), "b": (0, 1, 0, 0), "s": (0, 0, 3, 0), "r": (0, 0, 1, 0)}
_RAW_GENS_EXT = dict(_RAW_GENS, c=(0, 0, 0, 1))


def _derive_lattice_action() -> tuple[Mat, Mat]:
    """Solve the relator constraints for the conjugation matrices of r and s.

    Entries in {-1, 0, 1} suffice; the conjugation action must factor through
    D3 (matrix identities for r^3, s^2, (sr)^2) and kill the four twisted
    relators over the un-reduced lattice, which forces a unique solution.
    """
    choices = list(itertools.product((-1, 0, 1), repeat=4))
    relators = [parse_word(text, ("a", "b", "s", "r")) for text in _TWIST_RELATORS]
    solutions = []
    for mat_r in choices:
        r3 = _mat_mul(mat_r, _mat_mul(mat_r, mat_r))
        if r3 != _ID2:
            continue
        for mat_s in choices:
            if _mat_mul(mat_s, mat_s) != _ID2:
                continue
            sr = _mat_mul(mat_s, mat_r)
            if _mat_mul(sr, sr) != _ID2:
                continue
            model = _RawModel(mat_r, mat_s)
            if all(evaluate(w, _RAW_GENS, model) == model.identity for w in relators):
                solutions.append((mat_r, mat_s))
    if len(solutions) != 1:
        raise RelatorFailure(f"lattice action not unique: {len(solutions)} solutions")
    return solutions[0]


def _derive_extension_sign(extension: Extension, mat_r: Mat, mat_s: Mat) -> int:
    """The sign with which c conjugates the lattice, solved from its relators."""
    texts = _CENTRAL_RELATORS if extension is Extension.CENTRAL else _INVERTING_RELATORS
    relators = [parse_word(text, ("a", "b", "s", "r", "c")) for text in texts]
    solutions = []
    for sign in (1, -1):
        model = _RawModel(mat_r, mat_s, lattice_sign=sign)
        if all(evaluate(w, _RAW_GENS_EXT, model) == model.identity for w in relators):
            solutions.append(sign)
    if len(solutions) != 1:
        raise RelatorFailure(f"extension sign not unique for {extension}: {solutions}")
    return solutions[0]


_ACTION: tuple[Mat, Mat] | None = None


def lattice_action() -> tuple[Mat, Mat]:
    global _ACTION
    if _ACTION is None:
        _ACTION = _derive_lattice_action()
    return _ACTION


@dataclass(frozen=True)
class GroupSpec:
    """Parameters of one group in the family: modulus, extension, names."""

    m: int
    extension: Extension = Extension.NONE
    names: tuple[str, ...] = ("a", "b", "s", "r")

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("modulus must be >= 2")
        want = 4 if self.extension is Extension.NONE else 5
        if len(self.names) != want or len(set(self.names)) != want:
            raise ValueError(f"need {want} distinct generator names")

    @property
    def order(self) -> int:
        return 6 * self.m * self.m * (1 if self.extension is Extension.NONE else 2)


def spec_g(p: int) -> GroupSpec:
    """Z_p^2 x| D3 on a, b, s, r."""
    return GroupSpec(p)


def spec_gprime(p: int) -> GroupSpec:
    """Z_2p^2 x| D3 on A, B, S, R (the full group of the degree-2p Fermat curve)."""
    return GroupSpec(2 * p, Extension.NONE, ("A", "B", "S", "R"))


def spec_h1(p: int) -> GroupSpec:
    """(Z_p^2 x| D3) x Z_2: central involution C."""
    return GroupSpec(p, Extension.CENTRAL, ("A", "B", "S", "R", "C"))


def spec_h2(p: int) -> GroupSpec:
    """(Z_p^2 x| D3) x| Z_2: the involution C inverts the lattice."""
    return GroupSpec(p, Extension.INVERTING, ("A", "B", "S", "R", "C"))


def presentation_relators(spec: GroupSpec) -> tuple[str, ...]:
    """The defining relator words of the spec's presentation."""
    a, b, s, r = spec.names[:4]
    m = spec.m
    if spec.extension is Extension.NONE:
        return (
            f"{a}^{m}", f"{b}^{m}", f"{r}^3", f"{s}^2", f"({s} {r})^2",
            f"[{a}, {b}]",
            f"{r} {a} {r}^-1 {a} {b}",
            f"{r} {b} {r}^-1 {a}^-1",
            f"{s} {a} {s} {a} {b}",
            f"[{s}, {b}]",
        )
    c = spec.names[4]
    head = (
        f"{a}^{m}", f"{b}^{m}", f"{s}^2", f"{r}^3", f"{c}^2", f"({s} {r})^2",
        f"[{a}, {b}]", f"[{b}, {s}]",
        f"{s} {a} {s} {a} {b}",
        f"{r} {a} {r}^-1 {a} {b}",
        f"{r} {b} {r}^-1 {a}^-1",
    )
    if spec.extension is Extension.CENTRAL:
        tail = (f"[{c}, {a}]", f"[{c}, {b}]", f"[{s}, {c}]", f"[{r}, {c}]")
    else:
        tail = (f"({c} {a})^2", f"({c} {b})^2", f"[{s}, {c}]", f"[{r}, {c}]")
    return head + tail


@dataclass(frozen=True)
class SubgroupHandle:
    """A concrete subgroup: full element set plus the generators that built it."""

    elements: tuple[Element, ...]
    generators: tuple[Element, ...]
    source_words: tuple[str, ...] | None = None

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def element_set(self) -> frozenset:
        return frozenset(self.elements)

    def __contains__(self, g: Element) -> bool:
        return g in self.element_set


class ConcreteGroup:
    """The concrete model of one GroupSpec; obtain via concrete_group()."""

    identity: Element = (0, 0, 0, 0)

    def __init__(self, spec: GroupSpec):
        self.spec = spec
        self.m = spec.m
        self.extended = spec.extension is not Extension.NONE
        self.inverting = spec.extension is Extension.INVERTING
        mat_r, mat_s = lattice_action()
        mats = []
        for d in range(6):
            e, i = divmod(d, 3)
            mat = _ID2
            for _ in range(i):
                mat = _mat_mul(mat, mat_r)
            if e:
                mat = _mat_mul(mat_s, mat)
            mats.append(tuple(v % self.m for v in mat))
        self.mats: tuple[Mat, ...] = tuple(mats)
        if self.extended:
            self.lattice_sign = _derive_extension_sign(spec.extension, mat_r, mat_s)
        else:
            self.lattice_sign = 1
        self._build_ops()

    def _build_ops(self):
        m = self.m
        mats = self.mats
        dmul = _DMUL
        dinv = _DINV
        negate = self.inverting

        def mul(g: Element, h: Element) -> Element:
            x1, y1, d1, e1 = g
            x2, y2, d2, e2 = h
            if e1 and negate:
                x2, y2 = -x2, -y2
            a11, a12, a21, a22 = mats[d1]
            return (
                (x1 + a11 * x2 + a12 * y2) % m,
                (y1 + a21 * x2 + a22 * y2) % m,
                dmul[6 * d1 + d2],
                e1 ^ e2,
            )

        def inv(g: Element) -> Element:
            x, y, d, e = g
            di = dinv[d]
            a11, a12, a21, a22 = mats[di]
            tx = a11 * x + a12 * y
            ty = a21 * x + a22 * y
            if not (e and negate):
                tx, ty = -tx, -ty
            return (tx % m, ty % m, di, e)

        self.mul = mul
        self.inv = inv

    def power(self, g: Element, n: int) -> Element:
        if n < 0:
            g = self.inv(g)
            n = -n
        out = self.identity
        while n:
            if n & 1:
                out = self.mul(out, g)
            g = self.mul(g, g)
            n >>= 1
        return out

    def conjugate(self, g: Element, h: Element) -> Element:
        """g h g^-1."""
        return self.mul(self.mul(g, h), self.inv(g))

    @property
    def order(self) -> int:
        return self.spec.order

    @cached_property
    def elements(self) -> tuple[Element, ...]:
        ebits = (0, 1) if self.extended else (0,)
        return tuple(
            (x, y, d, e)
            for x in range(self.m)
            for y in range(self.m)
            for d in range(6)
            for e in ebits
        )

    @cached_property
    def element_index(self) -> dict[Element, int]:
        return {g: i for i, g in enumerate(self.elements)}

    def check_element(self, g: Element) -> None:
        if g not in self.element_index:
            raise SpecMismatch(f"{g!r} is not an element of {self.spec}")

    @cached_property
    def order_map(self) -> dict[Element, int]:
        out = {}
        for g in self.elements:
            n = 1
            x = g
            while x != self.identity:
                x = self.mul(x, g)
                n += 1
            out[g] = n
        return out

    def element_order(self, g: Element) -> int:
        return self.order_map[g]

    @cached_property
    def elements_by_order(self) -> dict[int, tuple[Element, ...]]:
        buckets: dict[int, list[Element]] = {}
        for g in self.elements:
            buckets.setdefault(self.order_map[g], []).append(g)
        return {n: tuple(gs) for n, gs in sorted(buckets.items())}

    def generators(self) -> dict[str, Element]:
        names = self.spec.names
        out = {
            names[0]: (1, 0, 0, 0),
            names[1]: (0, 1, 0, 0),
            names[2]: (0, 0, 3, 0),
            names[3]: (0, 0, 1, 0),
        }
        if self.extended:
            out[names[4]] = (0, 0, 0, 1)
        return out

    def generator_list(self) -> tuple[Element, ...]:
        return tuple(self.generators().values())

    def is_lattice(self, g: Element) -> bool:
        return g[2] == 0 and g[3] == 0

    def serialize_element(self, g: Element) -> str:
        x, y, d, e = g
        a, b = self.spec.names[:2]
        parts = []
        if x:
            parts.append(a if x == 1 else f"{a}^{x}")
        if y:
            parts.append(b if y == 1 else f"{b}^{y}")
        if d:
            sym = DIHEDRAL_SYMBOLS[d]
            low = {"r": self.spec.names[3], "s": self.spec.names[2]}
            parts.append("".join(low.get(ch, ch) for ch in sym))
        if e:
            parts.append(self.spec.names[4])
        return " ".join(parts) if parts else "1"

    def element_from_text(self, text: str) -> Element:
        if text.strip() == "1":
            return self.identity
        # "r2" prints without a caret; the word grammar wants r^2
        fixed = text.replace(self.spec.names[3] + "2", self.spec.names[3] + "^2")
        return words.evaluate_text(fixed, self, self.generators())

    # ------------------------------------------------------------------
    # presentation checking

    def verify_presentation(self, relators: list[str] | None = None) -> bool:
        """True iff every relator evaluates to 1 and the named generators generate."""
        if relators is None:
            relators = list(presentation_relators(self.spec))
        bindings = self.generators()
        names = tuple(bindings)
        for text in relators:
            word = parse_word(text, names)
            if evaluate(word, bindings, self) != self.identity:
                return False
        return self.generates(tuple(bindings.values()))

    # ------------------------------------------------------------------
    # subgroups and cosets

    def closure(self, gens, cap: int | None = None) -> set[Element] | None:
        """Subgroup generated by gens; None if it exceeds cap elements."""
        seen = {self.identity}
        frontier = [self.identity]
        gens = [g for g in gens if g != self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mul(x, g)
                    if y not in seen:
                        seen.add(y)
                        if cap is not None and len(seen) > cap:
                            return None
                        nxt.append(y)
            frontier = nxt
        return seen

    def subgroup_generated(self, gens, source_words=None) -> SubgroupHandle:
        gens = tuple(gens)
        for g in gens:
            self.check_element(g)
        elems = tuple(sorted(self.closure(gens)))
        return SubgroupHandle(elems, gens, tuple(source_words) if source_words else None)

    def subgroup_from_words(self, texts) -> SubgroupHandle:
        gens = tuple(self.element_from_text(t) for t in texts)
        return self.subgroup_generated(gens, source_words=texts)

    @cached_property
    def _quotient_size(self) -> int:
        return 12 if self.extended else 6

    def generates(self, elems) -> bool:
        """Whether the given elements generate the whole group.

        The lattice has no proper nontrivial subgroup invariant under the full
        dihedral conjugation (the rotation eigenlines are swapped by the
        reflections), so a subset surjecting onto the dihedral quotient either
        lies in an order-|quotient| complement or generates everything.
        """
        qsize = self._quotient_size
        imgs = {(g[2], g[3]) for g in elems}
        seen = {(0, 0)}
        frontier = [(0, 0)]
        while frontier:
            nxt = []
            for q1 in frontier:
                for q2 in imgs:
                    q = (_DMUL[6 * q1[0] + q2[0]], q1[1] ^ q2[1])
                    if q not in seen:
                        seen.add(q)
                        nxt.append(q)
            frontier = nxt
        if len(seen) < qsize:
            return False
        return self.closure(elems, cap=qsize) is None

    def cosets(self, sub: SubgroupHandle, side: str = "right") -> list[Element]:
        """Coset representatives, in element order; right = Hg, left = gH."""
        if side not in ("right", "left"):
            raise ValueError("side must be 'right' or 'left'")
        covered: set[Element] = set()
        reps = []
        for g in self.elements:
            if g in covered:
                continue
            reps.append(g)
            if side == "right":
                covered.update(self.mul(h, g) for h in sub.elements)
            else:
                covered.update(self.mul(g, h) for h in sub.elements)
        return reps

    def coset_lookup(self, sub: SubgroupHandle, side: str = "right") -> dict[Element, int]:
        """Map every element to the index of its coset (order matches cosets())."""
        lookup: dict[Element, int] = {}
        idx = 0
        for g in self.elements:
            if g in lookup:
                continue
            block = (
                [self.mul(h, g) for h in sub.elements]
                if side == "right"
                else [self.mul(g, h) for h in sub.elements]
            )
            for x in block:
                lookup[x] = idx
            idx += 1
        return lookup

    def conjugate_subgroup(self, sub: SubgroupHandle, g: Element) -> SubgroupHandle:
        gi = self.inv(g)
        elems = tuple(sorted(self.mul(self.mul(g, h), gi) for h in sub.elements))
        gens = tuple(self.mul(self.mul(g, h), gi) for h in sub.generators)
        return SubgroupHandle(elems, gens)

    def subgroups_conjugate(self, sub: SubgroupHandle, other: SubgroupHandle) -> bool:
        if sub.order != other.order:
            return False
        target = other.element_set
        for g in self.elements:
            gi = self.inv(g)
            if all(self.mul(self.mul(g, h), gi) in target for h in sub.generators):
                return True
        return False

    # ------------------------------------------------------------------
    # automorphisms

    @cached_property
    def _conj_matrix_options(self) -> tuple[tuple[Mat, int, int], ...]:
        """All (matrix, d, e) the conjugation of an element (w, d, e) can induce."""
        out = []
        ebits = (0, 1) if self.extended else (0,)
        for d in range(6):
            for e in ebits:
                mat = self.mats[d]
                if e and self.inverting:
                    mat = tuple((-v) % self.m for v in mat)
                out.append((mat, d, e))
        return tuple(out)

    @cached_property
    def _involution_kernels(self) -> dict[Mat, tuple[tuple[int, int], ...]]:
        """Kernel of (I + mat) mod m for each candidate conjugation matrix."""
        kernels: dict[Mat, list] = {}
        for mat, _d, _e in self._conj_matrix_options:
            if mat in kernels:
                continue
            a11, a12, a21, a22 = mat
            ker = [
                (x, y)
                for x in range(self.m)
                for y in range(self.m)
                if (x + a11 * x + a12 * y) % self.m == 0
                and (y + a21 * x + a22 * y) % self.m == 0
            ]
            kernels[mat] = ker
        return {mat: tuple(ker) for mat, ker in kernels.items()}

    @cached_property
    def center(self) -> tuple[Element, ...]:
        gens = self.generator_list()
        return tuple(
            g
            for g in self.elements
            if all(self.mul(g, h) == self.mul(h, g) for h in gens)
        )

    def _mat_fixes(self, mat: Mat, v: tuple[int, int], target: tuple[int, int]) -> bool:
        return (
            (mat[0] * v[0] + mat[1] * v[1]) % self.m == target[0]
            and (mat[2] * v[0] + mat[3] * v[1]) % self.m == target[1]
        )

    @cached_property
    def automorphisms(self) -> tuple["Automorphism", ...]:
        """The full automorphism group, by constrained brute force.

        The image of r is an order-3 element, the image of b an order-m
        element of the lattice (the lattice is the centralizer of the Sylow-p
        subgroup, hence characteristic), and the image of a is then forced by
        r b r^-1 = a.  Images of s and c are involutions whose induced
        conjugation matrix on the lattice is pinned by the remaining relators,
        which cuts each of those searches to at most twelve matrix shapes.
        Every surviving tuple is re-verified against the full relator list and
        the generation requirement.
        """
        names = self.spec.names
        m = self.m
        mul, inv = self.mul, self.inv
        order_map = self.order_map
        by_order = self.elements_by_order
        relators = [
            parse_word(t, names) for t in presentation_relators(self.spec)
        ]

        b_pool = [g for g in by_order.get(m, ()) if self.is_lattice(g)]
        r_pool = by_order.get(3, ())
        options = self._conj_matrix_options
        kernels = self._involution_kernels
        central_invols = [g for g in self.center if order_map[g] == 2]

        found = []
        for r_img in r_pool:
            r_inv = inv(r_img)
            for b_img in b_pool:
                a_img = mul(r_img, mul(b_img, r_inv))
                ab = mul(a_img, b_img)
                if mul(b_img, a_img) != ab:
                    continue
                if mul(r_img, mul(a_img, r_inv)) != inv(ab):
                    continue
                va = (a_img[0], a_img[1])
                vb = (b_img[0], b_img[1])
                sa_target = ((-va[0] - vb[0]) % m, (-va[1] - vb[1]) % m)
                neg_va = ((-va[0]) % m, (-va[1]) % m)
                neg_vb = ((-vb[0]) % m, (-vb[1]) % m)
                s_candidates = []
                for mat, d, e in options:
                    if not self._mat_fixes(mat, vb, vb):
                        continue
                    if not self._mat_fixes(mat, va, sa_target):
                        continue
                    for w in kernels[mat]:
                        s_img = (w[0], w[1], d, e)
                        if order_map[s_img] != 2:
                            continue
                        sr = mul(s_img, r_img)
                        if mul(sr, sr) != self.identity:
                            continue
                        s_candidates.append(s_img)
                if not s_candidates:
                    continue
                if not self.extended:
                    c_candidates = [None]
                elif self.spec.extension is Extension.CENTRAL:
                    c_candidates = central_invols
                else:
                    c_candidates = []
                    for mat, d, e in options:
                        if not self._mat_fixes(mat, va, neg_va):
                            continue
                        if not self._mat_fixes(mat, vb, neg_vb):
                            continue
                        for w in kernels[mat]:
                            c_img = (w[0], w[1], d, e)
                            if order_map[c_img] == 2:
                                c_candidates.append(c_img)
                for s_img in s_candidates:
                    for c_img in c_candidates:
                        images = {
                            names[0]: a_img,
                            names[1]: b_img,
                            names[2]: s_img,
                            names[3]: r_img,
                        }
                        if c_img is not None:
                            if mul(c_img, s_img) != mul(s_img, c_img):
                                continue
                            if mul(c_img, r_img) != mul(r_img, c_img):
                                continue
                            images[names[4]] = c_img
                        if not all(
                            evaluate(w, images, self) == self.identity for w in relators
                        ):
                            continue
                        if not self.generates(tuple(images.values())):
                            continue
                        found.append(Automorphism(self, images))
        found.sort(key=lambda phi: phi.key)
        return tuple(found)

    @cached_property
    def automorphism_generators(self) -> tuple["Automorphism", ...]:
        """A small generating set of Aut, certified against the full list.

        Starts from conjugations by the group generators (inner part) and
        greedily adds outer representatives until the composition closure
        covers every brute-force automorphism.
        """
        full = self.automorphisms
        full_keys = {phi.key for phi in full}
        gens = [inner_automorphism(self, g) for g in self.generator_list()]
        closed = _automorphism_closure(self, gens)
        for phi in full:
            if phi.key not in closed:
                gens.append(phi)
                closed = _automorphism_closure(self, gens)
        if closed != full_keys:
            raise RelatorFailure("automorphism closure does not match brute force")
        return tuple(gens)

    def random_element(self, rng) -> Element:
        x = rng.randrange(self.m)
        y = rng.randrange(self.m)
        d = rng.randrange(6)
        e = rng.randrange(2) if self.extended else 0
        return (x, y, d, e)


class Automorphism:
    """An automorphism stored by generator images; O(1) application."""

    __slots__ = ("group", "images", "key", "_va", "_vb", "_phi_d", "_cimg")

    def __init__(self, group: ConcreteGroup, images: dict[str, Element]):
        self.group = group
        self.images = dict(images)
        names = group.spec.names
        self.key = tuple(self.images[n] for n in names)
        a_img = self.images[names[0]]
        b_img = self.images[names[1]]
        if not (group.is_lattice(a_img) and group.is_lattice(b_img)):
            raise RelatorFailure("lattice generators must map into the lattice")
        self._va = (a_img[0], a_img[1])
        self._vb = (b_img[0], b_img[1])
        s_img = self.images[names[2]]
        r_img = self.images[names[3]]
        r2 = group.mul(r_img, r_img)
        self._phi_d = (
            group.identity,
            r_img,
            r2,
            s_img,
            group.mul(s_img, r_img),
            group.mul(s_img, r2),
        )
        self._cimg = self.images.get(names[4]) if group.extended else None

    def apply(self, g: Element) -> Element:
        x, y, d, e = g
        m = self.group.m
        vax, vay = self._va
        vbx, vby = self._vb
        out = ((x * vax + y * vbx) % m, (x * vay + y * vby) % m, 0, 0)
        if d:
            out = self.group.mul(out, self._phi_d[d])
        if e:
            out = self.group.mul(out, self._cimg)
        return out

    def apply_vector(self, elems) -> tuple[Element, ...]:
        return tuple(self.apply(g) for g in elems)

    def compose(self, other: "Automorphism") -> "Automorphism":
        """self after other."""
        return Automorphism(
            self.group, {n: self.apply(g) for n, g in other.images.items()}
        )

    def inverse(self) -> "Automorphism":
        backward = {self.apply(g): g for g in self.group.elements}
        gens = self.group.generators()
        return Automorphism(self.group, {n: backward[g] for n, g in gens.items()})

    def is_identity(self) -> bool:
        return all(self.images[n] == g for n, g in self.group.generators().items())

    def __eq__(self, other):
        return isinstance(other, Automorphism) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        parts = ", ".join(
            f"{n}->{self.group.serialize_element(g)}" for n, g in self.images.items()
        )
        return f"Automorphism({parts})"


def inner_automorphism(group: ConcreteGroup, g: Element) -> Automorphism:
    gi = group.inv(g)
    return Automorphism(
        group,
        {n: group.mul(group.mul(g, h), gi) for n, h in group.generators().items()},
    )


def _automorphism_closure(group: ConcreteGroup, gens) -> set[tuple]:
    id_key = tuple(group.generators()[n] for n in group.spec.names)
    seen = {id_key}
    reps = {id_key: Automorphism(group, group.generators())}
    frontier = [reps[id_key]]
    while frontier:
        nxt = []
        for phi in frontier:
            for gen in gens:
                psi = gen.compose(phi)
                if psi.key not in seen:
                    seen.add(psi.key)
                    nxt.append(psi)
        frontier = nxt
    return seen


_MODELS: dict[GroupSpec, ConcreteGroup] = {}


def concrete_group(spec: GroupSpec) -> ConcreteGroup:
    model = _MODELS.get(spec)
    if model is None:
        model = _MODELS[spec] = ConcreteGroup(spec)
    return model


# ----------------------------------------------------------------------
# isomorphic copies of G(p) inside larger groups


@dataclass(frozen=True)
class IsoMap:
    """A verified isomorphism from a concrete subgroup onto a target model."""

    source: ConcreteGroup  # the ambient group the subgroup lives in
    target: ConcreteGroup
    generator_images: tuple[tuple[str, Element], ...]  # target name -> subgroup elem
    mapping: dict[Element, Element]  # subgroup elem -> target elem

    def apply(self, g: Element) -> Element:
        return self.mapping[g]

    def apply_vector(self, elems) -> tuple[Element, ...]:
        return tuple(self.mapping[g] for g in elems)


def find_isomorphism(
    ambient: ConcreteGroup, sub_elements, target_spec: GroupSpec
) -> IsoMap | None:
    """Search for an isomorphism from a subgroup of `ambient` onto the target.

    Generator matching: pick candidate images of (r, b) inside the subgroup,
    derive a, scan involutions for s (and c), verify the full target
    presentation, then extend to an element-wise map by closure and check
    bijectivity.  Returns the first match in deterministic order.
    """
    target = concrete_group(target_spec)
    sub = sorted(sub_elements)
    sub_set = frozenset(sub)
    if len(sub_set) != target.order:
        return None
    mul, inv = ambient.mul, ambient.inv
    omap = ambient.order_map
    names = target_spec.names
    relators = [parse_word(t, names) for t in presentation_relators(target_spec)]
    m = target_spec.m
    order3 = [g for g in sub if omap[g] == 3]
    order_m = [g for g in sub if omap[g] == m]
    invols = [g for g in sub if omap[g] == 2]
    extended = target_spec.extension is not Extension.NONE
    for r_img in order3:
        r_inv = inv(r_img)
        for b_img in order_m:
            a_img = mul(r_img, mul(b_img, r_inv))
            ab = mul(a_img, b_img)
            if mul(b_img, a_img) != ab:
                continue
            if mul(r_img, mul(a_img, r_inv)) != inv(ab):
                continue
            for s_img in invols:
                if mul(s_img, b_img) != mul(b_img, s_img):
                    continue
                if mul(s_img, mul(a_img, s_img)) != inv(ab):
                    continue
                sr = mul(s_img, r_img)
                if mul(sr, sr) != ambient.identity:
                    continue
                c_pool = invols if extended else [None]
                for c_img in c_pool:
                    bindings = {
                        names[0]: a_img,
                        names[1]: b_img,
                        names[2]: s_img,
                        names[3]: r_img,
                    }
                    if c_img is not None:
                        bindings[names[4]] = c_img
                    if not all(
                        evaluate(w, bindings, ambient) == ambient.identity
                        for w in relators
                    ):
                        continue
                    mapping = _extend_isomorphism(ambient, target, bindings, sub_set)
                    if mapping is not None:
                        return IsoMap(
                            ambient, target, tuple(bindings.items()), mapping
                        )
    return None


def _extend_isomorphism(ambient, target, bindings, sub_set) -> dict | None:
    """Grow the generator matching to all elements; None unless bijective."""
    tgen = target.generators()
    pairs = [(bindings[n], tgen[n]) for n in target.spec.names]
    mapping = {ambient.identity: target.identity}
    frontier = [ambient.identity]
    while frontier:
        nxt = []
        for x in frontier:
            fx = mapping[x]
            for gx, gy in pairs:
                y = ambient.mul(x, gx)
                fy = target.mul(fx, gy)
                seen = mapping.get(y)
                if seen is None:
                    if y not in sub_set:
                        return None
                    mapping[y] = fy
                    nxt.append(y)
                elif seen != fy:
                    return None
        frontier = nxt
    if len(mapping) != len(sub_set) or len(set(mapping.values())) != len(mapping):
        return None
    return mapping


@dataclass(frozen=True)
class SubgroupSearchResult:
    """Order-6p^2 copies of Z_p^2 x| D3 inside Z_2p^2 x| D3, up to conjugacy."""

    p: int
    classes: tuple[tuple[SubgroupHandle, ...], ...]

    @property
    def class_count(self) -> int:
        return len(self.classes)

    @property
    def representatives(self) -> tuple[SubgroupHandle, ...]:
        return tuple(cls[0] for cls in self.classes)


def subgroups_isomorphic_to_g(p: int) -> SubgroupSearchResult:
    """All subgroups of G' = G(2p) of order 6p^2 isomorphic to G(p), by classes.

    Any such subgroup contains the characteristic Sylow-p lattice <A^2, B^2>,
    so it is generated by that lattice plus one rotation-type and one
    reflection-type coset representative mod the lattice; there are only
    8 x 12 such coset pairs to try.
    """
    gp = concrete_group(spec_gprime(p))
    m = 2 * p
    target_order = 6 * p * p
    a2 = (2 % m, 0, 0, 0)
    b2 = (0, 2 % m, 0, 0)
    seen: set[frozenset] = set()
    handles = []
    for rx, ry, rd in itertools.product((0, 1), (0, 1), (1, 2)):
        rho = (rx, ry, rd, 0)
        for sx, sy, sd in itertools.product((0, 1), (0, 1), (3, 4, 5)):
            sigma = (sx, sy, sd, 0)
            closure = gp.closure([a2, b2, rho, sigma], cap=target_order)
            if closure is None or len(closure) != target_order:
                continue
            key = frozenset(closure)
            if key in seen:
                continue
            seen.add(key)
            if find_isomorphism(gp, closure, spec_g(p)) is None:
                continue
            handles.append(
                SubgroupHandle(tuple(sorted(closure)), (a2, b2, rho, sigma))
            )
    classes: list[list[SubgroupHandle]] = []
    for handle in handles:
        for cls in classes:
            if gp.subgroups_conjugate(cls[0], handle):
                cls.append(handle)
                break
        else:
            classes.append([handle])
    return SubgroupSearchResult(p, tuple(tuple(cls) for cls in classes))
