"""The degree-2p plane pencil  x^2p + y^2p + z^2p + t(x^p y^p + x^p z^p + y^p z^p).

Everything here is exact: monomial projective transformations are stored as
(permutation, exponent vector) pairs modulo overall scalars, curve membership
and singularity checks run in Q(zeta_p), and point counts on coordinate lines
come from squarefreeness of u^2p + t u^p + 1 over Q.  No floating point
appears in any certification path.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .cyclo import Cyclo, _poly_divmod, _poly_trim, zeta_2p
from .groups import (
    ConcreteGroup,
    RelatorFailure,
    concrete_group,
    spec_g,
    spec_gprime,
)

INFINITY = "inf"


class SingularParameter(ValueError):
    """The requested member of the pencil is singular."""


SINGULAR_T = (Fraction(-1), Fraction(2), Fraction(-2))


@dataclass(frozen=True)
class PencilCurve:
    p: int
    t: object  # Fraction | INFINITY

    def __post_init__(self):
        if self.t != INFINITY:
            object.__setattr__(self, "t", Fraction(self.t))

    @property
    def is_smooth_member(self) -> bool:
        return self.t != INFINITY and self.t not in SINGULAR_T


# ----------------------------------------------------------------------
# monomial projective transformations

Perm = tuple[int, int, int]
Mono = tuple[Perm, tuple[int, int, int]]  # (M v)_i = zeta^(d_i) v_(perm_i)

_IDENTITY_PERM: Perm = (0, 1, 2)


def _canonical(N: int, perm: Perm, exps) -> Mono:
    d0 = exps[0] % N
    return (perm, (0, (exps[1] - d0) % N, (exps[2] - d0) % N))


def mono_mul(N: int, a: Mono, b: Mono) -> Mono:
    pa, da = a
    pb, db = b
    perm = (pb[pa[0]], pb[pa[1]], pb[pa[2]])
    exps = (da[0] + db[pa[0]], da[1] + db[pa[1]], da[2] + db[pa[2]])
    return _canonical(N, perm, exps)


def mono_inv(N: int, a: Mono) -> Mono:
    pa, da = a
    inv_perm = [0, 0, 0]
    for i, j in enumerate(pa):
        inv_perm[j] = i
    exps = tuple(-da[inv_perm[i]] for i in range(3))
    return _canonical(N, tuple(inv_perm), exps)


class MonomialGroup:
    """Adapter so the word evaluator and closure logic work on matrices."""

    def __init__(self, N: int):
        self.N = N
        self.identity: Mono = (_IDENTITY_PERM, (0, 0, 0))

    def mul(self, a: Mono, b: Mono) -> Mono:
        return mono_mul(self.N, a, b)

    def inv(self, a: Mono) -> Mono:
        return mono_inv(self.N, a)

    def power(self, a: Mono, n: int) -> Mono:
        if n < 0:
            a, n = self.inv(a), -n
        out = self.identity
        while n:
            if n & 1:
                out = self.mul(out, a)
            a = self.mul(a, a)
            n >>= 1
        return out

    def closure(self, gens) -> list[Mono]:
        seen = {self.identity}
        frontier = [self.identity]
        gens = list(gens)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mul(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return sorted(seen)


def generator_matrices(p: int) -> dict[str, Mono]:
    """a, b diagonal zeta_p scalings; r the 3-cycle, s the x<->z swap (N=p)."""
    return {
        "a": (_IDENTITY_PERM, (1 % p, 0, 0)),
        "b": (_IDENTITY_PERM, (0, 1 % p, 0)),
        "r": ((1, 2, 0), (0, 0, 0)),
        "s": ((2, 1, 0), (0, 0, 0)),
    }


def fermat_generator_matrices(p: int) -> dict[str, Mono]:
    """A, B diagonal zeta_2p scalings plus the same permutations (N=2p)."""
    N = 2 * p
    return {
        "A": (_IDENTITY_PERM, (1 % N, 0, 0)),
        "B": (_IDENTITY_PERM, (0, 1 % N, 0)),
        "R": ((1, 2, 0), (0, 0, 0)),
        "S": ((2, 1, 0), (0, 0, 0)),
    }


# ----------------------------------------------------------------------
# exact polynomial bookkeeping

Monomials = dict[tuple[int, int, int], Fraction]


def pencil_parts(p: int) -> tuple[Monomials, Monomials]:
    one = Fraction(1)
    f0 = {(2 * p, 0, 0): one, (0, 2 * p, 0): one, (0, 0, 2 * p): one}
    f1 = {(p, p, 0): one, (p, 0, p): one, (0, p, p): one}
    return f0, f1


def pencil_polynomial(p: int, t) -> Monomials:
    f0, f1 = pencil_parts(p)
    if t == INFINITY:
        return f1
    t = Fraction(t)
    out = dict(f0)
    for e, c in f1.items():
        out[e] = out.get(e, Fraction(0)) + t * c
    return {e: c for e, c in out.items() if c}


def poly_diff(poly: Monomials, var: int) -> Monomials:
    out: Monomials = {}
    for e, c in poly.items():
        if e[var]:
            ne = list(e)
            ne[var] -= 1
            out[tuple(ne)] = out.get(tuple(ne), Fraction(0)) + c * e[var]
    return {e: c for e, c in out.items() if c}


def poly_mul(a: Monomials, b: Monomials) -> Monomials:
    out: Monomials = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
            out[e] = out.get(e, Fraction(0)) + c1 * c2
    return {e: c for e, c in out.items() if c}


def _transform_poly(p: int, N: int, poly: Monomials, mono: Mono) -> dict:
    """Exponent-level substitution x_i -> zeta_N^(d_i) x_(perm_i).

    Coefficients become pairs (rational, zeta_N exponent); returns a dict
    exponent-vector -> accumulated Cyclo value in Q(zeta_p).
    """
    perm, d = mono
    out: dict[tuple[int, int, int], Cyclo] = {}
    for e, c in poly.items():
        scale_exp = sum(d[i] * e[i] for i in range(3)) % N
        new_e = [0, 0, 0]
        for i in range(3):
            new_e[perm[i]] = e[i]
        key = tuple(new_e)
        value = Cyclo.from_rational(p, c) * _z_pow(p, N, scale_exp)
        out[key] = out.get(key, Cyclo.from_rational(p, 0)) + value
    return {e: v for e, v in out.items() if not v.is_zero()}


@lru_cache(maxsize=None)
def _z_pow_table(p: int, N: int) -> tuple[Cyclo, ...]:
    zN = zeta_2p(p) if N == 2 * p else Cyclo.zeta_power(p, 1)
    out = [Cyclo.from_rational(p, 1)]
    for _ in range(N - 1):
        out.append(out[-1] * zN)
    return tuple(out)


def _z_pow(p: int, N: int, k: int) -> Cyclo:
    return _z_pow_table(p, N)[k % N]


def _poly_to_cyclo(p: int, poly: Monomials) -> dict:
    return {e: Cyclo.from_rational(p, c) for e, c in poly.items()}


def _proportional(p: int, f: dict, g: dict):
    """Scalar c with f = c*g exactly, or None."""
    if set(f) != set(g):
        return None
    first = next(iter(sorted(f)))
    c = f[first] / g[first]
    for e in f:
        if f[e] != c * g[e]:
            return None
    return c


def preserves_pencil(p: int, N: int, mono: Mono, curve: PencilCurve | None = None) -> bool:
    """F_t o M = c F_t exactly; t stays symbolic when curve is None."""
    f0, f1 = pencil_parts(p)
    if curve is None:
        t0 = _transform_poly(p, N, f0, mono)
        t1 = _transform_poly(p, N, f1, mono)
        c0 = _proportional(p, t0, _poly_to_cyclo(p, f0))
        c1 = _proportional(p, t1, _poly_to_cyclo(p, f1))
        return c0 is not None and c1 is not None and c0 == c1
    poly = pencil_polynomial(curve.p, curve.t)
    transformed = _transform_poly(p, N, poly, mono)
    return _proportional(p, transformed, _poly_to_cyclo(p, poly)) is not None


# ----------------------------------------------------------------------
# the matrix groups and their identification with the abstract models


@dataclass(frozen=True)
class MatrixIso:
    group_order: int
    target: ConcreteGroup
    mapping: dict  # Mono -> abstract element

    def apply(self, mono: Mono):
        return self.mapping[mono]


def _matrix_isomorphism(p: int, N: int, gen_map: dict[str, Mono], target_spec) -> MatrixIso:
    target = concrete_group(target_spec)
    mg = MonomialGroup(N)
    matrices = mg.closure(gen_map.values())
    if len(matrices) != target.order:
        raise RelatorFailure(
            f"matrix group order {len(matrices)} != |target| {target.order}"
        )
    tgen = target.generators()
    pairs = [(gen_map[n], tgen[n]) for n in target.spec.names]
    mapping = {mg.identity: target.identity}
    frontier = [mg.identity]
    while frontier:
        nxt = []
        for x in frontier:
            fx = mapping[x]
            for gx, gy in pairs:
                y = mg.mul(x, gx)
                fy = target.mul(fx, gy)
                seen = mapping.get(y)
                if seen is None:
                    mapping[y] = fy
                    nxt.append(y)
                elif seen != fy:
                    raise RelatorFailure("generator matching is not a homomorphism")
        frontier = nxt
    if len(mapping) != len(matrices) or len(set(mapping.values())) != len(mapping):
        raise RelatorFailure("generator matching is not bijective")
    return MatrixIso(len(matrices), target, mapping)


@lru_cache(maxsize=None)
def matrix_group_isomorphism(p: int) -> MatrixIso:
    """<a, b, r, s> as monomial transformations == G(p), verified elementwise."""
    return _matrix_isomorphism(p, p, generator_matrices(p), spec_g(p))


@lru_cache(maxsize=None)
def fermat_matrix_isomorphism(p: int) -> MatrixIso:
    """The t = 0 member's monomial group of order 24p^2 == G(2p)."""
    return _matrix_isomorphism(p, 2 * p, fermat_generator_matrices(p), spec_gprime(p))


def fermat_member_check(p: int) -> dict:
    """The Fermat member admits the full order-24p^2 monomial group."""
    gens = fermat_generator_matrices(p)
    curve = PencilCurve(p, 0)
    preserved = {
        name: preserves_pencil(p, 2 * p, mono, curve) for name, mono in gens.items()
    }
    iso = fermat_matrix_isomorphism(p)
    return {
        "t": 0,
        "generators_preserve": preserved,
        "group_order": iso.group_order,
        "expected_order": 24 * p * p,
        "isomorphic_to_Z2p2_D3": iso.group_order == 24 * p * p,
    }


# ----------------------------------------------------------------------
# fixed points on smooth members


def _distinct_roots_of_line_form(p: int, t: Fraction) -> int:
    """Number of distinct roots of u^2p + t u^p + 1 (squarefree <=> t != +-2)."""
    deg = 2 * p
    f = [Fraction(0)] * (deg + 1)
    f[0] = Fraction(1)
    f[p] = Fraction(t)
    f[deg] = Fraction(1)
    df = [f[i + 1] * (i + 1) for i in range(deg)]
    g = _poly_gcd(f, df)
    return deg - (len(g) - 1)


def _poly_gcd(a, b):
    r0, r1 = _poly_trim(list(a)), _poly_trim(list(b))
    while r1 != [Fraction(0)]:
        _q, rem = _poly_divmod(r0, r1)
        r0, r1 = r1, _poly_trim(rem)
    return r0


@dataclass(frozen=True)
class LineFixedPoints:
    line: str  # which coordinate vanishes
    count: int
    stabilizer_order: int


def fixed_points_on_curve(p: int, t, lattice_exps: tuple[int, int]) -> list[LineFixedPoints]:
    """Fixed points of the diagonal map diag(zeta^i, zeta^j, 1) on X_{p,t}.

    Fixed loci are coordinate points (never on a smooth member) plus one
    coordinate line when two eigenvalues coincide; the on-curve points of a
    line are the 2p distinct roots of u^2p + t u^p + 1.
    """
    curve = PencilCurve(p, t)
    if not curve.is_smooth_member:
        raise SingularParameter(f"t = {t} is a singular member")
    i, j = lattice_exps[0] % p, lattice_exps[1] % p
    if (i, j) == (0, 0):
        raise ValueError("the identity fixes everything")
    count = _distinct_roots_of_line_form(p, curve.t)
    if i == j:
        return [LineFixedPoints("z", count, _line_stabilizer(p, "z"))]
    if j == 0:
        return [LineFixedPoints("x", count, _line_stabilizer(p, "x"))]
    if i == 0:
        return [LineFixedPoints("y", count, _line_stabilizer(p, "y"))]
    return []


def _line_stabilizer(p: int, line: str) -> int:
    """Order of the lattice subgroup fixing the given coordinate line pointwise."""
    conds = {
        "z": lambda i, j: i == j,
        "x": lambda i, j: j == 0,
        "y": lambda i, j: i == 0,
    }[line]
    return sum(1 for i in range(p) for j in range(p) if conds(i, j))


def total_lattice_fixed_points(p: int, t) -> dict:
    """Distinct points fixed by some nontrivial diagonal lattice element."""
    curve = PencilCurve(p, t)
    if not curve.is_smooth_member:
        raise SingularParameter(f"t = {t} is a singular member")
    per_line = _distinct_roots_of_line_form(p, curve.t)
    return {
        "per_line": {"x": per_line, "y": per_line, "z": per_line},
        "total": 3 * per_line,
        "stabilizer_order": _line_stabilizer(p, "z"),
    }


def geometric_fixed_point_count(p: int, t, lattice_exps: tuple[int, int]) -> int:
    return sum(rec.count for rec in fixed_points_on_curve(p, t, lattice_exps))


# ----------------------------------------------------------------------
# the diagonal point [1 : lambda : 1]


def _integer_nth_root(value: int, n: int) -> int:
    lo, hi = 0, max(1, value)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid**n <= value:
            lo = mid
        else:
            hi = mid - 1
    return lo


def _rational_nth_root(value: Fraction, n: int) -> Fraction | None:
    if value == 0:
        return Fraction(0)
    sign = 1 if value > 0 else -1
    if sign < 0 and n % 2 == 0:
        return None
    num, den = abs(value.numerator), value.denominator
    rn = _integer_nth_root(num, n)
    rd = _integer_nth_root(den, n)
    if rn**n == num and rd**n == den:
        return Fraction(sign * rn, rd)
    return None


def _rational_sqrt(value: Fraction) -> Fraction | None:
    return _rational_nth_root(value, 2) if value >= 0 else None


def diagonal_point_stabilizer(p: int, t) -> dict:
    """Stabilizer of [1 : lambda : 1] in the order-6p^2 monomial group.

    Requires a rational t with t^2 - t - 2 a rational square and lambda^p =
    -t +- sqrt(t^2 - t - 2) admitting a rational p-th root (t = 3 gives
    lambda = -1).  Curve membership and the stabilizer count are exact.
    """
    curve = PencilCurve(p, t)
    if not curve.is_smooth_member:
        raise SingularParameter(f"t = {t} is a singular member")
    t = curve.t
    disc = t * t - t - 2
    root = _rational_sqrt(disc)
    if root is None:
        raise ValueError(f"t^2 - t - 2 = {disc} is not a rational square")
    lam = None
    for candidate in (-t + root, -t - root):
        lam = _rational_nth_root(candidate, p)
        if lam is not None:
            break
    if lam is None:
        raise ValueError("neither value of lambda^p has a rational p-th root")
    point = tuple(
        Cyclo.from_rational(p, v) for v in (Fraction(1), lam, Fraction(1))
    )
    membership = _eval_poly_at(p, pencil_polynomial(p, t), point)
    if not membership.is_zero():
        raise AssertionError("diagonal point does not lie on the curve")
    mg = MonomialGroup(p)
    matrices = mg.closure(generator_matrices(p).values())
    stab = [m for m in matrices if _fixes_point(p, p, m, point)]
    return {
        "t": t,
        "lambda": lam,
        "stabilizer_order": len(stab),
        "stabilizer": stab,
    }


def _fixes_point(p: int, N: int, mono: Mono, point) -> bool:
    perm, d = mono
    image = [point[perm[i]] * _z_pow(p, N, d[i]) for i in range(3)]
    pivot = next(k for k in range(3) if not point[k].is_zero())
    if image[pivot].is_zero():
        return False
    c = image[pivot] / point[pivot]
    return all(image[k] == c * point[k] for k in range(3))


def _eval_poly_at(p: int, poly: Monomials, point) -> Cyclo:
    total = Cyclo.from_rational(p, 0)
    for e, c in poly.items():
        term = Cyclo.from_rational(p, c)
        for k in range(3):
            term = term * _cyclo_pow(point[k], e[k], p)
        total = total + term
    return total


def _cyclo_pow(base: Cyclo, n: int, p: int) -> Cyclo:
    out = Cyclo.from_rational(p, 1)
    while n:
        if n & 1:
            out = out * base
        base = base * base
        n >>= 1
    return out


# ----------------------------------------------------------------------
# the four singular members


def singular_members_report(p: int) -> dict:
    """Exact certification of the singular members t in {2, -2, -1, inf}."""
    report = {"p": p, "members": {}}

    # t = 2: the double curve (x^p + y^p + z^p)^2
    f2 = pencil_polynomial(p, 2)
    half = {(p, 0, 0): Fraction(1), (0, p, 0): Fraction(1), (0, 0, p): Fraction(1)}
    report["members"]["2"] = {
        "member": "double-curve",
        "square_identity": poly_mul(half, half) == f2,
    }

    # t = -2: the points [1 : zeta^i : 0] are singular
    fm2 = pencil_polynomial(p, -2)
    grads_m2 = [poly_diff(fm2, v) for v in range(3)]
    one = Cyclo.from_rational(p, 1)
    zero_ok = True
    for i in range(p):
        point = (one, Cyclo.zeta_power(p, i), Cyclo.from_rational(p, 0))
        if not _eval_poly_at(p, fm2, point).is_zero():
            zero_ok = False
        if any(not _eval_poly_at(p, g, point).is_zero() for g in grads_m2):
            zero_ok = False
    report["members"]["-2"] = {
        "member": "singular",
        "z0_points_singular": zero_ok,
        "points": f"[1 : zeta^i : 0] for 0 <= i < {p}",
    }

    # t = -1: p^2 nodes at [zeta^i : zeta^j : 1]
    fm1 = pencil_polynomial(p, -1)
    grads = [poly_diff(fm1, v) for v in range(3)]
    fxx = poly_diff(grads[0], 0)
    fxy = poly_diff(grads[0], 1)
    fyy = poly_diff(grads[1], 1)
    all_singular = True
    all_nodes = True
    hessian_at_origin = None
    for i in range(p):
        zi = Cyclo.zeta_power(p, i)
        for j in range(p):
            point = (zi, Cyclo.zeta_power(p, j), one)
            if not _eval_poly_at(p, fm1, point).is_zero():
                all_singular = False
            if any(not _eval_poly_at(p, g, point).is_zero() for g in grads):
                all_singular = False
            det = _eval_poly_at(p, fxx, point) * _eval_poly_at(p, fyy, point) - (
                _eval_poly_at(p, fxy, point) * _eval_poly_at(p, fxy, point)
            )
            if det.is_zero():
                all_nodes = False
            if i == 0 and j == 0:
                hessian_at_origin = det
    report["members"]["-1"] = {
        "member": "nodal",
        "point_count": p * p,
        "all_points_singular": all_singular,
        "all_points_nodes": all_nodes,
        "hessian_det_at_[1:1:1]": repr(hessian_at_origin),
        "caveat": "the p^2 listed points are certified; completeness of the "
        "singular locus is not",
    }

    # t = inf: x^p y^p + x^p z^p + y^p z^p, singular at the coordinate points
    finf = pencil_polynomial(p, INFINITY)
    grads_inf = [poly_diff(finf, v) for v in range(3)]
    zero = Cyclo.from_rational(p, 0)
    coord_points = [(one, zero, zero), (zero, one, zero), (zero, zero, one)]
    inf_ok = all(
        _eval_poly_at(p, finf, q).is_zero()
        and all(_eval_poly_at(p, g, q).is_zero() for g in grads_inf)
        for q in coord_points
    )
    report["members"]["inf"] = {
        "member": "singular",
        "coordinate_points_singular": inf_ok,
    }
    return report
