"""Orbifold signatures: Riemann-Hurwitz, areas, and extension candidates.

A signature (h; m_1, ..., m_r) records the quotient genus and the cone
orders of a branched covering X -> X/G.  Signatures store their periods
sorted ascending (signature identity is order-free); generating vectors
carry their own period order separately.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property


class NonIntegralGenus(ValueError):
    """Riemann-Hurwitz produced a non-integer: the action is impossible."""


@dataclass(frozen=True)
class Signature:
    h: int
    periods: tuple[int, ...] = ()

    def __post_init__(self):
        if self.h < 0:
            raise ValueError("orbit genus must be >= 0")
        if any(m < 2 for m in self.periods):
            raise ValueError("periods must be >= 2")
        object.__setattr__(self, "periods", tuple(sorted(self.periods)))

    @cached_property
    def normalized_area(self) -> Fraction:
        """2h - 2 + sum(1 - 1/m_j), exact."""
        return Fraction(2 * self.h - 2) + sum(
            (1 - Fraction(1, m) for m in self.periods), Fraction(0)
        )

    @property
    def is_hyperbolic(self) -> bool:
        return self.normalized_area > 0

    @property
    def teichmuller_dimension(self) -> int:
        return 3 * self.h - 3 + len(self.periods)

    def text(self) -> str:
        if not self.periods:
            return f"({self.h};)"
        return f"({self.h}; " + ",".join(str(m) for m in self.periods) + ")"

    def __str__(self):
        return self.text()


_SIG_RE = re.compile(r"^\(\s*(\d+)\s*;\s*((?:\d+\s*(?:,\s*\d+\s*)*)?)\)$")


def parse_signature(text: str) -> Signature:
    match = _SIG_RE.match(text.strip())
    if not match:
        raise ValueError(f"bad signature text: {text!r}")
    h = int(match.group(1))
    body = match.group(2).strip()
    periods = tuple(int(tok) for tok in body.split(",")) if body else ()
    return Signature(h, periods)


def rh_genus(group_order: int, sig: Signature) -> int:
    """Genus of X from 2(g-1) = |G| (2(h-1) + sum(1 - 1/m_j))."""
    if not sig.is_hyperbolic:
        raise ValueError(f"{sig} is not hyperbolic")
    g = 1 + Fraction(group_order, 2) * sig.normalized_area
    if g.denominator != 1:
        raise NonIntegralGenus(f"|G|={group_order}, sig={sig} gives genus {g}")
    return int(g)


def index_from_areas(sub: Signature, sup: Signature) -> Fraction:
    """Area ratio = covering index when the inclusion exists; exact rational."""
    if not (sub.is_hyperbolic and sup.is_hyperbolic):
        raise ValueError("both signatures must be hyperbolic")
    return sub.normalized_area / sup.normalized_area


# ----------------------------------------------------------------------
# Extension pairs of equal Teichmueller dimension (the standard list of
# parametrized families: eight normal, eleven non-normal).


def _pairings(values):
    """Distinct (t1, t2) readings of a 4-period multiset {t1,t1,t2,t2}."""
    a, b, c, d = values
    out = set()
    if a == b and c == d:
        out.add((a, c))
    if a == c and b == d:
        out.add((a, b))
    if a == d and b == c:
        out.add((a, b))
    return out


def _candidate_rows(sig: Signature):
    h, ms = sig.h, sig.periods
    if h == 2 and not ms:
        yield "N1", Signature(0, (2, 2, 2, 2, 2, 2)), 2
    if h == 1 and len(ms) == 2 and ms[0] == ms[1]:
        yield "N2", Signature(0, (2, 2, 2, 2, ms[0])), 2
    if h == 1 and len(ms) == 1:
        yield "N3", Signature(0, (2, 2, 2, 2 * ms[0])), 2
    if h == 0 and len(ms) == 4:
        if len(set(ms)) == 1:
            yield "N4", Signature(0, (2, 2, 2, ms[0])), 4
        for t1, t2 in sorted(_pairings(ms)):
            yield "N5", Signature(0, (2, 2, t1, t2)), 2
    if h == 0 and len(ms) == 3:
        a, b, c = ms
        if a == b == c:
            yield "N6", Signature(0, (3, 3, a)), 3
            yield "N7", Signature(0, (2, 3, 2 * a)), 6
        # N8: (t1, t1, t2) inside (0; 2, t1, 2 t2)
        if a == b:
            yield "N8", Signature(0, (2, a, 2 * c)), 2
        if b == c and a != b:
            yield "N8", Signature(0, (2, b, 2 * a)), 2
        fixed = {
            (7, 7, 7): [("T1", (2, 3, 7), 24)],
            (2, 7, 7): [("T2", (2, 3, 7), 9)],
            (3, 3, 7): [("T3", (2, 3, 7), 8)],
            (4, 8, 8): [("T4", (2, 3, 8), 12)],
            (3, 8, 8): [("T5", (2, 3, 8), 10)],
            (9, 9, 9): [("T6", (2, 3, 9), 12)],
            (4, 4, 5): [("T7", (2, 4, 5), 6)],
        }
        for name, sup, idx in fixed.get(ms, ()):
            yield name, Signature(0, sup), idx
        # T8: (n, 4n, 4n) < (2, 3, 4n); T9: (n, 2n, 2n) < (2, 4, 2n)
        if b == c:
            if b == 4 * a:
                yield "T8", Signature(0, (2, 3, 4 * a)), 6
            if b == 2 * a:
                yield "T9", Signature(0, (2, 4, 2 * a)), 4
        # T10: (3, n, 3n) < (2, 3, 3n); T11: (2, n, 2n) < (2, 3, 2n)
        if a == 3 and c == 3 * b:
            yield "T10", Signature(0, (2, 3, c)), 4
        if a == 2 and c == 2 * b:
            yield "T11", Signature(0, (2, 3, c)), 3


def singerman_candidates(sig: Signature) -> list[tuple[Signature, int]]:
    """Proper extensions of equal Teichmueller dimension, with indices.

    Each emitted row is cross-validated against the area-ratio identity, so a
    transcription slip in the embedded table cannot survive.
    """
    if not sig.is_hyperbolic:
        raise ValueError(f"{sig} is not hyperbolic")
    out = []
    for name, sup, idx in _candidate_rows(sig):
        if not sup.is_hyperbolic:
            continue
        if sup.teichmuller_dimension != sig.teichmuller_dimension:
            raise AssertionError(f"row {name}: dimension mismatch for {sig}")
        if index_from_areas(sig, sup) != idx:
            raise AssertionError(f"row {name}: area ratio != {idx} for {sig} < {sup}")
        if (sup, idx) not in out:
            out.append((sup, idx))
    out.sort(key=lambda pair: (pair[0].h, pair[0].periods, pair[1]))
    return out
