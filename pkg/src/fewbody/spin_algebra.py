"""Exact angular-momentum coupling for two to four spin-1/2 particles.

Clebsch-Gordan coefficients, Wigner 6j and 9j symbols from the Racah sum
formulas in exact arithmetic, and coupled-basis states for three and four
spins.  Phase convention is Condon-Shortley throughout.

Coupled-state conventions (pinned by the identity tests):
  * three particles: the lone particle couples first, its complementary
    pair second, and the pair carries the cyclic index order
    lone 1 -> (2,3), lone 2 -> (3,1), lone 3 -> (1,2);
  * four particles: (first pair) x (second pair) with pairings
    (1,2)(3,4), (2,3)(1,4), (3,1)(2,4), index order inside each pair
    as written.
With these choices the three same-family states sum to the zero vector
for both the pair-singlet and pair-triplet families.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Union

from .exact import ONE, ZERO, SqrtRational, rational, sqrt_rational

SpinValue = Union[int, float, Fraction]

UP = Fraction(1, 2)
DOWN = Fraction(-1, 2)

#: complementary pair for each lone particle, cyclic order
CYCLIC_PAIR: dict[int, tuple[int, int]] = {1: (2, 3), 2: (3, 1), 3: (1, 2)}

#: the three two-pair splittings of four particles, index order as written
PAIRINGS_4: tuple[tuple[tuple[int, int], tuple[int, int]], ...] = (
    ((1, 2), (3, 4)),
    ((2, 3), (1, 4)),
    ((3, 1), (2, 4)),
)


def _half(x: SpinValue) -> Fraction:
    f = Fraction(x)
    if f.denominator not in (1, 2):
        raise ValueError(f"not a half-integer: {x}")
    return f


def _fact(x: Fraction) -> int:
    if x.denominator != 1 or x < 0:
        raise ValueError(f"factorial of non-natural {x}")
    return factorial(int(x))


def _triangle_ok(a: Fraction, b: Fraction, c: Fraction) -> bool:
    return abs(a - b) <= c <= a + b and (a + b + c).denominator == 1


def clebsch_gordan(
    j1: SpinValue, m1: SpinValue, j2: SpinValue, m2: SpinValue, J: SpinValue, M: SpinValue
) -> SqrtRational:
    """Exact <j1 m1; j2 m2 | J M> in the Condon-Shortley convention.

    Invalid triangles or projections give an exact zero rather than an
    error, matching the usual tabulation convention.
    """
    j1, m1, j2, m2, J, M = (_half(x) for x in (j1, m1, j2, m2, J, M))
    if m1 + m2 != M or not _triangle_ok(j1, j2, J):
        return ZERO
    if abs(m1) > j1 or abs(m2) > j2 or abs(M) > J:
        return ZERO
    if (j1 - m1).denominator != 1 or (j2 - m2).denominator != 1 or (J - M).denominator != 1:
        return ZERO

    pref = Fraction(
        (2 * J + 1).numerator
        * _fact(j1 + j2 - J)
        * _fact(j1 - j2 + J)
        * _fact(-j1 + j2 + J),
        (2 * J + 1).denominator * _fact(j1 + j2 + J + 1),
    )
    pref *= Fraction(
        _fact(J + M)
        * _fact(J - M)
        * _fact(j1 - m1)
        * _fact(j1 + m1)
        * _fact(j2 - m2)
        * _fact(j2 + m2),
        1,
    )
    total = Fraction(0)
    k = 0
    while True:
        args = (
            j1 + j2 - J - k,
            j1 - m1 - k,
            j2 + m2 - k,
            J - j2 + m1 + k,
            J - j1 - m2 + k,
        )
        if min(args[:3]) < 0:
            break
        if min(args) >= 0:
            den = (
                factorial(k)
                * _fact(args[0])
                * _fact(args[1])
                * _fact(args[2])
                * _fact(args[3])
                * _fact(args[4])
            )
            total += Fraction((-1) ** k, den)
        k += 1
    return sqrt_rational(pref) * rational(total)


def _delta_factor(a: Fraction, b: Fraction, c: Fraction) -> SqrtRational:
    return sqrt_rational(
        Fraction(
            _fact(a + b - c) * _fact(a - b + c) * _fact(-a + b + c),
            _fact(a + b + c + 1),
        )
    )


def wigner6j(
    j1: SpinValue, j2: SpinValue, j3: SpinValue, j4: SpinValue, j5: SpinValue, j6: SpinValue
) -> SqrtRational:
    """Exact {j1 j2 j3; j4 j5 j6} by the Racah sum formula."""
    j1, j2, j3, j4, j5, j6 = (_half(x) for x in (j1, j2, j3, j4, j5, j6))
    triads = ((j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3))
    if not all(_triangle_ok(*t) for t in triads):
        return ZERO
    pref = ONE
    for t in triads:
        pref = pref * _delta_factor(*t)

    s1 = j1 + j2 + j3
    s2 = j1 + j5 + j6
    s3 = j4 + j2 + j6
    s4 = j4 + j5 + j3
    q1 = j1 + j2 + j4 + j5
    q2 = j2 + j3 + j5 + j6
    q3 = j3 + j1 + j6 + j4
    total = Fraction(0)
    t = max(s1, s2, s3, s4)
    while t <= min(q1, q2, q3):
        den = (
            _fact(t - s1)
            * _fact(t - s2)
            * _fact(t - s3)
            * _fact(t - s4)
            * _fact(q1 - t)
            * _fact(q2 - t)
            * _fact(q3 - t)
        )
        total += Fraction((-1) ** int(t) * _fact(t + 1), den)
        t += 1
    return pref * rational(total)


def wigner9j(
    j1: SpinValue, j2: SpinValue, j3: SpinValue,
    j4: SpinValue, j5: SpinValue, j6: SpinValue,
    j7: SpinValue, j8: SpinValue, j9: SpinValue,
) -> SqrtRational:
    """Exact 9j symbol as the standard sum over triple 6j products."""
    js = [_half(x) for x in (j1, j2, j3, j4, j5, j6, j7, j8, j9)]
    j1, j2, j3, j4, j5, j6, j7, j8, j9 = js
    lo = max(abs(j1 - j9), abs(j2 - j6), abs(j4 - j8))
    hi = min(j1 + j9, j2 + j6, j4 + j8)
    total = ZERO
    x = lo
    while x <= hi:
        term = (
            wigner6j(j1, j4, j7, j8, j9, x)
            * wigner6j(j2, j5, j8, j4, x, j6)
            * wigner6j(j3, j6, j9, x, j1, j2)
        )
        sign = (-1) ** int(2 * x)
        total = total + term * rational((2 * x + 1).numerator * sign) / rational(
            (2 * x + 1).denominator
        )
        x += Fraction(1, 2) if (hi - lo).denominator == 2 else 1
    return total


@dataclass(frozen=True)
class SpinState:
    """Exact spin state over the product basis of n spin-1/2 particles.

    terms maps projection tuples (one Fraction +-1/2 per particle) to
    exact coefficients; zero coefficients are dropped.
    """

    n: int
    terms: tuple[tuple[tuple[Fraction, ...], SqrtRational], ...]

    @staticmethod
    def from_dict(n: int, d: dict[tuple[Fraction, ...], SqrtRational]) -> "SpinState":
        items = tuple(sorted((k, v) for k, v in d.items() if not v.is_zero()))
        for key, _ in items:
            if len(key) != n:
                raise ValueError("projection tuple length mismatch")
        return SpinState(n, items)

    def as_dict(self) -> dict[tuple[Fraction, ...], SqrtRational]:
        return dict(self.terms)

    def scaled(self, factor: SqrtRational) -> "SpinState":
        return SpinState.from_dict(self.n, {k: v * factor for k, v in self.terms})

    def __add__(self, other: "SpinState") -> "SpinState":
        if self.n != other.n:
            raise ValueError("particle-count mismatch")
        out = self.as_dict()
        for k, v in other.terms:
            out[k] = out.get(k, ZERO) + v
        return SpinState.from_dict(self.n, out)

    def __sub__(self, other: "SpinState") -> "SpinState":
        return self + other.scaled(rational(-1))

    def is_zero(self) -> bool:
        return not self.terms

    def total_m(self) -> Fraction:
        projections = {sum(k) for k, _ in self.terms}
        if len(projections) > 1:
            raise ValueError("state mixes M sectors")
        return projections.pop() if projections else Fraction(0)


def spin_overlap(a: SpinState, b: SpinState) -> SqrtRational:
    """Product-basis orthonormal dot product <a|b>, exact."""
    if a.n != b.n:
        raise ValueError("particle-count mismatch")
    bd = b.as_dict()
    total = ZERO
    for key, ca in a.terms:
        cb = bd.get(key)
        if cb is not None:
            total = total + ca.conjugate() * cb
    return total


def _pair_expansion(
    n: int, pair: tuple[int, int], s: Fraction, m: Fraction
) -> dict[tuple[tuple[int, Fraction], ...], SqrtRational]:
    """Expansion of |s m> on the ordered particle pair, as partial assignments."""
    a, b = pair
    out: dict[tuple[tuple[int, Fraction], ...], SqrtRational] = {}
    for ma in (UP, DOWN):
        mb = m - ma
        if mb not in (UP, DOWN):
            continue
        c = clebsch_gordan(UP, ma, UP, mb, s, m)
        if c.is_zero():
            continue
        key = ((a, ma), (b, mb))
        out[key] = out.get(key, ZERO) + c
    return out


def _merge_partial(
    left: dict, right: dict
) -> dict[tuple[tuple[int, Fraction], ...], SqrtRational]:
    out: dict[tuple[tuple[int, Fraction], ...], SqrtRational] = {}
    for ka, ca in left.items():
        for kb, cb in right.items():
            key = tuple(sorted(ka + kb))
            out[key] = out.get(key, ZERO) + ca * cb
    return out


def _finalize(n: int, partial: dict) -> SpinState:
    terms: dict[tuple[Fraction, ...], SqrtRational] = {}
    for key, coef in partial.items():
        assignment = dict(key)
        if len(assignment) != n:
            raise ValueError("incomplete particle assignment")
        tup = tuple(assignment[i] for i in range(1, n + 1))
        terms[tup] = terms.get(tup, ZERO) + coef
    return SpinState.from_dict(n, terms)


def coupled_state_3(lone_particle: int, s_pair: SpinValue, m: SpinValue) -> SpinState:
    """|s_lone, s_pair; S=1/2, M=m> for three spin-1/2 particles.

    The pair is the cyclic complement of the lone particle and couples
    after it (lone first).  s_pair must be 0 or 1, m must be +-1/2.
    """
    if lone_particle not in (1, 2, 3):
        raise ValueError(f"lone particle index {lone_particle} not in 1..3")
    s = _half(s_pair)
    if s not in (Fraction(0), Fraction(1)):
        raise ValueError(f"pair spin {s_pair} not in {{0, 1}}")
    M = _half(m)
    if abs(M) != UP:
        raise ValueError(f"M = {m} invalid for S = 1/2")
    pair = CYCLIC_PAIR[lone_particle]
    partial: dict = {}
    for m_lone in (UP, DOWN):
        m_p = M - m_lone
        c = clebsch_gordan(UP, m_lone, s, m_p, UP, M)
        if c.is_zero():
            continue
        lone_part = {((lone_particle, m_lone),): c}
        pair_part = _pair_expansion(3, pair, s, m_p)
        for key, coef in _merge_partial(lone_part, pair_part).items():
            partial[key] = partial.get(key, ZERO) + coef
    return _finalize(3, partial)


def coupled_state_4(
    pairing: int | tuple[tuple[int, int], tuple[int, int]], s_pairs: SpinValue
) -> SpinState:
    """|s_p1, s_p2; S=0, M=0> for four spin-1/2 particles.

    pairing is an index 1..3 into the splittings (1,2)(3,4), (2,3)(1,4),
    (3,1)(2,4), or the splitting itself; both pairs carry spin s_pairs.
    """
    if isinstance(pairing, int):
        if pairing not in (1, 2, 3):
            raise ValueError(f"pairing index {pairing} not in 1..3")
        p1, p2 = PAIRINGS_4[pairing - 1]
    else:
        pairing = (tuple(pairing[0]), tuple(pairing[1]))
        if pairing not in PAIRINGS_4:
            raise ValueError(f"unknown pairing {pairing}")
        p1, p2 = pairing
    s = _half(s_pairs)
    if s not in (Fraction(0), Fraction(1)):
        raise ValueError(f"pair spin {s_pairs} not in {{0, 1}}")
    partial: dict = {}
    m = -s
    while m <= s:
        c = clebsch_gordan(s, m, s, -m, 0, 0)
        if not c.is_zero():
            left = _pair_expansion(4, p1, s, m)
            right = _pair_expansion(4, p2, s, -m)
            scaled = {k: v * c for k, v in left.items()}
            for key, coef in _merge_partial(scaled, right).items():
                partial[key] = partial.get(key, ZERO) + coef
        m += 1
    return _finalize(4, partial)


def recoupling_identity(s: int) -> SqrtRational:
    """The closure 1 + (-1)^s * 2(2s+1) * {1/2 1/2 s; 1/2 1/2 s}, exactly zero."""
    sym = wigner6j(UP, UP, s, UP, UP, s)
    return ONE + sym * rational((-1) ** s * 2 * (2 * s + 1))


def family_3(s_pair: SpinValue, m: SpinValue) -> list[SpinState]:
    """The three coupled states for lone particle 1, 2, 3."""
    return [coupled_state_3(i, s_pair, m) for i in (1, 2, 3)]


def family_4(s_pairs: SpinValue) -> list[SpinState]:
    """The three coupled states for the three pair splittings."""
    return [coupled_state_4(i, s_pairs) for i in (1, 2, 3)]
