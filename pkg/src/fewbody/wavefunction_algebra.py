"""Symbolic position wavefunctions and spin-traced density kernels.

Position wavefunctions live over a finite alphabet of orthonormal orbital
labels; every coefficient is exact.  Full spin (x) position states for
three and four particles are assembled from the coupled spin families and
the Young-symmetrized position families, and densities are obtained by
tracing out spins and marginalizing coordinates through orbital
orthonormality.

The position families follow the printed four-term (three-particle) and
sixteen-term (four-particle) expansions: one standard-tableau member is
built by a Young symmetrizer, the other two members are its cyclic
coordinate relabelings.  Orbital slots I, II, III(, IV) sit in the
tableau cells in reading order, so the ground assignment (I = II = g
doubly occupied, the rest e) puts the paired orbital in the first row.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, Union

import numpy as np

from .exact import ONE, ZERO, SqrtRational, rational, sqrt_rational
from .spin_algebra import (
    UP,
    SpinState,
    coupled_state_3,
    coupled_state_4,
    spin_overlap,
)
from .symmetric_group import (
    Permutation,
    Symmetrizer,
    YoungDiagram,
    apply_symmetrizer,
    build_symmetrizer,
)

Scalar = Union[int, Fraction, SqrtRational]

ORBITAL_SLOTS = ("I", "II", "III", "IV")

#: default orbital content of the slots: doubly occupied ground + excited
GROUND_ASSIGNMENT = {3: ("g", "g", "e"), 4: ("g", "g", "e", "e")}

#: fully distinct labels, the generic alphabet of the printed expansions
GENERIC_ASSIGNMENT = {3: ("I", "II", "III"), 4: ("I", "II", "III", "IV")}


class VanishingRepresentationError(ValueError):
    """Raised when an orbital assignment annihilates the position family."""


def _scalar(x: Scalar) -> SqrtRational:
    if isinstance(x, SqrtRational):
        return x
    return rational(x)


@dataclass(frozen=True)
class PositionWavefunction:
    """Collected signed sum of orbital-assignment monomials, exact coefficients."""

    n: int
    terms: tuple[tuple[tuple[str, ...], SqrtRational], ...]

    @staticmethod
    def from_dict(n: int, d: Mapping[tuple[str, ...], Scalar]) -> "PositionWavefunction":
        cleaned = {}
        for key, val in d.items():
            if len(key) != n:
                raise ValueError("assignment length mismatch")
            v = _scalar(val)
            if not v.is_zero():
                cleaned[tuple(key)] = v
        return PositionWavefunction(n, tuple(sorted(cleaned.items())))

    @staticmethod
    def monomial(assignment: Sequence[str]) -> "PositionWavefunction":
        return PositionWavefunction.from_dict(len(assignment), {tuple(assignment): 1})

    def as_dict(self) -> dict[tuple[str, ...], SqrtRational]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def scaled(self, factor: Scalar) -> "PositionWavefunction":
        f = _scalar(factor)
        return PositionWavefunction.from_dict(
            self.n, {k: v * f for k, v in self.terms}
        )

    def permuted(self, p: Permutation) -> "PositionWavefunction":
        """Relabel coordinates: coordinate c becomes coordinate p(c)."""
        return PositionWavefunction.from_dict(
            self.n, {p.apply_to_assignment(k): v for k, v in self.terms}
        )

    def __add__(self, other: "PositionWavefunction") -> "PositionWavefunction":
        if self.n != other.n:
            raise ValueError("particle-count mismatch")
        out = self.as_dict()
        for k, v in other.terms:
            out[k] = out.get(k, ZERO) + v
        return PositionWavefunction.from_dict(self.n, out)

    def __sub__(self, other: "PositionWavefunction") -> "PositionWavefunction":
        return self + other.scaled(-1)


def permute_arguments(wf: PositionWavefunction, p: Permutation) -> PositionWavefunction:
    return wf.permuted(p)


def position_inner_product(
    a: PositionWavefunction, b: PositionWavefunction
) -> SqrtRational:
    """<a|b> under orbital orthonormality: assignments contract by Kronecker delta."""
    if a.n != b.n:
        raise ValueError("particle-count mismatch")
    bd = b.as_dict()
    total = ZERO
    for key, ca in a.terms:
        cb = bd.get(key)
        if cb is not None:
            total = total + ca.conjugate() * cb
    return total


_STANDARD_TABLEAU = {3: ((1, 2), (3,)), 4: ((1, 2), (3, 4))}

#: relabelings taking the standard member to members 1, 2, 3 of the family
_MEMBER_RELABELINGS = {
    3: (Permutation((2, 3, 1)), Permutation((3, 1, 2)), Permutation((1, 2, 3))),
    4: (Permutation((1, 2, 3, 4)), Permutation((2, 3, 1, 4)), Permutation((3, 1, 2, 4))),
}

#: the cyclic step relating consecutive family members
_FAMILY_CYCLE = {3: Permutation((2, 3, 1)), 4: Permutation((2, 3, 1, 4))}


def build_position_family(
    n: int, kind: int, orbital_assignment: Sequence[str] | None = None
) -> list[PositionWavefunction]:
    """The three symmetrized position wavefunctions of one coupling family.

    kind 0 pairs with the pair-singlet spin family (rows symmetrized,
    columns antisymmetrized); kind 1 pairs with the pair-triplet family
    (conjugate role assignment on the same tableau).  orbital_assignment
    lists the orbital in each slot I, II, III(, IV); default is the
    doubly occupied ground configuration.
    """
    if n not in (3, 4):
        raise ValueError(f"n = {n} not in {{3, 4}}")
    if kind not in (0, 1):
        raise ValueError(f"kind = {kind} not in {{0, 1}}")
    orbitals = tuple(orbital_assignment or GROUND_ASSIGNMENT[n])
    if len(orbitals) != n:
        raise ValueError(f"need {n} orbital labels, got {len(orbitals)}")
    diagram = YoungDiagram((2, 1) if n == 3 else (2, 2))
    sym = build_symmetrizer(
        diagram, _STANDARD_TABLEAU[n], order="columns_then_rows", conjugate=bool(kind)
    )
    # slot I..IV sits in the tableau cell holding the same-index coordinate,
    # so the standard member's base monomial assigns orbital k to coordinate k
    base = PositionWavefunction.monomial(orbitals)
    standard = apply_symmetrizer(sym, base)
    if standard.is_zero():
        raise VanishingRepresentationError(
            f"assignment {orbitals} vanishes under the partition {diagram.partition} symmetrizer"
        )
    return [standard.permuted(p) for p in _MEMBER_RELABELINGS[n]]


def project_out_symmetric_sum(
    family: Sequence[PositionWavefunction],
) -> list[PositionWavefunction]:
    """Remove the fully symmetric component: subtract one third of the sum.

    The input must be the three cyclic relabelings of one wavefunction;
    the output family sums to the zero wavefunction exactly.
    """
    if len(family) != 3:
        raise ValueError("family must have three members")
    cycle = _FAMILY_CYCLE[family[0].n]
    members = list(family)
    for i in range(3):
        expected = members[i].permuted(cycle)
        if expected.terms != members[(i + 1) % 3].terms:
            raise ValueError("family not closed under cyclic relabeling")
    total = members[0] + members[1] + members[2]
    third = total.scaled(Fraction(1, 3))
    return [m - third for m in members]


@dataclass(frozen=True)
class SpinPositionState:
    """Assembled state sum_i spin_i (x) position_i with a statistics tag."""

    n: int
    statistics: str
    pairs: tuple[tuple[SpinState, PositionWavefunction], ...]

    def scaled(self, factor: Scalar) -> "SpinPositionState":
        return SpinPositionState(
            self.n,
            self.statistics,
            tuple((chi, phi.scaled(factor)) for chi, phi in self.pairs),
        )


def full_overlap(a: SpinPositionState, b: SpinPositionState) -> SqrtRational:
    """<a|b> combining spin overlaps with position contractions, exact."""
    if a.n != b.n:
        raise ValueError("particle-count mismatch")
    total = ZERO
    for chi_a, phi_a in a.pairs:
        for chi_b, phi_b in b.pairs:
            s = spin_overlap(chi_a, chi_b)
            if s.is_zero():
                continue
            p = position_inner_product(phi_a, phi_b)
            if p.is_zero():
                continue
            total = total + s.conjugate() * p
    return total


def assemble_state(
    n: int,
    coupling: str,
    statistics: str,
    orbital_assignment: Sequence[str] | None = None,
    m: Fraction | float = UP,
    normalize: bool = True,
) -> SpinPositionState:
    """Build the three-term spin (x) position superposition.

    coupling "low" couples each spin pair to 0, "high" to 1.  Fermions
    pair the low family with kind-0 position parts and the high family
    with kind-1 parts; bosons interchange the position kinds.  m selects
    M = +-1/2 for n = 3 and is ignored for n = 4 (S = 0).
    """
    if coupling not in ("low", "high"):
        raise ValueError(f"coupling {coupling!r} not in {{low, high}}")
    if statistics not in ("fermion", "boson"):
        raise ValueError(f"statistics {statistics!r} not in {{fermion, boson}}")
    s_pair = 0 if coupling == "low" else 1
    spin_kind = 0 if coupling == "low" else 1
    position_kind = spin_kind if statistics == "fermion" else 1 - spin_kind
    if n == 3:
        spins = [coupled_state_3(i, s_pair, m) for i in (1, 2, 3)]
    elif n == 4:
        spins = [coupled_state_4(i, s_pair) for i in (1, 2, 3)]
    else:
        raise ValueError(f"n = {n} not in {{3, 4}}")
    positions = build_position_family(n, position_kind, orbital_assignment)
    positions = project_out_symmetric_sum(positions)
    if all(p.is_zero() for p in positions):
        raise VanishingRepresentationError("projected position family vanished")
    state = SpinPositionState(n, statistics, tuple(zip(spins, positions)))
    if not normalize:
        return state
    norm_sq = full_overlap(state, state)
    if norm_sq.is_zero():
        raise VanishingRepresentationError("assembled state has zero norm")
    if norm_sq.is_rational():
        return state.scaled(ONE / sqrt_rational(norm_sq.as_rational()))
    # norm^2 with an irrational part cannot be square-rooted exactly
    approx = Fraction(1.0 / float(norm_sq) ** 0.5).limit_denominator(10**15)
    return state.scaled(rational(approx))


@dataclass(frozen=True)
class ReducedDensity:
    """Operator kernel over orbital assignments of the kept coordinates.

    terms maps (ket assignment, bra assignment) pairs to coefficients;
    coefficients are exact for single-branch traces and complex for
    C-weighted superpositions.
    """

    kept: tuple[int, ...]
    terms: tuple[tuple[tuple[tuple[str, ...], tuple[str, ...]], object], ...]

    @staticmethod
    def from_dict(kept: Sequence[int], d: Mapping) -> "ReducedDensity":
        cleaned = {}
        for key, val in d.items():
            if _coeff_is_zero(val):
                continue
            cleaned[key] = val
        return ReducedDensity(tuple(kept), tuple(sorted(cleaned.items())))

    def as_dict(self) -> dict:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_hermitian(self, tol: float = 0.0) -> bool:
        d = self.as_dict()
        for (ket, bra), coef in d.items():
            partner = d.get((bra, ket))
            if partner is None:
                return False
            diff = complex(coef) - complex(partner).conjugate()
            if abs(diff) > tol:
                return False
        return True

    def scaled(self, factor) -> "ReducedDensity":
        return ReducedDensity.from_dict(
            self.kept, {k: _coeff_mul(v, factor) for k, v in self.terms}
        )

    def __add__(self, other: "ReducedDensity") -> "ReducedDensity":
        if self.kept != other.kept:
            raise ValueError("coordinate mismatch")
        out = self.as_dict()
        for k, v in other.terms:
            out[k] = _coeff_add(out[k], v) if k in out else v
        return ReducedDensity.from_dict(self.kept, out)


def _coeff_is_zero(v) -> bool:
    if isinstance(v, SqrtRational):
        return v.is_zero()
    return v == 0


def _coeff_mul(a, b):
    if isinstance(a, SqrtRational) and isinstance(b, (int, Fraction, SqrtRational)):
        return a * b
    return complex(a) * complex(b)


def _coeff_add(a, b):
    if isinstance(a, SqrtRational) and isinstance(b, SqrtRational):
        return a + b
    return complex(a) + complex(b)


def spin_trace_pair(a: SpinPositionState, b: SpinPositionState) -> ReducedDensity:
    """Position kernel of Tr_spin |a><b|, exact coefficients."""
    if a.n != b.n:
        raise ValueError("particle-count mismatch")
    out: dict = {}
    for chi_a, phi_a in a.pairs:
        for chi_b, phi_b in b.pairs:
            weight = spin_overlap(chi_b, chi_a)
            if weight.is_zero():
                continue
            for ket, ca in phi_a.terms:
                for bra, cb in phi_b.terms:
                    key = (ket, bra)
                    add = weight * ca * cb.conjugate()
                    out[key] = out.get(key, ZERO) + add
    return ReducedDensity.from_dict(tuple(range(1, a.n + 1)), out)


@dataclass(frozen=True)
class Superposition:
    """C1 Psi1 + C2 Psi2 with matching statistics and particle count."""

    c1: complex
    psi1: SpinPositionState
    c2: complex
    psi2: SpinPositionState

    def __post_init__(self):
        if self.psi1.statistics != self.psi2.statistics:
            raise ValueError("statistics mismatch between branches")
        if self.psi1.n != self.psi2.n:
            raise ValueError("particle-count mismatch between branches")


def spin_trace(state: Superposition) -> ReducedDensity:
    """Full N-coordinate density |C1|^2 rho_11 + |C2|^2 rho_22 + cross terms."""
    c1, c2 = complex(state.c1), complex(state.c2)
    k11 = spin_trace_pair(state.psi1, state.psi1).scaled(abs(c1) ** 2)
    k22 = spin_trace_pair(state.psi2, state.psi2).scaled(abs(c2) ** 2)
    k12 = spin_trace_pair(state.psi1, state.psi2).scaled(c1 * c2.conjugate())
    k21 = spin_trace_pair(state.psi2, state.psi1).scaled(c2 * c1.conjugate())
    return k11 + k22 + k12 + k21


def marginalize(density: ReducedDensity, keep: Iterable[int]) -> ReducedDensity:
    """Trace out coordinates not in keep via orbital orthonormality."""
    keep = tuple(sorted(set(keep)))
    if not keep:
        raise ValueError("keep set must be non-empty")
    if not set(keep) <= set(density.kept):
        raise ValueError(f"keep {keep} not within kept coordinates {density.kept}")
    positions = [density.kept.index(c) for c in keep]
    traced = [i for i in range(len(density.kept)) if density.kept[i] not in keep]
    out: dict = {}
    for (ket, bra), coef in density.terms:
        if any(ket[i] != bra[i] for i in traced):
            continue
        key = (
            tuple(ket[i] for i in positions),
            tuple(bra[i] for i in positions),
        )
        out[key] = _coeff_add(out[key], coef) if key in out else coef
    return ReducedDensity.from_dict(keep, out)


def evaluate_density(
    density: ReducedDensity,
    orbital_evaluator: Callable | Mapping[str, Callable],
    points: Sequence,
):
    """Evaluate the kernel diagonal at one position per kept coordinate.

    orbital_evaluator resolves a label to phi(x, y); points is a sequence
    of (x, y) pairs (scalars or arrays) aligned with the kept coordinates.
    """
    if len(points) != len(density.kept):
        raise ValueError("one point per kept coordinate required")

    def resolve(label: str, x, y):
        if callable(orbital_evaluator):
            return orbital_evaluator(label, x, y)
        return orbital_evaluator[label](x, y)

    cache: dict[tuple[int, str], object] = {}

    def phi(idx: int, label: str):
        key = (idx, label)
        if key not in cache:
            x, y = points[idx]
            cache[key] = resolve(label, x, y)
        return cache[key]

    total = None
    for (ket, bra), coef in density.terms:
        value = complex(coef)
        for idx in range(len(density.kept)):
            value = value * phi(idx, ket[idx]) * phi(idx, bra[idx]).conjugate()
        total = value if total is None else total + value
    if total is None:
        return 0.0
    # Hermitian kernels evaluate to real diagonals; drop roundoff imaginary.
    arr = np.asarray(total)
    if np.iscomplexobj(arr):
        scale = float(np.max(np.abs(arr))) or 1.0
        if float(np.max(np.abs(arr.imag))) <= 1e-12 * scale:
            total = arr.real if arr.shape else float(arr.real)
    return total
