"""Sparse second-quantized states and site-mixing mode transforms.

Modes carry a site index (1 or 2) and an internal label (polarization,
hyperfine state, clock state).  States are sparse maps from occupation
configurations to complex amplitudes, under either exchange statistics.
A mode transform mixes the two sites coherently and acts identically on
every internal label; states are pushed through it by rewriting them as
creation-operator polynomials on the vacuum, substituting each creator,
and re-expanding with statistics-correct signs and factors.

The mode order is frozen (site-major, label-minor) so fermionic signs
are reproducible; it is a property of the engine, not a configuration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

BOSON = "boson"
FERMION = "fermion"

_PRUNE = 1e-13


@dataclass(frozen=True, order=True)
class Mode:
    """One single-particle channel: spatial site plus internal label."""

    site: int
    spin: str

    def __post_init__(self) -> None:
        if self.site not in (1, 2):
            raise ValueError("site must be 1 or 2")


def _check_statistics(statistics: str) -> str:
    if statistics not in (BOSON, FERMION):
        raise ValueError(f"unknown statistics {statistics!r}")
    return statistics


@dataclass(frozen=True)
class OccupationState:
    """Occupancy per mode, kept sorted in the fixed mode order."""

    statistics: str
    occupancy: tuple[tuple[Mode, int], ...]

    def __post_init__(self) -> None:
        _check_statistics(self.statistics)
        for mode, n in self.occupancy:
            if n <= 0:
                raise ValueError("stored occupancies must be positive")
            if self.statistics == FERMION and n > 1:
                raise ValueError("fermionic occupancy exceeds 1")

    @staticmethod
    def from_counts(statistics: str, counts: Mapping[Mode, int]) -> "OccupationState":
        items = tuple(sorted((m, n) for m, n in counts.items() if n != 0))
        return OccupationState(statistics, items)

    def counts(self) -> dict[Mode, int]:
        return dict(self.occupancy)

    def total(self) -> int:
        return sum(n for _, n in self.occupancy)

    def occupancy_before(self, mode: Mode) -> int:
        """Sum of occupancies over modes strictly preceding `mode`."""
        return sum(n for m, n in self.occupancy if m < mode)


def vacuum(statistics: str) -> OccupationState:
    return OccupationState(_check_statistics(statistics), ())


@dataclass(frozen=True)
class StateVector:
    """Sparse complex superposition over occupation configurations."""

    statistics: str
    terms: tuple[tuple[OccupationState, complex], ...]

    @staticmethod
    def from_dict(
        statistics: str, amplitudes: Mapping[OccupationState, complex]
    ) -> "StateVector":
        _check_statistics(statistics)
        kept = []
        for occ, amp in amplitudes.items():
            if occ.statistics != statistics:
                raise ValueError("term statistics disagrees with the state")
            if abs(amp) > _PRUNE:
                kept.append((occ, complex(amp)))
        kept.sort(key=lambda item: item[0].occupancy)
        return StateVector(statistics, tuple(kept))

    @staticmethod
    def zero(statistics: str) -> "StateVector":
        return StateVector(_check_statistics(statistics), ())

    def as_dict(self) -> dict[OccupationState, complex]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def amplitude(self, occ: OccupationState) -> complex:
        for stored, amp in self.terms:
            if stored == occ:
                return amp
        return 0j

    def scaled(self, factor: complex) -> "StateVector":
        return StateVector.from_dict(
            self.statistics, {occ: amp * factor for occ, amp in self.terms}
        )

    def __add__(self, other: "StateVector") -> "StateVector":
        if other.statistics != self.statistics:
            raise ValueError("statistics mismatch")
        out = dict(self.terms)
        for occ, amp in other.terms:
            out[occ] = out.get(occ, 0j) + amp
        return StateVector.from_dict(self.statistics, out)

    def __sub__(self, other: "StateVector") -> "StateVector":
        return self + other.scaled(-1.0)

    def norm(self) -> float:
        return math.sqrt(sum(abs(amp) ** 2 for _, amp in self.terms))

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return self.scaled(1.0 / n)


def basis_state(statistics: str, modes: Sequence[Mode], amplitude: complex = 1.0) -> StateVector:
    """Creation operators for `modes` applied left-to-right notation-wise.

    The rightmost listed mode acts on the vacuum first, so the result is
    a†(modes[0]) ... a†(modes[-1]) |0⟩ scaled by `amplitude`.
    """
    state = StateVector.from_dict(statistics, {vacuum(statistics): amplitude})
    for mode in reversed(modes):
        state = create(state, mode)
    return state


def create(state: StateVector, mode: Mode) -> StateVector:
    """Apply a creation operator; fermionic double occupation vanishes."""
    out: dict[OccupationState, complex] = {}
    for occ, amp in state.terms:
        counts = occ.counts()
        n = counts.get(mode, 0)
        if state.statistics == FERMION:
            if n == 1:
                continue
            factor = -1.0 if occ.occupancy_before(mode) % 2 else 1.0
        else:
            factor = math.sqrt(n + 1)
        counts[mode] = n + 1
        new_occ = OccupationState.from_counts(state.statistics, counts)
        out[new_occ] = out.get(new_occ, 0j) + amp * factor
    return StateVector.from_dict(state.statistics, out)


def annihilate(state: StateVector, mode: Mode) -> StateVector:
    """Adjoint of create; annihilating an empty mode gives the zero vector."""
    out: dict[OccupationState, complex] = {}
    for occ, amp in state.terms:
        counts = occ.counts()
        n = counts.get(mode, 0)
        if n == 0:
            continue
        if state.statistics == FERMION:
            factor = -1.0 if occ.occupancy_before(mode) % 2 else 1.0
        else:
            factor = math.sqrt(n)
        counts[mode] = n - 1
        new_occ = OccupationState.from_counts(state.statistics, counts)
        out[new_occ] = out.get(new_occ, 0j) + amp * factor
    return StateVector.from_dict(state.statistics, out)


@dataclass(frozen=True)
class ModeTransform:
    """Coherent site mixing, identical on every internal label.

    `site_block[i][j]` is the coefficient of the output creator at site
    i+1 in the image of the input creator at site j+1.
    """

    site_block: tuple[tuple[complex, complex], tuple[complex, complex]]

    def __post_init__(self) -> None:
        u = self.matrix()
        if not np.allclose(u @ u.conj().T, np.eye(2), atol=1e-12):
            raise ValueError("site block is not unitary")

    @staticmethod
    def from_matrix(matrix) -> "ModeTransform":
        arr = np.asarray(matrix, dtype=complex)
        if arr.shape != (2, 2):
            raise ValueError("site block must be 2x2")
        return ModeTransform(
            ((complex(arr[0, 0]), complex(arr[0, 1])),
             (complex(arr[1, 0]), complex(arr[1, 1]))),
        )

    def matrix(self) -> np.ndarray:
        return np.array(self.site_block, dtype=complex)

    def image(self, mode: Mode) -> tuple[tuple[Mode, complex], ...]:
        """Linear combination replacing the creator for `mode`."""
        col = mode.site - 1
        return (
            (Mode(1, mode.spin), self.site_block[0][col]),
            (Mode(2, mode.spin), self.site_block[1][col]),
        )

    def compose(self, other: "ModeTransform") -> "ModeTransform":
        """The transform equivalent to applying `other` first, then self."""
        return ModeTransform.from_matrix(self.matrix() @ other.matrix())


OPTICAL = "optical"
ATOMIC = "atomic"


def beamsplitter(theta: float = math.pi / 4, convention: str = OPTICAL) -> ModeTransform:
    """Two-site mixer in either convention.

    optical: real symmetric block [[cos θ, sin θ], [sin θ, −cos θ]], the
    balanced 50/50 splitter at θ=π/4.
    atomic: [[cos θ, −i sin θ], [−i sin θ, cos θ]], the Rabi-type mixer
    accumulated by a detuning sweep.
    """
    c, s = math.cos(theta), math.sin(theta)
    if convention == OPTICAL:
        return ModeTransform.from_matrix([[c, s], [s, -c]])
    if convention == ATOMIC:
        return ModeTransform.from_matrix([[c, -1j * s], [-1j * s, c]])
    raise ValueError(f"unknown beamsplitter convention {convention!r}")


def apply_mode_transform(state: StateVector, transform: ModeTransform) -> StateVector:
    """Push a state through a mode transform.

    Each occupation configuration is read as its canonical creation
    polynomial a†(m1)^n1 ... a†(mk)^nk |0⟩ / √(n1! ... nk!) with modes in
    the fixed order; every creator is replaced by its image and the
    product is re-expanded onto the vacuum right-to-left.  The vacuum
    itself is left unchanged (its phase is fixed to zero).
    """
    total = StateVector.zero(state.statistics)
    for occ, amp in state.terms:
        norm = 1.0
        for _, n in occ.occupancy:
            norm *= math.factorial(n)
        current = StateVector.from_dict(
            state.statistics, {vacuum(state.statistics): amp / math.sqrt(norm)}
        )
        for mode, n in reversed(occ.occupancy):
            images = transform.image(mode)
            for _ in range(n):
                pieces = StateVector.zero(state.statistics)
                for out_mode, coeff in images:
                    if abs(coeff) <= _PRUNE:
                        continue
                    pieces = pieces + create(current, out_mode).scaled(coeff)
                current = pieces
        total = total + current
    return total


def accumulated_phase(detuning_trajectory: Sequence[tuple[float, float]]) -> float:
    """Dynamical mixing angle θ = −∫Δ dt from sampled (time, Δ) pairs."""
    samples = list(detuning_trajectory)
    if len(samples) < 2:
        raise ValueError("need at least two samples")
    times = np.array([t for t, _ in samples], dtype=float)
    values = np.array([d for _, d in samples], dtype=float)
    if not np.all(np.diff(times) > 0):
        raise ValueError("times must be strictly increasing")
    trapezoid = getattr(np, "trapezoid", None) or np.trapz
    return -float(trapezoid(values, times))


def inner_product(a: StateVector, b: StateVector) -> complex:
    """⟨a|b⟩ with the occupation basis orthonormal."""
    if a.statistics != b.statistics:
        raise ValueError("statistics mismatch")
    amplitudes = dict(b.terms)
    return sum(
        (amp.conjugate() * amplitudes[occ] for occ, amp in a.terms if occ in amplitudes),
        start=0j,
    )
