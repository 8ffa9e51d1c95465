"""Gaussian site orbitals and MO-LCAO molecular orbitals.

Sites host 2D isotropic Gaussian ground states of harmonic microtraps;
all lengths are measured in units of the single-trap position
uncertainty.  Molecular orbitals are point-group adapted linear
combinations over an isosceles-triangle or rectangular site layout,
orthonormal under the overlap metric.

Corner letters of the rectangle run A, B, C, D clockwise from the
top-left corner, so A-B and D-C are the horizontal (length a) edges.
The sign patterns then make phi_e odd across the vertical symmetry
axis and phi_e' odd across the horizontal one, which keeps one density
peak per site in the one-particle maps of the tabulated geometries.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

GRAM_TOLERANCE = 1e-10


@dataclass(frozen=True)
class SiteOrbital:
    """Normalized harmonic-oscillator ground state at a trap site."""

    center: tuple[float, float]
    width: float = 1.0

    def __post_init__(self) -> None:
        if self.width <= 0:
            raise ValueError("width must be positive")

    def evaluate(self, x, y):
        cx, cy = self.center
        r2 = (np.asarray(x, dtype=float) - cx) ** 2 + (np.asarray(y, dtype=float) - cy) ** 2
        return np.exp(-r2 / (2.0 * self.width**2)) / (self.width * math.sqrt(math.pi))

    def gradient(self, x, y):
        cx, cy = self.center
        phi = self.evaluate(x, y)
        gx = -(np.asarray(x, dtype=float) - cx) / self.width**2 * phi
        gy = -(np.asarray(y, dtype=float) - cy) / self.width**2 * phi
        return gx, gy


def overlap(site_a: SiteOrbital, site_b: SiteOrbital) -> float:
    """Closed-form overlap of two equal-width Gaussian site orbitals."""
    if site_a.width != site_b.width:
        raise ValueError("overlap assumes identical trap widths")
    dx = site_a.center[0] - site_b.center[0]
    dy = site_a.center[1] - site_b.center[1]
    d2 = dx * dx + dy * dy
    return math.exp(-d2 / (4.0 * site_a.width**2))


TRIANGLE = "triangle"
RECTANGLE = "rectangle"


@dataclass(frozen=True)
class Geometry:
    """Named site layout; sites keep their letter labels."""

    kind: str
    dimensions: tuple[float, ...]
    sites: tuple[tuple[str, SiteOrbital], ...]

    @staticmethod
    def triangle(a: float, h: float, width: float = 1.0) -> "Geometry":
        """Isosceles triangle: apex A above the B-C base."""
        if a <= 0 or h <= 0:
            raise ValueError("triangle dimensions must be positive")
        sites = (
            ("A", SiteOrbital((0.0, h), width)),
            ("B", SiteOrbital((-a / 2.0, 0.0), width)),
            ("C", SiteOrbital((a / 2.0, 0.0), width)),
        )
        return Geometry(TRIANGLE, (a, h), sites)

    @staticmethod
    def rectangle(a: float, b: float, width: float = 1.0) -> "Geometry":
        """Rectangle of horizontal extent a and vertical extent b."""
        if a <= 0 or b <= 0:
            raise ValueError("rectangle dimensions must be positive")
        sites = (
            ("A", SiteOrbital((-a / 2.0, b / 2.0), width)),
            ("B", SiteOrbital((a / 2.0, b / 2.0), width)),
            ("C", SiteOrbital((a / 2.0, -b / 2.0), width)),
            ("D", SiteOrbital((-a / 2.0, -b / 2.0), width)),
        )
        return Geometry(RECTANGLE, (a, b), sites)

    def site(self, label: str) -> SiteOrbital:
        for name, orbital in self.sites:
            if name == label:
                return orbital
        raise KeyError(label)

    def overlap_matrix(self) -> np.ndarray:
        orbs = [orbital for _, orbital in self.sites]
        n = len(orbs)
        s = np.empty((n, n))
        for i in range(n):
            for j in range(n):
                s[i, j] = overlap(orbs[i], orbs[j])
        return s


@dataclass(frozen=True)
class MolecularOrbital:
    """Site-orbital combination, unit norm under the overlap metric."""

    label: str
    geometry: Geometry
    coefficients: tuple[complex, ...]

    @staticmethod
    def normalized(
        label: str, geometry: Geometry, coefficients: Sequence[complex]
    ) -> "MolecularOrbital":
        coeffs = np.asarray(coefficients, dtype=complex)
        s = geometry.overlap_matrix()
        norm2 = float(np.real(coeffs.conj() @ s @ coeffs))
        if norm2 <= 0:
            raise ValueError("coefficients have no norm under the overlap metric")
        coeffs = coeffs / math.sqrt(norm2)
        if np.allclose(coeffs.imag, 0.0):
            coeffs = coeffs.real.astype(complex)
        return MolecularOrbital(label, geometry, tuple(complex(c) for c in coeffs))

    def is_real(self) -> bool:
        return all(abs(c.imag) == 0.0 for c in self.coefficients)

    def metric_norm(self) -> float:
        coeffs = np.asarray(self.coefficients)
        s = self.geometry.overlap_matrix()
        return math.sqrt(float(np.real(coeffs.conj() @ s @ coeffs)))

    def evaluate(self, x, y):
        total = None
        for coeff, (_, site) in zip(self.coefficients, self.geometry.sites):
            term = coeff * site.evaluate(x, y)
            total = term if total is None else total + term
        if self.is_real():
            return np.real(total) if isinstance(total, np.ndarray) else total.real
        return total

    def gradient(self, x, y):
        gx_total = None
        gy_total = None
        for coeff, (_, site) in zip(self.coefficients, self.geometry.sites):
            gx, gy = site.gradient(x, y)
            gx_total = coeff * gx if gx_total is None else gx_total + coeff * gx
            gy_total = coeff * gy if gy_total is None else gy_total + coeff * gy
        if self.is_real():
            return np.real(gx_total), np.real(gy_total)
        return gx_total, gy_total


def evaluate(mo: MolecularOrbital, point) -> complex:
    x, y = point
    return mo.evaluate(x, y)


def gradient(mo: MolecularOrbital, point):
    x, y = point
    return mo.gradient(x, y)


def mo_gram(mos: Mapping[str, MolecularOrbital]) -> np.ndarray:
    """Overlap-metric Gram matrix of a molecular-orbital set."""
    items = list(mos.values())
    geometry = items[0].geometry
    s = geometry.overlap_matrix()
    c = np.array([mo.coefficients for mo in items], dtype=complex)
    return np.real_if_close(c.conj() @ s @ c.T)


def _orthonormalized_if_needed(
    mos: dict[str, MolecularOrbital]
) -> dict[str, MolecularOrbital]:
    """Fallback Loewdin orthonormalization, reported when it activates.

    The coefficient choices are expected to make the set orthonormal on
    their own; this guard only corrects (audibly) if they did not.
    """
    gram = mo_gram(mos)
    if np.max(np.abs(gram - np.eye(len(mos)))) <= GRAM_TOLERANCE:
        return mos
    warnings.warn(
        "molecular-orbital set failed the orthonormality check; "
        "applying symmetric orthonormalization",
        stacklevel=3,
    )
    labels = list(mos)
    geometry = mos[labels[0]].geometry
    c = np.array([mos[label].coefficients for label in labels], dtype=complex)
    vals, vecs = np.linalg.eigh(gram)
    inv_sqrt = vecs @ np.diag(vals**-0.5) @ vecs.conj().T
    fixed = inv_sqrt @ c
    return {
        label: MolecularOrbital.normalized(label, geometry, fixed[i])
        for i, label in enumerate(labels)
    }


def triangle_mos(a: float, h: float, width: float = 1.0) -> dict[str, MolecularOrbital]:
    """Ground and two excited orbitals of the isosceles triangle.

    phi_g is the all-plus combination; phi_e weights the apex against
    the base (its mixing factor enforces orthogonality to phi_g) and is
    normalized numerically; phi_e' is the odd base combination.
    """
    geometry = Geometry.triangle(a, h, width)
    s_ab = overlap(geometry.site("A"), geometry.site("B"))
    s_ac = overlap(geometry.site("A"), geometry.site("C"))
    s_bc = overlap(geometry.site("B"), geometry.site("C"))
    q = 1.0 / math.sqrt(3.0 + 2.0 * s_ab + 2.0 * s_bc + 2.0 * s_ac)
    p = 1.0 / math.sqrt(2.0 * (1.0 - s_bc))
    f = (2.0 * (1.0 + s_bc) + s_ab + s_ac) / (1.0 + s_ab + s_ac)
    mos = {
        "g": MolecularOrbital("g", geometry, (q, q, q)),
        "e": MolecularOrbital.normalized("e", geometry, (q * f, -q, -q)),
        "e'": MolecularOrbital("e'", geometry, (0.0, p, -p)),
    }
    return _orthonormalized_if_needed(mos)


_RECTANGLE_PATTERNS = {
    "g": (1.0, 1.0, 1.0, 1.0),
    "e": (1.0, -1.0, -1.0, 1.0),
    "e'": (-1.0, -1.0, 1.0, 1.0),
    "e''": (-1.0, 1.0, -1.0, 1.0),
}


def rectangle_mos(a: float, b: float, width: float = 1.0) -> dict[str, MolecularOrbital]:
    """Four parity-pattern orbitals of the rectangle.

    Each pattern realizes one character row of the planar reflections:
    phi_g is even in both axes, phi_e odd across x=0, phi_e' odd across
    y=0, phi_e'' odd across both.
    """
    geometry = Geometry.rectangle(a, b, width)
    mos = {
        label: MolecularOrbital.normalized(label, geometry, pattern)
        for label, pattern in _RECTANGLE_PATTERNS.items()
    }
    return _orthonormalized_if_needed(mos)


def degenerate_superpositions(
    phi_e: MolecularOrbital, phi_ep: MolecularOrbital
) -> dict[str, MolecularOrbital]:
    """Real and circulating recombinations of the square's degenerate pair."""
    geometry = phi_e.geometry
    if geometry.kind != RECTANGLE or phi_ep.geometry != geometry:
        raise ValueError("superpositions require one rectangle's orbital pair")
    a, b = geometry.dimensions
    if not math.isclose(a, b, rel_tol=0.0, abs_tol=1e-12):
        raise ValueError("degeneracy requires a square layout")
    ce = np.asarray(phi_e.coefficients)
    cp = np.asarray(phi_ep.coefficients)
    rt2 = math.sqrt(0.5)
    combos = {
        "e+e'": rt2 * (ce + cp),
        "e-e'": rt2 * (ce - cp),
        "e+ie'": rt2 * (ce + 1j * cp),
        "e-ie'": rt2 * (ce - 1j * cp),
    }
    return {
        label: MolecularOrbital.normalized(label, geometry, coeffs)
        for label, coeffs in combos.items()
    }
