"""Permutations of S2..S4 and Young symmetrizers for small partitions.

Particle coordinates are numbered 1..n throughout.  A permutation acts on
a coordinate assignment by relabeling: coordinate c of the input becomes
coordinate sigma(c) of the output.

A Young symmetrizer is a signed formal sum of permutations built from the
row and column groups of a standard tableau.  Two operator orders are
supported, and a `conjugate` flag swaps the symmetrizing role of rows and
columns (columns symmetrized, rows antisymmetrized) while keeping the
same tableau.  The defaults are pinned term-for-term against the printed
four-term and sixteen-term expansions in the test suite.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations as _iter_permutations
from typing import Iterable, Sequence


@dataclass(frozen=True)
class Permutation:
    """Bijection of {1..n}; image[i-1] = sigma(i)."""

    image: tuple[int, ...]

    def __post_init__(self):
        n = len(self.image)
        if sorted(self.image) != list(range(1, n + 1)):
            raise ValueError(f"not a bijection of 1..{n}: {self.image}")

    @property
    def n(self) -> int:
        return len(self.image)

    def __call__(self, c: int) -> int:
        return self.image[c - 1]

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other: (self.compose(other))(c) = self(other(c))."""
        if self.n != other.n:
            raise ValueError("size mismatch")
        return Permutation(tuple(self(other(c)) for c in range(1, self.n + 1)))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for c in range(1, self.n + 1):
            inv[self(c) - 1] = c
        return Permutation(tuple(inv))

    def sign(self) -> int:
        seen = [False] * self.n
        sign = 1
        for start in range(1, self.n + 1):
            if seen[start - 1]:
                continue
            length = 0
            c = start
            while not seen[c - 1]:
                seen[c - 1] = True
                c = self(c)
                length += 1
            if length % 2 == 0:
                sign = -sign
        return sign

    def apply_to_assignment(self, values: Sequence) -> tuple:
        """Relabel coordinates: output[sigma(c)] = input[c]."""
        if len(values) != self.n:
            raise ValueError("assignment length mismatch")
        out = [None] * self.n
        for c in range(1, self.n + 1):
            out[self(c) - 1] = values[c - 1]
        return tuple(out)

    @staticmethod
    def identity(n: int) -> "Permutation":
        return Permutation(tuple(range(1, n + 1)))

    @staticmethod
    def transposition(n: int, a: int, b: int) -> "Permutation":
        image = list(range(1, n + 1))
        image[a - 1], image[b - 1] = b, a
        return Permutation(tuple(image))

    @staticmethod
    def from_mapping(n: int, mapping: dict[int, int]) -> "Permutation":
        """Permutation sending src -> dst for mapping entries, fixing the rest."""
        image = list(range(1, n + 1))
        for src, dst in mapping.items():
            image[src - 1] = dst
        return Permutation(tuple(image))


def all_permutations(n: int) -> list[Permutation]:
    """All n! permutations of 1..n for n in {2, 3, 4}."""
    if n not in (2, 3, 4):
        raise ValueError(f"n = {n} outside supported range 2..4")
    return [Permutation(img) for img in _iter_permutations(range(1, n + 1))]


@dataclass(frozen=True)
class YoungDiagram:
    """Partition of n as a non-increasing tuple of positive row lengths."""

    partition: tuple[int, ...]

    def __post_init__(self):
        p = self.partition
        if not p or any(x <= 0 for x in p) or any(p[i] < p[i + 1] for i in range(len(p) - 1)):
            raise ValueError(f"invalid partition {p}")

    @property
    def size(self) -> int:
        return sum(self.partition)

    def transpose(self) -> "YoungDiagram":
        cols = tuple(
            sum(1 for row_len in self.partition if row_len > c)
            for c in range(self.partition[0])
        )
        return YoungDiagram(cols)


def _is_standard(diagram: YoungDiagram, rows: tuple[tuple[int, ...], ...]) -> bool:
    if tuple(len(r) for r in rows) != diagram.partition:
        return False
    entries = [x for row in rows for x in row]
    if sorted(entries) != list(range(1, diagram.size + 1)):
        return False
    for row in rows:
        if any(row[i] >= row[i + 1] for i in range(len(row) - 1)):
            return False
    for c in range(diagram.partition[0]):
        col = [row[c] for row in rows if len(row) > c]
        if any(col[i] >= col[i + 1] for i in range(len(col) - 1)):
            return False
    return True


def _group_over_blocks(n: int, blocks: list[tuple[int, ...]]) -> list[Permutation]:
    """All permutations fixing each block setwise (product of block S_k's)."""
    members = [Permutation.identity(n)]
    for block in blocks:
        extended = []
        for images in _iter_permutations(block):
            mapping = dict(zip(block, images))
            block_perm = Permutation.from_mapping(n, mapping)
            extended.extend(p.compose(block_perm) for p in members)
        members = extended
    return members


@dataclass(frozen=True)
class Symmetrizer:
    """Signed formal sum of permutations."""

    terms: tuple[tuple[Permutation, int], ...]

    def __len__(self) -> int:
        return len(self.terms)


def build_symmetrizer(
    diagram: YoungDiagram,
    tableau: Sequence[Sequence[int]],
    order: str = "columns_then_rows",
    conjugate: bool = False,
) -> Symmetrizer:
    """Young symmetrizer of a standard tableau.

    order selects which operator family acts first on the wavefunction:
    "columns_then_rows" applies the column operators first, then the row
    operators; "rows_then_columns" is the transposed order.  With
    conjugate=False rows are symmetrized and columns antisymmetrized;
    conjugate=True swaps those roles on the same tableau.
    """
    rows = tuple(tuple(r) for r in tableau)
    if not _is_standard(diagram, rows):
        raise ValueError(f"tableau {rows} not standard for partition {diagram.partition}")
    n = diagram.size
    cols = [
        tuple(row[c] for row in rows if len(row) > c)
        for c in range(diagram.partition[0])
    ]
    row_group = _group_over_blocks(n, list(rows))
    col_group = _group_over_blocks(n, cols)
    if conjugate:
        symmetrized, antisymmetrized = col_group, row_group
    else:
        symmetrized, antisymmetrized = row_group, col_group
    sym_terms = [(p, 1) for p in symmetrized]
    anti_terms = [(p, p.sign()) for p in antisymmetrized]
    if conjugate:
        col_terms, row_terms = sym_terms, anti_terms
    else:
        col_terms, row_terms = anti_terms, sym_terms
    if order == "columns_then_rows":
        first, second = col_terms, row_terms
    elif order == "rows_then_columns":
        first, second = row_terms, col_terms
    else:
        raise ValueError(f"unknown order {order!r}")
    terms = tuple(
        (p2.compose(p1), s1 * s2) for (p1, s1) in first for (p2, s2) in second
    )
    return Symmetrizer(terms)


def apply_symmetrizer(sym: Symmetrizer, wf):
    """Apply a symmetrizer to any object with permuted() and scaled().

    Returns sum over terms sign * wf.permuted(p); duck-typed so position
    wavefunctions stay defined in their own module.
    """
    total = None
    for perm, sign in sym.terms:
        piece = wf.permuted(perm).scaled(sign)
        total = piece if total is None else total + piece
    return total
