"""Symmetrized position families, assembled states, spin-traced kernels."""
from fractions import Fraction

import numpy as np
import pytest

from fewbody.exact import ONE, ZERO, rational, sqrt_rational
from fewbody.spin_algebra import DOWN, UP
from fewbody.symmetric_group import Permutation
from fewbody.wavefunction_algebra import (
    GENERIC_ASSIGNMENT,
    PositionWavefunction,
    SpinPositionState,
    Superposition,
    VanishingRepresentationError,
    assemble_state,
    build_position_family,
    evaluate_density,
    full_overlap,
    marginalize,
    position_inner_product,
    project_out_symmetric_sum,
    spin_trace,
    spin_trace_pair,
)

THIRD = rational(Fraction(1, 3))
SIXTH = rational(Fraction(1, 6))


def test_standard_member_expansion_kind_0() -> None:
    family = build_position_family(3, 0, ("I", "II", "III"))
    expected = {
        ("I", "II", "III"): ONE,
        ("III", "II", "I"): -ONE,
        ("II", "I", "III"): ONE,
        ("II", "III", "I"): -ONE,
    }
    assert family[2].as_dict() == expected


def test_standard_member_expansion_kind_1() -> None:
    family = build_position_family(3, 1, ("I", "II", "III"))
    expected = {
        ("I", "II", "III"): ONE,
        ("III", "II", "I"): ONE,
        ("II", "I", "III"): -ONE,
        ("II", "III", "I"): -ONE,
    }
    assert family[2].as_dict() == expected


@pytest.mark.parametrize("n", [3, 4])
@pytest.mark.parametrize("kind", [0, 1])
def test_family_members_sum_to_zero(n: int, kind: int) -> None:
    for assignment in (GENERIC_ASSIGNMENT[n], None):
        family = build_position_family(n, kind, assignment)
        total = family[0] + family[1] + family[2]
        assert total.is_zero()


@pytest.mark.parametrize("n", [3, 4])
@pytest.mark.parametrize("kind", [0, 1])
def test_symmetric_projection_is_noop_on_families(n: int, kind: int) -> None:
    family = build_position_family(n, kind)
    projected = project_out_symmetric_sum(family)
    for before, after in zip(family, projected):
        assert before.as_dict() == after.as_dict()


def test_symmetric_projection_rejects_unrelated_functions() -> None:
    a = PositionWavefunction.monomial(("a", "b", "c"))
    b = PositionWavefunction.monomial(("b", "a", "c"))
    with pytest.raises(ValueError):
        project_out_symmetric_sum([a, b, b])
    with pytest.raises(ValueError):
        project_out_symmetric_sum([a, b])


def test_fully_repeated_assignment_vanishes_for_kind_0() -> None:
    with pytest.raises(VanishingRepresentationError):
        build_position_family(3, 0, ("a", "a", "a"))
    # the role-swapped operator tolerates the repeat across its column
    family = build_position_family(3, 1, ("a", "a", "b"))
    assert not family[0].is_zero()


def test_position_inner_product_contracts_by_assignment() -> None:
    family = build_position_family(3, 0, ("I", "II", "III"))
    member = family[2]
    assert position_inner_product(member, member) == rational(4)
    shifted = member.permuted(Permutation((2, 3, 1)))
    assert position_inner_product(member, shifted) == -rational(2)


@pytest.mark.parametrize("statistics", ["fermion", "boson"])
@pytest.mark.parametrize("n", [3, 4])
def test_assembled_states_are_normalized_exactly(statistics: str, n: int) -> None:
    for coupling in ("low", "high"):
        for assignment in (GENERIC_ASSIGNMENT[n], None):
            state = assemble_state(n, coupling, statistics, assignment)
            assert full_overlap(state, state) == ONE


@pytest.mark.parametrize("statistics", ["fermion", "boson"])
@pytest.mark.parametrize("n", [3, 4])
def test_coupling_branches_are_orthogonal_for_distinct_orbitals(
    statistics: str, n: int
) -> None:
    ms = (UP, DOWN) if n == 3 else (UP,)
    for m in ms:
        psi1 = assemble_state(n, "low", statistics, GENERIC_ASSIGNMENT[n], m)
        psi2 = assemble_state(n, "high", statistics, GENERIC_ASSIGNMENT[n], m)
        assert full_overlap(psi1, psi2) == ZERO


@pytest.mark.parametrize(
    "n,statistics,expected",
    [
        (3, "fermion", -1),
        (3, "boson", 1),
        (4, "fermion", 1),
        (4, "boson", -1),
    ],
)
def test_doubly_occupied_assignment_collapses_both_branches(
    n: int, statistics: str, expected: int
) -> None:
    """One multiplet survives the repeated-orbital filling: Psi2 = ±Psi1."""
    psi1 = assemble_state(n, "low", statistics)
    psi2 = assemble_state(n, "high", statistics)
    assert full_overlap(psi1, psi2) == rational(expected)


def _permuted_state(state: SpinPositionState, p: Permutation) -> SpinPositionState:
    from fewbody.spin_algebra import SpinState

    pairs = []
    for chi, phi in state.pairs:
        moved = SpinState.from_dict(
            state.n,
            {p.apply_to_assignment(k): v for k, v in chi.as_dict().items()},
        )
        pairs.append((moved, phi.permuted(p)))
    return SpinPositionState(state.n, state.statistics, tuple(pairs))


@pytest.mark.parametrize("statistics,sign", [("fermion", -1), ("boson", 1)])
@pytest.mark.parametrize("n", [3, 4])
def test_simultaneous_transposition_statistics(
    statistics: str, sign: int, n: int
) -> None:
    for coupling in ("low", "high"):
        state = assemble_state(n, coupling, statistics, GENERIC_ASSIGNMENT[n])
        for a in range(1, n + 1):
            for b in range(a + 1, n + 1):
                swapped = _permuted_state(state, Permutation.transposition(n, a, b))
                # unit norm plus overlap ±1 pins swapped = ±state exactly
                assert full_overlap(swapped, swapped) == ONE
                assert full_overlap(swapped, state) == rational(sign)


def test_pair_marginal_three_particles() -> None:
    state = assemble_state(3, "low", "fermion")
    kernel = marginalize(spin_trace_pair(state, state), (1, 2))
    expected = {
        (("g", "g"), ("g", "g")): THIRD,
        (("g", "e"), ("g", "e")): THIRD,
        (("e", "g"), ("e", "g")): THIRD,
        (("g", "e"), ("e", "g")): -SIXTH,
        (("e", "g"), ("g", "e")): -SIXTH,
    }
    assert kernel.as_dict() == expected
    assert kernel.is_hermitian()


def test_pair_marginal_four_particles() -> None:
    state = assemble_state(4, "low", "fermion")
    kernel = marginalize(spin_trace_pair(state, state), (1, 2))
    expected = {
        (("g", "g"), ("g", "g")): SIXTH,
        (("e", "e"), ("e", "e")): SIXTH,
        (("g", "e"), ("g", "e")): THIRD,
        (("e", "g"), ("e", "g")): THIRD,
        (("g", "e"), ("e", "g")): -SIXTH,
        (("e", "g"), ("g", "e")): -SIXTH,
    }
    assert kernel.as_dict() == expected


@pytest.mark.parametrize("n,weights", [(3, (2, 1)), (4, (2, 2))])
def test_single_marginal_occupancies(n: int, weights: tuple[int, int]) -> None:
    state = assemble_state(n, "low", "fermion")
    single = marginalize(spin_trace_pair(state, state), (1,))
    wg, we = (Fraction(w, n) for w in weights)
    assert single.as_dict() == {
        (("g",), ("g",)): rational(wg),
        (("e",), ("e",)): rational(we),
    }


@pytest.mark.parametrize("n", [3, 4])
def test_pair_marginal_same_for_both_branches_and_statistics(n: int) -> None:
    reference = None
    for statistics in ("fermion", "boson"):
        for coupling in ("low", "high"):
            state = assemble_state(n, coupling, statistics)
            kernel = marginalize(spin_trace_pair(state, state), (1, 2))
            if reference is None:
                reference = kernel.as_dict()
            else:
                assert kernel.as_dict() == reference


def test_cross_kernel_nonempty_for_repeated_orbitals() -> None:
    """The branch-collapse makes the cross kernel a multiple of the direct one."""
    psi1 = assemble_state(3, "low", "fermion")
    psi2 = assemble_state(3, "high", "fermion")
    cross = spin_trace_pair(psi1, psi2)
    direct = spin_trace_pair(psi1, psi1)
    assert not cross.is_zero()
    assert cross.as_dict() == direct.scaled(-1).as_dict()


def test_marginalize_validation() -> None:
    state = assemble_state(3, "low", "fermion")
    kernel = spin_trace_pair(state, state)
    with pytest.raises(ValueError):
        marginalize(kernel, ())
    with pytest.raises(ValueError):
        marginalize(kernel, (1, 5))


def test_evaluate_density_with_constant_orbitals() -> None:
    state = assemble_state(3, "low", "fermion")
    kernel = marginalize(spin_trace_pair(state, state), (1, 2))
    evaluator = {"g": lambda x, y: 1.0, "e": lambda x, y: 2.0}
    value = evaluate_density(kernel, evaluator, [(0.0, 0.0), (0.0, 0.0)])
    # 1/3*g^4 + (1/3 + 1/3 - 1/3)*g^2 e^2 with g=1, e=2
    assert value == pytest.approx(5.0 / 3.0, abs=1e-15)


def test_evaluate_density_drops_roundoff_imaginary_part() -> None:
    psi1 = assemble_state(3, "low", "fermion")
    kernel = spin_trace(Superposition(0.6 + 0.8j, psi1, 0.8 - 0.6j, psi1))
    evaluator = {"g": lambda x, y: np.exp(-(x * x + y * y)), "e": lambda x, y: x}
    grid = np.linspace(-1.0, 1.0, 8)
    xs, ys = np.meshgrid(grid, grid, indexing="ij")
    values = evaluate_density(kernel, evaluator, [(xs, ys), (xs, ys), (xs, ys)])
    assert not np.iscomplexobj(values)
    assert np.all(values >= -1e-12)


def test_spin_trace_is_bilinear_in_the_branches() -> None:
    c1, c2 = 0.3 + 0.4j, -0.5 + 0.2j
    psi1 = assemble_state(3, "low", "boson", GENERIC_ASSIGNMENT[3])
    psi2 = assemble_state(3, "high", "boson", GENERIC_ASSIGNMENT[3])
    combined = spin_trace(Superposition(c1, psi1, c2, psi2)).as_dict()
    manual: dict = {}
    for coeff, bra_ket in (
        (abs(c1) ** 2, (psi1, psi1)),
        (abs(c2) ** 2, (psi2, psi2)),
        (c1 * np.conj(c2), (psi1, psi2)),
        (c2 * np.conj(c1), (psi2, psi1)),
    ):
        for key, val in spin_trace_pair(*bra_ket).as_dict().items():
            manual[key] = manual.get(key, 0j) + complex(coeff) * complex(val)
    manual = {k: v for k, v in manual.items() if abs(v) > 0}
    assert set(combined) == set(manual)
    for key, val in combined.items():
        assert complex(val) == pytest.approx(manual[key], abs=1e-15)


def test_superposition_statistics_mismatch_rejected() -> None:
    psi_f = assemble_state(3, "low", "fermion")
    psi_b = assemble_state(3, "low", "boson")
    with pytest.raises(ValueError):
        Superposition(1.0, psi_f, 1.0, psi_b)
