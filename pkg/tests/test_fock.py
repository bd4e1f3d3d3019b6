import itertools
from functools import reduce

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import parities, random_state, seeds
from fermi_ent.fock import (
    EVEN,
    MIXED,
    ODD,
    FockError,
    FockState,
    MixedState,
    annihilation_matrix,
    apply_annihilation,
    apply_creation,
    conditional_components,
    creation_matrix,
    expectation,
    number_parity,
    occupation_probability,
    operator_word,
    sector_indices,
)


def jordan_wigner(n, j):
    """``c_j`` as a Kronecker product, independent of the bit-twiddling kernel.

    Tensor factor ``k`` (slowest first) is mode ``n - k`` so that the flat
    index equals the bitmask with bit ``k`` = mode ``k + 1``.
    """
    lower = np.array([[0, 1], [0, 0]], dtype=complex)  # |1> -> |0>
    z = np.diag([1.0, -1.0])
    eye = np.eye(2)
    factors = []
    for mode in range(n, 0, -1):
        factors.append(z if mode < j else lower if mode == j else eye)
    return reduce(np.kron, factors)


# --------------------------------------------------------------------------
# ladder operators
# --------------------------------------------------------------------------

def test_creation_on_vacuum():
    s = apply_creation(FockState.vacuum(3), 1)
    assert s.allclose(FockState(3, np.eye(8)[1]))


def test_pauli_exclusion():
    s = apply_creation(FockState.basis(3, [1]), 1)
    assert s.norm == 0


def test_creation_antisymmetry():
    a = FockState.basis(3, [1, 2])
    b = FockState.basis(3, [2, 1])
    assert a.allclose(-b)


def test_annihilation_examples():
    assert apply_annihilation(FockState.vacuum(2), 1).norm == 0
    back = apply_annihilation(apply_creation(FockState.vacuum(2), 1), 1)
    assert back.allclose(FockState.vacuum(2))


def test_sign_convention_by_hand():
    # c_2 c†_1 c†_2 |0> = -c†_1 c_2 c†_2 |0> = -c†_1 |0>
    s = apply_annihilation(FockState.basis(3, [1, 2]), 2)
    assert s.allclose(-FockState.basis(3, [1]))


@pytest.mark.parametrize("n", range(1, 7))
def test_matches_jordan_wigner(n):
    for j in range(1, n + 1):
        assert np.allclose(annihilation_matrix(n, j).toarray(), jordan_wigner(n, j))


@pytest.mark.parametrize("n", range(1, 7))
def test_anticommutation_exhaustive(n):
    eye = np.eye(1 << n)
    cs = [annihilation_matrix(n, j).toarray() for j in range(1, n + 1)]
    ds = [creation_matrix(n, j).toarray() for j in range(1, n + 1)]
    for i, j in itertools.product(range(n), repeat=2):
        assert np.allclose(cs[i] @ ds[j] + ds[j] @ cs[i], eye * (i == j))
        assert np.allclose(cs[i] @ cs[j] + cs[j] @ cs[i], 0)


def test_mode_out_of_range():
    with pytest.raises(FockError):
        apply_creation(FockState.vacuum(3), 4)
    with pytest.raises(FockError):
        apply_annihilation(FockState.vacuum(3), 0)


@given(seed=seeds, n=st.integers(1, 6), parity=parities, j=st.integers(1, 6))
@settings(max_examples=40, deadline=None)
def test_ladders_flip_parity(seed, n, parity, j):
    j = min(j, n)
    s = random_state(np.random.default_rng(seed), n, parity)
    flipped = ODD if parity == EVEN else EVEN
    for out in (apply_creation(s, j), apply_annihilation(s, j)):
        if out.norm > 1e-12:
            assert number_parity(out) == flipped


# --------------------------------------------------------------------------
# parity and occupations
# --------------------------------------------------------------------------

@pytest.mark.parametrize(
    "state, expected",
    [
        (FockState.vacuum(3), EVEN),
        (FockState.basis(3, [1, 2, 3]), ODD),
        ((FockState.vacuum(3) + FockState.basis(3, [1])).normalized(), MIXED),
    ],
)
def test_number_parity(state, expected):
    assert number_parity(state) == expected


def test_occupation_examples():
    s = FockState.basis(4, [1])
    assert occupation_probability(s, 1) == 1
    assert occupation_probability(s, 2) == 0
    odd = (FockState.basis(4, [1]) + FockState.basis(4, [2, 3, 4])).normalized()
    p = occupation_probability(odd, 1)
    assert p == pytest.approx(0.5, abs=1e-14)
    assert p == pytest.approx(expectation(odd, [(1, True), (1, False)]).real, abs=1e-14)


def test_occupation_needs_normalized_state():
    with pytest.raises(FockError):
        occupation_probability(FockState.vacuum(2) * 2, 1)


def test_conditional_components_examples():
    p, psi, pbar, psibar = conditional_components(FockState.basis(4, [1]), 1)
    assert (p, pbar, psibar) == (1.0, 0.0, None)
    assert psi.allclose(FockState.basis(4, [1]))

    odd = (FockState.basis(4, [1]) + FockState.basis(4, [2, 3, 4])).normalized()
    p, psi, pbar, psibar = conditional_components(odd, 1)
    assert p == pytest.approx(0.5)
    assert psi.allclose(FockState.basis(4, [1]))

    two = (FockState.basis(4, [1]) + FockState.basis(4, [2])).normalized()
    p, psi, pbar, psibar = conditional_components(two, 1)
    assert (p, pbar) == (pytest.approx(0.5), pytest.approx(0.5))
    assert psi.allclose(FockState.basis(4, [1])) and psibar.allclose(FockState.basis(4, [2]))


@given(seed=seeds, n=st.integers(1, 5), parity=parities)
@settings(max_examples=30, deadline=None)
def test_conditional_weights_sum_to_one(seed, n, parity):
    s = random_state(np.random.default_rng(seed), n, parity)
    for j in range(1, n + 1):
        p, psi, pbar, psibar = conditional_components(s, j)
        assert p + pbar == pytest.approx(1.0, abs=1e-12)
        # c†_j c_j psi_j = psi_j
        if psi is not None:
            assert apply_creation(apply_annihilation(psi, j), j).allclose(psi)


@given(seed=seeds, n=st.integers(1, 5), parity=parities)
@settings(max_examples=30, deadline=None)
def test_single_ladder_expectation_vanishes(seed, n, parity):
    s = random_state(np.random.default_rng(seed), n, parity)
    for j in range(1, n + 1):
        assert abs(expectation(s, [(j, False)])) < 1e-12
        assert abs(expectation(s, [(j, True)])) < 1e-12


def test_operator_word_order():
    # c†_1 c_2 moves the particle from mode 2 to mode 1
    out = operator_word(2, [(1, True), (2, False)]) @ FockState.basis(2, [2]).amplitudes
    assert np.allclose(out, FockState.basis(2, [1]).amplitudes)


# --------------------------------------------------------------------------
# FockState and MixedState plumbing
# --------------------------------------------------------------------------

def test_fock_state_validation():
    with pytest.raises(FockError):
        FockState(13, np.zeros(2**13))
    with pytest.raises(FockError):
        FockState(2, np.zeros(3))
    with pytest.raises(FockError):
        FockState(2, np.zeros(4)).normalized()


def test_same_ray():
    s = FockState.basis(3, [1, 3])
    assert s.same_ray(s * np.exp(0.7j))
    assert not s.same_ray(FockState.basis(3, [2]))


def test_mixed_state_embedding():
    sector = np.eye(8) / 8
    rho = MixedState(4, sector, parity=ODD)
    assert rho.parity == ODD
    assert np.allclose(np.diag(rho.matrix)[sector_indices(4, ODD)], 1 / 8)
    assert np.allclose(rho.sector_matrix(EVEN), 0)


@pytest.mark.parametrize(
    "matrix, message",
    [
        (np.diag([1.0, 0, 0, 0]) * 2, "trace"),
        (np.array([[0.5, 0.5j, 0, 0], [0.5j, 0.5, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]), "Hermitian"),
        (np.diag([1.5, -0.5, 0, 0]), "positive"),
        (np.full((4, 4), 0.25), "parity"),
    ],
)
def test_mixed_state_invariants(matrix, message):
    with pytest.raises(FockError, match=message):
        MixedState(2, matrix)


def test_mixed_state_parity_label():
    rho = MixedState.mixture([0.5, 0.5], [FockState.vacuum(2), FockState.basis(2, [1])])
    assert rho.parity == MIXED
    vals, vecs = rho.eigh()
    assert np.allclose(vals, [0.5, 0.5])
