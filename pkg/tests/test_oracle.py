import numpy as np
import pytest
from hypothesis import given, settings

from conftest import random_mixed, random_state, seeds
from fermi_ent import oracle as o
from fermi_ent.bogoliubov import apply_map, random_map, thouless_vacuum
from fermi_ent.densities import basis_occupations, binary_entropy, entropy_qsp, entropy_sp, pairing_tensor
from fermi_ent.fock import EVEN, ODD, FockState, MixedState
from fermi_ent.quartet import maximally_entangled, mixed_concurrence, pure_concurrence, werner_state

SMALL = o.SearchBudget(samples=300, refine_steps=60, seed=3)


# --------------------------------------------------------------------------
# budget and sampling plumbing
# --------------------------------------------------------------------------

@pytest.mark.parametrize(
    "kwargs",
    [{"samples": 0}, {"refine_steps": -1}, {"seed": -1}, {"seed": 2**64}, {"tolerance": 0}],
)
def test_budget_validation(kwargs):
    with pytest.raises(o.OracleError):
        o.SearchBudget(**kwargs)


def test_worker_count(monkeypatch):
    monkeypatch.delenv(o.THREADS_ENV, raising=False)
    assert o.worker_count() == 1
    monkeypatch.setenv(o.THREADS_ENV, "3")
    assert o.worker_count() == 3
    monkeypatch.setenv(o.THREADS_ENV, "many")
    with pytest.raises(o.OracleError):
        o.worker_count()


def test_haar_unitaries_are_unitary(rng):
    u = o.haar_unitaries(rng, 10, 4)
    assert np.allclose(np.conj(np.swapaxes(u, 1, 2)) @ u, np.eye(4))
    iso = o.haar_unitaries(rng, 10, 8, 3)
    assert np.allclose(np.conj(np.swapaxes(iso, 1, 2)) @ iso, np.eye(3))


def test_haar_phases_are_uniform():
    # the phase-fixed QR makes the first diagonal entry rotationally uniform
    u = o.haar_unitaries(np.random.default_rng(0), 4000, 2)
    assert abs(np.mean(u[:, 0, 0])) < 0.05


def test_random_bogoliubov_stack_valid(rng):
    from fermi_ent.bogoliubov import BogoliubovMap

    for w in o.random_bogoliubov_stack(rng, 20, 3):
        assert BogoliubovMap.from_W(w).is_valid(1e-9)


# --------------------------------------------------------------------------
# sp basis search
# --------------------------------------------------------------------------

def test_sp_search_slater():
    value, _ = o.min_entropy_over_sp_bases(FockState.basis(4, [1, 3]), SMALL)
    assert value == pytest.approx(0, abs=1e-9)


def test_sp_search_random_state():
    s = random_state(np.random.default_rng(12), 3, EVEN)
    value, u = o.min_entropy_over_sp_bases(s, o.SearchBudget(samples=2000, refine_steps=200))
    assert value - entropy_sp(s) < 1e-4
    assert value >= entropy_sp(s) - 1e-9
    occ = basis_occupations(s, u)
    assert float(np.sum(binary_entropy(occ))) == pytest.approx(value, abs=1e-10)


def test_sp_search_maximally_entangled_flat():
    s = maximally_entangled(ODD)
    for seed in range(5):
        value, _ = o.min_entropy_over_sp_bases(s, o.SearchBudget(samples=50, refine_steps=0, seed=seed))
        assert value == pytest.approx(4, abs=1e-12)


# --------------------------------------------------------------------------
# qsp basis search
# --------------------------------------------------------------------------

def test_qsp_search_slater():
    value, bmap = o.min_entropy_over_qsp_bases(FockState.basis(3, [2]), SMALL)
    assert value == pytest.approx(0, abs=1e-9)
    assert bmap.is_valid(1e-9)


@pytest.mark.parametrize("parity", [EVEN, ODD])
def test_qsp_search_random_state(parity):
    s = random_state(np.random.default_rng(21), 4, parity)
    value, bmap = o.min_entropy_over_qsp_bases(s, o.SearchBudget(samples=1000, refine_steps=200))
    assert -1e-9 <= value - entropy_qsp(s) < 1e-4
    assert bmap.is_valid(1e-9)


def test_qsp_search_vacuum_zero_at_generating_map():
    bmap = random_map(4, np.random.default_rng(5), scale=0.8)
    vac = thouless_vacuum(bmap)
    occ = basis_occupations(vac, bmap.W)
    assert float(np.sum(binary_entropy(occ))) == pytest.approx(0, abs=1e-9)
    value, _ = o.min_entropy_over_qsp_bases(vac, SMALL)
    assert value == pytest.approx(0, abs=1e-6)


def test_qsp_search_invariant_state():
    value, _ = o.min_entropy_over_qsp_bases(maximally_entangled(EVEN), o.SearchBudget(samples=20, refine_steps=0))
    assert value == pytest.approx(4, abs=1e-9)


# --------------------------------------------------------------------------
# convex roof
# --------------------------------------------------------------------------

def test_convex_roof_rank_one():
    s = random_state(np.random.default_rng(2), 4, ODD)
    value, dec = o.convex_roof_search(MixedState.pure(s), SMALL)
    assert value == pytest.approx(pure_concurrence(s), abs=1e-12)
    assert o.average_concurrence(dec) == pytest.approx(value, abs=1e-12)


def test_convex_roof_werner_from_above():
    rho = werner_state(0.9)
    value, dec = o.convex_roof_search(rho, o.SearchBudget(samples=500, refine_steps=100))
    assert 0.825 - 1e-8 <= value <= 0.825 + 1e-3
    assert o.average_concurrence(dec) == pytest.approx(value, abs=1e-9)
    assert o.average_entropy(dec) >= 0


def test_convex_roof_separable():
    rho = werner_state(0.3, parity=EVEN)
    value, dec = o.convex_roof_search(rho, o.SearchBudget(samples=500, refine_steps=100))
    assert value < 1e-3
    recon = sum(p * np.outer(s.amplitudes, s.amplitudes.conj()) for p, s in dec)
    assert np.allclose(recon, rho.matrix, atol=1e-10)


def test_convex_roof_needs_enough_components():
    rho = random_mixed(np.random.default_rng(0), ODD, rank=5)
    with pytest.raises(o.OracleError):
        o.convex_roof_search(rho, SMALL, components=4)


@given(seed=seeds)
@settings(max_examples=5, deadline=None)
def test_convex_roof_never_below_analytic(seed):
    rho = random_mixed(np.random.default_rng(seed), ODD, rank=3, bias=4.0)
    value, _ = o.convex_roof_search(rho, o.SearchBudget(samples=200, refine_steps=40, seed=seed))
    assert value >= mixed_concurrence(rho).concurrence - 1e-8


# --------------------------------------------------------------------------
# determinism and monotonicity
# --------------------------------------------------------------------------

def test_reproducible():
    s = random_state(np.random.default_rng(8), 4, ODD)
    a = o.min_entropy_over_qsp_bases(s, SMALL)[0]
    b = o.min_entropy_over_qsp_bases(s, SMALL)[0]
    assert a == b


@pytest.mark.parametrize("search", ["sp", "qsp", "roof"])
def test_monotone_in_budget(search):
    rng = np.random.default_rng(31)
    if search == "roof":
        target = random_mixed(rng, EVEN, rank=4, bias=3.0)
        run = o.convex_roof_search
    else:
        target = random_state(rng, 4, ODD)
        run = o.min_entropy_over_sp_bases if search == "sp" else o.min_entropy_over_qsp_bases
    values = [run(target, o.SearchBudget(samples=s, refine_steps=r, seed=9))[0]
              for s, r in [(50, 0), (200, 0), (200, 5), (200, 30), (700, 30)]]
    assert all(b <= a for a, b in zip(values, values[1:]))


def test_threaded_runs_are_deterministic(monkeypatch):
    s = random_state(np.random.default_rng(4), 4, EVEN)
    monkeypatch.setenv(o.THREADS_ENV, "3")
    a = o.min_entropy_over_qsp_bases(s, SMALL)[0]
    b = o.min_entropy_over_qsp_bases(s, SMALL)[0]
    assert a == b
    assert a >= entropy_qsp(s) - 1e-9


# --------------------------------------------------------------------------
# expectation oracle
# --------------------------------------------------------------------------

@pytest.mark.parametrize(
    "word, parsed",
    [("c1^ c2", [(1, True), (2, False)]), ("c3+ c1†", [(3, True), (1, True)]), ("c4", [(4, False)])],
)
def test_parse_word(word, parsed):
    assert o.parse_word(word) == parsed


def test_parse_word_rejects_garbage():
    with pytest.raises(o.OracleError):
        o.parse_word("a1^")


def test_expectation_examples():
    assert o.expectation_oracle(FockState.vacuum(2), "c1 c1^") == pytest.approx(1)
    assert o.expectation_oracle(FockState.basis(2, [1]), "c1^ c1") == pytest.approx(1)
    rho = MixedState.mixture([0.25, 0.75], [FockState.vacuum(2), FockState.basis(2, [1])])
    assert o.expectation_oracle(rho, "c1^ c1") == pytest.approx(0.75)


def test_expectation_pairing_of_vacuum():
    bmap = random_map(4, np.random.default_rng(6), scale=0.6)
    vac = thouless_vacuum(bmap)
    kappa = pairing_tensor(vac)
    assert np.allclose(kappa, bmap.V @ bmap.U.T, atol=1e-10)
    for i in range(4):
        for j in range(4):
            assert o.expectation_oracle(vac, f"c{j + 1} c{i + 1}") == pytest.approx(kappa[i, j], abs=1e-12)


def test_expectation_rejects_other_types():
    from fermi_ent.fock import FockError

    with pytest.raises(FockError):
        o.expectation_oracle(np.eye(4), "c1")


def test_apply_map_keeps_oracle_value():
    s = random_state(np.random.default_rng(10), 3, ODD)
    moved = apply_map(s, random_map(3, np.random.default_rng(11)))
    a = o.min_entropy_over_qsp_bases(s, SMALL)[0]
    b = o.min_entropy_over_qsp_bases(moved, SMALL)[0]
    assert a == pytest.approx(b, abs=1e-6)
