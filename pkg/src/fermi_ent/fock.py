"""Occupation-number kernel for ``n`` fermionic modes.

Conventions
-----------
- Bit ``k`` of a basis index is the occupation of mode ``k + 1``.
- The basis state with occupied modes ``j1 < ... < jm`` is
  ``c†_{j1} ... c†_{jm} |0>``.
- Creation/annihilation on mode ``j`` picks up ``(-1)**(# occupied modes < j)``.

Modes are 1-based in the public API, matching the usual physics notation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sps

MAX_MODES = 12
NORM_TOL = 1e-12
PARITY_TOL = 1e-12

EVEN, ODD, MIXED = "even", "odd", "mixed"


class FockError(ValueError):
    """Raised for invalid modes, states, or operator requests."""


@lru_cache(maxsize=None)
def popcounts(n: int) -> np.ndarray:
    idx = np.arange(1 << n)
    counts = np.zeros(1 << n, dtype=np.int64)
    for k in range(n):
        counts += (idx >> k) & 1
    counts.setflags(write=False)
    return counts


def parity_mask(n: int, parity: str) -> np.ndarray:
    """Boolean mask of basis states with the given number parity."""
    odd = (popcounts(n) & 1).astype(bool)
    if parity == EVEN:
        return ~odd
    if parity == ODD:
        return odd
    raise FockError(f"parity must be 'even' or 'odd', got {parity!r}")


def sector_indices(n: int, parity: str) -> np.ndarray:
    """Sorted basis indices of one parity sector."""
    return np.flatnonzero(parity_mask(n, parity))


def _check_mode(n: int, j: int) -> int:
    if not isinstance(j, (int, np.integer)) or not 1 <= j <= n:
        raise FockError(f"mode index {j!r} out of range [1, {n}]")
    return int(j) - 1


@dataclass(frozen=True, eq=False)
class FockState:
    """Dense amplitude vector over the ``2**n`` occupation basis."""

    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n <= MAX_MODES:
            raise FockError(f"mode count must lie in [1, {MAX_MODES}], got {self.n}")
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 1 << self.n:
            raise FockError(f"expected {1 << self.n} amplitudes, got {amps.size}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def vacuum(cls, n: int) -> "FockState":
        amps = np.zeros(1 << n, dtype=complex)
        amps[0] = 1.0
        return cls(n, amps)

    @classmethod
    def full(cls, n: int) -> "FockState":
        """``c†_1 c†_2 ... c†_n |0>`` (positive sign by the ordering convention)."""
        amps = np.zeros(1 << n, dtype=complex)
        amps[-1] = 1.0
        return cls(n, amps)

    @classmethod
    def basis(cls, n: int, modes) -> "FockState":
        """``c†_{j1} ... c†_{jm} |0>`` for the listed modes in the given order."""
        state = cls.vacuum(n)
        for j in reversed(list(modes)):
            state = apply_creation(state, j)
        return state

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def parity(self) -> str:
        return number_parity(self)

    def normalized(self) -> "FockState":
        nrm = self.norm
        if nrm == 0:
            raise FockError("cannot normalize the zero vector")
        return FockState(self.n, self.amplitudes / nrm)

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm**2 - 1.0) < tol

    def __add__(self, other: "FockState") -> "FockState":
        _same_n(self, other)
        return FockState(self.n, self.amplitudes + other.amplitudes)

    def __sub__(self, other: "FockState") -> "FockState":
        _same_n(self, other)
        return FockState(self.n, self.amplitudes - other.amplitudes)

    def __mul__(self, scalar) -> "FockState":
        return FockState(self.n, complex(scalar) * self.amplitudes)

    __rmul__ = __mul__

    def __neg__(self) -> "FockState":
        return FockState(self.n, -self.amplitudes)

    def __truediv__(self, scalar) -> "FockState":
        return FockState(self.n, self.amplitudes / complex(scalar))

    def vdot(self, other: "FockState") -> complex:
        """``<self|other>``."""
        _same_n(self, other)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def allclose(self, other: "FockState", atol: float = 1e-12) -> bool:
        _same_n(self, other)
        return bool(np.allclose(self.amplitudes, other.amplitudes, atol=atol, rtol=0))

    def same_ray(self, other: "FockState", atol: float = 1e-10) -> bool:
        """True when the two normalized states agree up to a global phase."""
        return abs(abs(self.normalized().vdot(other.normalized())) - 1.0) < atol


def _same_n(a: FockState, b: FockState) -> None:
    if a.n != b.n:
        raise FockError(f"mode counts differ: {a.n} vs {b.n}")


@lru_cache(maxsize=None)
def annihilation_matrix(n: int, j: int) -> sps.csr_matrix:
    """Sparse ``2**n`` square matrix of ``c_j`` (1-based mode)."""
    k = _check_mode(n, j)
    dim = 1 << n
    idx = np.arange(dim)
    occupied = ((idx >> k) & 1).astype(bool)
    src = idx[occupied]
    dst = src ^ (1 << k)
    below = popcounts(n)[src & ((1 << k) - 1)]
    signs = np.where(below & 1, -1.0, 1.0)
    return sps.csr_matrix((signs.astype(complex), (dst, src)), shape=(dim, dim))


@lru_cache(maxsize=None)
def creation_matrix(n: int, j: int) -> sps.csr_matrix:
    """Sparse matrix of ``c†_j``."""
    return annihilation_matrix(n, j).conj().T.tocsr()


@lru_cache(maxsize=None)
def parity_operator(n: int) -> np.ndarray:
    """Diagonal of ``P = exp(i pi N)``."""
    diag = np.where(popcounts(n) & 1, -1.0, 1.0)
    diag.setflags(write=False)
    return diag


def apply_creation(state: FockState, j: int) -> FockState:
    """``c†_j |state>`` (not renormalized)."""
    _check_mode(state.n, j)
    return FockState(state.n, creation_matrix(state.n, j) @ state.amplitudes)


def apply_annihilation(state: FockState, j: int) -> FockState:
    """``c_j |state>`` (not renormalized)."""
    _check_mode(state.n, j)
    return FockState(state.n, annihilation_matrix(state.n, j) @ state.amplitudes)


def number_parity(state: FockState, tol: float = PARITY_TOL) -> str:
    """Classify the support of ``state`` as 'even', 'odd' or 'mixed'."""
    amps = np.abs(state.amplitudes)
    odd = (popcounts(state.n) & 1).astype(bool)
    has_even = bool(np.any(amps[~odd] >= tol))
    has_odd = bool(np.any(amps[odd] >= tol))
    if has_even and has_odd:
        return MIXED
    return ODD if has_odd else EVEN


def require_normalized(state: FockState, tol: float = NORM_TOL) -> None:
    if not state.is_normalized(tol):
        raise FockError(f"state is not normalized (norm^2 = {state.norm ** 2:.15g})")


def require_definite_parity(state: FockState) -> str:
    par = number_parity(state)
    if par == MIXED:
        raise FockError("state has mixed number parity")
    return par


def occupation_probability(state: FockState, j: int) -> float:
    """``p_j = <c†_j c_j>`` for a normalized state."""
    require_normalized(state)
    k = _check_mode(state.n, j)
    occ = ((np.arange(1 << state.n) >> k) & 1).astype(bool)
    return float(np.sum(np.abs(state.amplitudes[occ]) ** 2))


def occupations(state: FockState) -> np.ndarray:
    """All ``p_j`` in mode order."""
    return np.array([occupation_probability(state, j) for j in range(1, state.n + 1)])


def conditional_components(state: FockState, j: int):
    """Split ``state`` on the occupation of mode ``j``.

    Returns ``(p_j, psi_j, p_jbar, psi_jbar)`` where ``psi_j`` is the
    normalized ``c†_j c_j |state>`` and ``psi_jbar`` the normalized
    ``c_j c†_j |state>``. A component with zero weight is returned as ``None``.
    """
    require_normalized(state)
    k = _check_mode(state.n, j)
    occ = ((np.arange(1 << state.n) >> k) & 1).astype(bool)
    full = np.where(occ, state.amplitudes, 0)
    empty = np.where(occ, 0, state.amplitudes)
    out = []
    for part in (full, empty):
        weight = float(np.vdot(part, part).real)
        comp = FockState(state.n, part / np.sqrt(weight)) if weight > NORM_TOL else None
        out += [weight if comp is not None else 0.0, comp]
    return tuple(out)


def operator_word(n: int, word) -> sps.csr_matrix:
    """Sparse matrix of a product of ladder operators.

    ``word`` is a sequence of ``(mode, dagger)`` pairs read left to right, so
    ``[(1, True), (2, False)]`` is ``c†_1 c_2``.
    """
    dim = 1 << n
    mat = sps.identity(dim, dtype=complex, format="csr")
    for j, dagger in word:
        mat = mat @ (creation_matrix(n, j) if dagger else annihilation_matrix(n, j))
    return mat.tocsr()


def expectation(state: FockState, word) -> complex:
    """``<state| word |state>`` by direct operator application."""
    vec = state.amplitudes
    return complex(np.vdot(vec, operator_word(state.n, word) @ vec))


class MixedState:
    """Density matrix on the full ``2**n`` Fock space.

    Sector inputs (``dim == 2**(n-1)``) are embedded using the sorted basis
    indices of that parity. Construction checks hermiticity, unit trace,
    positivity and ``[rho, P] = 0``.
    """

    def __init__(self, n: int, matrix, parity: str | None = None, tol: float = 1e-10):
        if not 1 <= n <= MAX_MODES:
            raise FockError(f"mode count must lie in [1, {MAX_MODES}], got {n}")
        mat = np.array(matrix, dtype=complex)
        dim = 1 << n
        if mat.shape == (dim // 2, dim // 2) and parity in (EVEN, ODD):
            full = np.zeros((dim, dim), dtype=complex)
            idx = sector_indices(n, parity)
            full[np.ix_(idx, idx)] = mat
            mat = full
        elif mat.shape != (dim, dim):
            raise FockError(f"density matrix shape {mat.shape} does not match n={n}")
        if np.linalg.norm(mat - mat.conj().T) > tol:
            raise FockError("density matrix is not Hermitian")
        mat = 0.5 * (mat + mat.conj().T)
        if abs(np.trace(mat).real - 1.0) > tol:
            raise FockError(f"density matrix trace is {np.trace(mat).real:.15g}, expected 1")
        if np.linalg.eigvalsh(mat).min() < -tol:
            raise FockError("density matrix is not positive semidefinite")
        par = parity_operator(n)
        if np.linalg.norm(par[:, None] * mat - mat * par[None, :]) > tol:
            raise FockError("density matrix does not commute with number parity")
        self.n = n
        self.matrix = mat
        self.matrix.setflags(write=False)

    @classmethod
    def pure(cls, state: FockState) -> "MixedState":
        vec = state.amplitudes
        return cls(state.n, np.outer(vec, vec.conj()))

    @classmethod
    def mixture(cls, weights, states) -> "MixedState":
        states = list(states)
        n = states[0].n
        mat = sum(w * np.outer(s.amplitudes, s.amplitudes.conj()) for w, s in zip(weights, states))
        return cls(n, mat)

    @property
    def parity(self) -> str:
        """Sector label: 'even', 'odd' or 'mixed' if both sectors carry weight."""
        weights = {p: float(np.trace(self.sector_matrix(p)).real) for p in (EVEN, ODD)}
        if weights[ODD] < PARITY_TOL:
            return EVEN
        if weights[EVEN] < PARITY_TOL:
            return ODD
        return MIXED

    def sector_matrix(self, parity: str) -> np.ndarray:
        idx = sector_indices(self.n, parity)
        return self.matrix[np.ix_(idx, idx)]

    def eigh(self, cutoff: float = 1e-10):
        """Eigenpairs with eigenvalue above ``cutoff``, descending."""
        vals, vecs = np.linalg.eigh(self.matrix)
        order = np.argsort(vals)[::-1]
        vals, vecs = vals[order], vecs[:, order]
        keep = vals > cutoff
        return vals[keep], vecs[:, keep]
