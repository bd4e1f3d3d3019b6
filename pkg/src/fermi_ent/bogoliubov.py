"""Canonical quasiparticle transformations and their Fock-space action.

A map is stored as the pair ``(U, V)`` defining

    a_nu = sum_j conj(U[j, nu]) c_j + V[j, nu] c†_j,

equivalently ``(a, a†) = W† (c, c†)`` with ``W = [[U, V], [conj(V), conj(U)]]``.
A Fock-space unitary "implementing" ``W`` is one that sends the generalized
density matrix of a state to ``W rho_qsp W†``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sps
from scipy.sparse.linalg import expm_multiply

from .densities import check_qsp_matrix, qsp_matrix
from .fock import (
    FockError,
    FockState,
    MixedState,
    annihilation_matrix,
    creation_matrix,
    parity_operator,
)

UNITARITY_TOL = 1e-10
DET_TOL = 1e-10


class BogoliubovError(ValueError):
    pass


def partner(vec: np.ndarray) -> np.ndarray:
    """Antiunitary block-swap conjugation ``(u, v) -> (conj(v), conj(u))``."""
    n = vec.shape[0] // 2
    return np.concatenate([vec[n:].conj(), vec[:n].conj()], axis=0)


@dataclass(frozen=True, eq=False)
class BogoliubovMap:
    U: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        U = np.array(self.U, dtype=complex)
        V = np.array(self.V, dtype=complex)
        if U.ndim != 2 or U.shape[0] != U.shape[1] or U.shape != V.shape:
            raise BogoliubovError(f"U and V must be equal square matrices, got {U.shape} and {V.shape}")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "V", V)

    @property
    def n(self) -> int:
        return self.U.shape[0]

    @property
    def W(self) -> np.ndarray:
        return np.block([[self.U, self.V], [self.V.conj(), self.U.conj()]])

    @classmethod
    def from_W(cls, w: np.ndarray, tol: float = 1e-9) -> "BogoliubovMap":
        w = np.asarray(w, dtype=complex)
        n = w.shape[0] // 2
        U, V = w[:n, :n], w[:n, n:]
        if np.linalg.norm(w[n:, :n] - V.conj()) > tol or np.linalg.norm(w[n:, n:] - U.conj()) > tol:
            raise BogoliubovError("matrix does not have the [[U, V], [conj V, conj U]] block form")
        return cls(U, V)

    @classmethod
    def identity(cls, n: int) -> "BogoliubovMap":
        return cls(np.eye(n), np.zeros((n, n)))

    @classmethod
    def particle_hole(cls, n: int, modes) -> "BogoliubovMap":
        """``c_j <-> c†_j`` on the listed (1-based) modes."""
        s = np.zeros(n)
        for j in modes:
            s[j - 1] = 1.0
        return cls(np.diag(1.0 - s), np.diag(s))

    def residuals(self) -> tuple[float, float]:
        n = self.n
        r1 = np.linalg.norm(self.U @ self.U.conj().T + self.V @ self.V.conj().T - np.eye(n))
        r2 = np.linalg.norm(self.U @ self.V.T + self.V @ self.U.T)
        return float(r1), float(r2)

    def is_valid(self, tol: float = UNITARITY_TOL) -> bool:
        return max(self.residuals()) < tol

    def inverse(self) -> "BogoliubovMap":
        return BogoliubovMap.from_W(self.W.conj().T)

    def quasiparticle_operators(self):
        """Sparse Fock matrices of ``a_1 ... a_n``."""
        n = self.n
        ops = []
        for nu in range(n):
            op = sps.csr_matrix((1 << n, 1 << n), dtype=complex)
            for j in range(n):
                if self.U[j, nu] != 0:
                    op = op + np.conj(self.U[j, nu]) * annihilation_matrix(n, j + 1)
                if self.V[j, nu] != 0:
                    op = op + self.V[j, nu] * creation_matrix(n, j + 1)
            ops.append(op.tocsr())
        return ops


def validate(bmap: BogoliubovMap, tol: float = UNITARITY_TOL) -> bool:
    return bmap.is_valid(tol)


def compose(second: BogoliubovMap, first: BogoliubovMap) -> BogoliubovMap:
    """Map whose ``W`` is ``W_second @ W_first`` (``first`` acts on the state first)."""
    if second.n != first.n:
        raise BogoliubovError("cannot compose maps on different mode counts")
    return BogoliubovMap.from_W(second.W @ first.W)


@dataclass(frozen=True, eq=False)
class QuadraticOperator:
    """Hermitian quadratic operator

        O = sum o11[i,j] c†_i c_j + 1/2 (o20[i,j] c_i c_j + o02[i,j] c†_i c†_j) - tr(o11)/2

    with ``o02 = o20†`` so that ``O`` is Hermitian.
    """

    o11: np.ndarray
    o20: np.ndarray

    def __post_init__(self):
        o11 = np.array(self.o11, dtype=complex)
        o20 = np.array(self.o20, dtype=complex)
        object.__setattr__(self, "o11", o11)
        object.__setattr__(self, "o20", o20)
        if np.linalg.norm(o20 + o20.T) > UNITARITY_TOL:
            raise BogoliubovError("o20 must be antisymmetric")

    @property
    def n(self) -> int:
        return self.o11.shape[0]

    @property
    def o02(self) -> np.ndarray:
        return self.o20.conj().T

    @property
    def matrix(self) -> np.ndarray:
        return np.block([[self.o11, self.o02], [self.o20, -self.o11.T]])

    def is_hermitian(self, tol: float = UNITARITY_TOL) -> bool:
        m = self.matrix
        return bool(np.linalg.norm(m - m.conj().T) < tol)

    def fock_matrix(self) -> sps.csr_matrix:
        n = self.n
        c = [annihilation_matrix(n, j) for j in range(1, n + 1)]
        cd = [creation_matrix(n, j) for j in range(1, n + 1)]
        dim = 1 << n
        op = sps.csr_matrix((dim, dim), dtype=complex)
        for i in range(n):
            for j in range(n):
                if self.o11[i, j] != 0:
                    op = op + self.o11[i, j] * (cd[i] @ c[j])
                if self.o20[i, j] != 0:
                    op = op + 0.5 * self.o20[i, j] * (c[i] @ c[j])
                if self.o02[i, j] != 0:
                    op = op + 0.5 * self.o02[i, j] * (cd[i] @ cd[j])
        op = op - 0.5 * np.trace(self.o11) * sps.identity(dim, dtype=complex, format="csr")
        return op.tocsr()

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "QuadraticOperator":
        n = m.shape[0] // 2
        return cls(m[:n, :n], m[n:, :n])


def random_quadratic(n: int, rng: np.random.Generator, scale: float = 1.0) -> QuadraticOperator:
    """Hermitian generator with independent N(0, scale^2) real and imaginary parts."""
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    b = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return QuadraticOperator(scale * 0.5 * (a + a.conj().T), scale * 0.5 * (b - b.T))


def random_map(n: int, rng: np.random.Generator, scale: float = 1.0) -> BogoliubovMap:
    """``W = exp(-i O)`` for a random Hermitian generator ``O``."""
    return BogoliubovMap.from_W(sla.expm(-1j * random_quadratic(n, rng, scale).matrix))


def quadratic_expectation(state, op: QuadraticOperator, tol: float = 1e-10) -> complex:
    """``<O>`` as ``tr'(rho_qsp O) / 2``, checked against the Fock matrix element."""
    q = qsp_matrix(state)
    formula = 0.5 * np.trace(q @ op.matrix)
    fock = op.fock_matrix()
    if isinstance(state, MixedState):
        direct = np.trace(fock @ state.matrix)
    else:
        vec = state.amplitudes
        direct = np.vdot(vec, fock @ vec)
    if abs(formula - direct) > tol:
        raise BogoliubovError(f"quadratic expectation mismatch: {formula!r} vs Fock {direct!r}")
    return complex(formula)


def _expm_apply(mat: sps.csr_matrix, vec: np.ndarray) -> np.ndarray:
    if mat.shape[0] <= 1024:
        return sla.expm(mat.toarray()) @ vec
    return expm_multiply(mat.tocsc(), vec)


def apply_to_state(state: FockState, op: QuadraticOperator, angle: float = 1.0) -> FockState:
    """``exp(-i angle O) |state>``; sends ``rho_qsp`` to ``W rho_qsp W†`` with ``W = exp(-i angle O)``."""
    if op.n != state.n:
        raise BogoliubovError("operator and state have different mode counts")
    if not op.is_hermitian():
        raise BogoliubovError("generator is not Hermitian")
    if angle == 0:
        return state
    return FockState(state.n, _expm_apply(-1j * angle * op.fock_matrix(), state.amplitudes))


def particle_hole(state: FockState, modes) -> FockState:
    """Apply ``c_j <-> c†_j`` on a subset of modes.

    Each mode uses the unitary ``(c_j + c†_j) * prod_{k != j} (1 - 2 n_k)``,
    which maps ``c_j`` to ``c†_j`` and leaves every other ``c_k`` alone.
    """
    n = state.n
    vec = state.amplitudes
    for j in sorted(set(modes)):
        if not 1 <= j <= n:
            raise FockError(f"mode index {j} out of range [1, {n}]")
        others = parity_operator(n) * np.where((np.arange(1 << n) >> (j - 1)) & 1, -1.0, 1.0)
        vec = (annihilation_matrix(n, j) + creation_matrix(n, j)) @ (others * vec)
    return FockState(n, vec)


def _majorana_transform(n: int) -> np.ndarray:
    eye = np.eye(n)
    return np.block([[eye, eye], [-1j * eye, 1j * eye]]) / np.sqrt(2)


def _real_orthogonal_log(o: np.ndarray) -> np.ndarray:
    """Real antisymmetric ``K`` with ``expm(K) = o`` for ``o`` in SO(2n)."""
    t, z = sla.schur(o, output="real")
    size = o.shape[0]
    k = np.zeros((size, size))
    minus = []
    i = 0
    while i < size:
        if i + 1 < size and abs(t[i + 1, i]) > 1e-12:
            ang = math.atan2(t[i + 1, i], t[i, i])
            k[i, i + 1], k[i + 1, i] = -ang, ang
            i += 2
            continue
        if t[i, i] < 0:
            minus.append(i)
        i += 1
    if len(minus) % 2:
        raise BogoliubovError("orthogonal matrix has determinant -1")
    for p, q in zip(minus[::2], minus[1::2]):
        k[p, q], k[q, p] = -math.pi, math.pi
    return z @ k @ z.T


def generator_of(bmap: BogoliubovMap) -> QuadraticOperator:
    """Hermitian ``O`` with ``exp(-i O) = W``.

    The logarithm is taken in the Majorana frame, where ``W`` is a real
    orthogonal matrix, so eigenvalues at ``-1`` pose no branch problem.
    """
    w = bmap.W
    omega = _majorana_transform(bmap.n)
    o = omega @ w @ omega.conj().T
    if np.linalg.norm(o.imag) > 1e-9:
        raise BogoliubovError("map is not a Bogoliubov transformation")
    m = 1j * omega.conj().T @ _real_orthogonal_log(o.real) @ omega
    m = 0.5 * (m + m.conj().T)
    op = QuadraticOperator.from_matrix(m)
    if np.linalg.norm(sla.expm(-1j * op.matrix) - w) > 1e-8:
        raise BogoliubovError("failed to recover a quadratic generator for the map")
    return op


def apply_map(state: FockState, bmap: BogoliubovMap) -> FockState:
    """Fock-space action of a map: ``rho_qsp -> W rho_qsp W†``.

    Maps outside the identity component (``det W = -1``) are split into a
    single-mode particle-hole swap followed by an exponential.
    """
    if not bmap.is_valid(1e-9):
        raise BogoliubovError("map is not a valid Bogoliubov transformation")
    if np.real(np.linalg.det(bmap.W)) < 0:
        ph = BogoliubovMap.particle_hole(bmap.n, [1])
        rest = compose(bmap, ph)  # W = rest @ ph since ph is an involution
        return apply_to_state(particle_hole(state, [1]), generator_of(rest))
    return apply_to_state(state, generator_of(bmap))


def to_quasiparticle_frame(state: FockState, bmap: BogoliubovMap) -> FockState:
    """State whose ``c``-contractions equal the ``a``-contractions of ``state``."""
    return apply_map(state, bmap.inverse())


# --------------------------------------------------------------------------
# Thouless vacuum
# --------------------------------------------------------------------------

def thouless_matrix(bmap: BogoliubovMap) -> np.ndarray:
    """Antisymmetric ``Z`` with ``|0_a> ∝ exp(1/2 sum Z_ij c†_i c†_j) |0>``.

    Solving ``a_nu |0_a> = 0`` for the convention above gives
    ``Z = V conj(U)^-1``.
    """
    det = np.linalg.det(bmap.U)
    if abs(det) <= DET_TOL:
        raise BogoliubovError(
            f"|det U| = {abs(det):.3g} is too small for the Thouless form; "
            "apply a particle-hole transformation to the affected modes first"
        )
    z = bmap.V @ np.linalg.inv(bmap.U.conj())
    return 0.5 * (z - z.T)


def annihilation_residual(state: FockState, bmap: BogoliubovMap) -> float:
    """Largest ``|| a_nu |state> ||`` over all quasiparticle modes."""
    return max(float(np.linalg.norm(a @ state.amplitudes)) for a in bmap.quasiparticle_operators())


def thouless_vacuum(bmap: BogoliubovMap, tol: float = 1e-9) -> FockState:
    """Normalized quasiparticle vacuum via Thouless' theorem.

    The exponential is expanded exactly (the pair operator is nilpotent) and
    the global phase is fixed so the largest amplitude is real positive.
    """
    if not bmap.is_valid(1e-9):
        raise BogoliubovError("map is not a valid Bogoliubov transformation")
    n = bmap.n
    z = thouless_matrix(bmap)
    pair = sps.csr_matrix((1 << n, 1 << n), dtype=complex)
    for i in range(n):
        for j in range(i + 1, n):
            if z[i, j] != 0:
                pair = pair + z[i, j] * (creation_matrix(n, i + 1) @ creation_matrix(n, j + 1))
    term = np.zeros(1 << n, dtype=complex)
    term[0] = 1.0
    vec = term.copy()
    for k in range(1, n // 2 + 1):
        term = pair @ term / k
        vec = vec + term
    vec = np.sqrt(abs(np.linalg.det(bmap.U))) * vec
    vec = vec / np.linalg.norm(vec)
    big = np.argmax(np.abs(vec))
    vec = vec * (abs(vec[big]) / vec[big])
    out = FockState(n, vec)
    res = annihilation_residual(out, bmap)
    if res > tol:
        raise BogoliubovError(f"Thouless state not annihilated by the quasiparticles (residual {res:.3g})")
    return out


# --------------------------------------------------------------------------
# diagonalization of rho_qsp
# --------------------------------------------------------------------------

def _real_form_basis(vectors: np.ndarray) -> np.ndarray:
    """Orthonormal vectors fixed by ``partner`` that span the same subspace."""
    cands = []
    for v in vectors.T:
        pv = partner(v)
        cands += [v + pv, 1j * (v - pv)]
    basis: list[np.ndarray] = []
    for c in cands:
        for b in basis:
            c = c - np.real(np.vdot(b, c)) * b
        nrm = np.linalg.norm(c)
        if nrm > 1e-8:
            basis.append(c / nrm)
        if len(basis) == vectors.shape[1]:
            break
    return np.array(basis).T


def diagonalize_qsp(q: np.ndarray, prefer_invertible_u: bool = False, degeneracy_tol: float = 1e-7):
    """Find ``(map, f)`` with ``W† rho_qsp W = diag(f, 1 - f)``.

    ``f`` holds the lower member of every eigenvalue pair, sorted descending.
    Eigenvectors with eigenvalue ``1/2`` are paired inside their eigenspace
    using a basis fixed by the block-swap conjugation. With
    ``prefer_invertible_u`` the labels ``a <-> a†`` are flipped on the subset
    of modes that maximizes ``|det U|`` when the default ``U`` is singular.
    """
    q = np.asarray(q, dtype=complex)
    check_qsp_matrix(q)
    n = q.shape[0] // 2
    vals, vecs = np.linalg.eigh(q)
    half = np.abs(vals - 0.5) < degeneracy_tol
    low = (vals < 0.5) & ~half
    cols = [vecs[:, k] for k in np.flatnonzero(low)]
    fvals = list(vals[low])
    n_half = int(half.sum())
    if n_half % 2:
        raise BogoliubovError("eigenvalue 1/2 has odd multiplicity; pairing symmetry broken")
    if n_half:
        real = _real_form_basis(vecs[:, half])
        for k in range(n_half // 2):
            cols.append((real[:, 2 * k] + 1j * real[:, 2 * k + 1]) / np.sqrt(2))
            fvals.append(0.5)
    if len(cols) != n:
        raise BogoliubovError(f"found {len(cols)} quasiparticle modes, expected {n}")
    order = np.argsort(fvals, kind="stable")[::-1]
    first = np.array([cols[k] for k in order]).T
    f = np.clip(np.array([fvals[k] for k in order]), 0.0, 0.5)
    w = np.hstack([first, partner(first)])
    bmap = BogoliubovMap.from_W(w)
    if prefer_invertible_u and abs(np.linalg.det(bmap.U)) <= DET_TOL:
        bmap, f = _maximize_det_u(bmap, f)
    return bmap, f


def _maximize_det_u(bmap: BogoliubovMap, f: np.ndarray):
    n = bmap.n
    best = (abs(np.linalg.det(bmap.U)), ())
    for size in range(1, n + 1):
        for subset in itertools.combinations(range(n), size):
            U, V = bmap.U.copy(), bmap.V.copy()
            idx = list(subset)
            U[:, idx], V[:, idx] = bmap.V[:, idx], bmap.U[:, idx]
            d = abs(np.linalg.det(U))
            if d > best[0] + 1e-12:
                best = (d, subset)
    subset = list(best[1])
    U, V = bmap.U.copy(), bmap.V.copy()
    U[:, subset], V[:, subset] = bmap.V[:, subset], bmap.U[:, subset]
    f = f.copy()
    f[subset] = 1.0 - f[subset]
    return BogoliubovMap(U, V), f


def diagonal_residual(q: np.ndarray, bmap: BogoliubovMap, f: np.ndarray) -> float:
    target = np.diag(np.concatenate([f, 1.0 - f]))
    return float(np.linalg.norm(bmap.W.conj().T @ q @ bmap.W - target))
