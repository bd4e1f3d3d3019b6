"""One-body density matrices and the entropy hierarchy built on them.

``rho_sp[i, j] = <c†_j c_i>``, ``kappa[i, j] = <c_j c_i>`` and the extended
matrix ``rho_qsp = [[rho_sp, kappa], [-conj(kappa), 1 - conj(rho_sp)]]``.
All entropies use base-2 logarithms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .fock import (
    FockState,
    MixedState,
    annihilation_matrix,
    creation_matrix,
    require_definite_parity,
    require_normalized,
)

HERMITIAN_TOL = 1e-10
SPECTRUM_TOL = 1e-10

StateLike = Union[FockState, MixedState]


class DensityError(ValueError):
    """Raised when a one-body matrix violates its structural invariants."""


# --------------------------------------------------------------------------
# scalar entropy functions
# --------------------------------------------------------------------------

def _xlog2x(p):
    p = np.clip(np.asarray(p, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return out


def binary_entropy(p):
    """``h(p) = -p log2 p - (1-p) log2(1-p)`` with ``0 log 0 = 0``."""
    p = np.clip(np.asarray(p, dtype=float), 0.0, 1.0)
    out = 0.0 - _xlog2x(p) - _xlog2x(1.0 - p)  # 0.0 - x avoids -0.0
    return float(out) if out.ndim == 0 else out


def von_neumann_term(p):
    """``-p log2 p``; summed over a spectrum this is the von Neumann entropy."""
    out = -_xlog2x(p)
    return float(out) if out.ndim == 0 else out


def quadratic_term(p):
    """``2 p (1 - p)``, normalized so a half-filled level contributes 1/2."""
    p = np.clip(np.asarray(p, dtype=float), 0.0, 1.0)
    out = 2.0 * p * (1.0 - p)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class EntropyFunction:
    """Concave ``f`` on [0, 1] with ``f(0) = f(1) = 0``."""

    name: str
    func: Callable

    def __post_init__(self):
        ends = np.asarray(self.func(np.array([0.0, 1.0])), dtype=float)
        if np.max(np.abs(ends)) > 1e-12:
            raise ValueError(f"entropy function {self.name!r} must vanish at 0 and 1")

    def __call__(self, p):
        return self.func(np.clip(np.asarray(p, dtype=float), 0.0, 1.0))

    def trace(self, spectrum) -> float:
        return float(np.sum(self(spectrum)))


BUILTIN_ENTROPIES = {
    "binary": EntropyFunction("binary", binary_entropy),
    "von_neumann": EntropyFunction("von_neumann", von_neumann_term),
    "quadratic": EntropyFunction("quadratic", quadratic_term),
}


def entropy_function(f) -> EntropyFunction:
    if isinstance(f, EntropyFunction):
        return f
    if isinstance(f, str):
        try:
            return BUILTIN_ENTROPIES[f]
        except KeyError:
            raise ValueError(f"unknown entropy function {f!r}; choose from {sorted(BUILTIN_ENTROPIES)}")
    if callable(f):
        return EntropyFunction(getattr(f, "__name__", "custom"), f)
    raise TypeError(f"cannot interpret {f!r} as an entropy function")


# --------------------------------------------------------------------------
# one-body matrices
# --------------------------------------------------------------------------

def _pure_ladder_images(state: FockState):
    vec = state.amplitudes
    down = np.array([annihilation_matrix(state.n, j) @ vec for j in range(1, state.n + 1)])
    up = np.array([creation_matrix(state.n, j) @ vec for j in range(1, state.n + 1)])
    return down, up


def _check_pure(state: FockState) -> None:
    require_normalized(state)
    require_definite_parity(state)


def _mixed_contractions(rho: MixedState):
    """``(rho_sp, kappa)`` from ``tr(rho c†_j c_i)`` and ``tr(rho c_j c_i)``."""
    n = rho.n
    dense_c = [annihilation_matrix(n, j).toarray() for j in range(1, n + 1)]
    c_rho = [c @ rho.matrix for c in dense_c]
    rho_sp = np.empty((n, n), dtype=complex)
    kappa = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            # tr(rho c†_j c_i) = tr(c_i rho c†_j)
            rho_sp[i, j] = np.vdot(dense_c[j], c_rho[i])
            # tr(rho c_j c_i) = tr(c_i rho c_j)
            kappa[i, j] = np.sum(c_rho[i] * dense_c[j].T)
    return rho_sp, kappa


def sp_matrix(state: StateLike) -> np.ndarray:
    """One-body density matrix ``rho_sp[i, j] = <c†_j c_i>``."""
    if isinstance(state, MixedState):
        rho_sp = _mixed_contractions(state)[0]
    else:
        _check_pure(state)
        down, _ = _pure_ladder_images(state)
        rho_sp = down.conj() @ down.T
        rho_sp = rho_sp.T
    check_sp_matrix(rho_sp)
    return rho_sp


def pairing_tensor(state: StateLike) -> np.ndarray:
    """Pairing tensor ``kappa[i, j] = <c_j c_i>`` (antisymmetric)."""
    if isinstance(state, MixedState):
        kappa = _mixed_contractions(state)[1]
    else:
        _check_pure(state)
        down, up = _pure_ladder_images(state)
        # <psi| c_j c_i |psi> = <c†_j psi | c_i psi>
        kappa = (up.conj() @ down.T).T
    if np.linalg.norm(kappa + kappa.T) > HERMITIAN_TOL:
        raise DensityError("pairing tensor is not antisymmetric")
    return kappa


def assemble_qsp(rho_sp: np.ndarray, kappa: np.ndarray) -> np.ndarray:
    n = rho_sp.shape[0]
    return np.block([[rho_sp, kappa], [-kappa.conj(), np.eye(n) - rho_sp.conj()]])


def qsp_matrix(state: StateLike) -> np.ndarray:
    """Generalized ``2n x 2n`` one-body density matrix of a pure or mixed state."""
    if isinstance(state, MixedState):
        rho_sp, kappa = _mixed_contractions(state)
    else:
        rho_sp, kappa = sp_matrix(state), pairing_tensor(state)
    q = assemble_qsp(rho_sp, kappa)
    check_qsp_matrix(q)
    return q


def qsp_matrix_mixed(rho: MixedState) -> np.ndarray:
    return qsp_matrix(rho)


def split_qsp(q: np.ndarray):
    """``(rho_sp, kappa)`` blocks of an extended matrix."""
    n = q.shape[0] // 2
    return q[:n, :n], q[:n, n:]


def check_sp_matrix(rho_sp: np.ndarray) -> None:
    if np.linalg.norm(rho_sp - rho_sp.conj().T) > HERMITIAN_TOL:
        raise DensityError("rho_sp is not Hermitian")
    ev = np.linalg.eigvalsh(rho_sp)
    if ev.min() < -SPECTRUM_TOL or ev.max() > 1 + SPECTRUM_TOL:
        raise DensityError(f"rho_sp spectrum [{ev.min():.3g}, {ev.max():.3g}] leaves [0, 1]")


def check_qsp_matrix(q: np.ndarray) -> None:
    dim = q.shape[0]
    if q.shape != (dim, dim) or dim % 2:
        raise DensityError(f"extended density matrix must be 2n x 2n, got {q.shape}")
    n = dim // 2
    if np.linalg.norm(q - q.conj().T) > HERMITIAN_TOL:
        raise DensityError("rho_qsp is not Hermitian")
    rho_sp, kappa = split_qsp(q)
    if np.linalg.norm(kappa + kappa.T) > HERMITIAN_TOL:
        raise DensityError("kappa block is not antisymmetric")
    if np.linalg.norm(q[n:, n:] - (np.eye(n) - rho_sp.conj())) > HERMITIAN_TOL:
        raise DensityError("lower-right block is not 1 - conj(rho_sp)")
    if np.linalg.norm(q[n:, :n] + kappa.conj()) > HERMITIAN_TOL:
        raise DensityError("lower-left block is not -conj(kappa)")
    ev = np.linalg.eigvalsh(q)
    if ev.min() < -SPECTRUM_TOL or ev.max() > 1 + SPECTRUM_TOL:
        raise DensityError(f"rho_qsp spectrum [{ev.min():.3g}, {ev.max():.3g}] leaves [0, 1]")


def _as_sp(x) -> np.ndarray:
    if isinstance(x, (FockState, MixedState)):
        return sp_matrix(x)
    x = np.asarray(x, dtype=complex)
    check_sp_matrix(x)
    return x


def _as_qsp(x) -> np.ndarray:
    if isinstance(x, (FockState, MixedState)):
        return qsp_matrix(x)
    x = np.asarray(x, dtype=complex)
    check_qsp_matrix(x)
    return x


def qsp_spectrum(x) -> np.ndarray:
    """Paired eigenvalues ``f_nu`` (the lower member of each pair), descending.

    Eigenvalues are sorted, the k-th largest is paired with the k-th smallest,
    and each pair is symmetrized to ``(f, 1 - f)`` before reporting ``f``.
    """
    q = _as_qsp(x)
    n = q.shape[0] // 2
    ev = np.sort(np.clip(np.linalg.eigvalsh(q), 0.0, 1.0))
    low, high = ev[:n], ev[::-1][:n]
    f = 0.5 * (low + 1.0 - high)
    return np.sort(np.clip(f, 0.0, 0.5))[::-1]


# --------------------------------------------------------------------------
# entropies
# --------------------------------------------------------------------------

def basis_occupations(state: StateLike, basis=None) -> np.ndarray:
    """``<a†_nu a_nu>`` in the given quasiparticle basis (computational by default).

    ``basis`` is a ``BogoliubovMap``, a ``2n x 2n`` unitary ``W`` whose first
    ``n`` columns hold the quasiparticle modes, or an ``n x n`` unitary whose
    columns are single-particle orbitals.
    """
    if basis is None:
        return np.clip(np.real(np.diag(sp_matrix(state))), 0.0, 1.0)
    w = np.asarray(getattr(basis, "W", basis), dtype=complex)
    q = qsp_matrix(state)
    n = q.shape[0] // 2
    if w.shape == (n, n):
        w = np.block([[w, np.zeros((n, n))], [np.zeros((n, n)), w.conj()]])
    occ = np.real(np.einsum("ai,ab,bi->i", w[:, :n].conj(), q, w[:, :n]))
    return np.clip(occ, 0.0, 1.0)


def entropy_sc(state: StateLike, basis=None) -> float:
    """Sum of single-level entropies ``sum_j h(p_j)`` in a chosen basis."""
    return float(np.sum(binary_entropy(basis_occupations(state, basis))))


def entropy_sp(x) -> float:
    """``tr h(rho_sp)``: the minimum of ``entropy_sc`` over one-body bases."""
    ev = np.clip(np.linalg.eigvalsh(_as_sp(x)), 0.0, 1.0)
    return float(np.sum(binary_entropy(ev)))


def entropy_qsp(x) -> float:
    """``-tr' rho_qsp log2 rho_qsp = sum_nu h(f_nu)``."""
    return float(np.sum(binary_entropy(qsp_spectrum(x))))


def entropy_quadratic(x) -> float:
    """Quadratic entropy ``4 tr[rho_sp (1 - rho_sp) - kappa† kappa]``.

    Cross-checked against ``4 sum_nu f_nu (1 - f_nu)``.
    """
    q = _as_qsp(x)
    rho_sp, kappa = split_qsp(q)
    n = rho_sp.shape[0]
    by_trace = 4.0 * np.trace(rho_sp @ (np.eye(n) - rho_sp) - kappa.conj().T @ kappa).real
    f = qsp_spectrum(q)
    by_spectrum = 4.0 * float(np.sum(f * (1.0 - f)))
    if abs(by_trace - by_spectrum) > 1e-10:
        raise DensityError(f"quadratic entropy mismatch: trace {by_trace!r} vs spectrum {by_spectrum!r}")
    return float(by_trace)


def extended_sp(rho_sp: np.ndarray) -> np.ndarray:
    n = rho_sp.shape[0]
    zero = np.zeros((n, n), dtype=complex)
    return np.block([[rho_sp, zero], [zero, np.eye(n) - rho_sp]])


def hierarchy_spectra(x):
    """Decreasing spectra of the diagonal extended, extended and generalized matrices."""
    q = _as_qsp(x)
    rho_sp, _ = split_qsp(q)
    ext = extended_sp(rho_sp)
    diag = np.sort(np.clip(np.real(np.diag(ext)), 0, 1))[::-1]
    sp = np.sort(np.clip(np.linalg.eigvalsh(ext), 0, 1))[::-1]
    qsp = np.sort(np.clip(np.linalg.eigvalsh(q), 0, 1))[::-1]
    return {"diagonal": diag, "sp": sp, "qsp": qsp}


def entropy_generalized(x, f="binary", variant: str = "qsp") -> float:
    """``S_f = tr f(M)`` for ``M`` the diagonal, extended-sp or generalized matrix."""
    f = entropy_function(f)
    spectra = hierarchy_spectra(x)
    try:
        return f.trace(spectra[variant])
    except KeyError:
        raise ValueError(f"variant must be one of {sorted(spectra)}, got {variant!r}")


@dataclass
class MajorizationResult:
    holds: bool
    partial_sums: dict
    margin: float


def majorization_chain(x, tol: float = 1e-10) -> MajorizationResult:
    """Check ``diag(ext_sp) < ext_sp < rho_qsp`` in the majorization order."""
    spectra = hierarchy_spectra(x)
    sums = {k: np.cumsum(v) for k, v in spectra.items()}
    gaps = np.concatenate([sums["sp"] - sums["diagonal"], sums["qsp"] - sums["sp"]])
    totals = [s[-1] for s in sums.values()]
    margin = float(min(gaps.min(), -np.ptp(totals)))
    return MajorizationResult(holds=margin >= -tol, partial_sums=sums, margin=margin)
