"""Closed-form entanglement for four single-particle levels.

Every definite-parity state of four modes is written on eight basis vectors
``e_1..e_4, h_1..h_4`` with coordinates ``(alpha, conj(beta))``:

odd parity
    ``e_i = c†_i |0>``, ``h_i = c_i |full>``
even parity
    ``e_1 = |0>``, ``e_j = c†_j c†_1 |0>``, ``h_1 = -|full>``, ``h_j = c_1 c_j |full>``

where ``|full> = c†_1 c†_2 c†_3 c†_4 |0>``. In these coordinates the
dualization operator is the block swap ``[[0, I], [I, 0]]`` for both
parities, so everything downstream of ``from_fock``/``to_fock`` is
parity-agnostic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg as sla

from . import densities
from .bogoliubov import (
    BogoliubovMap,
    apply_map,
    compose,
    diagonalize_qsp,
    particle_hole,
    to_quasiparticle_frame,
)
from .densities import binary_entropy
from .fock import (
    EVEN,
    MIXED,
    ODD,
    FockState,
    MixedState,
    annihilation_matrix,
    creation_matrix,
    parity_mask,
    parity_operator,
    popcounts,
    require_definite_parity,
    require_normalized,
)

N_MODES = 4
RANK_CUTOFF = 1e-10


class QuartetError(ValueError):
    pass


@lru_cache(maxsize=None)
def special_basis(parity: str) -> np.ndarray:
    """``16 x 8`` matrix whose columns are ``e_1..e_4, h_1..h_4``."""
    n = N_MODES
    vac = FockState.vacuum(n).amplitudes
    full = FockState.full(n).amplitudes
    c = [None] + [annihilation_matrix(n, j) for j in range(1, n + 1)]
    cd = [None] + [creation_matrix(n, j) for j in range(1, n + 1)]
    if parity == ODD:
        e = [cd[i] @ vac for i in range(1, 5)]
        h = [c[i] @ full for i in range(1, 5)]
    elif parity == EVEN:
        e = [vac] + [cd[j] @ (cd[1] @ vac) for j in range(2, 5)]
        h = [-full] + [c[1] @ (c[j] @ full) for j in range(2, 5)]
    else:
        raise QuartetError(f"parity must be 'even' or 'odd', got {parity!r}")
    basis = np.array(e + h).T
    basis.setflags(write=False)
    return basis


DUAL = np.block([[np.zeros((4, 4)), np.eye(4)], [np.eye(4), np.zeros((4, 4))]])


@lru_cache(maxsize=None)
def dualization_matrix() -> np.ndarray:
    """``16 x 16`` Fock matrix of the dualization operator on both sectors."""
    t = sum(special_basis(p) @ DUAL @ special_basis(p).T for p in (ODD, EVEN))
    t.setflags(write=False)
    return t


@dataclass(frozen=True, eq=False)
class QuartetState:
    parity: str
    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        if self.parity not in (ODD, EVEN):
            raise QuartetError(f"parity must be 'even' or 'odd', got {self.parity!r}")
        a = np.array(self.alpha, dtype=complex).reshape(4)
        b = np.array(self.beta, dtype=complex).reshape(4)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.alpha, self.alpha).real + np.vdot(self.beta, self.beta).real)

    @property
    def coordinates(self) -> np.ndarray:
        """Coefficients on ``(e, h)``: ``(alpha, conj(beta))``."""
        return np.concatenate([self.alpha, self.beta.conj()])

    @classmethod
    def from_coordinates(cls, parity: str, y) -> "QuartetState":
        y = np.asarray(y, dtype=complex)
        return cls(parity, y[:4], y[4:].conj())

    def to_fock(self) -> FockState:
        return FockState(N_MODES, special_basis(self.parity) @ self.coordinates)


def from_fock(state: FockState) -> QuartetState:
    """Read ``(alpha, beta)`` off a four-mode definite-parity state."""
    if state.n != N_MODES:
        raise QuartetError(f"quartet states need n = 4 modes, got {state.n}")
    parity = require_definite_parity(state)
    y = special_basis(parity).T @ state.amplitudes
    return QuartetState.from_coordinates(parity, y)


def to_fock(q: QuartetState) -> FockState:
    return q.to_fock()


def _as_quartet(x) -> QuartetState:
    if isinstance(x, QuartetState):
        return x
    if isinstance(x, FockState):
        return from_fock(x)
    raise TypeError(f"expected QuartetState or FockState, got {type(x).__name__}")


# --------------------------------------------------------------------------
# pure states
# --------------------------------------------------------------------------

def pure_concurrence(x, cross_check: bool = True) -> float:
    """``C = 2 |beta† alpha|``; optionally verified against ``sqrt(S_2(rho_qsp) / 4)``."""
    q = _as_quartet(x)
    if abs(q.norm2 - 1.0) > 1e-12:
        raise QuartetError(f"state is not normalized (|alpha|^2 + |beta|^2 = {q.norm2:.15g})")
    conc = 2.0 * abs(np.vdot(q.beta, q.alpha))
    if cross_check:
        s2 = densities.entropy_quadratic(q.to_fock())
        other = math.sqrt(max(s2, 0.0) / 4.0)
        # the square root amplifies rounding near C = 0, so squares may agree instead
        if abs(conc - other) > 1e-9 and abs(conc * conc - s2 / 4.0) > 1e-12:
            raise QuartetError(f"concurrence {conc!r} disagrees with quadratic-entropy value {other!r}")
    return float(min(conc, 1.0))


def qsp_eigenvalues_from_concurrence(conc: float):
    root = math.sqrt(max(0.0, 1.0 - conc * conc))
    return 0.5 * (1.0 + root), 0.5 * (1.0 - root)


def one_minus_c2(x) -> float:
    """``1 - C^2`` without cancellation: ``(|a|^2 - |b|^2)^2 + 2 sum_ij |a_i b_j - a_j b_i|^2``."""
    q = _as_quartet(x)
    a, b = q.alpha, q.beta
    wedge = np.outer(a, b) - np.outer(b, a)
    na, nb = np.vdot(a, a).real, np.vdot(b, b).real
    return float((na - nb) ** 2 + 2.0 * np.sum(np.abs(wedge) ** 2))


def qsp_eigenvalues_analytic(x):
    """``(f_plus, f_minus) = ((1 ± sqrt(1 - C^2)) / 2)``, each four-fold degenerate."""
    root = math.sqrt(max(0.0, one_minus_c2(x)))
    return 0.5 * (1.0 + root), 0.5 * (1.0 - root)


def entropy_from_concurrence(conc: float) -> float:
    """``4 h((1 + sqrt(1 - C^2)) / 2)``."""
    return 4.0 * binary_entropy(qsp_eigenvalues_from_concurrence(conc)[0])


def entropy_qsp_analytic(x) -> float:
    return 4.0 * binary_entropy(qsp_eigenvalues_analytic(x)[0])


def dual_state(state: FockState) -> FockState:
    """Partner state ``T |psi>*`` with conjugation in the occupation basis."""
    if state.n != N_MODES:
        raise QuartetError("dualization is defined for n = 4 only")
    require_definite_parity(state)
    return FockState(N_MODES, dualization_matrix() @ state.amplitudes.conj())


@dataclass
class NormalForm:
    alpha: float
    beta: complex
    map: BogoliubovMap
    parity: str

    def state(self) -> QuartetState:
        """Normal-form coefficients in the quasiparticle frame."""
        return QuartetState(self.parity, [self.alpha, 0, 0, 0], [self.beta, 0, 0, 0])

    def reconstruct(self) -> FockState:
        """Map the normal form back to the original frame."""
        return apply_map(self.state().to_fock(), self.map)


def _unitary_with_first_column(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    m = np.eye(4, dtype=complex)
    m[:, 0] = v
    k = int(np.argmax(np.abs(v)))
    if k != 0:
        m[:, k] = np.eye(4)[:, 0]
    qmat, r = np.linalg.qr(m)
    return qmat * (r[0, 0] / abs(r[0, 0]))


def normal_form(x, c_one_tol: float = 1e-9) -> NormalForm:
    """Bring a four-mode state to ``alpha' e_1 + conj(beta') h_1`` in a quasiparticle frame.

    Returns ``alpha' >= 0`` real, ``beta'`` complex with ``|alpha'| >= |beta'|``
    and the map from the frame back to the original operators (``apply_map``
    of the normal-form state reproduces the input up to a global phase).
    """
    q = _as_quartet(x)
    state = q.to_fock()
    require_normalized(state)
    conc = pure_concurrence(q, cross_check=False)
    if conc > 1.0 - c_one_tol and q.parity == EVEN:
        # reuse the odd construction through a particle-hole swap of mode 1
        odd = normal_form(particle_hole(state, [1]), c_one_tol)
        ph = BogoliubovMap.particle_hole(N_MODES, [1])
        return NormalForm(odd.alpha, odd.beta, compose(ph, compose(odd.map, ph)), EVEN)
    if conc > 1.0 - c_one_tol:
        # C = 1: rotating e_1 onto alpha aligns beta as well
        u = _unitary_with_first_column(q.alpha if np.linalg.norm(q.alpha) > 0 else q.beta)
        bmap = BogoliubovMap(u, np.zeros((4, 4)))
    else:
        bmap, _ = diagonalize_qsp(densities.qsp_matrix(state))
        if q.parity == ODD:
            U, V = bmap.U.copy(), bmap.V.copy()
            U[:, 0], V[:, 0] = bmap.V[:, 0], bmap.U[:, 0]
            bmap = BogoliubovMap(U, V)
    framed = from_fock(to_quasiparticle_frame(state, bmap))
    a1, b1 = framed.alpha[0], framed.beta[0]
    if abs(a1) < abs(b1) - 1e-8:
        raise QuartetError("normal form ordering failed: |alpha'| < |beta'|")
    leak = np.linalg.norm(framed.alpha[1:]) + np.linalg.norm(framed.beta[1:])
    if leak > 1e-7:
        raise QuartetError(f"state did not reduce to two terms (residual {leak:.3g})")
    phase = abs(a1) / a1 if abs(a1) > 0 else 1.0
    # global phase g multiplies alpha by g and conj(beta) by g
    alpha_p = float(abs(a1))
    beta_p = complex(np.conj(np.conj(b1) * phase))
    return NormalForm(alpha_p, beta_p, bmap, q.parity)


# --------------------------------------------------------------------------
# linear algebra helpers
# --------------------------------------------------------------------------

def takagi(c: np.ndarray, rel_tol: float = 1e-10):
    """Factor a complex symmetric matrix as ``V diag(d) V^T``, ``d`` descending.

    Uses the singular value decomposition ``C = L diag(d) R†``; inside each
    block of equal ``d`` the symmetric unitary ``L_B† conj(R_B)`` is square-rooted.
    """
    c = np.asarray(c, dtype=complex)
    if np.linalg.norm(c - c.T) > 1e-10 * max(1.0, np.linalg.norm(c)):
        raise QuartetError("Takagi factorization needs a symmetric matrix")
    left, d, rh = np.linalg.svd(c)
    right = rh.conj().T
    v = np.zeros_like(left)
    scale = max(d[0] if d.size else 0.0, 1e-300)
    start = 0
    while start < d.size:
        stop = start + 1
        while stop < d.size and d[start] - d[stop] <= rel_tol * scale:
            stop += 1
        blk = slice(start, stop)
        if d[start] <= rel_tol * scale:
            v[:, blk] = left[:, blk]
        else:
            m = left[:, blk].conj().T @ right[:, blk].conj()
            m = 0.5 * (m + m.T)
            v[:, blk] = left[:, blk] @ sla.sqrtm(m)
        start = stop
    return d, v


def close_polygon(lengths, target: complex) -> np.ndarray:
    """Angles ``phi`` with ``sum_k lengths[k] exp(i phi_k) = target``.

    Requires ``|target|`` to lie between the shortest and longest resultant
    of the chain. Lengths are consumed largest-first, each step fixing one
    side of a triangle whose third side is the remaining chain.
    """
    lengths = np.asarray(lengths, dtype=float)
    order = np.argsort(lengths)[::-1]
    angles = np.zeros(lengths.size)
    t = complex(target)
    for pos, k in enumerate(order):
        rest = lengths[order[pos + 1:]]
        ell = lengths[k]
        if rest.size == 0:
            angles[k] = np.angle(t) if abs(t) > 0 else 0.0
            break
        rest_hi = float(rest.sum())
        rest_lo = max(0.0, float(rest.max() - (rest.sum() - rest.max())))
        rad = abs(t)
        s = min(max(abs(rad - ell), rest_lo), rest_hi)
        s = min(s, rad + ell)
        if rad == 0:
            angles[k] = 0.0
        else:
            # law of cosines for the angle between t and the side of length ell
            cos_a = (rad**2 + ell**2 - s**2) / (2 * rad * ell) if ell > 0 else 1.0
            angles[k] = np.angle(t) + math.acos(min(1.0, max(-1.0, cos_a)))
        t = t - ell * np.exp(1j * angles[k])
    return angles


def _sign_rows(r: int) -> tuple[int, np.ndarray]:
    """Number of components and the +-1 pattern used for rank ``r``."""
    eight = np.array([
        [0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 1, 1, 1, 1],
        [0, 0, 1, 1, 0, 0, 1, 1],
        [0, 0, 1, 1, 1, 1, 0, 0],
        [0, 1, 0, 1, 0, 1, 0, 1],
        [0, 1, 0, 1, 1, 0, 1, 0],
        [0, 1, 1, 0, 0, 1, 1, 0],
        [0, 1, 1, 0, 1, 0, 0, 1],
    ]).T  # row j, column k
    four = np.array([[0, 0, 0, 0], [0, 0, 1, 1], [0, 1, 0, 1], [0, 1, 1, 0]]).T
    two = np.array([[0, 0], [0, 1]]).T
    if r <= 2:
        mu = two
    elif r <= 4:
        mu = four
    else:
        mu = eight
    return mu.shape[0], np.where(mu[:, :r] == 1, -1.0, 1.0)


def _zero_diagonal_rotation(m: np.ndarray, tol: float = 1e-14) -> np.ndarray:
    """Real orthogonal ``O`` with ``diag(O m O^T) = 0`` for traceless symmetric ``m``."""
    m = np.array(m, dtype=float)
    size = m.shape[0]
    m -= np.eye(size) * np.trace(m) / size
    scale = max(np.linalg.norm(m), 1.0)
    o = np.eye(size)
    for _ in range(size):
        diag = np.diag(m)
        if np.max(np.abs(diag)) <= tol * scale:
            break
        i = int(np.argmax(diag))
        j = int(np.argmin(diag))
        a, b, cc = m[i, i], m[i, j], m[j, j]
        # root of a + 2 b t + cc t^2 in the stable form, a > 0 >= cc
        disc = max(b * b - a * cc, 0.0)
        den = -b - math.copysign(math.sqrt(disc), b if b != 0 else 1.0)
        t = a / den if den != 0 else 0.0
        cs, sn = 1 / math.sqrt(1 + t * t), t / math.sqrt(1 + t * t)
        g = np.eye(size)
        g[i, i], g[i, j], g[j, i], g[j, j] = cs, sn, -sn, cs
        m = g @ m @ g.T
        m[i, i] = 0.0
        o = g @ o
    return o


# --------------------------------------------------------------------------
# mixed states
# --------------------------------------------------------------------------

def _as_mixed(rho) -> MixedState:
    if isinstance(rho, MixedState):
        return rho
    if isinstance(rho, FockState):
        return MixedState.pure(rho)
    return MixedState(N_MODES, rho)


@dataclass
class Spectral:
    """Eigen-data of a single-sector four-mode density matrix in (e, h) coordinates."""

    parity: str
    weights: np.ndarray  # eigenvalues, descending
    coords: np.ndarray  # 8 x r eigenvectors
    sector: np.ndarray  # 8 x 8 density matrix


def _spectral(rho) -> Spectral:
    rho = _as_mixed(rho)
    if rho.n != N_MODES:
        raise QuartetError(f"mixed quartet states need n = 4, got {rho.n}")
    parity = rho.parity
    if parity == MIXED:
        raise QuartetError("density matrix mixes parity sectors; split it with parity_split first")
    basis = special_basis(parity)
    sector = basis.T @ rho.matrix @ basis
    vals, vecs = np.linalg.eigh(sector)
    order = np.argsort(vals)[::-1]
    vals, vecs = vals[order], vecs[:, order]
    keep = vals > RANK_CUTOFF
    return Spectral(parity, vals[keep], vecs[:, keep], sector)


def concurrence_matrix(rho) -> np.ndarray:
    """``C_kl = sqrt(lambda_k lambda_l) <dual(psi_k)|psi_l>`` over the eigenvectors."""
    sp = _spectral(rho)
    y = sp.coords * np.sqrt(sp.weights)[None, :]
    return y.T @ DUAL @ y


def r_matrix_values(rho) -> np.ndarray:
    """Eigenvalues of ``R = sqrt(rho^1/2 T rho* T rho^1/2)``, descending.

    ``R^2 = A A†`` with ``A = rho^1/2 T conj(rho^1/2)``, so these are the
    singular values of ``A``.
    """
    sp = _spectral(rho)
    vals, vecs = np.linalg.eigh(sp.sector)
    root = (vecs * np.sqrt(np.clip(vals, 0, None))) @ vecs.conj().T
    a = root @ DUAL @ root.conj()
    return np.linalg.svd(a, compute_uv=False)


@dataclass
class ConcurrenceReport:
    d: np.ndarray
    concurrence: float
    separable: bool
    parity: str
    d_r_matrix: np.ndarray | None = None
    decomposition: list | None = None
    path: str | None = None
    notes: dict = field(default_factory=dict)


def mixed_concurrence(rho, with_decomposition: bool = False, agreement_tol: float = 1e-8) -> ConcurrenceReport:
    """Convex-roof concurrence ``max(d_1 - sum_{k>=2} d_k, 0)`` of a one-sector state."""
    sp = _spectral(rho)
    c = concurrence_matrix(rho)
    if np.linalg.norm(c - c.T) > 1e-10:
        raise QuartetError("concurrence matrix is not symmetric")
    d = np.linalg.svd(c, compute_uv=False)
    d_r = r_matrix_values(rho)
    padded = np.concatenate([d, np.zeros(8 - d.size)])
    gap = float(np.max(np.abs(padded - d_r)))
    if gap > agreement_tol:
        raise QuartetError(f"d_k from C and from R disagree by {gap:.3g}")
    conc = float(max(d[0] - d[1:].sum(), 0.0)) if d.size else 0.0
    report = ConcurrenceReport(
        d=d, concurrence=conc, separable=bool(d[0] <= d[1:].sum()) if d.size > 1 else bool(d[0] <= 0),
        parity=sp.parity, d_r_matrix=d_r, notes={"rank": int(sp.weights.size), "d_agreement": gap},
    )
    if with_decomposition:
        decomposition, path = optimal_decomposition(rho, return_path=True)
        report.decomposition, report.path = decomposition, path
    return report


def _bilinear_diag(vectors: np.ndarray) -> np.ndarray:
    """``v_j^T T v_j`` for each column."""
    return np.einsum("aj,ab,bj->j", vectors, DUAL, vectors)


def _components(w: np.ndarray, parity: str, cutoff: float = 1e-14):
    basis = special_basis(parity)
    out = []
    for col in w.T:
        p = float(np.vdot(col, col).real)
        if p > cutoff:
            out.append((p, FockState(N_MODES, basis @ (col / math.sqrt(p)))))
    return out


def optimal_decomposition(rho, return_path: bool = False, tol: float = 1e-8):
    """Pure-state decomposition attaining the convex-roof concurrence.

    Separable input yields ``2``, ``4`` or ``8`` components with vanishing
    concurrence; entangled input yields components that all carry ``C(rho)``.
    """
    sp = _spectral(rho)
    r = sp.weights.size
    y = sp.coords * np.sqrt(sp.weights)[None, :]
    if r == 1:
        out = _components(y, sp.parity)
        return (out, "rank-one") if return_path else out
    c = y.T @ DUAL @ y
    d, v = takagi(c)
    x = y @ v.conj()  # x_k^T T x_l = d_k delta_kl
    conc = d[0] - d[1:].sum()
    rows, signs = _sign_rows(r)
    if conc <= 0:
        phi = close_polygon(d[1:], -d[0])
        theta = np.concatenate([[0.0], 0.5 * phi])
        s = signs * np.exp(1j * theta)[None, :] / math.sqrt(rows)
        w = x @ s.T
        path = "polygon-closure"
    else:
        theta = np.concatenate([[0.0], np.full(r - 1, 0.5 * math.pi)])
        s = signs * np.exp(1j * theta)[None, :] / math.sqrt(rows)
        w = x @ s.T
        path = "sign-pattern"
        p = np.einsum("aj,aj->j", w.conj(), w).real
        per = np.abs(_bilinear_diag(w)) / np.where(p > 1e-300, p, 1.0)
        if np.max(np.abs(per[p > 1e-14] - conc)) > tol:
            w = _balanced_entangled(x, d, conc)
            path = "orthogonal-balancing"
    out = _components(w, sp.parity)
    return (out, path) if return_path else out


def _balanced_entangled(x: np.ndarray, d: np.ndarray, conc: float) -> np.ndarray:
    """Rotate ``(x_1, i x_2, ..., i x_r)`` so every component has concurrence ``conc``."""
    r = d.size
    phases = np.concatenate([[1.0], np.full(r - 1, 1j)])
    yv = x * phases[None, :]
    gram = yv.conj().T @ yv
    target = np.diag(np.concatenate([[d[0]], -d[1:]]))
    o = _zero_diagonal_rotation(target - conc * gram.real)
    return yv @ o.T


def decomposition_matrix(decomposition) -> np.ndarray:
    """``sum_j p_j |phi_j><phi_j|`` on the full Fock space."""
    return sum(p * np.outer(s.amplitudes, s.amplitudes.conj()) for p, s in decomposition)


def formation_entanglement(rho) -> float:
    """Convex roof of ``S_qsp``: ``4 h((1 + sqrt(1 - C(rho)^2)) / 2)``."""
    return entropy_from_concurrence(mixed_concurrence(rho).concurrence)


@dataclass
class ParitySplit:
    p_even: float
    rho_even: MixedState | None
    p_odd: float
    rho_odd: MixedState | None

    @property
    def entanglement(self) -> float:
        total = 0.0
        for p, part in ((self.p_even, self.rho_even), (self.p_odd, self.rho_odd)):
            if part is not None:
                total += p * formation_entanglement(part)
        return total

    @property
    def concurrence(self) -> float:
        total = 0.0
        for p, part in ((self.p_even, self.rho_even), (self.p_odd, self.rho_odd)):
            if part is not None:
                total += p * mixed_concurrence(part).concurrence
        return total


def parity_split(rho, cutoff: float = 1e-12) -> ParitySplit:
    """Write ``rho = p_+ rho_+ + p_- rho_-`` with ``rho_± = (1 ± P) rho / (2 p_±)``."""
    rho = _as_mixed(rho)
    par = parity_operator(rho.n)
    parts = []
    for sign in (+1, -1):
        proj = 0.5 * (1 + sign * par)
        block = proj[:, None] * rho.matrix
        p = float(np.trace(block).real)
        parts += [p, MixedState(rho.n, block / p) if p > cutoff else None]
        if parts[-1] is None:
            parts[-2] = 0.0
    return ParitySplit(*parts)


# --------------------------------------------------------------------------
# reference states
# --------------------------------------------------------------------------

def maximally_entangled(parity: str = ODD) -> FockState:
    """``(c†_1 + c†_2 c†_3 c†_4)|0>/sqrt2`` (odd) or ``(|0> + |full>)/sqrt2`` (even)."""
    if parity == ODD:
        return (FockState.basis(4, [1]) + FockState.basis(4, [2, 3, 4])).normalized()
    return (FockState.vacuum(4) + FockState.full(4)).normalized()


def two_fermion_bell() -> FockState:
    """``(c†_1 c†_2 + c†_3 c†_4)|0>/sqrt2``."""
    return (FockState.basis(4, [1, 2]) + FockState.basis(4, [3, 4])).normalized()


def two_fermion_projector() -> np.ndarray:
    return np.diag((popcounts(4) == 2).astype(float))


def werner_state(p: float, state: FockState | None = None, parity: str | None = None) -> MixedState:
    """``p |psi><psi| + (1 - p) I_8 / 8`` inside the parity sector of ``psi``."""
    if state is None:
        state = maximally_entangled(parity or ODD)
    par = require_definite_parity(state)
    noise = np.diag(parity_mask(4, par).astype(float)) / 8.0
    vec = state.amplitudes
    return MixedState(4, p * np.outer(vec, vec.conj()) + (1 - p) * noise)


def two_fermion_werner(p: float, state: FockState | None = None) -> MixedState:
    """``p |psi><psi| + (1 - p) I_6 / 6`` on the two-particle subspace."""
    state = two_fermion_bell() if state is None else state
    vec = state.amplitudes
    return MixedState(4, p * np.outer(vec, vec.conj()) + (1 - p) * two_fermion_projector() / 6.0)
