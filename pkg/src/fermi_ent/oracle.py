"""Brute-force verifiers for the closed forms.

Each search samples random frames (one-body unitaries, Bogoliubov maps or
decomposition matrices), keeps every running record, and refines each record
by cyclic line searches over elementary rotation angles. Refining every
record, not just the final best one, makes the returned minimum monotone in
both ``samples`` and ``refine_steps`` for a fixed seed.

Worker count is read from ``FERMI_ENT_THREADS`` (default 1). Each worker owns
a generator spawned from the budget seed and results are merged by minimum,
so output is deterministic given the seed and the worker count.
"""

from __future__ import annotations

import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import densities, quartet
from .bogoliubov import BogoliubovMap
from .fock import FockError, FockState, MixedState, expectation, operator_word

THREADS_ENV = "FERMI_ENT_THREADS"
CHUNK = 512
GRID_POINTS = 12
GOLDEN_ITERS = 40
RAY_ITERS = 24
MAX_COMPONENTS = 8
CG_RESTART = 20
MIN_GAIN = 1e-14  # smaller line-search gains count as no progress
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class SearchBudget:
    """Sampling and refinement effort of one search.

    ``refine_steps`` counts single line searches; zero disables refinement.
    """

    samples: int = 5000
    refine_steps: int = 300
    seed: int = 0
    tolerance: float = 1e-3

    def __post_init__(self):
        if int(self.samples) < 1:
            raise OracleError(f"samples must be positive, got {self.samples}")
        if int(self.refine_steps) < 0:
            raise OracleError(f"refine_steps must be non-negative, got {self.refine_steps}")
        if not 0 <= int(self.seed) < 2**64:
            raise OracleError(f"seed must fit in 64 bits, got {self.seed}")
        if not self.tolerance > 0:
            raise OracleError(f"tolerance must be positive, got {self.tolerance}")


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        count = int(raw)
    except ValueError:
        raise OracleError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    return max(1, count)


# --------------------------------------------------------------------------
# scalar helpers
# --------------------------------------------------------------------------

def _h(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    q = 1.0 - p
    return -(p * math.log2(p) + q * math.log2(q))


def _golden(fun: Callable[[float], float], lo: float, hi: float, iters: int = GOLDEN_ITERS) -> tuple[float, float]:
    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    f1, f2 = fun(x1), fun(x2)
    for _ in range(iters):
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INVPHI * (hi - lo)
            f1 = fun(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INVPHI * (hi - lo)
            f2 = fun(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def _line_minimize(fun: Callable[[float], float], current: float) -> tuple[float, float]:
    """Best angle in ``[-pi/2, pi/2)`` for a ``pi``-periodic ``fun``.

    A coarse grid picks the basin, golden-section polishes it. Returns
    ``(0, current)`` unless the gain exceeds ``MIN_GAIN``.
    """
    step = math.pi / GRID_POINTS
    grid = [-0.5 * math.pi + k * step for k in range(GRID_POINTS)]
    vals = [fun(t) for t in grid]
    k = int(np.argmin(vals))
    best_t, best_f = _golden(fun, grid[k] - step, grid[k] + step)
    if vals[k] < best_f:
        best_t, best_f = grid[k], vals[k]
    if best_f < current - MIN_GAIN:
        return best_t, best_f
    return 0.0, current


def _ray_minimize(fun: Callable[[float], float], current: float, t0: float) -> tuple[float, float]:
    """Minimize ``fun`` on ``t > 0``: bracket by doubling or quartering, then golden-section."""
    t, ft = t0, fun(t0)
    if ft >= current:
        for _ in range(50):
            t *= 0.25
            ft = fun(t)
            if ft < current:
                break
        else:
            return 0.0, current
        lo, hi = 0.0, 2.0 * t
    else:
        while t < 1e3:
            f2 = fun(2.0 * t)
            if f2 >= ft:
                break
            t, ft = 2.0 * t, f2
        lo, hi = 0.5 * t, 2.0 * t
    best_t, best_f = _golden(fun, lo, hi, RAY_ITERS)
    if ft < best_f:
        best_t, best_f = t, ft
    if best_f < current - MIN_GAIN:
        return best_t, best_f
    return 0.0, current


# --------------------------------------------------------------------------
# sampling driver
# --------------------------------------------------------------------------

def _shares(total: int, workers: int) -> list[int]:
    base, extra = divmod(total, workers)
    return [base + (1 if w < extra else 0) for w in range(workers)]


def _run_worker(seq: np.random.SeedSequence, count: int, draw, score, refine, steps: int):
    """Records of one sample stream, each refined; returns ``(value, candidate)``."""
    rng = np.random.default_rng(seq)
    records = []
    best = math.inf
    done = 0
    while done < count:
        # whole chunks keep sample i independent of the total count
        k = min(CHUNK, count - done)
        batch = draw(rng, CHUNK)[:k]
        values = score(batch)
        for i in range(k):
            if values[i] < best:
                best = float(values[i])
                records.append((best, batch[i]))
        done += k
    result = (math.inf, None)
    for value, cand in records:
        if steps:
            value, cand = refine(cand, steps)
        if value < result[0]:
            result = (value, cand)
    return result


def _search(budget: SearchBudget, draw, score, refine):
    workers = worker_count()
    seqs = np.random.SeedSequence(int(budget.seed)).spawn(workers)
    counts = _shares(int(budget.samples), workers)
    jobs = [(s, c) for s, c in zip(seqs, counts) if c > 0]
    steps = int(budget.refine_steps)
    if len(jobs) == 1:
        results = [_run_worker(jobs[0][0], jobs[0][1], draw, score, refine, steps)]
    else:
        with ThreadPoolExecutor(max_workers=len(jobs)) as pool:
            results = list(pool.map(lambda j: _run_worker(j[0], j[1], draw, score, refine, steps), jobs))
    return min(results, key=lambda r: r[0])


# --------------------------------------------------------------------------
# frames
# --------------------------------------------------------------------------

def haar_unitaries(rng: np.random.Generator, count: int, n: int, cols: int | None = None) -> np.ndarray:
    """Stack of Haar unitaries (or isometries with ``cols`` columns) via phase-fixed QR."""
    cols = n if cols is None else cols
    z = (rng.standard_normal((count, n, cols)) + 1j * rng.standard_normal((count, n, cols))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=1, axis2=2)
    ph = d / np.where(np.abs(d) > 0, np.abs(d), 1.0)
    return q * ph[:, None, :]


def random_bogoliubov_stack(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    """Stack of ``W = exp(-i O)`` for Hermitian quadratic generators with N(0,1) entries."""
    a = rng.standard_normal((count, n, n)) + 1j * rng.standard_normal((count, n, n))
    o11 = 0.5 * (a + np.conj(np.swapaxes(a, 1, 2)))
    b = rng.standard_normal((count, n, n)) + 1j * rng.standard_normal((count, n, n))
    o20 = (b - np.swapaxes(b, 1, 2)) / math.sqrt(2)
    gen = np.empty((count, 2 * n, 2 * n), dtype=complex)
    gen[:, :n, :n] = o11
    gen[:, :n, n:] = np.conj(np.swapaxes(o20, 1, 2))
    gen[:, n:, :n] = o20
    gen[:, n:, n:] = -np.swapaxes(o11, 1, 2)
    vals, vecs = np.linalg.eigh(gen)
    return (vecs * np.exp(-1j * vals)[:, None, :]) @ np.conj(np.swapaxes(vecs, 1, 2))


def _elementary(n: int, kind: str, mu: int, nu: int, w: complex) -> np.ndarray:
    """Hermitian ``2n x 2n`` generator rotating mode ``mu`` into ``nu`` (``pp``) or ``c†_nu`` (``ph``)."""
    o11 = np.zeros((n, n), dtype=complex)
    o20 = np.zeros((n, n), dtype=complex)
    if kind == "pp":
        o11[mu, nu], o11[nu, mu] = w, np.conj(w)
    else:
        o20[mu, nu], o20[nu, mu] = w, -w
    return np.block([[o11, o20.conj().T], [o20, -o11.T]])


def _generators(n: int, kinds: Sequence[str], size: int):
    """Elementary generators with, per affected mode ``k``, its coupled index ``p`` and ``E[p, k]``."""
    out = []
    for kind in kinds:
        for mu in range(n):
            for nu in range(mu + 1, n):
                for w in (1.0, 1j):
                    e = _elementary(n, kind, mu, nu, w)
                    e = e[:size, :size]
                    links = []
                    for k in (mu, nu):
                        p = int(np.flatnonzero(e[:, k])[0])
                        links.append((k, p, complex(e[p, k])))
                    out.append((e, links))
    return out


def _rotation(e: np.ndarray, theta: float) -> np.ndarray:
    """``exp(-i theta e)`` for a generator with ``e^3 = e``."""
    return np.eye(e.shape[0]) + (math.cos(theta) - 1.0) * (e @ e) - 1j * math.sin(theta) * e


def _refine_frame(m: np.ndarray, frame: np.ndarray, gens, steps: int, n_modes: int):
    """Coordinate descent of ``sum_k h(diag(frame† m frame)_k)`` over the first modes.

    The occupation of an affected mode ``k`` along generator ``e`` is
    ``(A + B)/2 + (A - B)/2 cos 2t + Im(E_pk M_kp) sin 2t``.
    """
    mt = frame.conj().T @ m @ frame
    occ = np.real(np.diag(mt))[:n_modes]
    value = float(sum(_h(x) for x in occ))
    stale = 0
    for step in range(steps if gens else 0):
        e, links = gens[step % len(gens)]
        (k1, p1, e1), (k2, p2, e2) = links
        a1, b1, a2, b2 = mt[k1, k1].real, mt[p1, p1].real, mt[k2, k2].real, mt[p2, p2].real
        m1, d1, x1 = 0.5 * (a1 + b1), 0.5 * (a1 - b1), (e1 * mt[k1, p1]).imag
        m2, d2, x2 = 0.5 * (a2 + b2), 0.5 * (a2 - b2), (e2 * mt[k2, p2]).imag
        old = _h(a1) + _h(a2)

        def part(t, m1=m1, d1=d1, x1=x1, m2=m2, d2=d2, x2=x2):
            c2, s2 = math.cos(2 * t), math.sin(2 * t)
            return _h(m1 + d1 * c2 + x1 * s2) + _h(m2 + d2 * c2 + x2 * s2)

        theta, new = _line_minimize(part, old)
        if theta != 0.0:
            g = _rotation(e, theta)
            frame = frame @ g
            mt = g.conj().T @ mt @ g
            value = float(sum(_h(x) for x in np.real(np.diag(mt))[:n_modes]))
            stale = 0
        else:
            stale += 1
            if stale >= len(gens):
                break
    return value, frame


# --------------------------------------------------------------------------
# basis searches
# --------------------------------------------------------------------------

def min_entropy_over_sp_bases(state, budget: SearchBudget | None = None):
    """Smallest ``S_c`` over one-body bases found by sampling plus refinement.

    Returns
    -------
    value : float
        ``sum_j h(p_j)`` in the best basis found.
    best_unitary : ndarray
        ``n x n`` unitary whose columns are the basis orbitals.
    """
    budget = budget or SearchBudget()
    rho = densities.sp_matrix(state)
    n = rho.shape[0]
    gens = _generators(n, ["pp"], n)

    def draw(rng, k):
        return haar_unitaries(rng, k, n)

    def score(batch):
        occ = np.real(np.einsum("sai,ab,sbi->si", batch.conj(), rho, batch))
        return np.sum(densities.binary_entropy(occ), axis=1)

    def refine(u, steps):
        return _refine_frame(rho, u, gens, steps, n)

    value, best = _search(budget, draw, score, refine)
    return float(value), best


def min_entropy_over_qsp_bases(state, budget: SearchBudget | None = None):
    """Smallest ``S_c`` over quasiparticle bases found by sampling plus refinement.

    Returns
    -------
    value : float
    best_map : BogoliubovMap
        Map whose ``W`` columns are the best quasiparticle modes found.
    """
    budget = budget or SearchBudget()
    q = densities.qsp_matrix(state)
    n = q.shape[0] // 2
    gens = _generators(n, ["pp", "ph"], 2 * n)

    def draw(rng, k):
        return random_bogoliubov_stack(rng, k, n)

    def score(batch):
        cols = batch[:, :, :n]
        occ = np.real(np.einsum("sai,ab,sbi->si", cols.conj(), q, cols))
        return np.sum(densities.binary_entropy(occ), axis=1)

    def refine(w, steps):
        return _refine_frame(q, w, gens, steps, n)

    value, best = _search(budget, draw, score, refine)
    w = best
    return float(value), BogoliubovMap(w[:n, :n], w[:n, n:])


# --------------------------------------------------------------------------
# convex roof
# --------------------------------------------------------------------------

def _refine_rows(c: np.ndarray, u: np.ndarray, steps: int):
    """Descent of ``sum_j |(u c u^T)_jj|`` along one-parameter paths ``exp(-t K) u``.

    ``K`` is the anti-Hermitian gradient of a smoothed objective, with a
    Polak-Ribiere conjugate term restarted every ``CG_RESTART`` steps. Each
    step is a single golden-section search of the exact objective along ``t``.
    """
    rows = u.shape[0]
    a = u @ c @ u.T
    value = float(np.sum(np.abs(np.diag(a))))
    prev_grad = prev_dir = None
    t_last = None
    for step in range(steps):
        diag = np.diag(a)
        eps = max(value / (100.0 * rows), 1e-12)
        sgn = diag / np.sqrt(np.abs(diag) ** 2 + eps**2)
        grad = (2.0 * sgn[:, None] * np.conj(u @ c)) @ u.conj().T
        grad = grad - grad.conj().T
        direction = grad
        if prev_grad is not None and step % CG_RESTART:
            beta = np.real(np.vdot(grad, grad - prev_grad)) / np.real(np.vdot(prev_grad, prev_grad))
            direction = grad + max(beta, 0.0) * prev_dir
        lam, vecs = np.linalg.eigh(1j * direction)
        scale = float(np.max(np.abs(lam)))
        if scale < 1e-15:
            break
        b = vecs.conj().T @ u
        k = b @ c @ b.T

        def along(t, lam=lam, vecs=vecs, k=k):
            ve = vecs * np.exp(1j * lam * t)[None, :]
            return float(np.abs(((ve @ k) * ve).sum(axis=1)).sum())

        t, _ = _ray_minimize(along, value, t_last or 0.1 / scale)
        if t == 0.0:
            if direction is grad:
                break
            prev_grad = None
            continue
        t_last = t
        prev_grad, prev_dir = grad, direction
        g = (vecs * np.exp(1j * lam * t)[None, :]) @ vecs.conj().T
        u = g @ u
        a = u @ c @ u.T
        value = float(np.sum(np.abs(np.diag(a))))
    return value, u


def convex_roof_search(rho, budget: SearchBudget | None = None, components: int = MAX_COMPONENTS):
    """Smallest average pure concurrence over sampled decompositions of ``rho``.

    A matrix ``u`` with orthonormal columns (``components x r``) induces the
    decomposition ``w_j = sum_k u_jk y_k`` of the scaled eigenvectors ``y_k``,
    whose average concurrence is ``sum_j |(u C u^T)_jj|``.

    Returns
    -------
    value : float
    best_decomposition : list of (weight, FockState)
    """
    budget = budget or SearchBudget()
    sp = quartet._spectral(rho)
    r = sp.weights.size
    if components < r:
        raise OracleError(f"need at least {r} components for rank {r}")
    y = sp.coords * np.sqrt(sp.weights)[None, :]
    c = y.T @ quartet.DUAL @ y

    def draw(rng, k):
        return haar_unitaries(rng, k, components, r)

    def score(batch):
        a = np.einsum("sjk,kl,sjl->sj", batch, c, batch)
        return np.sum(np.abs(a), axis=1)

    def refine(u, steps):
        return _refine_rows(c, u, steps)

    value, best = _search(budget, draw, score, refine)
    decomposition = quartet._components(y @ best.T, sp.parity)
    return float(value), decomposition


def average_concurrence(decomposition) -> float:
    return float(sum(p * quartet.pure_concurrence(s, cross_check=False) for p, s in decomposition))


def average_entropy(decomposition) -> float:
    """Weighted ``S_qsp`` of a decomposition, via ``4 h(f_+)`` per component."""
    return float(sum(p * quartet.entropy_from_concurrence(quartet.pure_concurrence(s, cross_check=False))
                     for p, s in decomposition))


# --------------------------------------------------------------------------
# direct expectation values
# --------------------------------------------------------------------------

_TOKEN = re.compile(r"c(\d+)(\^|†|\+)?")


def parse_word(word: str):
    """``"c1^ c2"`` -> ``[(1, True), (2, False)]``; ``^``, ``+`` or ``†`` mark creation."""
    tokens = word.replace("*", " ").split()
    out = []
    for tok in tokens:
        m = _TOKEN.fullmatch(tok)
        if m is None:
            raise OracleError(f"bad operator token {tok!r}")
        out.append((int(m.group(1)), m.group(2) is not None))
    return out


def expectation_oracle(state, word) -> complex:
    """``<word>`` by applying ladder matrices in the Fock space.

    ``word`` is a string such as ``"c1^ c2"`` or a list of ``(mode, dagger)``.
    """
    if isinstance(word, str):
        word = parse_word(word)
    if isinstance(state, FockState):
        return expectation(state, word)
    if isinstance(state, MixedState):
        return complex(np.trace(operator_word(state.n, word) @ state.matrix))
    raise FockError(f"expected FockState or MixedState, got {type(state).__name__}")
