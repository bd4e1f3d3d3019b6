"""Command-line front end: state files, reports and reference sweeps.

State files are JSON::

    {"schema_version": "1", "n": 4, "kind": "pure", "parity": "odd",
     "data": [[bitmask, re, im], ...]}

    {"schema_version": "1", "n": 4, "kind": "mixed", "parity": "odd",
     "data": [[[re, im], ...], ...]}          # dense rows

Bit ``k`` of a bitmask is the occupation of mode ``k + 1``. Exit codes: 0 on
success, 1 when a verify suite fails, 2 on schema errors, 3 on physical
invariant violations.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from . import densities, oracle, quartet
from .bogoliubov import BogoliubovError, BogoliubovMap, annihilation_residual, thouless_vacuum
from .fock import EVEN, MIXED, ODD, FockError, FockState, MixedState, number_parity, popcounts, sector_indices

SCHEMA_VERSION = "1"
DIGITS = 12
EXIT_OK, EXIT_FAIL, EXIT_SCHEMA, EXIT_INVARIANT = 0, 1, 2, 3
IDENTITY_TOL = 1e-9


class SchemaError(ValueError):
    pass


class InvariantError(ValueError):
    pass


PHYSICS_ERRORS = (FockError, densities.DensityError, quartet.QuartetError, BogoliubovError, InvariantError)


# --------------------------------------------------------------------------
# state files
# --------------------------------------------------------------------------

def _real(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SchemaError(f"{where}: expected a number, got {x!r}")
    return float(x)


def _pair(x, where: str) -> complex:
    if not isinstance(x, (list, tuple)) or len(x) != 2:
        raise SchemaError(f"{where}: expected [re, im], got {x!r}")
    return complex(_real(x[0], where), _real(x[1], where))


def parse_matrix(rows, where: str = "matrix") -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise SchemaError(f"{where}: expected a list of rows of [re, im] pairs")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise SchemaError(f"{where}: ragged rows")
    return np.array([[_pair(x, f"{where}[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(rows)])


def matrix_to_json(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def state_from_dict(doc) -> FockState | MixedState:
    """Validate a parsed state file and build the state it describes."""
    if not isinstance(doc, dict):
        raise SchemaError("state file must hold a JSON object")
    missing = {"schema_version", "n", "kind", "parity", "data"} - set(doc)
    if missing:
        raise SchemaError(f"missing fields: {sorted(missing)}")
    if str(doc["schema_version"]) != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {doc['schema_version']!r}")
    n = doc["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise SchemaError(f"n must be a positive integer, got {n!r}")
    kind, parity = doc["kind"], doc["parity"]
    if kind not in ("pure", "mixed"):
        raise SchemaError(f"kind must be 'pure' or 'mixed', got {kind!r}")
    if parity not in (EVEN, ODD, MIXED):
        raise SchemaError(f"parity must be even, odd or mixed, got {parity!r}")
    dim = 1 << n
    if kind == "pure":
        amps = np.zeros(dim, dtype=complex)
        if not isinstance(doc["data"], list):
            raise SchemaError("pure data must be a list of [bitmask, re, im]")
        for i, entry in enumerate(doc["data"]):
            if not isinstance(entry, list) or len(entry) != 3:
                raise SchemaError(f"data[{i}]: expected [bitmask, re, im]")
            mask = entry[0]
            if isinstance(mask, bool) or not isinstance(mask, int) or not 0 <= mask < dim:
                raise SchemaError(f"data[{i}]: bitmask {mask!r} out of range for n = {n}")
            amps[mask] += complex(_real(entry[1], f"data[{i}]"), _real(entry[2], f"data[{i}]"))
        state = FockState(n, amps)
        if abs(state.norm - 1.0) > 1e-10:
            raise InvariantError(f"pure state is not normalized (norm {state.norm:.15g})")
        actual = number_parity(state)
    else:
        mat = parse_matrix(doc["data"], "data")
        if mat.shape != (dim, dim):
            raise SchemaError(f"mixed data must be {dim} x {dim}, got {mat.shape}")
        state = MixedState(n, mat)
        actual = state.parity
    if actual != parity:
        raise InvariantError(f"declared parity {parity!r} but state has {actual!r}")
    return state


def state_to_dict(state: FockState | MixedState) -> dict:
    if isinstance(state, FockState):
        data = [[int(k), float(a.real), float(a.imag)] for k, a in enumerate(state.amplitudes) if a != 0]
        return {"schema_version": SCHEMA_VERSION, "n": state.n, "kind": "pure",
                "parity": number_parity(state), "data": data}
    return {"schema_version": SCHEMA_VERSION, "n": state.n, "kind": "mixed",
            "parity": state.parity, "data": matrix_to_json(state.matrix)}


def read_state_file(path) -> FockState | MixedState:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from None
    except OSError as exc:
        raise SchemaError(f"{path}: {exc}") from None
    return state_from_dict(doc)


def write_state_file(path, state) -> None:
    Path(path).write_text(json.dumps(state_to_dict(state), indent=1) + "\n")


# --------------------------------------------------------------------------
# reports
# --------------------------------------------------------------------------

def _num(x):
    """Round to DIGITS significant digits, recursively."""
    if isinstance(x, dict):
        return {k: _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    if isinstance(x, np.ndarray):
        return _num(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": _num(float(x.real)), "im": _num(float(x.imag))}
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (float, np.floating)):
        return float(f"{float(x):.{DIGITS}g}") + 0.0  # drop negative zero
    if isinstance(x, np.integer):
        return int(x)
    return x


def _check(checks: dict, name: str, residual: float, tol: float = IDENTITY_TOL) -> None:
    checks[name] = {"residual": float(residual), "tol": tol, "ok": bool(residual <= tol)}


def _sector_report(state, with_oracle: bool, budget: oracle.SearchBudget, decomposition: bool) -> dict:
    rep: dict = {"n": state.n, "kind": "pure" if isinstance(state, FockState) else "mixed"}
    checks: dict = {}
    rho_sp = densities.sp_matrix(state)
    rep["p_j"] = np.clip(np.real(np.diag(rho_sp)), 0, 1)
    rep["S_c"] = densities.entropy_sc(state)
    rep["S_sp"] = densities.entropy_sp(state)
    rep["S_qsp"] = densities.entropy_qsp(state)
    rep["S_2"] = densities.entropy_quadratic(state)
    rep["f"] = densities.qsp_spectrum(state)
    maj = densities.majorization_chain(state)
    rep["majorization"] = {"holds": maj.holds, "margin": maj.margin}
    _check(checks, "S_c >= S_sp >= S_qsp", max(rep["S_sp"] - rep["S_c"], rep["S_qsp"] - rep["S_sp"], 0.0))
    if state.n == 4 and isinstance(state, FockState):
        conc = quartet.pure_concurrence(state)
        f_plus, f_minus = quartet.qsp_eigenvalues_analytic(state)
        nf = quartet.normal_form(state)
        rep.update(C=conc, f_plus=f_plus, f_minus=f_minus, E_qsp=rep["S_qsp"],
                   normal_form={"alpha": nf.alpha, "beta": nf.beta})
        _check(checks, "S_qsp = 4 h(f+)", abs(rep["S_qsp"] - quartet.entropy_from_concurrence(conc)))
        _check(checks, "C = 2|alpha' beta'|", abs(conc - 2 * nf.alpha * abs(nf.beta)))
    elif state.n == 4:
        cr = quartet.mixed_concurrence(state, with_decomposition=decomposition)
        rep.update(C=cr.concurrence, d_k=cr.d, d_k_r_matrix=cr.d_r_matrix, separable=cr.separable,
                   E_qsp=quartet.entropy_from_concurrence(cr.concurrence))
        _check(checks, "d_k agreement", cr.notes["d_agreement"], 1e-8)
        if decomposition:
            rep["decomposition_path"] = cr.path
            rep["decomposition"] = [
                {"weight": p, "C": quartet.pure_concurrence(s, cross_check=False),
                 "state": state_to_dict(s)["data"]} for p, s in cr.decomposition
            ]
            resid = np.linalg.norm(quartet.decomposition_matrix(cr.decomposition) - state.matrix)
            _check(checks, "decomposition reconstructs rho", resid, 1e-8)
    if with_oracle:
        if isinstance(state, FockState):
            sp_val, _ = oracle.min_entropy_over_sp_bases(state, budget)
            qsp_val, _ = oracle.min_entropy_over_qsp_bases(state, budget)
            rep["oracle"] = {"min_S_c_sp": sp_val, "min_S_c_qsp": qsp_val}
            _check(checks, "oracle sp bound", max(rep["S_sp"] - sp_val, 0.0), 1e-9)
            _check(checks, "oracle qsp bound", max(rep["S_qsp"] - qsp_val, 0.0), 1e-9)
        elif state.n == 4:
            val, dec = oracle.convex_roof_search(state, budget)
            rep["oracle"] = {"convex_roof_C": val, "average_S_qsp": oracle.average_entropy(dec)}
            _check(checks, "oracle convex roof bound", max(rep["C"] - val, 0.0), 1e-8)
    rep["checks"] = checks
    return rep


def build_report(state, split: bool = False, with_oracle: bool = False,
                 budget: oracle.SearchBudget | None = None, decomposition: bool = False) -> dict:
    """Structured report for a pure or mixed state.

    Mixed-parity density matrices need ``split=True``; they are reported per
    sector together with the weighted concurrence and formation entanglement.
    """
    budget = budget or oracle.SearchBudget()
    if isinstance(state, MixedState) and state.parity == MIXED:
        if not split:
            raise InvariantError("density matrix mixes parity sectors; rerun with --split")
        parts = quartet.parity_split(state)
        sectors = {}
        for name, p, part in ((EVEN, parts.p_even, parts.rho_even), (ODD, parts.p_odd, parts.rho_odd)):
            if part is not None:
                sectors[name] = {"weight": p, **_sector_report(part, with_oracle, budget, decomposition)}
        rep = {"parity": MIXED, "sectors": sectors}
        if state.n == 4:
            rep["C"] = parts.concurrence
            rep["E_qsp"] = parts.entanglement
        rep["checks"] = {f"{k}: {c}": v for k, s in sectors.items() for c, v in s["checks"].items()}
        return rep
    parity = number_parity(state) if isinstance(state, FockState) else state.parity
    return {"parity": parity, **_sector_report(state, with_oracle, budget, decomposition)}


def report_ok(rep: dict) -> bool:
    return all(c["ok"] for c in rep.get("checks", {}).values())


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.{DIGITS}g}"
    if isinstance(x, dict) and set(x) == {"re", "im"}:
        return f"{x['re']:.{DIGITS}g}{x['im']:+.{DIGITS}g}j"
    if isinstance(x, list):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    return str(x)


def render(rep: dict, fmt: str, out=None) -> None:
    out = out or sys.stdout
    rep = _num(rep)
    if fmt == "structured":
        json.dump(rep, out, indent=1)
        out.write("\n")
        return
    _render_table(rep, out, "")


def _render_table(rep: dict, out, indent: str) -> None:
    width = max((len(k) for k in rep), default=0)
    for key, val in rep.items():
        if key == "checks":
            for name, c in val.items():
                flag = "ok" if c["ok"] else "FAIL"
                out.write(f"{indent}{'check':<{width}}  {name}: {flag} ({_fmt(c['residual'])} <= {_fmt(c['tol'])})\n")
        elif isinstance(val, dict) and set(val) != {"re", "im"}:
            out.write(f"{indent}{key}:\n")
            _render_table(val, out, indent + "  ")
        else:
            out.write(f"{indent}{key:<{width}}  {_fmt(val)}\n")


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def parse_grid(text: str) -> np.ndarray:
    """``a:b:step`` -> inclusive grid, rounded to absorb float drift."""
    try:
        a, b, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like a:b:step, got {text!r}") from None
    if step <= 0 or b < a:
        raise argparse.ArgumentTypeError(f"grid needs step > 0 and b >= a, got {text!r}")
    count = int(math.floor((b - a) / step + 1e-9)) + 1
    return np.round(a + step * np.arange(count), 12)


def _budget(args) -> oracle.SearchBudget:
    base = oracle.SearchBudget()
    return oracle.SearchBudget(samples=args.budget or base.samples, refine_steps=base.refine_steps, seed=args.seed)


def cmd_analyze(args) -> int:
    state = read_state_file(args.input)
    rep = build_report(state, split=args.split, with_oracle=args.oracle, budget=_budget(args),
                       decomposition=args.decomposition)
    render(rep, args.format)
    if not report_ok(rep):
        return EXIT_INVARIANT
    return EXIT_OK


def werner_family(kind: str, psi: FockState):
    if kind == "sector":
        return lambda p: quartet.werner_state(p, psi)
    return lambda p: quartet.two_fermion_werner(p, psi)


def signed_concurrence(rho) -> float:
    """``d_1 - sum_{k>1} d_k`` without the clamp at zero."""
    d = quartet.mixed_concurrence(rho).d
    return float(d[0] - d[1:].sum())


def werner_sweep(kind: str, psi: FockState, grid, with_oracle: bool = False, budget=None) -> dict:
    family = werner_family(kind, psi)
    rows = []
    signed = []
    for p in grid:
        rho = family(float(p))
        s = signed_concurrence(rho)
        conc = max(s, 0.0)
        row = {"p": float(p), "C": conc, "E_qsp": quartet.entropy_from_concurrence(conc)}
        if with_oracle:
            row["C_oracle"], _ = oracle.convex_roof_search(rho, budget)
        rows.append(row)
        signed.append(s)
    threshold = None
    for i in range(len(signed) - 1):
        if signed[i] <= 0 < signed[i + 1]:
            lo, hi = float(grid[i]), float(grid[i + 1])
            threshold = lo if signed[i] == 0 else brentq(lambda p: signed_concurrence(family(p)), lo, hi, xtol=1e-14)
            break
    return {"mixture": kind, "rows": rows, "threshold": threshold}


def cmd_sweep_werner(args) -> int:
    if args.pure_state:
        psi = read_state_file(args.pure_state)
        if not isinstance(psi, FockState):
            raise SchemaError("--pure-state must name a pure state file")
    elif args.mixture == "two-fermion":
        psi = quartet.two_fermion_bell()
    else:
        psi = quartet.maximally_entangled(args.parity)
    if psi.n != 4:
        raise InvariantError("sweep-werner needs a four-mode state")
    if args.mixture == "two-fermion" and np.any(np.abs(psi.amplitudes[_two_particle_complement()]) > 1e-12):
        raise InvariantError("two-fermion mixture needs a two-particle state")
    result = werner_sweep(args.mixture, psi, args.grid, args.oracle, _budget(args))
    if args.format == "structured":
        render(result, "structured")
        return EXIT_OK
    cols = ["p", "C", "E_qsp"] + (["C_oracle"] if args.oracle else [])
    print("  ".join(f"{c:>18}" for c in cols))
    for row in result["rows"]:
        print("  ".join(f"{row[c]:>18.{DIGITS}g}" for c in cols))
    thr = result["threshold"]
    print("threshold", "none" if thr is None else f"{thr:.{DIGITS}g}")
    return EXIT_OK


def _two_particle_complement() -> np.ndarray:
    return popcounts(4) != 2


def random_pure_state(n: int, parity: str, rng: np.random.Generator) -> FockState:
    idx = sector_indices(n, parity)
    amps = np.zeros(1 << n, dtype=complex)
    amps[idx] = rng.standard_normal(idx.size) + 1j * rng.standard_normal(idx.size)
    return FockState(n, amps).normalized()


def builtin_corpus(rng: np.random.Generator) -> dict:
    corpus = {
        "maximally entangled odd": quartet.maximally_entangled(ODD),
        "maximally entangled even": quartet.maximally_entangled(EVEN),
        "slater c1+ c3+": FockState.basis(4, [1, 3]),
        "two-fermion bell": quartet.two_fermion_bell(),
    }
    for k in range(4):
        corpus[f"random {('odd', 'even')[k % 2]} #{k}"] = random_pure_state(4, (ODD, EVEN)[k % 2], rng)
    corpus["werner p=0.9"] = quartet.werner_state(0.9)
    corpus["werner p=0.3"] = quartet.werner_state(0.3)
    return corpus


def suite_oracle(states: dict, budget: oracle.SearchBudget) -> list[tuple[str, float, bool]]:
    """Oracle minus analytic value for every state; must lie in ``[-floor, tolerance]``."""
    out = []
    for name, st in states.items():
        if isinstance(st, FockState):
            val, _ = oracle.min_entropy_over_qsp_bases(st, budget)
            gap = val - densities.entropy_qsp(st)
            out.append((f"{name}: min S_c over qsp bases - S_qsp", gap, -1e-9 <= gap <= budget.tolerance))
            val, _ = oracle.min_entropy_over_sp_bases(st, budget)
            gap = val - densities.entropy_sp(st)
            out.append((f"{name}: min S_c over sp bases - S_sp", gap, -1e-9 <= gap <= budget.tolerance))
        elif st.n == 4 and st.parity != MIXED:
            val, _ = oracle.convex_roof_search(st, budget)
            gap = val - quartet.mixed_concurrence(st).concurrence
            out.append((f"{name}: convex roof search - C", gap, -1e-8 <= gap <= budget.tolerance))
    return out


def suite_majorization(count: int, rng: np.random.Generator) -> list[tuple[str, float, bool]]:
    worst_chain, worst_maj = math.inf, math.inf
    for k in range(count):
        n = (2, 3, 4)[k % 3]
        st = random_pure_state(n, (ODD, EVEN)[(k // 3) % 2], rng)
        sc, ssp, sq = densities.entropy_sc(st), densities.entropy_sp(st), densities.entropy_qsp(st)
        worst_chain = min(worst_chain, sc - ssp, ssp - sq)
        worst_maj = min(worst_maj, densities.majorization_chain(st).margin)
    return [
        (f"S_c >= S_sp >= S_qsp on {count} states (min slack)", worst_chain, worst_chain >= -1e-9),
        (f"majorization chain on {count} states (min margin)", worst_maj, worst_maj >= -1e-9),
    ]


def suite_identities(states: dict) -> list[tuple[str, float, bool]]:
    out = []
    for name, st in states.items():
        if isinstance(st, FockState) and st.n == 4:
            conc = quartet.pure_concurrence(st)
            gap = abs(densities.entropy_qsp(st) - quartet.entropy_from_concurrence(conc))
            out.append((f"{name}: S_qsp - 4 h(f+)", gap, gap <= 1e-9))
            dual = abs(quartet.dual_state(st).vdot(st))
            out.append((f"{name}: |<dual|psi>| - C", abs(dual - conc), abs(dual - conc) <= 1e-10))
        elif isinstance(st, MixedState) and st.n == 4 and st.parity != MIXED:
            gap = quartet.mixed_concurrence(st).notes["d_agreement"]
            out.append((f"{name}: d_k from C vs R", gap, gap <= 1e-8))
    return out


SUITES = ("identities", "oracle", "majorization")


def cmd_verify(args) -> int:
    rng = np.random.default_rng(args.seed)
    if args.input:
        states = {str(p): read_state_file(p) for p in args.input}
    else:
        states = builtin_corpus(rng)
    suites = SUITES if args.suite == "all" else (args.suite,)
    results = []
    for suite in suites:
        if suite == "identities":
            results += suite_identities(states)
        elif suite == "oracle":
            results += suite_oracle(states, _budget(args))
        else:
            results += suite_majorization(args.count, rng)
    failed = 0
    for name, margin, ok in results:
        failed += not ok
        print(f"{'pass' if ok else 'FAIL'}  {name}: {margin:.{DIGITS}g}")
    print(f"{len(results) - failed} passed, {failed} failed")
    return EXIT_OK if failed == 0 else EXIT_FAIL


def _load_matrix(text: str, name: str) -> np.ndarray:
    source = text if text.lstrip().startswith("[") else None
    if source is None:
        try:
            source = Path(text).read_text()
        except OSError as exc:
            raise SchemaError(f"{name}: {exc}") from None
    try:
        return parse_matrix(json.loads(source), name)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{name}: not valid JSON ({exc})") from None


def cmd_thouless(args) -> int:
    u = _load_matrix(args.u_matrix, "--u-matrix")
    v = _load_matrix(args.v_matrix, "--v-matrix")
    if u.shape != v.shape or u.shape[0] != u.shape[1]:
        raise SchemaError(f"U and V must be equal square matrices, got {u.shape} and {v.shape}")
    bmap = BogoliubovMap(u, v)
    if not bmap.is_valid(1e-8):
        raise InvariantError(f"(U, V) is not a valid Bogoliubov map (residuals {bmap.residuals()})")
    vac = thouless_vacuum(bmap)
    if args.output:
        write_state_file(args.output, vac)
    rep = build_report(vac, budget=_budget(args))
    checks = rep["checks"]
    _check(checks, "a_nu |vac> = 0", annihilation_residual(vac, bmap))
    _check(checks, "rho_sp = V V†", float(np.linalg.norm(densities.sp_matrix(vac) - v @ v.conj().T)))
    _check(checks, "S_qsp = 0", abs(rep["S_qsp"]))
    rep["rho_sp"] = [[complex(z) for z in row] for row in densities.sp_matrix(vac)]
    out = {"state": state_to_dict(vac), "report": rep} if args.format == "structured" else rep
    render(out, args.format)
    return EXIT_OK if report_ok(rep) else EXIT_INVARIANT


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fermi-ent", description="Fermionic entanglement measures.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, oracle_flag=True):
        p.add_argument("--format", choices=("table", "structured"), default="table")
        p.add_argument("--seed", type=int, default=0, help="oracle seed")
        p.add_argument("--budget", type=int, default=None, help="oracle samples (default 5000)")
        if oracle_flag:
            p.add_argument("--oracle", action="store_true", help="add brute-force oracle values")

    p = sub.add_parser("analyze", help="report entanglement measures of a state file")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--split", action="store_true", help="split a parity-mixed density matrix")
    p.add_argument("--decomposition", action="store_true", help="include the optimal decomposition")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep-werner", help="concurrence of noisy mixtures along a grid of p")
    p.add_argument("--parity", choices=(ODD, EVEN), default=ODD)
    p.add_argument("--pure-state", type=Path, default=None, help="state file for |psi>")
    p.add_argument("--mixture", choices=("sector", "two-fermion"), default="sector",
                   help="noise on the parity sector (8 dim) or on two-particle states (6 dim)")
    p.add_argument("--grid", type=parse_grid, default=parse_grid("0:1:0.1"))
    common(p)
    p.set_defaults(func=cmd_sweep_werner)

    p = sub.add_parser("verify", help="oracle and property suites")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    p.add_argument("--input", type=Path, action="append", help="state file (repeatable)")
    p.add_argument("--count", type=int, default=1000, help="random states for the majorization suite")
    common(p, oracle_flag=False)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("thouless", help="quasiparticle vacuum of a Bogoliubov map")
    p.add_argument("--u-matrix", required=True, help="JSON rows of [re, im] pairs, inline or a path")
    p.add_argument("--v-matrix", required=True)
    p.add_argument("--output", type=Path, default=None, help="write the vacuum state file here")
    common(p, oracle_flag=False)
    p.set_defaults(func=cmd_thouless)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except PHYSICS_ERRORS as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
