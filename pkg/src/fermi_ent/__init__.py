"""Mode, one-body and quasiparticle entanglement of fermionic states."""

from .bogoliubov import BogoliubovMap, QuadraticOperator, apply_map, thouless_vacuum
from .densities import entropy_qsp, entropy_sc, entropy_sp, qsp_matrix, sp_matrix
from .fock import FockState, MixedState
from .oracle import SearchBudget
from .quartet import mixed_concurrence, normal_form, optimal_decomposition, parity_split, pure_concurrence

__all__ = [
    "BogoliubovMap",
    "FockState",
    "MixedState",
    "QuadraticOperator",
    "SearchBudget",
    "apply_map",
    "entropy_qsp",
    "entropy_sc",
    "entropy_sp",
    "mixed_concurrence",
    "normal_form",
    "optimal_decomposition",
    "parity_split",
    "pure_concurrence",
    "qsp_matrix",
    "sp_matrix",
    "thouless_vacuum",
]

__version__ = "0.1.0"
