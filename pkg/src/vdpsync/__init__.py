"""Coupled quantum van der Pol oscillators on a truncated Fock space.

Steady states of the driven, reactively coupled pair, their phase
distributions and synchronization measures, a weak-drive effective model,
and the weak-coupling perturbative expansion, with a sweep/figure CLI.
"""

__version__ = "0.1.0"

from .fock import TruncationSpec, annihilation, creation, lift, mode_annihilation, number_operator
from .liouvillian import Liouvillian, SystemParams, apply, build_hamiltonian, build_liouvillian
from .steady_state import (
    DensityMatrix,
    SteadyStateSolution,
    check_convergence,
    evolve,
    solve_steady_state,
    trace_distance,
)
from .observables import (
    PhaseDistribution,
    SyncReport,
    relative_phase_distribution,
    single_phase_distribution,
    strict_local_maxima,
    sync_measures,
)
from .effective import (
    AmplitudeVector,
    NormalModeSet,
    build_effective_hamiltonian,
    normal_modes,
    solve_amplitudes,
)
from .perturbation import (
    CoherenceBlock,
    coherence_blocks,
    decay_rate,
    fit_form_coefficients,
    perturbative_phase_distribution,
    single_oscillator_populations,
    zeroth_order,
)
from .sweep import FIGURE_IDS, SweepAxis, SweepConfig, SweepResult, reproduce_figure, run_sweep
