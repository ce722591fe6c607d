"""Mean-field solver suite for two-cluster quantum annealing models.

Dense model: classical ground states on the sphere product, hysteresis
continuation, first-order transition detection, and harmonic excitation
gaps.  Sparse model: exact decoupling through a two-spin effective
Hamiltonian iterated to self-consistency.  Both are validated against an
independent finite-size exact-diagonalization oracle.
"""

__version__ = "0.1.0"

from .classical import (ClassicalState, Direction, SweepResult, TransitionReport,
                        detect_transition, global_minimize, minimize, start_set,
                        sweep)
from .ed import (EDOperator, EDResult, SectorSpec, build_dense_full_operator,
                 build_dense_sector_hamiltonian, build_dense_sector_operator,
                 build_sparse_full_hamiltonian, dense_ed, ed_solve,
                 extrapolate_gap, gap_sequence, sparse_ed)
from .errors import (CatalystRangeError, ConfigError, ConvergenceError,
                     DegenerateModeError, InstabilityError, SizeError,
                     StationarityError)
from .model import (AnnealSchedule, CatalystConfig, ClusterFields, Coupling,
                    CouplingMatrix, FixedValue, Identity, MagPair, ModelSpec,
                    coupling_matrix, dense_energy_density, dense_gradient,
                    dense_hessian, sparse_mean_field_density,
                    sparse_mean_field_gradient)
from .saddle import (ConjugateFields, EffectiveHamiltonian, SaddleSolution,
                     build_effective_hamiltonian, conjugate_fields,
                     detect_transition_sparse, free_energy_density,
                     global_saddle, ground_block, solve_saddle, sweep_sparse)
from .spinwave import (FluctuationMatrix, GapPoint, GapSpectrum, LocalFrame,
                       excitation_gaps, fluctuation_matrix, gap_profile,
                       gaps_at, local_frame, min_gap, optimize_catalyst,
                       rotate_frame)

__all__ = [
    "__version__",
    "AnnealSchedule", "CatalystConfig", "ClassicalState", "ClusterFields",
    "ConjugateFields", "Coupling", "CouplingMatrix", "Direction",
    "EDOperator", "EDResult", "EffectiveHamiltonian", "FixedValue",
    "FluctuationMatrix", "GapPoint", "GapSpectrum", "Identity", "LocalFrame",
    "MagPair", "ModelSpec", "SaddleSolution", "SectorSpec", "SweepResult",
    "TransitionReport",
    "CatalystRangeError", "ConfigError", "ConvergenceError",
    "DegenerateModeError", "InstabilityError", "SizeError", "StationarityError",
    "build_dense_full_operator", "build_dense_sector_hamiltonian",
    "build_dense_sector_operator", "build_effective_hamiltonian",
    "build_sparse_full_hamiltonian", "conjugate_fields", "coupling_matrix",
    "dense_ed", "dense_energy_density", "dense_gradient", "dense_hessian",
    "detect_transition", "detect_transition_sparse", "ed_solve",
    "excitation_gaps", "extrapolate_gap", "fluctuation_matrix",
    "free_energy_density", "gap_profile", "gap_sequence", "gaps_at",
    "global_minimize", "global_saddle", "ground_block", "local_frame",
    "min_gap", "minimize", "optimize_catalyst", "rotate_frame", "solve_saddle",
    "sparse_ed", "sparse_mean_field_density", "sparse_mean_field_gradient",
    "start_set", "sweep", "sweep_sparse",
]
