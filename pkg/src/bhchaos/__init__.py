"""Desk-scale toolkit for many-body quantum chaos in the 1D Bose-Hubbard chain.

Exact diagonalization of parity sectors, eigenvector fractal-dimension
statistics, analytic chaos thresholds for Fock initial states, and
Chebyshev-expanded time evolution of local observables.
"""

__version__ = "0.1.0"

from .basis import (FockBasis, ParityBasis, build_parity_basis, enumerate_basis,
                    format_occupations, hilbert_dimension, is_palindrome, reflect)
from .errors import (BhcError, CapacityError, ConfigError, EdgeSolverError,
                     NumericalError, PropagationError, StateConstructionError)
from .hamiltonian import CouplingParameters, SparseHamiltonian, assemble
from .observables import (TemporalSummary, TimeSeries, build_time_series,
                          central_site, central_site_stats, cloud_width,
                          homogeneity_deficit, site_densities, summarize,
                          temporal_variance, time_average)
from .propagator import (PropagatorConfig, bessel_first_kind_sequence,
                         chebyshev_coefficients, configure_propagator, evolve,
                         load_checkpoint, save_checkpoint, step)
from .spectral import (EqualWidthWindows, FractalStatistics, GOEReference,
                       NearestEnergyWindows, SpectralData, diagonalize,
                       fractal_dimension, fractal_dimensions, goe_d1_asymptotic,
                       goe_reference, scaled_energy, spectrum_edges,
                       windowed_statistics)
from .states import (ExcessEnergyAsymptotes, InitialStateSpec, ThresholdEstimate,
                     excess_energy_asymptotes, fock_energy, initial_state,
                     interaction_sum, ldos_width, make_homogeneous,
                     make_localized, make_staggered, maximally_mixed_energy,
                     maximally_mixed_energy_ratio, threshold,
                     threshold_asymptotic)
from .sweep import (SweepConfig, SweepResult, make_grid, run_sweep_d1,
                    run_sweep_dynamics, staggered_rows, threshold_rows,
                    write_staggered_table, write_thresholds)
