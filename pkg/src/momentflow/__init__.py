"""momentflow: steady-state solvers for the Boltzmann-BGK equation
discretized by globally hyperbolic Hermite moment systems.

Provides the moment-space finite-volume discretization, forward-Euler /
semi-implicit / symmetric Gauss-Seidel smoothers, the alternating
moment-hydro iteration (FIM solver family), a FAS nonlinear multigrid
accelerator, and a benchmark harness (Couette, shock structure, lid-driven
cavity).
"""

from .basis import (HermiteRootTable, MultiIndexSet, enumerate_indices,
                    evaluate_expansion, hermite_eval, hermite_roots,
                    max_hermite_root, project_expansion)
from .collision import CollisionModel, bgk_rate, collision_frequency
from .driver import (FimConfig, SolveResult, SolverConfig, fim_iteration,
                     mass_correction, solve_to_steady)
from .errors import AdmissibilityError, ConfigError, DivergenceError
from .fluxes import (ghost_states, hll_flux_moment, moment_residual,
                     regularization_flux, residual_norm, wave_speed_bounds)
from .grid import (BoundarySpec, Grid, MaxwellWall, MomentField, Periodic,
                   PrescribedMaxwellian, periodic_spec)
from .hydro import (HydroField, HydroState, extract_hydro, hydro_euler_step,
                    hydro_flux, hydro_inner_solve, hydro_residual,
                    hydro_sgs_sweep)
from .multigrid import (CycleConfig, build_hierarchy, prolong_correction,
                        restrict_field, restrict_residual, vcycle)
from .problems import (Problem, build_cavity, build_couette, build_shock,
                       build_problem, cavity_lid_speed,
                       normalize_shock_profile, shock_states)
from .smoothers import (StepControl, cfl_timesteps, euler_step, jacobi_sweep,
                        sis_step, sisgs_sweep)
from .states import (MacroQuantities, MomentState, macro_quantities,
                     maxwellian_state, primary_moments, renormalize,
                     stress_heat)

__version__ = "0.1.0"
