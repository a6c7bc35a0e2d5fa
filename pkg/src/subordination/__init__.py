"""Subordination of heat kernel estimates: scale functions, model heat
kernels, Bernstein functions, subordinate jump kernels and a Monte Carlo
check of the subordinator."""
from .bernstein import (BernsteinFunction, LevySpec, bernstein_eval, check_levy_integrability,
                        levy_density, power_bernstein_closed_form, proof_inequalities,
                        truncated_bernstein, truncation_constant)
from .config import ExperimentConfig, load_config, load_preset, preset_names
from .errors import ConfigError, DivergenceError, DomainError, NumericalError
from .kernels import (HeatKernelEnvelope, chernoff_exponent, hk_lower, hk_upper, hk_upper_small_r,
                      p_diff, p_jump)
from .montecarlo import SubordinatorSampler, sample_path, sample_trajectory, validate_laplace
from .scales import (ScaleSpec, VolumeProfile, check_scale_order, eval_scale, invert_scale,
                     min_scale, verify_LU)
from .subordinate import (ComparabilityReport, FamilyMember, SubordinationProblem,
                          comparability_verify, criterion_check, jump_kernel_bounds,
                          lemma_equivalence_check, sufficient_comparability_check, target_diffusion,
                          target_estimate, target_jump, theorem_equivalence_suite)

__version__ = "0.1.0"
