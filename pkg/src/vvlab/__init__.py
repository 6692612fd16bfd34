"""vvlab: a desk-scale laboratory for vanishing-viscosity transport,
parabolic and Burgers equations with rough first-order coefficients."""

__version__ = "0.1.0"

from .grid import (Domain1D, GridField, SpaceTimeField, heat_convolve,
                   spectral_derivative, dv_heat_convolve, translate_field)
from .fields import (smooth_window, constant_field, gaussian_field, sine_field,
                     sqrt_abs_field, abs_field, ramp_field, sign_field)
from .spaces import (NormEstimate, holder_seminorm, holder_norm_b,
                     besov_norm_thermic, duality_gap, default_v_grid)
from .mollify import (MollifierKernel, mollify, mollification_rate,
                      drift_blowup_check)
from .flows import (DriftSpec, MollifiedDrift, FlowTrajectory, integrate_flow,
                    backward_characteristic, flow_lipschitz_check, peano_exact)
from .proxy import (FreezingPoint, RegimeExponents, regime_exponents,
                    cut_locus_time, FrozenPath, perturbed_kernel,
                    proxy_semigroup, proxy_green, duhamel_residual)
from .solver import (SolveConfig, solve_parabolic, solve_burgers,
                     time_cut_solve, envelope_report, interior_window)
from .schedules import (ScheduleConstants, condinu_transport,
                        condinu_holder_timederiv, uniqueness_window_transport,
                        burgers_schedules, mittag_leffler_half,
                        gronwall_henry_envelope)
from .experiments import (RunReport, RunRow, holder_bound_sweep,
                          uniqueness_gap, burgers_steady_state,
                          peano_selection, time_derivative_besov, config_hash)
