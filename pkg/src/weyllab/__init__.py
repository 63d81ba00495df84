"""weyllab: recurrence volumes, dynamical invariants and counting remainders for model flows."""

from .core import (ConfigError, IntegrationError, NumericalError, PhaseState,
                   ResolutionError, SampleStarvationError, ValidationError,
                   WeylLabError, substream)
from .invariants import (EntropyEstimate, ExpansionEstimate, InvariantReport,
                         bowen_entropy, ehrenfest_time, inequality_report,
                         lyapunov_spectrum, max_expansion_rate, positive_sum_chi)
from .models import (CatMapSuspension, FlatTorus, Sphere3, SurfaceOfRevolution,
                     model_from_config)
from .recurrence import (BoundLaw, BoundReport, RecurrenceEstimate,
                         RecurrenceSpec, ScalingFit, bound_check,
                         extended_volume, is_recurrent, recurrence_volume,
                         scaling_fit, scan_hits)
from .spectra import (CountQuery, RadialProblem, radial_count,
                      radial_eigenvalues, sphere3_count, surfrev_count,
                      torus_count, weyl_leading)
from .surfrev import (ReturnMapSample, RevolutionProfile, clairaut_constant,
                      first_return, rational_recurrence_measure,
                      return_map_grid, return_map_quadrature, validate_profile,
                      vanishing_order)
from .weyl import (PlanResult, RemainderFit, WeylSeriesRow, plan_parameters,
                   remainder_exponent_fit, remainder_series, verify_bound)

__version__ = "0.1.0"
