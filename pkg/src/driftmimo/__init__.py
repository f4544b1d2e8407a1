"""Multi-ellipse geometry-based MIMO channel model with array-variant delay drift.

Closed-form and Monte Carlo estimates of the spatial, frequency and joint
correlation functions, the power delay profile and delay moments seen by
each element of a large uniform linear array.
"""

from .bessel import QuadratureSpec, bessel_i, i0, integrate, inverse_i0
from .correlation import (CorrelationGrid, CorrelationQuery, fcf, fcf_taps, path_fcf_closed,
                          path_fcf_numeric, scf_closed, scf_narrowband, scf_numeric, stcf_separable_gap,
                          stfcf, vm_characteristic)
from .delay_stats import (DelayMoments, PdpCurve, coherence_bandwidth, coherence_constant, composite_pdp,
                          delay_spread, mean_delay, path_pdp, pdp_from_fcf, pdp_moments)
from .errors import (AccuracyError, ConfigurationError, CoverageError, DomainError, DriftMimoError,
                     RangeError, ResolutionError, SearchError)
from .geometry import (SPEED_OF_LIGHT, AntennaIndex, ArrayConfig, EllipsePath, aoa_to_aod, drift_delay,
                       element_offset, exact_delay)
from .kernels import BACKEND
from .montecarlo import (EstimatorConfig, TransferFunctionSample, empirical_fcf, empirical_pdp,
                         estimate_stfcf, transfer_function)
from .stochastic import (ClusterGenerator, ScattererRealization, SeedSpec, VonMises, generate_realization,
                         sample_exponential_delays, sample_von_mises, von_mises_pdf)

__version__ = "0.1.0"
