"""Beamforming for MIMO wireless power transfer with a nonlinear rectenna model.

DC combining (one rectifier per receive antenna) and RF combining (signals
combined before a single rectifier) are optimized over i.i.d. Rayleigh
channels; closed-form average-power scaling laws and a seeded Monte Carlo
harness are included.
"""

from .channel import ChannelConfig, generate_channel, read_channel_csv, write_channel_csv
from .dc_combining import DcOptConfig, DcResult, optimize_dc, svd_transmit_baseline
from .errors import (
    ConfigurationError,
    ConvergenceError,
    DegenerateChannelError,
    InfeasibleError,
    InvalidInputError,
    MimoWptError,
    PassivityError,
    UndefinedRatioError,
)
from .rectenna import (
    RectennaParams,
    TaylorCoefficients,
    make_coefficients,
    pout_dc_combining,
    pout_rf_combining,
    vout_single,
)
from .rf_combining import (
    AnalogCombiner,
    AnalogConfig,
    RfResult,
    mrc,
    mrt_against_combiner,
    optimize_rf_analog,
    optimize_rf_svd,
)

__version__ = "0.1.0"
