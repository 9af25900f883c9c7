"""Time-elastic averaging of time series around the KDTW kernel.

Series are numpy arrays, either 1-D (scalar samples) or 2-D with one row per
sample.
"""

from ._kteka import (
    Error,
    InputError,
    NumericError,
    __version__,
    average,
    dba,
    dtw,
    dtw_cost,
    forward,
    backward,
    gen_cbf,
    gen_rosette,
    gram,
    kdtw,
    kdtw_log,
    log_posterior,
    medoid,
    paper_nu_grid,
    power_spectrum,
    row_conditionals,
    snr_gain,
    teka,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
