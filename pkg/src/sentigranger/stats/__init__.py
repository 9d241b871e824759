from .granger import (
    DEFAULT_ALPHA,
    Criterion,
    Decision,
    Direction,
    GrangerFailure,
    GrangerResult,
    Verdict,
    decide,
    granger_sweep,
    granger_test,
    lag_criteria,
    select_lag,
)
from .special import f_cdf, f_sf, ln_gamma, reg_inc_beta
from .unitroot import AdfResult, UnitRootVerdict, adf_test, critical_values

__all__ = [
    "DEFAULT_ALPHA", "AdfResult", "Criterion", "Decision", "Direction", "GrangerFailure",
    "GrangerResult", "UnitRootVerdict", "Verdict", "adf_test", "critical_values", "decide",
    "f_cdf", "f_sf", "granger_sweep", "granger_test", "lag_criteria", "ln_gamma",
    "reg_inc_beta", "select_lag",
]
