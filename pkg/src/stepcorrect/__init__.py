"""stepcorrect: exact interval/step-function arithmetic, trig and Walsh
partial-sum operators, empirical weak-type (1,1) scans, and small-set
correction of step functions."""

__version__ = "0.1.0"

from .intervals import FiniteIntervalSet, Interval, as_fraction
from .stepfunc import DyadicBasis, RationalBasis, StepFunction, refine_step
from .combs import trig_comb, uniform_comb, walsh_comb
from .grids import GridFunction, GridSpec, MaximalScan
from .trig import TrigCoefficients, trig_coeffs, trig_maximal, trig_partial_sum
from .walsh import (
    DyadicPoint,
    dyadic_add,
    walsh_dirichlet,
    walsh_fn,
    walsh_maximal,
    walsh_partial_sum,
    walsh_spectrum,
)

__all__ = [
    "FiniteIntervalSet",
    "Interval",
    "StepFunction",
    "RationalBasis",
    "DyadicBasis",
    "refine_step",
    "uniform_comb",
    "trig_comb",
    "walsh_comb",
    "GridSpec",
    "GridFunction",
    "MaximalScan",
    "TrigCoefficients",
    "trig_coeffs",
    "trig_partial_sum",
    "trig_maximal",
    "DyadicPoint",
    "dyadic_add",
    "walsh_fn",
    "walsh_dirichlet",
    "walsh_partial_sum",
    "walsh_maximal",
    "walsh_spectrum",
    "as_fraction",
    "__version__",
]
