"""Spectral toolkit for kernels of the form phi(max(x, y)) on the half-line.

Subpackages: symbols (inputs and their exact piecewise algebra), classify
(boundedness/compactness/Schatten verdicts), discretize (dense compressions
and spectra), sturm (shooting eigenvalues via the equivalent boundary
problem), matrixrep (Fourier-side windows), acceptance (the runnable
contract), cli (command line front end).
"""
import os as _os

# MAXKERNEL_THREADS caps the BLAS pool.  This must happen before numpy is
# first imported, so it lives at package-import time; values already set
# explicitly in the environment win.
_t = _os.environ.get("MAXKERNEL_THREADS")
if _t:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                 "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
        _os.environ.setdefault(_var, _t)

from .symbols import (Interval, PiecewisePoly, Sampled, Step, Symbol,
                      TrigPoly, evaluate, is_real_symbol, support,
                      symbol_from_json, symbol_to_json, to_pieces)
from .classify import (Verdict, classify_schatten, is_bounded, is_compact,
                       kronecker_det, l1_norm, s2_norm, trace_value)
from .discretize import (GalerkinMatrix, SpectrumEstimate, factor_residual,
                         galerkin_matrix, schatten, singular_values,
                         spectrum, step_exact_spectrum, triangular_limit,
                         truncation_point)
from .sturm import (EigenResult, asymptotic_constant, eigenvalues,
                    prufer_theta, shoot, sum_with_tail)
from .matrixrep import (FourierCoefficients, HankelWindow,
                        circle_kernel_coeffs, exp_schatten_norm,
                        exp_symbol_growth, exp_symbol_svals, fourier_coeffs,
                        hankel_svals, hankel_window)
from .acceptance import run_checks

__version__ = "0.1.0"

__all__ = [
    "Interval", "PiecewisePoly", "Sampled", "Step", "Symbol", "TrigPoly",
    "evaluate", "is_real_symbol", "support", "symbol_from_json",
    "symbol_to_json", "to_pieces",
    "Verdict", "classify_schatten", "is_bounded", "is_compact",
    "kronecker_det", "l1_norm", "s2_norm", "trace_value",
    "GalerkinMatrix", "SpectrumEstimate", "factor_residual",
    "galerkin_matrix", "schatten", "singular_values", "spectrum",
    "step_exact_spectrum", "triangular_limit", "truncation_point",
    "EigenResult", "asymptotic_constant", "eigenvalues", "prufer_theta",
    "shoot", "sum_with_tail",
    "FourierCoefficients", "HankelWindow", "circle_kernel_coeffs",
    "exp_schatten_norm", "exp_symbol_growth", "exp_symbol_svals",
    "fourier_coeffs", "hankel_svals", "hankel_window",
    "run_checks", "__version__",
]
