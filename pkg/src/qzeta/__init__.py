"""Exact and rigorous computations around linear forms in q-zeta values."""

from qzeta._kernels import BACKEND
from qzeta.exact_algebra import Jet, LaurentPoly, RatFunc
from qzeta.linear_forms import FormParams, LinearForm, build_linear_form

__version__ = "1.0.0"

__all__ = ["BACKEND", "Jet", "LaurentPoly", "RatFunc", "FormParams", "LinearForm", "build_linear_form", "__version__"]
