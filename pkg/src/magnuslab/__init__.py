"""magnus-lab: exact divergence certificates and dimension-dependent
convergence bounds for Magnus/BCH expansions of step operator measures.

Submodules
----------
linalg
    Exact rational and floating dense linear algebra.
series
    Truncated matrix power series and scalar special functions.
measures
    Step measures: cumulative norms, ordered exponentials, Magnus terms.
counterexamples
    The 2x2 minimal pairs and the n x n parabolic divergence family.
bounds
    Covering-density chain, radius profiles and convergence radii.
cli
    The magnus-lab command line tool.

The exact integer kernels have a compiled (Cython) and a pure-Python
implementation; the compiled one is preferred at import time and
``MAGNUS_LAB_PURE=1`` forces the fallback.
"""

__version__ = "0.1.0"

from ._backend import backend_name
from .linalg import FloatMatrix, NormKind, RationalMatrix
from .measures import MagnusTermSequence, StepMeasure
from .series import MatrixPowerSeries

__all__ = [
    "__version__",
    "backend_name",
    "FloatMatrix",
    "NormKind",
    "RationalMatrix",
    "MagnusTermSequence",
    "StepMeasure",
    "MatrixPowerSeries",
]
