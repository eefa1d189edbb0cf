"""haarfluct: exact Weingarten calculus, (annular) non-crossing permutation
combinatorics, second-order trace moments of Haar unitary matrices, and a
Monte Carlo harness for the matching fluctuation statistics."""

from .caps import CapExceeded
from .noncrossing import EpsilonVector
from .partitions import SetPartition
from .permutations import Permutation
from .ratfunc import OneOverNSeries, PolynomialZ, RationalFunctionN
from .second_order import ReducedWord, TraceWordSpec

__all__ = [
    "CapExceeded",
    "EpsilonVector",
    "OneOverNSeries",
    "Permutation",
    "PolynomialZ",
    "RationalFunctionN",
    "ReducedWord",
    "SetPartition",
    "TraceWordSpec",
]

__version__ = "0.1.0"
