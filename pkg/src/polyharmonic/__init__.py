"""Expansions of even-dimensional polyharmonic fundamental solutions.

Submodules: special_fn (Legendre, Gegenbauer and friends), kernel_expansions
(binomial and logarithmic kernels), fundamental (Green's functions and their
Fourier/Gegenbauer series), coords (polyspherical coordinates and harmonics),
addition_theorems (azimuthal Fourier coefficients as harmonic multi-sums) and
cli (batch verification).
"""

from . import addition_theorems, coords, fundamental, kernel_expansions, special_fn
from .errors import PolyharmonicError

__all__ = ["special_fn", "kernel_expansions", "fundamental", "coords", "addition_theorems", "PolyharmonicError"]
__version__ = "0.1.0"
