"""Spectral toolkit for maximal regularity of second-order integro-differential
equations on the line: grids and Fourier multipliers, function-space norms,
the maximal operator and Muckenhoupt weights, dyadic decompositions, symbol
certificates and the solver."""

__version__ = "0.1.0"

from .errors import (BandOverflow, DimensionMismatch, DivergentWeightedDerivative, GridMismatch,
                     IndexOutOfRange, InvalidArgument, InvalidQ, MaxRegError, NonInvertiblePencil,
                     NotSupported, SingularAtNode, SymbolSingular, ZeroInput)
from .frequency import FrequencySymbol, constant_symbol, jump_symbol, memory_symbol, polynomial_symbol, scalar_symbol
from .grid import (Grid, GridFunction, SpectralFunction, antiderivative, apply_multiplier, convolve_kernel,
                   derivative, fft, ifft)
from .spaces import (Lorentz, Lp, MaximalConfig, Weight, WeightedLp, ap_constant, build_weight, dual, maximal,
                     maximal_norm_bound, norm, pointwise_A1_check, rubio_iterate)
from .littlewood_paley import (Besov, BumpFunction, DyadicFilterBank, TriebelLizorkin, besov_norm, dyadic_block,
                               equiv_norm_report, lift, make_filter_bank, maximal_domination_check,
                               triebel_lizorkin_norm)
from .symbols import (ConvolutionSymbol, OperatorPencil, companion_symbols, cz_constant, dyadic_envelope_check,
                      invert_symbol, kernel_from_symbol, mihlin_constant, pencil_symbol)
from .solver import regularity_sweep, solve, solve_convolution, strong_solution_check, weighted_consistency_check
