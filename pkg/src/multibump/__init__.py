"""Numerical laboratory for multi-bump solutions of the critical fractional
equation (-Delta)^s u = K(|x|) |u|^(2s*-2) u.

The package constructs symmetric multi-bubble approximate solutions,
verifies the energy-expansion constants and asymptotic estimates at desk
scale, and executes the finite-dimensional reduction: projected linear
solve, contraction correction, and critical-point search of the reduced
energy.
"""

from .params import (Bubble, ProblemParams, alpha_const, bubble_deps,
                     bubble_dr, bubble_dr2, bubble_eval, dirichlet_eta, frac_lap_bubble,
                     gamma_fn, zeta_fn)
from .geometry import (Ansatz, build_ansatz, interaction_asymptote,
                       interaction_sum, sector_of, symmetry_check)
from .quadrature import (IntegralResult, QuadratureSpec, axial_reduce,
                         convolution_decay_check, integrate, riesz_apply)

__version__ = "0.1.0"
