"""Exact symbolic computations for vertex algebras coupled to sl_2 connections."""

from .coupling import (CoupledElement, TwistedModeExpr, a_bracket_coeffs, check_invariance,
                       coupled_ope, delta, fibre_evaluate, g_action_recovery,
                       twisted_commutator_formula, twisted_commutator_oracle)
from .functionals import (derivation_T, embed_g_in_G, equal_mod_det, poisson_bracket,
                          poisson_module_act, right_translate, vertex_op)
from .gauge import Connection, MatrixSeries, automorphism_space, connection_of, gauge_act, solve_connection
from .poly import Poly, binom, parse_poly
from .series import LogLaurentSeries, TruncSeries, taylor_reexpand
from .twisted import fnorm, regular_singular_commutator, twisted_vertex_op
from .vertex import ModeExpr, VASpec, builtin_symplectic_fermions, untwisted_commutator

__version__ = "0.1.0"
