"""Exact verification toolkit for the dynamical Ding-Iohara algebroids."""
from ._backend import BACKEND
from .cas import (ExactField, LaurentPoly, Mono, PointField, PSeries, RatFun,
                  ratfun_equals, pstar_substitute)
from .rootdata import RootType, cartan_data, cartan_matrix, q_binomial, q_int, serre_pairs, symmetrization

__all__ = [
    "BACKEND", "ExactField", "LaurentPoly", "Mono", "PointField", "PSeries", "RatFun",
    "ratfun_equals", "pstar_substitute", "RootType", "cartan_data", "cartan_matrix",
    "q_binomial", "q_int", "serre_pairs", "symmetrization",
]
__version__ = "0.1.0"
