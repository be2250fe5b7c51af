"""Regularised PCA- and SVD-type low-rank matrix factorisations."""

__version__ = "0.1.0"

from .descent import DescentConfig, minimize
from .matrix_core import frobenius_norm_sq, spd_solve, svd, sym_eigen, truncate_svd
from .regularizers import RegularizerSpec, realize, regularizer
from .rpca import PcaProblem, PcaSolution, solve_rpca
from .rsvd import RsvdProblem, RsvdSolution, solve_rsvd

__all__ = [
    "DescentConfig", "minimize",
    "frobenius_norm_sq", "spd_solve", "svd", "sym_eigen", "truncate_svd",
    "RegularizerSpec", "realize", "regularizer",
    "PcaProblem", "PcaSolution", "solve_rpca",
    "RsvdProblem", "RsvdSolution", "solve_rsvd",
]
