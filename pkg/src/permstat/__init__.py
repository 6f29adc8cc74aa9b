"""Exact joint distribution and mixed moments of the permutation statistics
inv (inversions) and maj (major index)."""
from .arith import BiPoly, TruncSeries, series_from_binomial
from .jointdist import DistResult, FRow, f_table, h_poly, netto_poly
from .moments import MomentTable, closed_forms, moment_table
from .guess import GuessedPoly, guess_bivariate, guess_univariate
from .oracle import brute_joint, foata, inv, maj

__version__ = "0.1.0"

__all__ = [
    "BiPoly",
    "TruncSeries",
    "series_from_binomial",
    "DistResult",
    "FRow",
    "f_table",
    "h_poly",
    "netto_poly",
    "MomentTable",
    "closed_forms",
    "moment_table",
    "GuessedPoly",
    "guess_bivariate",
    "guess_univariate",
    "brute_joint",
    "foata",
    "inv",
    "maj",
]
