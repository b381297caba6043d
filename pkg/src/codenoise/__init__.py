"""Erasure capacity, noise decay and tuple counts for binary linear codes."""
from __future__ import annotations

__version__ = "0.1.0"

from .errors import CapacityError, ContractViolation, InconsistencyError
from .gf2 import (LinearCode, WeightDistribution, dual_code, full_space, gf2_rank, macwilliams_transform,
                  rank_of_columns, reed_muller, repetition_pair, sample_random_code, weight_distribution,
                  zero_code)
from .erasure import m_lambda_exact, m_lambda_mc, erasure_profile, pseudorandomness_score
from .psi import lambda_of, psi_moment, psi_variational, prop18_bound, y0_y1
from .renyi import theorem12_sides, renyi_after_bsc, p_ue, corollary15_check
from .census import census_oracle, trivial_count, fourier_quad_identity, ensemble_expectation

__all__ = [
    "__version__", "CapacityError", "ContractViolation", "InconsistencyError",
    "LinearCode", "WeightDistribution", "dual_code", "full_space", "gf2_rank", "macwilliams_transform",
    "rank_of_columns", "reed_muller", "repetition_pair", "sample_random_code", "weight_distribution",
    "zero_code", "m_lambda_exact", "m_lambda_mc", "erasure_profile", "pseudorandomness_score",
    "lambda_of", "psi_moment", "psi_variational", "prop18_bound", "y0_y1",
    "theorem12_sides", "renyi_after_bsc", "p_ue", "corollary15_check",
    "census_oracle", "trivial_count", "fourier_quad_identity", "ensemble_expectation",
]
