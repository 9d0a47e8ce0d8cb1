"""projlab: a simulation and verification lab for empirical rank-r projections
of signal-plus-noise matrices X = C + E.

The package evaluates the projection-excess process Z and its suprema in
closed form (spectral reductions, no manifold optimization), every drift and
moment bound on them, and verifies the pathwise and in-expectation
inequalities by seeded, reproducible Monte Carlo.
"""

__version__ = "0.1.0"

from .errors import (
    InvalidInputError,
    NumericalFailureError,
    OutOfHypothesisError,
    ReplicationFailureError,
)
from .linalg import (
    OrthoProjection,
    best_rank_r_projection,
    proj_diff_norms,
    schatten,
    singular_values,
    svd,
    sym_top_r,
    trace_form,
)
from .randgen import EntryDistribution, Seed, catalog, parse_distribution, sample_matrix, sample_projection
from .zprocess import SupResult, ZDecomposition, oracle_projection, z_at, z_sup, z1_sup, z2_sup
from .bounds import (
    BoundReport,
    gaussian_min_chain,
    latala_rhs,
    lemma1_equality_instance,
    lemma1_rhs,
    lemma2_rhs,
    min_equiv_witness,
    prop1_Y,
    thm1_gaussian_bound,
    thm3_bound,
)
from .montecarlo import ExperimentConfig, MCEstimate, build_c, estimate, estimate_many, ratio_report
from .localization import (
    RankSelectionConfig,
    SequenceCondition,
    SingularInterval,
    check_tail_condition,
    covariance_quadratic_form,
    empirical_rank_select,
    rank_select,
    singular_interval,
    slln_trajectory,
    tail_index_B,
)

__all__ = [name for name in dir() if not name.startswith("_")]
