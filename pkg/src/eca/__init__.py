"""Elliptical component analysis: multivariate Kendall's tau scatter
estimation, sparse leading eigenvectors (exhaustive and Fantope-initialized
truncated power), and a seeded simulation harness.
"""

from .combinatoric import SparseEigenResult, restricted_spectral_norm, sparse_leading_eigenvector
from .errors import (
    CombinatorialBlowupError,
    DataError,
    DeadIterateError,
    DegeneratePairError,
    ECAError,
    InitializationError,
    NumericError,
    ParseError,
)
from .fantope import FantopeParams, FantopeSolution, default_lambda, fantope_project, round_to_projector, solve_fantope_pca
from .ftpm import FtpmParams, deflate, ftpm_leading, ftpm_top_m, init_from_fantope, select_k, trc, truncated_power
from .harness import ExperimentConfig, ExperimentRecord, analyze, load_csv, roc_sweep, run_experiment, sweep_effective_sample
from .sampling import (
    CovarianceSpec,
    EllipticalModel,
    build_spike_covariance,
    model_for,
    sample,
    sample_unit_sphere,
    scheme_spec,
)
from .scatter import (
    PairPolicy,
    marginal_kendall_tau,
    multivariate_kendall,
    pearson_cov,
    population_kendall,
    population_kendall_eigs_mc,
    tca_covariance,
)
from .spectral import davis_kahan_rhs, eca_leading, eigh_sorted, projector, sin_angle, subspace_frobenius_dist

__version__ = "0.1.0"
