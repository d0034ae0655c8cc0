"""Test whether a real-valued edge-weighted graph has community structure.

Under no community structure the normalized weight matrix behaves like a
Wigner matrix: its spectrum follows the semicircle law and its extreme
eigenvalues sit near +/-2 with Tracy-Widom fluctuations. Block differences in
mean or variance push an extreme eigenvalue of the normalized matrix, or of
its exponentially transformed counterpart, beyond those limits.
"""
from .core_matrix import (
    exp_map,
    normalize_t,
    normalize_te,
    pipeline_te,
    shuffle_null,
    standardize,
)
from .errors import (
    CommtestError,
    ConvergenceFailure,
    DegenerateMatrix,
    NonSymmetric,
    OverflowSaturated,
)
from .inference import SubTestResult, TestConfig, TestReport, run_test
from .spectra import eigvals_sym, esd_ks_distance, extreme_eigs, semicircle_cdf, semicircle_pdf
from .synthetic import CommunityModel, example1_model, fig3_model, generate, power_experiment
from .tracy_widom import Tw1Table, build_tw1, critical_eigenvalue, tw1_cdf, tw1_quantile

__version__ = "0.1.0"
