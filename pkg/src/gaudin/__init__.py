"""Gaudin Hamiltonians, Bethe vectors and eigenvalue checks for classical Lie algebras,
plus screening operators on character rings and classical W-algebras."""
from __future__ import annotations

from .bethe import BetheConfig, BetheError, GaudinInstance, bae_residual, bae_solve, bethe_vector, eigen_functions
from .diffops import DiffPolyOperator, ScalarDiffOp, diffop_coefficient, diffop_mul
from .eigen import (
    BAEViolation,
    EigenError,
    ZeroBetheVector,
    masterfn_crosscheck,
    ncsf,
    oracle_for,
    verify_eigen,
)
from .lie import LieAlgebraSpec, WeightVector, bracket, pairing_coroot_root, pairing_coroot_weight, root_on_diagonal
from .modules import TensorState, act_letter, apply_diffop, straighten, weight_of
from .operators import (
    bcd_trace_operator,
    brauer_symmetrizer,
    build_operator,
    cdet_operator,
    current_matrix,
    pfaffian_operator,
    projector_trace_operator,
    rdet_operator,
    sigma_stability_check,
    trace_power_operator,
)
from .rational import RationalFunction, rf_arith, rf_derivative
from .wbridge import (
    LambdaElement,
    TypeSpec,
    WPolynomial,
    gr_map,
    hc_image_builder,
    is_character,
    is_W_element,
    screening_S,
    screening_V,
    v_coefficients,
)

__version__ = "0.1.0"
