"""Quadratic constraints: risk-aware input sets, ReLU activations and safety specs."""

from riskverify.qc.activation import (
    ActivationQc,
    ReluMultipliers,
    pair_indices,
    relu_qc,
    relu_qc_basis,
)
from riskverify.qc.input import (
    InputGeometry,
    InputQc,
    halfspace_margin,
    input_qc_ball,
    input_qc_confidence,
    input_qc_ellipsoid,
    input_qc_halfspace,
    input_qc_polytope,
)
from riskverify.qc.safety import (
    ClassificationMode,
    SafetyProvenance,
    SafetyQc,
    classification_qc,
    classification_sub_matrix,
    coupled_classification_basis,
    coupled_gamma_pairs,
    output_selector,
    safety_qc_constant,
    safety_qc_ellipsoid,
    safety_qc_output_halfspace,
)
from riskverify.qc.specs import (
    InputSpec,
    SafetySpec,
    load_input_spec,
    load_safety_spec,
    read_spec_file,
    validate_input_spec,
    validate_safety_spec,
)

__all__ = [
    "ActivationQc",
    "ClassificationMode",
    "InputGeometry",
    "InputQc",
    "InputSpec",
    "ReluMultipliers",
    "SafetyProvenance",
    "SafetyQc",
    "SafetySpec",
    "classification_qc",
    "classification_sub_matrix",
    "coupled_classification_basis",
    "coupled_gamma_pairs",
    "halfspace_margin",
    "input_qc_ball",
    "input_qc_confidence",
    "input_qc_ellipsoid",
    "input_qc_halfspace",
    "input_qc_polytope",
    "load_input_spec",
    "load_safety_spec",
    "output_selector",
    "pair_indices",
    "read_spec_file",
    "relu_qc",
    "relu_qc_basis",
    "safety_qc_constant",
    "safety_qc_ellipsoid",
    "safety_qc_output_halfspace",
    "validate_input_spec",
    "validate_safety_spec",
]
