"""Risk-aware verification of ReLU networks by semidefinite programming."""

from riskverify.verifier.certificate import (
    Certificate,
    CertificateStatus,
    ClassificationCertificate,
    Ellipsoid,
)
from riskverify.verifier.lmi import LiftedLmi, LiftMatrices, assemble, lift_matrices, lifted_points
from riskverify.verifier.sdp import (
    check_input_admissible,
    min_volume_ellipsoid,
    verify,
    verify_classification,
)

__all__ = [
    "Certificate",
    "CertificateStatus",
    "ClassificationCertificate",
    "Ellipsoid",
    "LiftMatrices",
    "LiftedLmi",
    "assemble",
    "check_input_admissible",
    "lift_matrices",
    "lifted_points",
    "min_volume_ellipsoid",
    "verify",
    "verify_classification",
]
