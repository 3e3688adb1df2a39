"""Verification SDPs: LMI feasibility, minimum-volume ellipsoids and classification.

Each input QC P_k enters the LMI as τ_k·P_k with τ_k ≥ 0; −τ_k·P_k stays
risk-admissible by positive homogeneity, and a nonnegative sum of admissible
losses is admissible by subadditivity.
"""

from __future__ import annotations

from collections.abc import Sequence
from typing import TYPE_CHECKING

import cvxpy as cp
import numpy as np
from numpy.typing import ArrayLike

from riskverify.config import Config
from riskverify.errors import (
    ConfigError,
    DimensionMismatch,
    InputQcViolated,
    InvalidClassIndex,
    SolverError,
)
from riskverify.logging import get_logger
from riskverify.metrics import get_metrics
from riskverify.network.model import Network, compact_form
from riskverify.qc.activation import ReluMultipliers, pair_indices, relu_qc, relu_qc_basis
from riskverify.qc.input import InputQc
from riskverify.qc.safety import (
    ClassificationMode,
    SafetyQc,
    classification_qc,
    coupled_classification_basis,
    coupled_gamma_pairs,
)
from riskverify.risk.cvar import as_risk_level
from riskverify.risk.moments import FloatArray, MomentSet, RiskLevel, symmetrize
from riskverify.risk.solver import ConicProgram, SolveStatus
from riskverify.verifier.certificate import (
    Certificate,
    CertificateStatus,
    ClassificationCertificate,
    Ellipsoid,
)
from riskverify.verifier.lmi import assemble, lift_matrices

if TYPE_CHECKING:
    from riskverify.network.model import CompactForm

logger = get_logger("verifier")

# Lower bound on the LMI shift t; certification only looks at t ≤ tol_psd.
T_FLOOR = -1.0

InputArg = InputQc | Sequence[InputQc]


def _as_inputs(inputs: InputArg) -> list[InputQc]:
    qcs = [inputs] if isinstance(inputs, InputQc) else list(inputs)
    if not qcs:
        raise ConfigError("at least one input QC is required")
    return qcs


def check_input_admissible(
    inputs: InputArg,
    ms: MomentSet,
    eps: RiskLevel | float,
    config: Config | None = None,
) -> None:
    """Raise InputQcViolated unless every −P_k has worst-case CVaR ≤ tol_feas."""
    for k, qc in enumerate(_as_inputs(inputs)):
        if qc.dim != ms.dim:
            raise DimensionMismatch(f"input QC {k} has dimension {qc.dim}, moments have {ms.dim}")
        if not qc.is_admissible(ms, eps, config):
            raise InputQcViolated(
                f"input QC {k} ({qc.geometry.value}) is not risk-admissible at "
                f"epsilon={as_risk_level(eps).epsilon}"
            )


class _LmiBuilder:
    """Decision variables and affine terms shared by every verification program."""

    def __init__(
        self, name: str, cf: CompactForm, inputs: list[InputQc], config: Config
    ) -> None:
        self.cf = cf
        self.inputs = inputs
        self.program = ConicProgram(name, config)
        self.lifts = lift_matrices(cf)
        self.nbar = cf.lifted_dim
        self.d = cf.hidden_dim
        self.pairwise = config.pairwise_multipliers and self.d > 1

        for k, qc in enumerate(inputs):
            if qc.P.shape[0] != cf.input_dim + 1:
                raise DimensionMismatch(
                    f"P (input block {k}) has size {qc.P.shape[0]}, expected {cf.input_dim + 1}"
                )
        L_in = self.lifts.input_lift
        self.tau = self.program.nonneg(len(inputs), name="tau")
        self.m_in = sum(
            self.tau[k] * symmetrize(L_in.T @ qc.P @ L_in) for k, qc in enumerate(inputs)
        )

        self.lam = self.program.free(self.d, name="lam")
        self.nu = self.program.nonneg(self.d, name="nu")
        self.eta = self.program.nonneg(self.d, name="eta")
        parts = [self.lam]
        self.lam_pair = None
        if self.pairwise:
            self.lam_pair = self.program.nonneg(len(pair_indices(self.d)), name="lam_pair")
            parts.append(self.lam_pair)
        parts.extend([self.nu, self.eta])
        coeffs = cp.hstack(parts)

        L_mid = self.lifts.mid_lift
        basis = relu_qc_basis(self.d, self.pairwise)
        lifted = np.einsum("ia,kij,jb->kab", L_mid, basis, L_mid)
        flat = lifted.reshape(lifted.shape[0], self.nbar * self.nbar)
        self.m_mid = cp.reshape(coeffs @ flat, (self.nbar, self.nbar), order="C")

    def output_term(self, S: FloatArray) -> FloatArray:
        L_out = self.lifts.output_lift
        if S.shape[0] != L_out.shape[0]:
            raise DimensionMismatch(
                f"S (output block) has size {S.shape[0]}, expected {L_out.shape[0]}"
            )
        return symmetrize(L_out.T @ S @ L_out)

    def multipliers(self) -> ReluMultipliers:
        values = [self.lam.value]
        if self.lam_pair is not None:
            values.append(self.lam_pair.value)
        values.extend([self.nu.value, self.eta.value])
        return ReluMultipliers.from_vector(np.concatenate(values), self.d, self.pairwise)

    def input_scale(self) -> tuple[float, ...]:
        return tuple(float(v) for v in np.clip(self.tau.value, 0.0, None))

    def input_matrix(self) -> FloatArray:
        return sum(
            (scale * qc.P for scale, qc in zip(self.input_scale(), self.inputs)),
            start=np.zeros_like(self.inputs[0].P),
        )


def _record(program: str, certificate: Certificate) -> None:
    get_metrics().counter("certificates_total", "Verification outcomes by program").labels(
        program=program, status=certificate.status.value
    ).inc()


def _epsilon(eps: RiskLevel | float | None) -> float | None:
    return None if eps is None else as_risk_level(eps).epsilon


def _solve_lmi(
    name: str,
    net: Network,
    inputs: list[InputQc],
    S: FloatArray,
    eps: RiskLevel | float | None,
    config: Config,
) -> Certificate:
    cf = compact_form(net)
    builder = _LmiBuilder(name, cf, inputs, config)
    program = builder.program
    t = program.free(name="t")
    m_out = builder.output_term(S)
    program.add_nsd(builder.m_in + builder.m_mid + m_out - t * np.eye(builder.nbar))
    program.add_constraint(t >= T_FLOOR)
    program.minimize(t)
    report = program.solve()

    if report.status is SolveStatus.INFEASIBLE:
        logger.warning("Verification program reported infeasible", extra={"program": name})
        return Certificate(CertificateStatus.UNDETERMINED, epsilon=_epsilon(eps), report=report)
    if not report.usable:
        raise SolverError(f"{name}: solve failed with status {report.raw_status}")

    mult = builder.multipliers()
    lmi = assemble(cf, builder.input_matrix(), relu_qc(mult, builder.d), S)
    t_value = float(t.value)
    slack = lmi.slack
    certified = t_value <= config.tol_psd and slack >= -config.tol_psd
    return Certificate(
        CertificateStatus.CERTIFIED if certified else CertificateStatus.UNDETERMINED,
        multipliers=mult,
        input_scale=builder.input_scale(),
        slack=slack,
        t=t_value,
        epsilon=_epsilon(eps),
        report=report,
        lmi=lmi,
    )


def verify(
    net: Network,
    inputs: InputArg,
    safety: SafetyQc | ArrayLike,
    ms: MomentSet | None = None,
    eps: RiskLevel | float | None = None,
    config: Config | None = None,
    check_input: bool = True,
) -> Certificate:
    """Search ReLU multipliers for M_in(τP) + M_mid(Q) + M_out(S) ⪯ 0.

    Certified means the output QC S holds in the worst-case CVaR sense for
    every input distribution with the given moments. Undetermined means the
    sufficient condition failed, not that the network is unsafe.

    Args:
        net: ReLU network.
        inputs: One input QC, or several joined by nonnegative multipliers.
        safety: Output QC S of size n + m + 1.
        ms: Moment set the input QCs are checked against.
        eps: Risk level of the check.
        config: Tolerances and solver settings.
        check_input: Verify input admissibility first; off for norm-bounded sets.

    Raises:
        InputQcViolated: If an input QC is not risk-admissible.
        SolverError: If the solver fails.
    """
    config = config or Config()
    qcs = _as_inputs(inputs)
    if check_input:
        if ms is None or eps is None:
            raise ConfigError("input admissibility check needs a moment set and risk level")
        check_input_admissible(qcs, ms, eps, config)
    S = safety.S if isinstance(safety, SafetyQc) else symmetrize(safety)
    certificate = _solve_lmi("verify", net, qcs, S, eps, config)
    _record("verify", certificate)
    logger.info(
        "Verification finished",
        extra={
            "status": certificate.status.value,
            "t": certificate.t,
            "slack": certificate.slack,
            "epsilon": certificate.epsilon,
        },
    )
    return certificate


def min_volume_ellipsoid(
    net: Network,
    inputs: InputArg,
    C: ArrayLike,
    ms: MomentSet | None = None,
    eps: RiskLevel | float | None = None,
    config: Config | None = None,
    check_input: bool = True,
) -> tuple[Ellipsoid | None, Certificate]:
    """Smallest {y : yᵀE⁻¹y ≤ 1} with y = C[x; f(x)] certified under the input QCs.

    Maximizes log det X over X = E⁻¹ ≻ 0 and the multipliers subject to the
    LMI with S(X) = [[CᵀXC, 0],[0, −1]]. The returned E is inflated by
    ``config.ellipsoid_backoff`` so the frozen S(E) re-verifies.

    Returns:
        (ellipsoid, certificate). The ellipsoid is None when the program is
        infeasible (certificate.unbounded is set) or the output set is flat.

    Raises:
        InputQcViolated: If an input QC is not risk-admissible.
        SolverError: If the solver fails.
    """
    config = config or Config()
    qcs = _as_inputs(inputs)
    if check_input:
        if ms is None or eps is None:
            raise ConfigError("input admissibility check needs a moment set and risk level")
        check_input_admissible(qcs, ms, eps, config)

    cf = compact_form(net)
    out_map = np.atleast_2d(np.asarray(C, dtype=float))
    width = cf.input_dim + cf.output_dim
    if out_map.shape[1] != width:
        raise DimensionMismatch(f"C has {out_map.shape[1]} columns, expected {width}")
    m_y = out_map.shape[0]

    builder = _LmiBuilder("min_volume_ellipsoid", cf, qcs, config)
    program = builder.program
    G = out_map @ builder.lifts.output_lift[:width, :]
    X = program.symmetric(m_y, name="X", psd=True)
    corner = np.zeros((builder.nbar, builder.nbar))
    corner[-1, -1] = -1.0
    program.add_nsd(builder.m_in + builder.m_mid + G.T @ X @ G + corner)
    program.maximize(cp.log_det(X))
    report = program.solve()

    level = _epsilon(eps)
    if report.status is SolveStatus.INFEASIBLE:
        logger.warning("Output is risk-unbounded under the input set", extra={"epsilon": level})
        certificate = Certificate(
            CertificateStatus.UNDETERMINED, epsilon=level, report=report, unbounded=True
        )
        _record("min_volume_ellipsoid", certificate)
        return None, certificate
    if report.status is SolveStatus.UNBOUNDED:
        logger.warning("Output set has zero volume", extra={"epsilon": level})
        certificate = Certificate(
            CertificateStatus.UNDETERMINED, epsilon=level, report=report, details={"flat": True}
        )
        _record("min_volume_ellipsoid", certificate)
        return None, certificate
    if not report.usable:
        raise SolverError(f"min_volume_ellipsoid: solve failed with status {report.raw_status}")

    inverse = symmetrize(X.value)
    ellipsoid = Ellipsoid((1.0 + config.ellipsoid_backoff) * np.linalg.inv(inverse))
    S = np.zeros((width + 1, width + 1))
    S[:width, :width] = out_map.T @ ellipsoid.inverse @ out_map
    S[width, width] = -1.0
    mult = builder.multipliers()
    lmi = assemble(cf, builder.input_matrix(), relu_qc(mult, builder.d), S)
    slack = lmi.slack
    certificate = Certificate(
        CertificateStatus.CERTIFIED if slack >= -config.tol_psd else CertificateStatus.UNDETERMINED,
        multipliers=mult,
        input_scale=builder.input_scale(),
        slack=slack,
        t=-slack,
        epsilon=level,
        report=report,
        lmi=lmi,
        details={"log_det": ellipsoid.log_det},
    )
    _record("min_volume_ellipsoid", certificate)
    logger.info(
        "Minimum-volume ellipsoid found",
        extra={"epsilon": level, "log_det": ellipsoid.log_det, "slack": slack},
    )
    return ellipsoid, certificate


def _verify_coupled(
    net: Network,
    qcs: list[InputQc],
    c: int,
    eps: RiskLevel | float | None,
    config: Config,
) -> Certificate:
    m = net.output_dim
    n = net.input_dim
    pairs = coupled_gamma_pairs(c, m)
    if not pairs:
        raise InvalidClassIndex(f"coupled mode needs at least three classes, got {m}")

    cf = compact_form(net)
    builder = _LmiBuilder("verify_coupled", cf, qcs, config)
    program = builder.program
    gamma = program.nonneg(len(pairs), name="gamma")
    basis = coupled_classification_basis(c, m, n)
    L_out = builder.lifts.output_lift
    lifted = np.einsum("ia,kij,jb->kab", L_out, basis, L_out)
    nbar = builder.nbar
    m_out = cp.reshape(gamma @ lifted.reshape(len(pairs), nbar * nbar), (nbar, nbar), order="C")
    t = program.free(name="t")
    program.add_nsd(builder.m_in + builder.m_mid + m_out - t * np.eye(nbar))
    program.add_equality(cp.sum(gamma), 1.0)
    program.add_constraint(t >= T_FLOOR)
    program.minimize(t)
    report = program.solve()

    if report.status is SolveStatus.INFEASIBLE:
        return Certificate(CertificateStatus.UNDETERMINED, epsilon=_epsilon(eps), report=report)
    if not report.usable:
        raise SolverError(f"verify_coupled: solve failed with status {report.raw_status}")

    weights = np.clip(gamma.value, 0.0, None)
    g = np.zeros((m, m))
    for w, (i, j) in zip(weights, pairs):
        g[i, j] = g[j, i] = w
    coupled = classification_qc(c, m, n, ClassificationMode.COUPLED, g)
    assert isinstance(coupled, SafetyQc)
    mult = builder.multipliers()
    lmi = assemble(cf, builder.input_matrix(), relu_qc(mult, builder.d), coupled)
    t_value = float(t.value)
    slack = lmi.slack
    certified = t_value <= config.tol_psd and slack >= -config.tol_psd
    return Certificate(
        CertificateStatus.CERTIFIED if certified else CertificateStatus.UNDETERMINED,
        multipliers=mult,
        input_scale=builder.input_scale(),
        slack=slack,
        t=t_value,
        epsilon=_epsilon(eps),
        report=report,
        lmi=lmi,
        details={"gamma": g.tolist()},
    )


def verify_classification(
    net: Network,
    inputs: InputArg,
    c: int,
    ms: MomentSet | None = None,
    eps: RiskLevel | float | None = None,
    mode: ClassificationMode | str = ClassificationMode.PER_HYPERPLANE,
    config: Config | None = None,
    check_input: bool = True,
) -> ClassificationCertificate:
    """Certify that class ``c`` wins in the worst-case CVaR sense.

    Per-hyperplane mode runs one LMI per rival i with the margin loss
    f_i − f_c; the class is certified only when every rival is. Coupled mode
    solves one LMI with the Γ weights as extra nonnegative variables summing
    to one.

    Raises:
        InvalidClassIndex: If c is out of range.
        InputQcViolated: If an input QC is not risk-admissible.
        SolverError: If a solve fails.
    """
    config = config or Config()
    mode = ClassificationMode(mode)
    qcs = _as_inputs(inputs)
    m = net.output_dim
    specs = classification_qc(c, m, net.input_dim, ClassificationMode.PER_HYPERPLANE)
    assert isinstance(specs, list)
    if check_input:
        if ms is None or eps is None:
            raise ConfigError("input admissibility check needs a moment set and risk level")
        check_input_admissible(qcs, ms, eps, config)

    if mode is ClassificationMode.COUPLED:
        certificate = _verify_coupled(net, qcs, c, eps, config)
        _record("verify_classification", certificate)
        return ClassificationCertificate(c, mode.value, (certificate,))

    certificates = []
    for spec in specs:
        certificate = _solve_lmi("verify_classification", net, qcs, spec.S, eps, config)
        _record("verify_classification", certificate)
        logger.info(
            "Rival checked",
            extra={"class": c, "rival": spec.details["rival"], "status": certificate.status.value},
        )
        certificates.append(certificate)
    return ClassificationCertificate(
        c,
        mode.value,
        tuple(certificates),
        rivals=tuple(spec.details["rival"] for spec in specs),
    )

