"""SAGE certificates for signomial and polynomial nonnegativity.

The package computes and validates sums-of-AM/GM-exponential certificates,
lower bounds for signomial and polynomial minimization, cancellation-free
and circuit decompositions, and Newton-polytope diagnostics.
"""

from .algebra import (
    ExponentMatrix,
    Signomial,
    SparsePolynomial,
    evaluate,
    from_dict,
    make_polynomial,
    make_signomial,
)
from .decompose import (
    CircuitAgeCertificate,
    cancellation_free,
    circuit_decompose,
    is_cancellation_free,
    poly_age_decompose,
    transfer_pair,
    transfer_weights,
)
from .geometry import extreme_indices, find_face_partition, verify_face_partition
from .optimize import (
    BoundResult,
    ExactnessReport,
    constrained_bound,
    exactness_report,
    reference_minimize,
    sage_bound,
    sage_bound_dual,
)
from .polyform import (
    OrthantWitness,
    PolySageCertificate,
    circuit_nonneg_oracle,
    orthant_dominated,
    poly_bound,
    poly_sage_membership,
    signomial_representative,
    validate_poly_certificate,
)
from .sage import (
    AgeCertificate,
    DualVector,
    Refusal,
    SageCertificate,
    age_membership,
    dual_feasibility,
    relative_entropy,
    sage_membership,
    validate_certificate,
)

__version__ = "0.1.0"

__all__ = [
    "ExponentMatrix", "Signomial", "SparsePolynomial", "evaluate", "from_dict",
    "make_polynomial", "make_signomial",
    "CircuitAgeCertificate", "cancellation_free", "circuit_decompose",
    "is_cancellation_free", "poly_age_decompose", "transfer_pair", "transfer_weights",
    "extreme_indices", "find_face_partition", "verify_face_partition",
    "BoundResult", "ExactnessReport", "constrained_bound", "exactness_report",
    "reference_minimize", "sage_bound", "sage_bound_dual",
    "OrthantWitness", "PolySageCertificate", "circuit_nonneg_oracle", "orthant_dominated",
    "poly_bound", "poly_sage_membership", "signomial_representative",
    "validate_poly_certificate",
    "AgeCertificate", "DualVector", "Refusal", "SageCertificate", "age_membership",
    "dual_feasibility", "relative_entropy", "sage_membership", "validate_certificate",
]
