"""Exact reduction of truncated meromorphic linear ODE systems
Y' = A(x) Y to Turrittin-Ramis-Sibuya normal forms, over Q, one real
quadratic extension and their i-adjunctions, with fully replayable chains
of polynomial gauge transformations and ramifications.
"""

from .errors import (
    DegreeCapExceededError,
    ParseError,
    PrecisionError,
    ResonantResidualError,
    TurrittinError,
    UnsupportedTowerError,
)
from .field import FieldDescriptor, FieldElement, GAUSSIAN, RATIONALS
from .poly import FieldPolynomial
from .factor import factor_poly
from .jets import LaurentJet, ORDER_INF
from .matrix import Matrix
from .systems import (
    SystemJet,
    SystemInvariants,
    TransformChain,
    TransformStep,
    constant_step,
    gauge_transform,
    monomial_step,
    normalize_chain,
    polynomial_step,
    push_through_ramification,
    ramification_step,
    ramify,
    replay,
    system_invariants,
)
from .constmat import (
    JordanData,
    ResonanceData,
    c_completion,
    coprime_split,
    gamma_invariants,
    jordan_single_eigen,
    real_canonical_form,
    resonance_data,
    sylvester_solve,
    theta_embed,
    theta_embed_system,
    theta_extract,
    theta_extract_system,
)
from .reduce_complex import (
    NormalForm,
    ShearingOrder,
    deresonate,
    eliminate_tail,
    formal_normal_form,
    shear,
    shearing_order,
    specialize_coefficients,
    splitting_lemma,
    trs_rank0,
)
from .reduce_real import (
    RealNormalForm,
    propagate_c_structure,
    real_deresonate,
    real_eliminate_tail,
    real_formal_normal_form,
    rtrs_rank0,
)
from .verify import VerificationReport, check_form, check_gauge_chain, invariants_report
from .documents import parse_chain, parse_system

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
