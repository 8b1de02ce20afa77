"""Finite loops with involution, their Cayley-Dickson doubles and automorphisms."""
from .loop import (
    LoopError,
    LoopTable,
    associator,
    commutator,
    generate_subloop,
    normal_quotient,
    structure_sets,
    validate_loop,
)
from .involution import Involution, classify_involution, validate_involution
from .doubling import (
    DoubleResult,
    DoublingParams,
    ParamError,
    build_chein,
    build_general,
    build_Qn,
    double,
    q0,
    validate_params,
)
from .analysis import central_quotient, diassociative_fast, is_moufang, property_report
from .automorphism import automorphism_group, induced_linear_action, is_characteristic
from .terms import check_identity, degrees, load_variety, parse, parse_identity, parse_term

__version__ = "0.1.0"

__all__ = [
    "LoopError",
    "LoopTable",
    "associator",
    "commutator",
    "generate_subloop",
    "normal_quotient",
    "structure_sets",
    "validate_loop",
    "Involution",
    "classify_involution",
    "validate_involution",
    "DoubleResult",
    "DoublingParams",
    "ParamError",
    "build_chein",
    "build_general",
    "build_Qn",
    "double",
    "q0",
    "validate_params",
    "central_quotient",
    "diassociative_fast",
    "is_moufang",
    "property_report",
    "automorphism_group",
    "induced_linear_action",
    "is_characteristic",
    "check_identity",
    "degrees",
    "load_variety",
    "parse",
    "parse_identity",
    "parse_term",
]
