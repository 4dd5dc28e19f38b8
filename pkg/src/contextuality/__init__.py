"""Exact coupling analysis for systems of random variables indexed by
(content, context).

The data model keeps one joint distribution per context and nothing
across contexts; all cross-context structure lives in couplings, which
are queried (never presumed) through exact rational linear programs and
an independent elimination oracle.  See the README for the file formats
and the command-line interface.
"""

from .bell import (
    ChshReport,
    CorrelationTable,
    FineEquivalenceReport,
    ShapeError,
    chsh,
    correlation_table,
    fine_equivalence_check,
)
from .coupling import (
    DEFAULT_BRUTE_FORCE_CAP,
    DEFAULT_VAR_CAP,
    ConnectionArityError,
    Coupling,
    FeasibilityResult,
    GuardExceededError,
    TotalEqualityResult,
    any_coupling,
    brute_force_identity,
    build_identity_polytope,
    build_polytope,
    constrained_coupling_feasible,
    enumerate_content_assignments,
    identity_coupling_feasible,
    max_connection_equality,
    max_total_connection_equality,
    product_coupling,
)
from .generators import (
    Angle,
    Design,
    cos_as_fraction,
    cyclic_design,
    deterministic_system,
    parse_angle,
    pr_box,
    random_consistent_system,
    singlet_system,
    two_by_two_design,
    two_context_design,
)
from .rationals import decimal_str, format_rational, parse_rational
from .simplex import (
    LinearConstraint,
    LinearProgram,
    LpError,
    LpIterationLimitError,
    LpResult,
    LpUnboundedError,
    solve_lp,
    verify_feasible_point,
    verify_infeasibility_certificate,
)
from .system import (
    Connection,
    ConsistencyReport,
    ContextBlock,
    InvalidSystemError,
    System,
    VariableId,
    Violation,
    load_system,
    loads_system,
    save_system,
    validate_system,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # system-core
    "VariableId",
    "ContextBlock",
    "System",
    "Connection",
    "ConsistencyReport",
    "Violation",
    "InvalidSystemError",
    "validate_system",
    "loads_system",
    "load_system",
    "save_system",
    # coupling engine
    "Coupling",
    "FeasibilityResult",
    "TotalEqualityResult",
    "GuardExceededError",
    "ConnectionArityError",
    "DEFAULT_VAR_CAP",
    "DEFAULT_BRUTE_FORCE_CAP",
    "build_polytope",
    "build_identity_polytope",
    "enumerate_content_assignments",
    "any_coupling",
    "product_coupling",
    "identity_coupling_feasible",
    "max_connection_equality",
    "max_total_connection_equality",
    "constrained_coupling_feasible",
    "brute_force_identity",
    # linear programming
    "LinearConstraint",
    "LinearProgram",
    "LpResult",
    "LpError",
    "LpIterationLimitError",
    "LpUnboundedError",
    "solve_lp",
    "verify_feasible_point",
    "verify_infeasibility_certificate",
    # bell inequalities
    "CorrelationTable",
    "ChshReport",
    "FineEquivalenceReport",
    "ShapeError",
    "correlation_table",
    "chsh",
    "fine_equivalence_check",
    # generators
    "Angle",
    "Design",
    "parse_angle",
    "cos_as_fraction",
    "two_by_two_design",
    "cyclic_design",
    "two_context_design",
    "singlet_system",
    "pr_box",
    "deterministic_system",
    "random_consistent_system",
    # rationals
    "parse_rational",
    "format_rational",
    "decimal_str",
]
