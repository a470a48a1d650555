"""Graded modules over p-local one-variable polynomial rings.

Three layers: ``graded`` (degreewise groups with periodic tails),
``presentation`` (finite presentations of graded modules with operator
matrices), and ``localcoh`` (torsion/localisation/quotient functors and the
two-generator composite machinery).
"""

from .graded import (
    GradedGroup,
    PeriodicFamily,
    Tail,
    gamma_p,
    family_multiple_label,
    family_quotient_label,
    graded_mismatches,
    join_label,
    mod_p_infty,
    shift_label,
    split_label,
    tensor_periodic,
)
from .presentation import (
    GradedModulePresentation,
    Generator,
    OperatorAction,
    ParseError,
    ValidationReport,
    parse_presentation,
    serialize_presentation,
    validate_presentation,
)
from .localcoh import (
    AmbiguousExtension,
    ExtensionRecord,
    LocalCohomologyOne,
    LocalCohomologyTwo,
    StabilityError,
    gamma_x,
    gamma_x_divisible,
    gorenstein_shift,
    local_cohomology_one,
    local_cohomology_two,
    localize_x,
    mod_x_infty,
    mod_x_infty_divisible,
)

__all__ = [
    "GradedGroup", "PeriodicFamily", "Tail",
    "gamma_p", "mod_p_infty", "tensor_periodic",
    "split_label", "join_label", "shift_label", "graded_mismatches",
    "family_quotient_label", "family_multiple_label",
    "GradedModulePresentation", "Generator", "OperatorAction",
    "ParseError", "ValidationReport",
    "parse_presentation", "serialize_presentation", "validate_presentation",
    "AmbiguousExtension", "ExtensionRecord", "StabilityError",
    "LocalCohomologyOne", "LocalCohomologyTwo",
    "gamma_x", "gamma_x_divisible", "localize_x",
    "mod_x_infty", "mod_x_infty_divisible",
    "local_cohomology_one", "local_cohomology_two", "gorenstein_shift",
]
