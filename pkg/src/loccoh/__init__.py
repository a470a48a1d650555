"""loccoh: exact local cohomology and duality engine for p-local graded modules."""

__version__ = "0.1.0"

from .pgroups import (  # noqa: F401
    MixedGroup,
    GroupMorphism,
    SnfResult,
    smith_normal_form,
    kernel,
    cokernel,
    hom_to_zp,
    ext_to_zp,
    pontryagin_dual,
    is_isomorphic,
)
