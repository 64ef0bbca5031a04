"""Exact analysis of singularities of integrable polynomial vector-field systems.

Layers, bottom-up: exact rational algebra (:mod:`isl.exactalg`), truncated
power series and vector fields (:mod:`isl.series`), the system model
(:mod:`isl.sysmodel`), resonance lattices (:mod:`isl.resonance`),
classification (:mod:`isl.classify`), normal forms (:mod:`isl.normalform`),
and the text format / CLI (:mod:`isl.dsl`, :mod:`isl.cli`).
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AnalysisError, DegenerateError, DegreeCapExceeded, DivisionError, GenericityError,
    InputError, ISLError, NotAFixedPoint, SingularLinearPart, UnsupportedEigenvalues,
    VerificationError,
)
from .exactalg import GaussianRational, IntLattice, QMatrix, UniPoly  # noqa: E402
from .series import CoordinateChange, MPoly, PolyVectorField, lie_bracket, lie_derivative  # noqa: E402
from .sysmodel import (  # noqa: E402
    IntegrableSystem, SystemFamily, geometric_recombine, reduce_at_singular_point,
    singular_rank_at, suspend_family, verify,
)
from .resonance import (  # noqa: E402
    is_jointly_resonant, monoid_hilbert_basis, resonance_space, resonant_monomials_up_to_degree,
)
from .classify import (  # noqa: E402
    CartanType, LinearPartFamily, canonical_linear_form, cartan_type, classify_singular_point,
    is_nondegenerate, linear_parts_of,
)
from .normalform import (  # noqa: E402
    divide_by_cartan, geometric_linearize, poincare_dulac, product_decomposition,
)
from .dsl import load_system, parse, parse_system, print_source, render_system  # noqa: E402
