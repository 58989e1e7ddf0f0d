"""Pseudoholomorphic disc toolkit.

Exact truncated-series geometry of singular curve germs, disc integral
operators for low-regularity almost complex structures, the model PDE
solvers built on them, and topological invariants of the resulting
links.
"""

from .errors import (
    PseudocurveError, ValuationError, UnitError, ZeroGermError,
    TruncationError, ParityError, OrthogonalityError, LengthError,
    EqualError, TypeError_, GridTooCoarse, GridError, DimensionError,
    SingularError, UnknownNameError, DomainError, DivergenceError,
    ContractionError, SmallnessWarning, TransversalityError, PoleError,
    PrecisionError, ExceptionalRadiusError, UnderdeterminedError,
    DisjointnessError, UnknownFixture,
)
from .exact import QQi, qqi, hermitian_dot
from .series import (
    TruncatedSeries, ps_add, ps_mul, ps_compose, ps_inv, ps_nth_root,
    ps_comp_inverse,
)
from .cyclotomic import CyclotomicField, CycElem, cyclotomic_polynomial
from .singularity import (
    CurveGerm, SingularityType, TypeRejection, PuiseuxStage,
    PuiseuxSequence, multiplicity, normalize_first,
    characteristic_exponents, puiseux_sequence, cusp_index_formula,
    realize_type, validate_type, compare_germs, symmetrize_reparam,
)
from .grid import (
    GridFunction, default_radii, wirtinger, wirtinger_nohalf,
    cauchy_green, cauchy_green_origin, cauchy_boundary,
    cauchy_boundary_origin, calderon_zygmund, cg_identity_residual,
)
from .modulus import ModulusReport, modulus_report
from .structures import (
    StructureField, QField, standard_matrix, complex_to_real,
    real_to_complex, j_to_q, q_to_j, builtin, dilated,
    structure_from_spec, lipschitz_estimate, cr_residual, set_debug,
)
from .solver import (
    SolveReport, surrogate_norm, picard_solve, inverse_dbar,
    inverse_dbar_report, perturb_cusp, immersion_margin,
)
from .topology import (
    SphereCurve, GenusLedger, GenusReport, WallCrossingReport,
    sphere_slice, linking, bennequin, bennequin_report,
    transversality_margin, intersection_index, cusp_index_topological,
    wall_crossing_check, genus_check,
)
from .corpus import (
    ClaimResult, FixtureReport, list_fixtures, load_fixture, run_fixture,
    run_all,
)

__version__ = "0.1.0"
