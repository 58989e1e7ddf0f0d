"""Exception hierarchy shared across the package."""


class PseudocurveError(Exception):
    """Base class for all computation errors raised by this package."""


# -- series / germs ---------------------------------------------------------

class ValuationError(PseudocurveError):
    """An operand's valuation violates a precondition (e.g. g(0) != 0)."""


class UnitError(PseudocurveError):
    """Constant term is not the required unit."""


class ZeroGermError(PseudocurveError):
    """Germ vanishes identically to its truncation order."""


class TruncationError(PseudocurveError):
    """Truncation order too small to certify the requested invariant."""


class ParityError(PseudocurveError):
    """Integer invariant came out non-integral (should be unreachable
    for valid singularity types)."""


class OrthogonalityError(PseudocurveError):
    """A leading vector is not transverse/orthogonal to the tangent."""


class LengthError(PseudocurveError):
    """Vector list length does not match the singularity type."""


class EqualError(PseudocurveError):
    """Two germs agree identically to the common truncation order."""


class TypeError_(PseudocurveError):
    """Candidate exponent/divisor data violates a singularity-type clause.

    The offending clause is named in ``args[0]`` and kept in ``clause``.
    """

    def __init__(self, clause, message):
        super().__init__(f"{clause}: {message}")
        self.clause = clause


# -- grids / operators ------------------------------------------------------

class GridTooCoarse(PseudocurveError):
    """Grid resolution below the documented minimum (8 radial, 16 angular)."""


class GridError(PseudocurveError):
    """Malformed grid data (radii, shape, or node family)."""


class DimensionError(PseudocurveError):
    """Component counts or matrix dimensions are inconsistent."""


# -- structures -------------------------------------------------------------

class SingularError(PseudocurveError):
    """J + J_st (or Id - Qbar) is singular; correspondence undefined."""


class UnknownNameError(PseudocurveError):
    """Unknown builtin structure or fixture id."""


class DomainError(PseudocurveError):
    """Point outside a structure's declared domain."""


# -- solvers ----------------------------------------------------------------

class DivergenceError(PseudocurveError):
    """Iteration diverged (contraction ratio >= 1 repeatedly)."""


class ContractionError(PseudocurveError):
    """Estimated norm of the series correction operator is >= 1/2."""


class SmallnessWarning(UserWarning):
    """Smallness hypothesis could not be verified; iteration may diverge."""


# -- topology ---------------------------------------------------------------

class TransversalityError(PseudocurveError):
    """Curve is not transverse to the sphere (multiple radial crossings)."""


class PoleError(PseudocurveError):
    """No admissible stereographic pole among the deterministic candidates."""


class PrecisionError(PseudocurveError):
    """Accumulated linking sum too far from an integer to round."""


class ExceptionalRadiusError(PseudocurveError):
    """No non-exceptional slice radius found in the search range."""


class DisjointnessError(PseudocurveError):
    """Pushoff still intersects the curve after all offset reductions."""


class UnderdeterminedError(PseudocurveError):
    """Genus ledger has more than one unknown entry."""


# -- corpus -----------------------------------------------------------------

class UnknownFixture(PseudocurveError):
    """Fixture id does not name any bundled fixture document."""
