"""Symbolic analysis of parametrized curve germs at an isolated singularity.

A germ is a tuple of truncated power series vanishing at 0, viewed as a
holomorphic map (C,0) -> (C^n,0) known modulo O(z^N).  This module
computes its multiplicity and tangent vector, renormalizes the leading
component to an exact monomial, extracts the chain of exponents where the
running gcd of occurring exponents drops, builds the associated tower of
approximating germs, and symmetrizes a reparametrization with respect to
a root of unity.  Everything runs over exact coefficient fields: Gaussian
rationals by default, cyclotomic numbers where roots of unity are needed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from .cyclotomic import CyclotomicField
from .errors import (DimensionError, EqualError, LengthError,
                     OrthogonalityError, ParityError, TruncationError,
                     TypeError_, UnitError, ValuationError, ZeroGermError)
from .exact import QQi, hermitian_dot
from .series import TruncatedSeries, ps_comp_inverse, ps_compose, ps_nth_root


def _parse_rational(text):
    if not isinstance(text, str) or "." in text:
        raise ValueError(f"expected a decimal-free rational string, "
                         f"got {text!r}")
    return Fraction(text)


class CurveGerm:
    """Parametrized germ u(z) = (u_1(z), ..., u_n(z)), u(0) = 0.

    Components are stored at a common truncation order (the minimum of
    the inputs); n >= 2.
    """

    __slots__ = ("components", "order")

    def __init__(self, components):
        components = list(components)
        if len(components) < 2:
            raise DimensionError("a germ needs at least 2 components")
        order = min(c.order for c in components)
        components = [c.truncate(order) for c in components]
        for c in components:
            if 0 in c.coeffs:
                raise ValuationError("germ components must vanish at 0")
        self.components = tuple(components)
        self.order = order

    @staticmethod
    def from_terms(term_dicts, order):
        """Build from one {exponent: coefficient} dict per component."""
        return CurveGerm([TruncatedSeries(
            {e: c if isinstance(c, QQi) else QQi(c) for e, c in d.items()},
            order) for d in term_dicts])

    @staticmethod
    def from_doc(doc):
        """Build from a curve-spec document (schema 1):
        {"truncation": N, "components": [[{"exp": e, "re": "p/q",
        "im": "p/q"}, ...], ...]}.  Coefficients must be decimal-free
        rational strings so round trips stay exact.
        """
        if not isinstance(doc, dict):
            raise TypeError("curve spec must be a JSON object")
        if doc.get("schema", 1) != 1:
            raise ValueError(f"unsupported curve spec schema "
                             f"{doc.get('schema')!r}")
        order = doc.get("truncation")
        if not isinstance(order, int) or order < 1:
            raise ValueError("truncation must be a positive integer")
        comps = doc.get("components")
        if not isinstance(comps, list):
            raise ValueError("components must be a list of term lists")
        dicts = []
        for terms in comps:
            d = {}
            for t in terms:
                e = t.get("exp")
                if not isinstance(e, int):
                    raise ValueError("term exponent must be an integer")
                d[e] = QQi(_parse_rational(t.get("re", "0")),
                           _parse_rational(t.get("im", "0")))
            dicts.append(d)
        return CurveGerm.from_terms(dicts, order)

    def to_doc(self):
        """Curve-spec document with exact rational coefficient strings;
        ``from_doc`` reads it back unchanged."""
        comps = [[{"exp": e, "re": str(c.re), "im": str(c.im)}
                  for e, c in sorted(s.terms())]
                 for s in self.components]
        return {"schema": 1, "truncation": self.order, "components": comps}

    @property
    def dimension(self):
        return len(self.components)

    def is_zero(self):
        return all(c.is_zero() for c in self.components)

    def exponents(self):
        """All exponents occurring in any component (sorted)."""
        out = set()
        for c in self.components:
            out.update(c.coeffs)
        return sorted(out)

    def compose(self, phi):
        return CurveGerm([ps_compose(c, phi) for c in self.components])

    def map_coefficients(self, fn):
        return CurveGerm([c.map_coefficients(fn) for c in self.components])

    def coefficient_vector(self, e):
        return tuple(c.coefficient(e) for c in self.components)

    def evaluate(self, z):
        """Numeric evaluation of the stored terms (polynomial germs)."""
        out = []
        for c in self.components:
            acc = 0j
            for e, coeff in c.coeffs.items():
                acc += complex(coeff) * z ** e
            out.append(acc)
        return tuple(out)

    def __eq__(self, other):
        if not isinstance(other, CurveGerm):
            return NotImplemented
        return self.components == other.components

    def __repr__(self):
        return f"CurveGerm({list(self.components)!r})"


class SingularityType:
    """Exponent chain (p_0,...,p_l) with divisors d_i = gcd(p_0..p_i).

    The divisor chain is strictly decreasing and ends at 1; p_0 > 1
    except for the degenerate smooth chain (1,), which multiplicity-1
    germs produce and which the validator rejects by design.
    """

    __slots__ = ("exponents", "divisors")

    def __init__(self, exponents):
        exponents = tuple(int(p) for p in exponents)
        if not exponents:
            raise TypeError_("length", "need at least one exponent")
        if any(p < 1 for p in exponents):
            raise TypeError_("positivity", f"non-positive entry in {exponents}")
        if any(a >= b for a, b in zip(exponents, exponents[1:])):
            raise TypeError_("ordering",
                             f"exponents not strictly increasing: {exponents}")
        divs = []
        g = 0
        for p in exponents:
            g = math.gcd(g, p)
            divs.append(g)
        if divs[-1] != 1:
            raise TypeError_("final-gcd",
                             f"divisor chain {tuple(divs)} does not reach 1")
        if any(a <= b for a, b in zip(divs, divs[1:])):
            raise TypeError_("strict-descent",
                             f"divisor chain {tuple(divs)} must strictly drop")
        self.exponents = exponents
        self.divisors = tuple(divs)

    @property
    def length(self):
        """l: the number of essential exponents past the first."""
        return len(self.exponents) - 1

    def is_smooth(self):
        return self.exponents == (1,)

    def __eq__(self, other):
        if not isinstance(other, SingularityType):
            return NotImplemented
        return self.exponents == other.exponents

    def __hash__(self):
        return hash(self.exponents)

    def __repr__(self):
        return (f"SingularityType(p={self.exponents}, d={self.divisors})")


@dataclass(frozen=True)
class TypeRejection:
    """Structured refusal from validate_type, naming the violated clause."""
    clause: str
    detail: str

    def __bool__(self):
        return False


@dataclass(frozen=True)
class PuiseuxStage:
    """One germ of the approximation tower, plus the data that produces
    the next stage: the exponent where the divisor next drops and the
    coefficient vector there (None on the final stage)."""
    germ: CurveGerm
    divisor: int
    next_exponent: Optional[int]
    next_vector: Optional[Tuple]


@dataclass(frozen=True)
class PuiseuxSequence:
    stages: Tuple[PuiseuxStage, ...]
    reparametrization: TruncatedSeries
    singularity_type: SingularityType


def multiplicity(g):
    """Minimum valuation mu across components and the coefficient vector
    at z^mu (the tangent direction, nonzero by construction)."""
    vals = [c.valuation() for c in g.components]
    live = [v for v in vals if v is not None]
    if not live:
        raise ZeroGermError(
            f"all components vanish to truncation order {g.order}")
    mu = min(live)
    tangent = tuple(c.coeffs.get(mu, c._zero_like()) for c in g.components)
    return mu, tangent


def normalize_first(g):
    """Reparametrize so the first component becomes exactly z^mu.

    The first component must attain the germ's multiplicity with leading
    coefficient 1 (arrange this with a linear change of target
    coordinates first).  Writes it as (z * unit^(1/mu))^mu and composes
    every component with the inverse of that root.
    """
    mu, _ = multiplicity(g)
    first = g.components[0]
    v = first.valuation()
    if v is None or v > mu:
        raise ValuationError(
            f"first component valuation {v} exceeds multiplicity {mu}")
    lead = first.coeffs[mu]
    if lead != lead / lead:
        raise UnitError("first component leading coefficient must be 1")
    # first = z^mu * w, w(0)=1; the degree-mu root is z * w^(1/mu)
    w = TruncatedSeries({e - mu: c for e, c in first.coeffs.items()},
                        first.order - mu)
    root = ps_nth_root(w, mu).shift(1)
    if root == TruncatedSeries.identity(root.order):
        return g, TruncatedSeries.identity(g.order)
    phi = ps_comp_inverse(root.truncate(min(root.order, g.order)))
    h = g.compose(phi)
    hv = h.components[0]
    assert hv.terms() == [(mu, lead)], "normalization must leave z^mu"
    return h, phi


def _pivot(g):
    """Deterministic exact linear change of target coordinates putting a
    multiplicity-attaining component first with leading coefficient 1."""
    mu, tangent = multiplicity(g)
    k = next(i for i, c in enumerate(tangent) if c)
    comps = list(g.components)
    lead = comps[k].coeffs[mu]
    one = lead / lead
    pivot = comps[k].scale(one / lead)
    rest = [c for i, c in enumerate(comps) if i != k]
    return CurveGerm([pivot] + rest), mu, k


def _normalized(g):
    pivoted, mu, k = _pivot(g)
    h, phi = normalize_first(pivoted)
    return h, phi, mu, k


def characteristic_exponents(g):
    """Chain of exponents where the gcd of occurring exponents drops.

    After renormalizing the pivot component to z^mu, scans all exponents
    of all components in increasing order, recording each one where the
    running gcd strictly decreases, until it reaches 1.
    """
    h, _, mu, _ = _normalized(g)
    ps = [mu]
    d = mu
    for e in h.exponents():
        if e <= mu:
            continue
        nd = math.gcd(d, e)
        if nd < d:
            ps.append(e)
            d = nd
        if d == 1:
            break
    if d != 1:
        err = TruncationError(
            f"gcd chain stuck at {d} below truncation order {h.order}; "
            "raise the order or the germ is non-primitive")
        err.residual_gcd = d
        raise err
    return SingularityType(ps)


def puiseux_sequence(g):
    """Tower of approximating germs u_0, ..., u_l.

    Stage i collects the terms of the normalized germ whose exponents the
    running divisor d_i divides, substituted z -> z^(1/d_i); consecutive
    stages then satisfy
        u_i(z) - u_(i-1)(z^(d_(i-1)/d_i)) = v_i z^(p_i/d_i) + higher
    exactly at series level, and the last stage is the normalized germ.
    """
    t = characteristic_exponents(g)
    h, phi, _, _ = _normalized(g)
    n_usable = h.order
    stages = []
    for i, d in enumerate(t.divisors):
        order_i = (n_usable - 1) // d + 1
        comps = [TruncatedSeries({e // d: c for e, c in comp.coeffs.items()
                                  if e % d == 0}, order_i)
                 for comp in h.components]
        if i + 1 < len(t.exponents):
            p_next = t.exponents[i + 1]
            v_next = h.coefficient_vector(p_next)
        else:
            p_next, v_next = None, None
        stages.append(PuiseuxStage(CurveGerm(comps), d, p_next, v_next))
    return PuiseuxSequence(tuple(stages), phi, t)


def cusp_index_formula(t):
    """kappa = (1/2) sum (d_(i-1) - d_i)(p_i - 1) over the chain."""
    total = 0
    for i in range(1, len(t.exponents)):
        total += (t.divisors[i - 1] - t.divisors[i]) * (t.exponents[i] - 1)
    if total % 2:
        raise ParityError(f"cusp index sum {total} is odd for {t}")
    return total // 2


def realize_type(t, vectors):
    """Germ sum_i v_i z^(p_i) realizing the exponent chain t.

    Needs one vector per exponent; v_0 nonzero and every later vector
    nonzero and orthogonal to v_0 in the Hermitian inner product, so the
    later terms cannot feed back into the leading direction.
    """
    vectors = [tuple(c if isinstance(c, QQi) else QQi(c) for c in v)
               for v in vectors]
    if len(vectors) != len(t.exponents):
        raise LengthError(
            f"{len(t.exponents)} exponents need as many vectors, "
            f"got {len(vectors)}")
    dims = {len(v) for v in vectors}
    if len(dims) != 1 or next(iter(dims)) < 2:
        raise DimensionError("vectors must share one dimension n >= 2")
    n = dims.pop()
    if not any(vectors[0]):
        raise OrthogonalityError("tangent vector v_0 is zero")
    for i, v in enumerate(vectors[1:], start=1):
        if not any(v):
            raise ValueError(f"vector {i} is zero; its exponent would vanish")
        if hermitian_dot(v, vectors[0]):
            raise OrthogonalityError(
                f"vector {i} is not orthogonal to the tangent")
    order = t.exponents[-1] + 1
    comps = []
    for j in range(n):
        comps.append(TruncatedSeries(
            {p: vectors[i][j] for i, p in enumerate(t.exponents)
             if vectors[i][j]}, order))
    return CurveGerm(comps)


def validate_type(exponents):
    """Check a candidate exponent chain; return the type or a structured
    rejection naming the first violated clause."""
    try:
        exponents = [int(p) for p in exponents]
    except (TypeError, ValueError):
        return TypeRejection("format", "exponents must be integers")
    if not exponents:
        return TypeRejection("length", "empty exponent list")
    if exponents[0] <= 1:
        return TypeRejection("first-exponent",
                             f"p_0 = {exponents[0]} must exceed 1")
    try:
        t = SingularityType(exponents)
    except TypeError_ as exc:
        return TypeRejection(exc.clause, str(exc))
    return t


def compare_germs(a, b):
    """Valuation and leading coefficient vector of a - b.

    Both germs must share the ambient dimension; the usable window is the
    smaller of the two truncation orders.
    """
    if a.dimension != b.dimension:
        raise DimensionError(
            f"dimension mismatch {a.dimension} != {b.dimension}")
    diffs = [sa - sb for sa, sb in zip(a.components, b.components)]
    vals = [d.valuation() for d in diffs]
    live = [v for v in vals if v is not None]
    if not live:
        raise EqualError(
            f"germs agree to truncation order {min(d.order for d in diffs)}")
    nu = min(live)
    lead = tuple(d.coeffs.get(nu, d._zero_like()) for d in diffs)
    return nu, lead


def symmetrize_reparam(psi, d):
    """Make a reparametrization commute with the rotation by a primitive
    d-th root of unity, up to terms of exponent 1 mod d.

    Given psi(z) = z + O(z^2), finds phi(z) = z + O(z^2) such that

        eta*phi(z) - psi(phi(eta*z)) = z^(d+1) * gamma(z^d)

    exactly to truncation order, where eta = exp(2*pi*i/d).  Solved
    degree by degree: at exponent m with m % d != 1 the unknown
    coefficient a_m enters through the invertible factor eta - eta^m and
    is used to kill the residual; at m % d == 1 it is left at zero and
    the residual lands in the allowed span.  Coefficients live in the
    cyclotomic field Q(zeta_lcm(4,d)).  Returns (phi, gamma).
    """
    if not isinstance(d, int) or d < 2:
        raise ValueError("symmetry order d must be an integer >= 2")
    c1 = psi.coeffs.get(1)
    if 0 in psi.coeffs or c1 is None or c1 != c1 / c1:
        raise ValuationError("reparametrization must be z + O(z^2)")
    N = psi.order
    field = CyclotomicField(math.lcm(4, d))
    eta = field.unit_root(d)
    one = field.one()

    def lift(c):
        if isinstance(c, QQi):
            return field.from_qqi(c)
        return field.from_rational(c) if not hasattr(c, "field") else c

    psi_c = psi.map_coefficients(lift)
    phi_terms = {1: one}
    eta_pow = [eta ** k for k in range(d)]
    for m in range(2, N):
        phi = TruncatedSeries(dict(phi_terms), m + 1)
        twisted = TruncatedSeries(
            {e: c * eta_pow[e % d] for e, c in phi.coeffs.items()}, m + 1)
        resid = (phi.scale(eta) -
                 ps_compose(psi_c.truncate(min(N, m + 1)), twisted))
        g_m = resid.coeffs.get(m)
        if m % d != 1 and g_m:
            phi_terms[m] = -g_m / (eta - eta_pow[m % d])
    phi = TruncatedSeries(phi_terms, N)
    twisted = TruncatedSeries(
        {e: c * eta_pow[e % d] for e, c in phi.coeffs.items()}, N)
    resid = phi.scale(eta) - ps_compose(psi_c, twisted)
    for e, c in resid.coeffs.items():
        assert e % d == 1 and e >= d + 1, \
            f"unexpected residual exponent {e} mod {d}"
    k_max = (N - 2 - d) // d
    gamma = TruncatedSeries(
        {(e - d - 1) // d: c for e, c in resid.coeffs.items()},
        max(k_max + 1, 0))
    return phi, gamma
