"""Truncated power series with exact coefficients.

A series is a finite set of (exponent, coefficient) terms below a stated
truncation order N: it represents a function known modulo O(z^N).  The
order is data and every operation propagates it pessimistically, so a
reported coefficient is never contaminated by unknown terms of an input.

Coefficients default to Gaussian rationals (:class:`pseudocurve.exact.QQi`)
but any exact field element with ``+ - * /``, ``bool`` and ``==`` works;
the symmetrization routine uses cyclotomic field elements.
"""
from __future__ import annotations

from .errors import UnitError, ValuationError
from .exact import QQi


class TruncatedSeries:
    """Sparse truncated power series sum c_e z^e + O(z^order).

    Invariants: exponents are nonnegative integers strictly below
    ``order``; no stored coefficient equals zero.
    """

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs, order):
        if not isinstance(order, int) or order < 0:
            raise ValueError("truncation order must be a nonnegative integer")
        clean = {}
        for e, c in (coeffs.items() if isinstance(coeffs, dict) else coeffs):
            if not isinstance(e, int) or e < 0:
                raise ValueError(f"bad exponent {e!r}")
            if e >= order:
                continue
            if e in clean:
                c = clean[e] + c
            if c:
                clean[e] = c
            elif e in clean:
                del clean[e]
        self.coeffs = clean
        self.order = order

    # -- constructors ---------------------------------------------------

    @staticmethod
    def from_terms(terms, order):
        return TruncatedSeries(dict(terms), order)

    @staticmethod
    def zero(order):
        return TruncatedSeries({}, order)

    @staticmethod
    def one(order):
        return TruncatedSeries({0: QQi(1)}, order)

    @staticmethod
    def identity(order):
        """The series z."""
        return TruncatedSeries({1: QQi(1)}, order)

    @staticmethod
    def monomial(exp, coeff, order):
        return TruncatedSeries({exp: coeff}, order)

    # -- inspection -------------------------------------------------------

    def terms(self):
        """Sorted (exponent, coefficient) pairs."""
        return sorted(self.coeffs.items())

    def coefficient(self, e):
        if e >= self.order:
            raise ValuationError(
                f"coefficient at exponent {e} is beyond order {self.order}")
        zero = self._zero_like()
        return self.coeffs.get(e, zero)

    def _zero_like(self):
        if self.coeffs:
            c = next(iter(self.coeffs.values()))
            return c - c
        return QQi(0)

    def valuation(self):
        """Smallest exponent with nonzero coefficient, or None if the
        series is zero to its truncation order."""
        return min(self.coeffs) if self.coeffs else None

    def valuation_effective(self):
        """Valuation for order bookkeeping: unknown terms start at order."""
        v = self.valuation()
        return self.order if v is None else v

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.order, tuple(self.terms())))

    def __repr__(self):
        body = " + ".join(f"({c!r})z^{e}" for e, c in self.terms()) or "0"
        return f"<{body} + O(z^{self.order})>"

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        order = min(self.order, other.order)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            if e in out:
                s = out[e] + c
                if s:
                    out[e] = s
                else:
                    del out[e]
            else:
                out[e] = c
        return TruncatedSeries(out, order)

    def __neg__(self):
        return TruncatedSeries({e: -c for e, c in self.coeffs.items()},
                               self.order)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        other = self._coerce(other)
        order = min(self.order + other.valuation_effective(),
                    other.order + self.valuation_effective())
        out = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                if e >= order:
                    continue
                p = c1 * c2
                if e in out:
                    s = out[e] + p
                    if s:
                        out[e] = s
                    else:
                        del out[e]
                elif p:
                    out[e] = p
        return TruncatedSeries(out, order)

    def _coerce(self, other):
        if isinstance(other, TruncatedSeries):
            return other
        # scalars act as constant series of infinite knowledge; use own order
        return TruncatedSeries({0: other}, self.order)

    def scale(self, c):
        return TruncatedSeries({e: x * c for e, x in self.coeffs.items()},
                               self.order)

    def shift(self, k):
        """Multiply by z^k (order shifts with the terms)."""
        return TruncatedSeries({e + k: c for e, c in self.coeffs.items()},
                               self.order + k)

    def truncate(self, order):
        if order > self.order:
            raise ValuationError("cannot extend knowledge by truncating")
        return TruncatedSeries(self.coeffs, order)

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("series powers must be nonnegative integers")
        if self.coeffs:
            c = next(iter(self.coeffs.values()))
            unit = c / c
        else:
            unit = QQi(1)
        result = TruncatedSeries({0: unit},
                                 self.order + n * self.valuation_effective())
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def map_coefficients(self, fn, order=None):
        out = {}
        for e, c in self.coeffs.items():
            v = fn(c)
            if v:
                out[e] = v
        return TruncatedSeries(out, self.order if order is None else order)


# -- module-level operation names ------------------------------------------

def ps_add(a, b):
    """Sum; order = min of operand orders."""
    return a + b


def ps_mul(a, b):
    """Cauchy product; order accounts for valuation shifts of unknowns."""
    return a * b


def ps_compose(f, g):
    """f(g(z)) for g with g(0) = 0.

    Raises ``ValuationError`` when g has a constant term.  The result
    order is min(order(f)*val(g), (val(f')-adjusted) propagation of
    order(g)); see the module notes.
    """
    if 0 in g.coeffs:
        raise ValuationError("inner series must vanish at 0")
    v = g.valuation_effective()
    if v == 0:
        raise ValuationError("inner series is unknown at order 0")
    # unknown tail of f enters at f-order * val(g); an unknown coefficient
    # of g at its order propagates through f'(g), whose valuation is
    # (min exponent >= 1 in f) - 1 (or order(f) - 1 when f looks constant)
    pos = [e for e in f.coeffs if e >= 1]
    vf1 = (min(pos) - 1) if pos else max(f.order - 1, 0)
    order = min(f.order * v, vf1 * v + g.order)
    zero = TruncatedSeries({}, order)
    # Horner over the sparse exponents of f, high to low
    exps = sorted(f.coeffs)
    acc = zero
    prev = None
    for e in reversed(exps):
        if prev is None:
            acc = TruncatedSeries({0: f.coeffs[e]}, order)
        else:
            acc = acc * (g ** (prev - e)) + TruncatedSeries(
                {0: f.coeffs[e]}, order)
        prev = e
    if prev is None:
        return zero
    if prev > 0:
        acc = acc * (g ** prev)
    return acc.truncate(min(order, acc.order))


def ps_inv(f):
    """Multiplicative inverse of a series with f(0) != 0."""
    c0 = f.coeffs.get(0)
    if c0 is None or not c0:
        raise ValuationError("series is not a unit (constant term 0)")
    n = f.order
    one = c0 / c0
    b = {0: one / c0}
    for m in range(1, n):
        s = None
        for e, c in f.coeffs.items():
            if 1 <= e <= m and (m - e) in b:
                t = c * b[m - e]
                s = t if s is None else s + t
        if s is not None and s:
            b[m] = -(s / c0)
    return TruncatedSeries(b, n)


def ps_nth_root(f, n):
    """The branch of f^{1/n} with value 1 at 0; requires f(0) = 1.

    Degree-by-degree recurrence from n*g'*f = f'*g, exact in the
    coefficient field.
    """
    if not isinstance(n, int) or n < 1:
        raise ValueError("root index must be a positive integer")
    c0 = f.coeffs.get(0)
    if c0 is None or c0 != 1:
        raise UnitError("nth root requires constant term exactly 1")
    N = f.order
    one = c0
    b = {0: one}
    for m in range(1, N):
        # m f_m + sum_{j<m} j f_j b_{m-j} - n sum_{j<m} j b_j f_{m-j}
        s = None
        fm = f.coeffs.get(m)
        if fm is not None:
            s = fm * m
        for j, fj in f.coeffs.items():
            if 1 <= j < m and (m - j) in b:
                t = fj * j * b[m - j]
                s = t if s is None else s + t
        for j in list(b):
            if 1 <= j < m:
                fmj = f.coeffs.get(m - j)
                if fmj is not None:
                    t = b[j] * (j * n) * fmj
                    s = -t if s is None else s - t
        if s is not None and s:
            b[m] = s / (n * m)
    return TruncatedSeries(b, N)


def ps_comp_inverse(f):
    """Compositional inverse of f = z + O(z^2) (same truncation order).

    Newton iteration g <- g - (f(g) - z) / f'(g) with doubling accuracy.
    """
    c1 = f.coeffs.get(1)
    if 0 in f.coeffs or c1 is None or c1 != c1 / c1:
        raise ValuationError("inverse requires f = z + O(z^2)")
    N = f.order
    ident = TruncatedSeries({1: c1}, N)
    if N <= 2:
        return ident
    fprime = TruncatedSeries({e - 1: c * e for e, c in f.coeffs.items()
                              if e >= 1}, N - 1)
    g = ident
    for _ in range(64):
        err = ps_compose(f, g).truncate(N) - ident
        if err.is_zero():
            return g.truncate(N)
        den = ps_compose(fprime, g)
        g = (g - err * ps_inv(den)).truncate(N)
    raise ValuationError("inverse iteration did not stabilize")
