"""Exact arithmetic in cyclotomic fields Q(zeta_m).

The symmetrization of a reparametrization requires dividing by numbers of
the form eta - eta^k where eta is an exact root of unity; floating point
cannot certify those divisions near resonance, so elements here are
polynomials in zeta_m with Fraction coefficients, reduced modulo the m-th
cyclotomic polynomial.  Inversion is by the extended Euclidean algorithm,
which always succeeds because the modulus is irreducible.
"""
from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache

from .exact import QQi

_F0 = Fraction(0)
_F1 = Fraction(1)


# -- dense polynomial helpers (coefficients low to high, Fractions) ---------

def _trim(p):
    i = len(p)
    while i > 0 and p[i - 1] == 0:
        i -= 1
    return p[:i]


def _padd(a, b):
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else _F0) +
                  (b[i] if i < len(b) else _F0) for i in range(n)])


def _pmul(a, b):
    if not a or not b:
        return []
    out = [_F0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _pdivmod(num, den):
    num = list(num)
    q = [_F0] * max(len(num) - len(den) + 1, 0)
    dlead = den[-1]
    for k in range(len(num) - len(den), -1, -1):
        c = num[k + len(den) - 1] / dlead
        if c:
            q[k] = c
            for j, y in enumerate(den):
                num[k + j] -= c * y
    return _trim(q), _trim(num)


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m):
    """Coefficients of the m-th cyclotomic polynomial, low to high."""
    if m < 1:
        raise ValueError("index must be positive")
    p = [-_F1] + [_F0] * (m - 1) + [_F1]  # x^m - 1
    for d in range(1, m):
        if m % d == 0:
            q, r = _pdivmod(p, cyclotomic_polynomial(d))
            assert not r
            p = q
    return tuple(p)


class CyclotomicField:
    """Q(zeta_m) with exact element arithmetic."""

    def __init__(self, m):
        if not isinstance(m, int) or m < 1:
            raise ValueError("conductor must be a positive integer")
        self.m = m
        self.modulus = cyclotomic_polynomial(m)
        self.degree = len(self.modulus) - 1

    def __eq__(self, other):
        return isinstance(other, CyclotomicField) and other.m == self.m

    def __hash__(self):
        return hash(("CyclotomicField", self.m))

    def __repr__(self):
        return f"CyclotomicField({self.m})"

    def _reduce(self, poly):
        if len(poly) > self.degree:
            _, poly = _pdivmod(poly, list(self.modulus))
        return CycElem(self, tuple(poly) + (_F0,) * (self.degree - len(poly)))

    def element(self, coeffs):
        """Element sum coeffs[k] * zeta^k (any length, any ints/Fractions)."""
        return self._reduce(_trim([Fraction(c) for c in coeffs]))

    def zero(self):
        return self.element([])

    def one(self):
        return self.element([1])

    def zeta(self, k=1):
        """zeta_m^k as a field element."""
        k %= self.m
        return self._reduce([_F0] * k + [_F1])

    def unit_root(self, d, k=1):
        """Primitive d-th root of unity to the k-th power; needs d | m."""
        if self.m % d != 0:
            raise ValueError(f"{d} does not divide the conductor {self.m}")
        return self.zeta((self.m // d) * k)

    def imaginary_unit(self):
        if self.m % 4 != 0:
            raise ValueError("conductor not divisible by 4")
        return self.zeta(self.m // 4)

    def from_rational(self, q):
        return self.element([Fraction(q)])

    def from_qqi(self, z):
        """Embed a Gaussian rational; needs 4 | m unless z is real."""
        out = self.from_rational(z.re)
        if z.im:
            out = out + self.imaginary_unit() * z.im
        return out


class CycElem:
    """Residue polynomial in zeta_m; immutable."""

    __slots__ = ("field", "poly")

    def __init__(self, field, poly):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "poly", poly)

    def __setattr__(self, name, value):
        raise AttributeError("CycElem is immutable")

    def _coerce(self, other):
        if isinstance(other, CycElem):
            if other.field.m != self.field.m:
                raise ValueError("elements of different cyclotomic fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.from_rational(other)
        if isinstance(other, QQi):
            return self.field.from_qqi(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycElem(self.field,
                       tuple(a + b for a, b in zip(self.poly, o.poly)))

    __radd__ = __add__

    def __neg__(self):
        return CycElem(self.field, tuple(-a for a in self.poly))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycElem(self.field,
                       tuple(a - b for a, b in zip(self.poly, o.poly)))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.field._reduce(_pmul(_trim(list(self.poly)),
                                        _trim(list(o.poly))))

    __rmul__ = __mul__

    def inverse(self):
        a = _trim(list(self.poly))
        if not a:
            raise ZeroDivisionError("inverse of zero cyclotomic element")
        # extended Euclid: s*a + t*modulus = gcd (a unit in Q)
        r0, r1 = list(self.field.modulus), a
        s0, s1 = [], [_F1]
        while r1:
            q, r = _pdivmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _padd(s0, [-c for c in _pmul(q, s1)])
        # r0 is a nonzero constant since the modulus is irreducible
        assert len(r0) == 1
        inv = [c / r0[0] for c in s0]
        return self.field._reduce(inv)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            raise ValueError("integer powers only")
        if n < 0:
            return self.inverse() ** (-n)
        out, base = self.field.one(), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conj(self):
        """Complex conjugation, zeta -> zeta^(m-1)."""
        m = self.field.m
        lifted = [_F0] * m
        for k, c in enumerate(self.poly):
            if c:
                lifted[(-k) % m] += c
        return self.field._reduce(_trim(lifted))

    def __bool__(self):
        return any(self.poly)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.poly == o.poly

    def __hash__(self):
        return hash((self.field.m, self.poly))

    def to_complex(self):
        z = cmath.exp(2j * cmath.pi / self.field.m)
        acc = 0j
        for c in reversed(self.poly):
            acc = acc * z + complex(c)
        return acc

    def __complex__(self):
        return self.to_complex()

    def rational_part(self):
        """The element as a Fraction if it is rational, else None."""
        if any(self.poly[1:]):
            return None
        return self.poly[0] if self.poly else _F0

    def __repr__(self):
        terms = [f"{c}*z{k}" for k, c in enumerate(self.poly) if c] or ["0"]
        return f"<{' + '.join(terms)} in Q(zeta_{self.field.m})>"
