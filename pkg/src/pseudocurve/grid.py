"""Functions on the unit disc and the three disc integral operators.

Data lives on a polar tensor grid: radii from the Chebyshev-Lobatto family
on [0,1] with the origin removed (clustered at both the singularity r=0
and the boundary r=1) crossed with a power-of-two family of uniform
angles.  Angular structure is handled spectrally via the FFT; radial
structure via barycentric polynomial interpolation on the node family.

The three operators (the area-kernel inverse of d/dzbar, the boundary
Cauchy extension, and the derivative-of-area-kernel singular operator)
are all diagonal in the angular modes, so each is evaluated one mode at a
time by one-dimensional radial integrals.  Those integrals are done per
segment between consecutive radii in ratio-scaled form: every power that
appears is (smaller radius / larger radius)^k <= 1, which keeps high
modes from overflowing, and the per-segment pieces are chained by stable
cumulative recurrences running outward (from 0) or inward (from 1).

All operator code is pure and deterministic: modes are processed in a
fixed order with vectorized arithmetic, so outputs are bit-reproducible.
"""
from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import GridError, GridTooCoarse

DEFAULT_N_RADIAL = 128
DEFAULT_N_ANGULAR = 256
_MIN_RADIAL = 8
_MIN_ANGULAR = 16


def default_radii(n_radial=DEFAULT_N_RADIAL):
    """Chebyshev-Lobatto points of [0,1] without the origin (n nodes,
    last one exactly 1)."""
    j = np.arange(1, n_radial + 1)
    r = (1.0 - np.cos(np.pi * j / n_radial)) / 2.0
    r[-1] = 1.0
    return r


class GridFunction:
    """Complex vector-valued function sampled on the polar tensor grid.

    values has shape (n_radial, n_angular, n_comp); angles are
    2*pi*k/n_angular.  Immutable by convention: operators return new
    instances and never write into their inputs.
    """

    __slots__ = ("radii", "values", "n_radial", "n_angular", "n_comp")

    def __init__(self, radii, values):
        radii = np.asarray(radii, dtype=float)
        values = np.asarray(values, dtype=complex)
        if values.ndim == 2:
            values = values[:, :, None]
        if values.ndim != 3:
            raise GridError("values must have shape (radii, angles[, comp])")
        if radii.ndim != 1 or radii.shape[0] != values.shape[0]:
            raise GridError("radii length does not match the value grid")
        if radii.size == 0 or np.any(np.diff(radii) <= 0) \
                or radii[0] <= 0 or radii[-1] > 1:
            raise GridError("radii must increase strictly within (0, 1]")
        na = values.shape[1]
        if na < 2 or (na & (na - 1)) != 0:
            raise GridError(f"n_angular={na} must be a power of two")
        if not np.all(np.isfinite(values)):
            raise GridError("grid values must be finite")
        self.radii = radii
        self.values = values
        self.n_radial = radii.shape[0]
        self.n_angular = na
        self.n_comp = values.shape[2]

    @property
    def angles(self):
        return 2.0 * np.pi * np.arange(self.n_angular) / self.n_angular

    def points(self):
        """Complex node coordinates, shape (n_radial, n_angular)."""
        return self.radii[:, None] * np.exp(1j * self.angles[None, :])

    @staticmethod
    def from_callable(fn, n_radial=DEFAULT_N_RADIAL,
                      n_angular=DEFAULT_N_ANGULAR, radii=None):
        """Sample fn(z) on the grid; fn may be vectorized over a complex
        array (returning shape z.shape or z.shape + (n_comp,)) or scalar."""
        r = default_radii(n_radial) if radii is None else np.asarray(radii)
        theta = 2.0 * np.pi * np.arange(n_angular) / n_angular
        z = r[:, None] * np.exp(1j * theta[None, :])
        try:
            vals = np.asarray(fn(z), dtype=complex)
            if vals.shape[:2] != z.shape:
                raise ValueError
        except (ValueError, TypeError):
            first = np.asarray(fn(complex(z[0, 0])), dtype=complex)
            nc = first.size
            vals = np.empty(z.shape + (nc,), dtype=complex)
            for i in range(z.shape[0]):
                for k in range(z.shape[1]):
                    vals[i, k] = np.asarray(
                        fn(complex(z[i, k])), dtype=complex).reshape(nc)
        return GridFunction(r, vals)

    def boundary(self):
        """Values on the outermost circle; requires the grid to reach r=1."""
        if self.radii[-1] != 1.0:
            raise GridError("grid does not include the boundary circle")
        return self.values[-1]

    def map(self, fn):
        return GridFunction(self.radii, fn(self.values))

    def __add__(self, other):
        self._check_same(other)
        return GridFunction(self.radii, self.values + other.values)

    def __sub__(self, other):
        self._check_same(other)
        return GridFunction(self.radii, self.values - other.values)

    def scale(self, c):
        return GridFunction(self.radii, self.values * c)

    def _check_same(self, other):
        if not isinstance(other, GridFunction):
            raise GridError("expected a GridFunction")
        if other.values.shape != self.values.shape or \
                not np.array_equal(other.radii, self.radii):
            raise GridError("grids are not compatible")

    def sup_norm(self):
        return float(np.max(np.linalg.norm(self.values, axis=2)))

    def sample_at(self, z):
        """Interpolate to arbitrary points of the closed disc.

        Barycentric polynomial interpolation in r (the node polynomial is
        evaluated through the origin as well, so small |z| extrapolates
        mildly), trigonometric interpolation in the angle.
        """
        z = np.asarray(z, dtype=complex)
        flat = z.reshape(-1)
        calc = _radial_calculus(self.radii)
        modes = np.fft.fft(self.values, axis=1) / self.n_angular
        m = np.fft.fftfreq(self.n_angular, 1.0 / self.n_angular)
        out = np.empty((flat.size, self.n_comp), dtype=complex)
        for lo in range(0, flat.size, 4096):  # bound the phase-table size
            part = flat[lo:lo + 4096]
            P = calc.interp_matrix(np.abs(part))
            radial = (P @ modes.reshape(self.n_radial, -1)).reshape(
                part.size, self.n_angular, self.n_comp)
            phases = np.exp(1j * np.angle(part)[:, None] * m[None, :])
            out[lo:lo + 4096] = np.einsum("pmc,pm->pc", radial, phases)
        return out.reshape(z.shape + (self.n_comp,))

    # -- CSV round trip ----------------------------------------------------

    def save_csv(self, path):
        """Write `r,theta,comp,re,im` rows, radial-major then angular then
        component; floats via repr so reloading is bit-exact."""
        theta = self.angles
        with open(path, "w") as fh:
            fh.write("r,theta,comp,re,im\n")
            for i, r in enumerate(self.radii.tolist()):
                for k in range(self.n_angular):
                    t = float(theta[k])
                    for c in range(self.n_comp):
                        v = complex(self.values[i, k, c])
                        fh.write(f"{r!r},{t!r},{c},"
                                 f"{v.real!r},{v.imag!r}\n")

    @staticmethod
    def load_csv(path):
        with open(path) as fh:
            header = fh.readline().strip()
            if header != "r,theta,comp,re,im":
                raise GridError(f"unexpected CSV header {header!r}")
            rows = [line.rstrip("\n").split(",") for line in fh if line.strip()]
        if not rows:
            raise GridError("empty grid file")
        ncomp = max(int(row[2]) for row in rows) + 1
        radii = []
        for row in rows:
            r = float(row[0])
            if not radii or r != radii[-1]:
                if r in radii:
                    raise GridError("rows are not radial-major")
                radii.append(r)
        n_radial = len(radii)
        if len(rows) % (n_radial * ncomp):
            raise GridError("row count does not factor into a grid")
        n_angular = len(rows) // (n_radial * ncomp)
        values = np.empty((n_radial, n_angular, ncomp), dtype=complex)
        idx = 0
        for i in range(n_radial):
            for k in range(n_angular):
                for c in range(ncomp):
                    row = rows[idx]
                    idx += 1
                    if int(row[2]) != c:
                        raise GridError("component column out of order")
                    values[i, k, c] = complex(float(row[3]), float(row[4]))
        return GridFunction(np.asarray(radii), values)


# -- radial machinery --------------------------------------------------------

class _RadialCalculus:
    """Cached differentiation/quadrature tables for one radius family.

    Segments are [0, r_0] and [r_(j-1), r_j]; each carries Gauss-Legendre
    nodes.  Power tables hold the ratio-scaled factors used by the mode
    integrals; every entry is <= 1 by construction.
    """

    def __init__(self, radii, n_gl=10):
        self.radii = radii
        n = radii.size
        self.n = n
        # barycentric weights, log-scaled for stability at large n
        x = radii[:, None] - radii[None, :]
        np.fill_diagonal(x, 1.0)
        logs = np.log(np.abs(4.0 * x))
        signs = np.prod(np.sign(x), axis=1)
        lw = -np.sum(logs, axis=1)
        self.bary_w = signs * np.exp(lw - np.max(lw))
        # differentiation matrix
        D = np.zeros((n, n))
        for i in range(n):
            diff = radii[i] - radii
            diff[i] = 1.0
            D[i] = (self.bary_w / self.bary_w[i]) / diff
            D[i, i] = 0.0
            D[i, i] = -np.sum(D[i])
        self.diff = D
        # Gauss-Legendre nodes per segment
        gx, gw = np.polynomial.legendre.leggauss(n_gl)
        left = np.concatenate([[0.0], radii[:-1]])
        right = radii
        half = (right - left) / 2.0
        mid = (right + left) / 2.0
        self.gl_rho = mid[:, None] + half[:, None] * gx[None, :]
        self.gl_w = np.repeat(half[:, None], n_gl, axis=1) * gw[None, :]
        self.n_gl = n_gl
        self.P = self.interp_matrix(self.gl_rho.reshape(-1))
        self._pow = {}

    def interp_matrix(self, points):
        """Rows of barycentric interpolation weights from the radii to
        arbitrary points in [0, 1]."""
        points = np.asarray(points, dtype=float)
        diff = points[:, None] - self.radii[None, :]
        exact = np.isclose(diff, 0.0, rtol=0.0, atol=1e-15)
        safe = np.where(exact, 1.0, diff)
        terms = self.bary_w[None, :] / safe
        P = terms / np.sum(terms, axis=1, keepdims=True)
        hit = exact.any(axis=1)
        if np.any(hit):
            P[hit] = 0.0
            P[hit, np.argmax(exact[hit], axis=1)] = 1.0
        return P

    def integrate(self, node_values):
        """Integral over [0,1] dr of a function given at the radii
        (values at Gauss nodes by polynomial interpolation)."""
        node_values = np.asarray(node_values)
        g = self.P @ node_values.reshape(self.n, -1)
        g = g.reshape(self.gl_rho.shape + node_values.shape[1:])
        return np.tensordot(self.gl_w, g, axes=([0, 1], [0, 1]))

    def power_tables(self, max_exp):
        """(pow_out, pow_in, ratio_out, ratio_in) up to exponent max_exp.

        pow_out[j, q, e] = (left_j / rho_jq)^e   (left anchor, outer sums)
        pow_in [j, q, e] = (rho_jq / right_j)^e  (right anchor, inner sums)
        ratio_out[i, e]  = (r_i / r_(i+1))^e
        ratio_in [j, e]  = (r_(j-1) / r_j)^e
        """
        if max_exp in self._pow:
            return self._pow[max_exp]
        e = np.arange(max_exp + 1)
        left = np.concatenate([[0.0], self.radii[:-1]])
        with np.errstate(divide="ignore"):
            lo = np.where(left[:, None] > 0, left[:, None] / self.gl_rho, 0.0)
        pow_out = lo[:, :, None] ** e[None, None, :]
        hi = self.gl_rho / self.radii[:, None]
        pow_in = hi[:, :, None] ** e[None, None, :]
        rr = self.radii[:-1] / self.radii[1:]
        ratio_out = rr[:, None] ** e[None, :]
        ratio_in = np.zeros((self.n, max_exp + 1))
        ratio_in[1:] = (self.radii[:-1] / self.radii[1:])[:, None] \
            ** e[None, :]
        self._pow[max_exp] = (pow_out, pow_in, ratio_out, ratio_in)
        return self._pow[max_exp]


_CALC_CACHE = {}


def _radial_calculus(radii):
    key = radii.tobytes()
    calc = _CALC_CACHE.get(key)
    if calc is None:
        calc = _RadialCalculus(radii)
        _CALC_CACHE[key] = calc
    return calc


def _require_fine(f):
    if f.n_radial < _MIN_RADIAL or f.n_angular < _MIN_ANGULAR:
        raise GridTooCoarse(
            f"grid {f.n_radial}x{f.n_angular} below the documented minimum "
            f"{_MIN_RADIAL}x{_MIN_ANGULAR}")


# -- Wirtinger derivatives ----------------------------------------------------

def wirtinger(f):
    """Both Wirtinger derivatives of a grid function.

    Returns (df/dz, df/dzbar) in the convention with the factor 1/2:
    df/dzbar = (d/dx + i d/dy) f / 2.  Angular derivative is spectral
    (Nyquist mode dropped), radial derivative is the barycentric
    differentiation matrix of the node family.
    """
    _require_fine(f)
    calc = _radial_calculus(f.radii)
    fr = np.einsum("ij,jkc->ikc", calc.diff, f.values)
    modes = np.fft.fft(f.values, axis=1)
    m = np.fft.fftfreq(f.n_angular, 1.0 / f.n_angular)
    m[f.n_angular // 2] = 0.0
    ft = np.fft.ifft(modes * (1j * m)[None, :, None], axis=1)
    r = f.radii[:, None, None]
    eith = np.exp(1j * f.angles)[None, :, None]
    dz = 0.5 / eith * (fr - 1j * ft / r)
    dzbar = 0.5 * eith * (fr + 1j * ft / r)
    return GridFunction(f.radii, dz), GridFunction(f.radii, dzbar)


def wirtinger_nohalf(f):
    """The same derivatives without the 1/2 factor (d/dx +- i d/dy),
    for formulas stated in that convention; exactly 2x `wirtinger`."""
    dz, dzbar = wirtinger(f)
    return dz.scale(2.0), dzbar.scale(2.0)


# -- the three operators ------------------------------------------------------

def _mode_shift_down(modes_out, na):
    """Multiply by e^(-i theta) in mode space: index k receives k+1, and
    the slot that would alias the (unrepresentable) mode below -na/2 is
    zeroed."""
    rolled = np.roll(modes_out, -1, axis=1)
    rolled[:, na // 2 - 1, :] = 0.0
    return rolled


def cauchy_green(f):
    """Area-kernel operator: g(z) = -(1/pi) * integral of f(w)/(w - z)
    over the disc; the right inverse of d/dzbar (g's dzbar equals f).

    Angular mode m of the input feeds output mode m-1 through two radial
    Volterra integrals: modes m >= 1 integrate outward data (rho > r),
    modes m <= 0 integrate inward data (rho < r).  Constants: an input
    identically 1 returns zbar.
    """
    _require_fine(f)
    calc = _radial_calculus(f.radii)
    n, na, nc = f.n_radial, f.n_angular, f.n_comp
    modes = np.fft.fft(f.values, axis=1) / na
    G = (calc.P @ modes.reshape(n, na * nc)).reshape(n, calc.n_gl, na, nc)
    m_signed = np.fft.fftfreq(na, 1.0 / na).astype(int)
    pow_out, pow_in, ratio_out, ratio_in = calc.power_tables(na // 2 + 1)
    out_modes = np.zeros_like(modes)

    pos = np.where(m_signed >= 1)[0]
    mp = m_signed[pos]
    # A[j-1, m, c] = integral over [r_(j-1), r_j] of f_m * (r_(j-1)/rho)^(m-1)
    wq = calc.gl_w[1:, :, None] * pow_out[1:, :, mp - 1]
    A = np.einsum("jqm,jqmc->jmc", wq, G[1:, :, pos, :])
    H = np.zeros((n, len(pos), nc), dtype=complex)
    for i in range(n - 2, -1, -1):
        H[i] = A[i] + ratio_out[i, mp - 1][:, None] * H[i + 1]
    out_modes[:, pos, :] = -2.0 * H

    neg = np.where(m_signed <= 0)[0]
    mn = m_signed[neg]
    wq = calc.gl_w[:, :, None] * pow_in[:, :, 1 - mn]
    B = np.einsum("jqm,jqmc->jmc", wq, G[:, :, neg, :])
    W = np.zeros((n, len(neg), nc), dtype=complex)
    W[0] = B[0]
    for j in range(1, n):
        W[j] = ratio_in[j, 1 - mn][:, None] * W[j - 1] + B[j]
    out_modes[:, neg, :] = 2.0 * W

    out_modes = _mode_shift_down(out_modes, na)
    vals = np.fft.ifft(out_modes * na, axis=1)
    return GridFunction(f.radii, vals)


def cauchy_green_origin(f):
    """Value of the area-kernel operator at z = 0: -2 * integral over
    [0,1] of mode 1 of f.  Returns one complex number per component."""
    _require_fine(f)
    calc = _radial_calculus(f.radii)
    mode1 = np.fft.fft(f.values, axis=1)[:, 1, :] / f.n_angular
    return -2.0 * calc.integrate(mode1)


def cauchy_boundary(boundary, radii=None):
    """Holomorphic extension of boundary data by its nonnegative angular
    modes: mode k >= 0 extends as (r e^(i theta))^k, negative modes drop.
    """
    boundary = np.asarray(boundary, dtype=complex)
    if boundary.ndim == 1:
        boundary = boundary[:, None]
    na, nc = boundary.shape
    if na < _MIN_ANGULAR or (na & (na - 1)) != 0:
        raise GridTooCoarse(f"need a power-of-two angular count >= "
                            f"{_MIN_ANGULAR}, got {na}")
    r = default_radii() if radii is None else np.asarray(radii, dtype=float)
    modes = np.fft.fft(boundary, axis=0) / na
    k = np.fft.fftfreq(na, 1.0 / na).astype(int)
    keep = k >= 0
    radial = np.where(keep[None, :], r[:, None] **
                      np.where(keep, k, 0)[None, :], 0.0)
    out_modes = radial[:, :, None] * modes[None, :, :]
    vals = np.fft.ifft(out_modes * na, axis=1)
    return GridFunction(r, vals)


def cauchy_boundary_origin(boundary):
    """Value at 0 of the boundary extension: the mean of the data."""
    boundary = np.asarray(boundary, dtype=complex)
    if boundary.ndim == 1:
        boundary = boundary[:, None]
    return np.mean(boundary, axis=0)


def calderon_zygmund(f):
    """Singular integral operator: the z-derivative of the area-kernel
    operator, computed spectrally (no principal-value quadrature).
    Annihilates antiholomorphic input and constants."""
    _require_fine(f)
    return wirtinger(cauchy_green(f))[0]


def cg_identity_residual(f):
    """Sup norm over interior nodes of
    f - (boundary extension of f) - (area kernel applied to df/dzbar):
    the discrete defect of the disc reproduction identity."""
    _require_fine(f)
    _, dzbar = wirtinger(f)
    tc = cauchy_boundary(f.boundary(), radii=f.radii)
    tcg = cauchy_green(dzbar)
    resid = f.values - tc.values - tcg.values
    interior = resid[f.radii < 1.0]
    return float(np.max(np.abs(interior))) if interior.size else 0.0
