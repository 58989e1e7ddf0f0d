"""Sphere links of plane curve germs.

Slicing a curve in C^2 by a small 3-sphere produces closed space curves;
their linking numbers carry the local intersection theory.  This module
computes the slices, Gauss linking numbers through stereographic charts,
the Bennequin index of a slice relative to the contact planes of an
almost complex structure, the topological cusp index, wall-crossing
bookkeeping between two sphere radii, and the genus ledger.

Orientation convention: slice polylines are ordered by increasing
parameter angle, and the stereographic charts are oriented so that the
two coordinate circles {(re^(it), 0)} and {(0, re^(it))} link +1.  Every
signed quantity below is relative to that normalization.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import (DimensionError, DisjointnessError, DomainError,
                     ExceptionalRadiusError, ParityError, PoleError,
                     PrecisionError, TransversalityError,
                     UnderdeterminedError)
from .grid import GridFunction
from .singularity import (CurveGerm, characteristic_exponents,
                          compare_germs, cusp_index_formula)
from .solver import _eval_tables, _germ_tables
from .structures import StructureField, builtin

_SPHERE_TOL = 1e-8
_PAIRS_PER_BLOCK = 1_000_000


class SphereCurve:
    """Closed oriented polylines on the 3-sphere of a given radius.

    ``components`` is a list of (N, 4) float arrays; consecutive rows are
    joined by segments and the last row connects back to the first.
    Orientation is the row order.  Points must lie on the sphere within
    1e-8 * radius; distinct components must be disjoint, and their
    minimum gap is kept in ``min_gap`` (None for a single component).
    """

    def __init__(self, radius, components):
        radius = float(radius)
        if not radius > 0:
            raise DomainError(f"sphere radius {radius} must be positive")
        comps = []
        for k, c in enumerate(components):
            c = np.array(c, dtype=float)
            if c.ndim != 2 or c.shape[1] != 4:
                raise DimensionError(
                    f"component {k} is not a point list in R^4")
            if c.shape[0] < 3:
                raise DomainError(
                    f"component {k} has {c.shape[0]} points; need >= 3")
            off = np.abs(np.linalg.norm(c, axis=1) - radius)
            if off.max() > _SPHERE_TOL * radius:
                raise DomainError(
                    f"component {k} leaves the sphere by "
                    f"{off.max():.3e} (> 1e-8 r)")
            c.flags.writeable = False
            comps.append(c)
        if not comps:
            raise DomainError("sphere curve needs at least one component")
        self.radius = radius
        self.components = tuple(comps)
        self.min_gap = None
        if len(comps) > 1:
            gap = math.inf
            for i in range(len(comps)):
                for j in range(i + 1, len(comps)):
                    gap = min(gap, _min_point_gap(comps[i], comps[j]))
            if gap <= 1e-12 * radius:
                raise DomainError(
                    f"components touch (gap {gap:.3e})")
            self.min_gap = gap

    def reversed(self):
        """Same curve with every component's orientation flipped."""
        return SphereCurve(self.radius,
                           [c[::-1].copy() for c in self.components])

    def merged_with(self, other):
        """Union as a multi-component curve; radii must agree."""
        if abs(other.radius - self.radius) > _SPHERE_TOL * self.radius:
            raise DomainError(
                f"radius mismatch {self.radius} vs {other.radius}")
        return SphereCurve(self.radius,
                           list(self.components) + list(other.components))

    def to_json(self):
        return json.dumps({
            "schema": 1,
            "radius": self.radius,
            "components": [c.tolist() for c in self.components],
        })

    @staticmethod
    def from_json(text):
        doc = json.loads(text)
        if doc.get("schema") != 1:
            raise DomainError(f"unsupported schema {doc.get('schema')!r}")
        return SphereCurve(doc["radius"], doc["components"])


def _min_point_gap(a, b):
    gap = math.inf
    step = max(1, _PAIRS_PER_BLOCK // max(b.shape[0], 1))
    for lo in range(0, a.shape[0], step):
        d = a[lo:lo + step, None, :] - b[None, :, :]
        gap = min(gap, float(np.sqrt((d * d).sum(-1)).min()))
    return gap


def _self_gap(pts):
    """Closest approach between different strands of one polyline.

    Pairs within a window along the curve are excluded, so the result
    measures how near the curve comes back to itself, not the sampling
    density.
    """
    n = pts.shape[0]
    w = max(3, n // 64)
    idx = np.arange(n)
    gap = math.inf
    step = max(1, _PAIRS_PER_BLOCK // n)
    for lo in range(0, n, step):
        d = np.sqrt(((pts[lo:lo + step, None, :]
                      - pts[None, :, :]) ** 2).sum(-1))
        sep = np.abs(idx[lo:lo + step, None] - idx[None, :])
        d[np.minimum(sep, n - sep) <= w] = math.inf
        gap = min(gap, float(d.min()))
    return gap


def _complex_pairs(points4):
    return points4[..., 0] + 1j * points4[..., 1], \
        points4[..., 2] + 1j * points4[..., 3]


def _germ_norm_evaluator(curve):
    tables = _germ_tables(curve)

    def ev(z):
        return _eval_tables(tables, np.asarray(z, dtype=complex))

    return ev, 1.0


def _grid_norm_evaluator(curve):
    if curve.n_comp != 2:
        raise DimensionError(
            f"grid has {curve.n_comp} components; slicing needs 2")

    def ev(z):
        return curve.sample_at(np.asarray(z, dtype=complex))

    return ev, float(curve.radii[-1])


def sphere_slice(curve, r, samples=1024):
    """Intersection of the curve with the sphere |u| = r.

    For each of ``samples`` parameter angles the radial equation
    |u(rho e^(i theta))| = r is solved by bisection after a scan
    certifies exactly one crossing; several crossings (or none) mean the
    radius is outside the regime where |u| grows monotonically along
    rays, and raise TransversalityError.  The result is a single closed
    polyline ordered by the parameter angle.
    """
    if isinstance(curve, CurveGerm):
        if curve.dimension != 2:
            raise DimensionError(
                f"germ dimension {curve.dimension}; slicing needs 2")
        ev, rho_max = _germ_norm_evaluator(curve)
    elif isinstance(curve, GridFunction):
        ev, rho_max = _grid_norm_evaluator(curve)
    else:
        raise TypeError("curve must be a CurveGerm or a GridFunction")
    r = float(r)
    if not r > 0:
        raise DomainError(f"slice radius {r} must be positive")
    samples = int(samples)
    if samples < 16:
        raise DomainError(f"samples {samples} too few for a polyline")

    theta = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    phases = np.exp(1j * theta)
    rho_scan = np.geomspace(1e-9 * rho_max, rho_max, 512)

    def norms(z):
        return np.linalg.norm(ev(z), axis=-1)

    f = norms(rho_scan[:, None] * phases[None, :]) - r   # (512, samples)
    flips = (f[:-1] * f[1:]) < 0
    counts = flips.sum(axis=0)
    if np.any(counts == 0):
        raise TransversalityError(
            f"radius {r} is never reached along some rays")
    if np.any(counts > 1):
        raise TransversalityError(
            f"multiple radial crossings at radius {r}; shrink it")
    idx = np.argmax(flips, axis=0)
    lo, hi = rho_scan[idx], rho_scan[idx + 1]
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        below = (norms(mid * phases) - r) < 0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    z = 0.5 * (lo + hi) * phases
    u = ev(z)
    pts = np.stack([u[:, 0].real, u[:, 0].imag,
                    u[:, 1].real, u[:, 1].imag], axis=1)
    nrm = np.linalg.norm(pts, axis=1)
    if np.any(np.abs(nrm - r) > 1e-6 * r):
        raise TransversalityError(
            f"bisection failed to land on the sphere at radius {r}")
    pts *= (r / nrm)[:, None]
    return SphereCurve(r, [pts])


# ---------------------------------------------------------------------------
# linking numbers

# unit pole candidates: diagonal directions avoid the coordinate circles
_POLE_SIGNS = np.array([
    (1, 1, 1, 1), (-1, -1, -1, -1), (1, -1, 1, -1), (-1, 1, -1, 1),
    (1, 1, -1, -1), (-1, -1, 1, 1), (1, -1, -1, 1), (-1, 1, 1, -1),
], dtype=float) / 2.0


def _stereographic(points, pole_hat, radius):
    """Project sphere points to R^3 from the given unit pole.

    The pole is rotated to the north pole by a Householder reflection
    composed with one axis flip, keeping the chart in SO(4) so every
    pole induces the same orientation.
    """
    e4 = np.array([0.0, 0.0, 0.0, 1.0])
    v = pole_hat - e4
    vv = float(v @ v)
    if vv < 1e-28:
        y = points
    else:
        y = points - np.outer(points @ v, v) * (2.0 / vv)
        y = y * np.array([-1.0, 1.0, 1.0, 1.0])     # restore det +1
    denom = radius - y[:, 3]
    return radius * y[:, :3] / denom[:, None]


def _segment_gauss(P, Q):
    """Exact Gauss linking of two closed polylines in R^3."""
    a1 = P
    a2 = np.roll(P, -1, axis=0)
    b1 = Q
    b2 = np.roll(Q, -1, axis=0)
    ta = a2 - a1
    tb = b2 - b1
    total = 0.0
    step = max(1, _PAIRS_PER_BLOCK // Q.shape[0])
    for s in range(0, P.shape[0], step):
        sl = slice(s, s + step)
        r00 = b1[None, :, :] - a1[sl, None, :]
        r01 = b2[None, :, :] - a1[sl, None, :]
        r10 = b1[None, :, :] - a2[sl, None, :]
        r11 = b2[None, :, :] - a2[sl, None, :]
        n1 = _hat(np.cross(r00, r01))
        n2 = _hat(np.cross(r01, r11))
        n3 = _hat(np.cross(r11, r10))
        n4 = _hat(np.cross(r10, r00))
        ang = (np.arcsin(_dot(n1, n2)) + np.arcsin(_dot(n2, n3))
               + np.arcsin(_dot(n3, n4)) + np.arcsin(_dot(n4, n1)))
        sgn = -np.sign(_dot(np.cross(ta[sl, None, :], tb[None, :, :]), r00))
        total += float((ang * sgn).sum())
    return total / (4 * np.pi)


def _hat(v):
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    return v / np.where(n < 1e-300, 1.0, n)


def _dot(x, y):
    return np.clip((x * y).sum(-1), -1.0, 1.0)


def linking(a, b, pole=None):
    """Linking number of two disjoint sphere curves.

    Projects both curves stereographically from the first admissible of
    8 fixed diagonal poles (any pole closer than 0.1 r to either curve
    is skipped; ``pole`` forces one candidate) and sums the exact
    segment-pair Gauss contributions over all component pairs.  The sum
    must land within 0.1 of an integer, else PrecisionError.
    """
    if not isinstance(a, SphereCurve) or not isinstance(b, SphereCurve):
        raise TypeError("linking expects two SphereCurve arguments")
    r = a.radius
    if abs(b.radius - r) > _SPHERE_TOL * r:
        raise DomainError(f"radius mismatch {a.radius} vs {b.radius}")
    all_pts = np.vstack(a.components + b.components)
    for ca in a.components:
        for cb in b.components:
            if _min_point_gap(ca, cb) <= 1e-12 * r:
                raise DomainError("curves touch; linking is undefined")

    candidates = range(len(_POLE_SIGNS)) if pole is None else [pole]
    chosen = None
    for k in candidates:
        pole_pt = r * _POLE_SIGNS[k]
        if np.linalg.norm(all_pts - pole_pt, axis=1).min() > 0.1 * r:
            chosen = k
            break
    if chosen is None:
        raise PoleError("every candidate pole sits within 0.1 r of the "
                        "curves")
    pole_hat = _POLE_SIGNS[chosen]
    proj_a = [_stereographic(c, pole_hat, r) for c in a.components]
    proj_b = [_stereographic(c, pole_hat, r) for c in b.components]
    val = 0.0
    for pa in proj_a:
        for pb in proj_b:
            val += _segment_gauss(pa, pb)
    nearest = round(val)
    if abs(val - nearest) > 0.1:
        raise PrecisionError(
            f"Gauss sum {val:.4f} is {abs(val - nearest):.3f} from an "
            "integer")
    return int(nearest)


# ---------------------------------------------------------------------------
# Bennequin index

def _contact_frame(points, J):
    """Unit normals (within TS^3) of the contact planes TS^3 ∩ J(TS^3).

    Returns (n1, n2): the sphere normal and the in-sphere normal of the
    contact plane at each point.
    """
    n1 = points / np.linalg.norm(points, axis=1, keepdims=True)
    jmat = J.eval(points)
    m = np.einsum("pji,pj->pi", jmat, n1)      # J^T n1
    m = m - (m * n1).sum(1, keepdims=True) * n1
    mn = np.linalg.norm(m, axis=1, keepdims=True)
    if mn.min() < 1e-12:
        raise TransversalityError(
            "contact plane degenerates along the curve")
    return n1, m / mn


def transversality_margin(gamma, J=None):
    """Minimum |cos| between curve tangents and the contact normal.

    Zero means the curve is tangent to a contact plane somewhere; the
    Bennequin pushoff needs this margin to be positive.
    """
    J = _ambient_structure(J)
    worst = math.inf
    for c in gamma.components:
        _, n2 = _contact_frame(c, J)
        t = np.roll(c, -1, axis=0) - c
        t = t / np.linalg.norm(t, axis=1, keepdims=True)
        worst = min(worst, float(np.abs((t * n2).sum(1)).min()))
    return worst


def _ambient_structure(J):
    if J is None:
        return builtin("standard", {"dim": 4})
    if not isinstance(J, StructureField):
        raise TypeError("J must be a StructureField")
    if J.dim != 4:
        raise DimensionError(f"structure dimension {J.dim}; slices "
                             "live in R^4")
    return J


def bennequin_report(gamma, J=None, eps=1e-2):
    """Bennequin index with the diagnostics used to certify it.

    The curve is pushed along the section of the contact distribution
    obtained by projecting (-conj(w2), conj(w1)) onto the contact plane,
    by eps * r (halved up to 4 times until the pushoff clears the curve
    by a quarter of the offset), and the linking number of curve and
    pushoff is returned together with the transversality margin and the
    offset actually used.
    """
    if len(gamma.components) != 1:
        raise DomainError("Bennequin index needs a single-component curve")
    J = _ambient_structure(J)
    pts = gamma.components[0]
    r = gamma.radius
    margin = transversality_margin(gamma, J)
    if margin < 1e-9:
        raise TransversalityError(
            f"curve tangent to a contact plane (margin {margin:.2e})")
    w1, w2 = _complex_pairs(pts)
    v = np.stack([-w2.real, w2.imag, w1.real, -w1.imag], axis=1)
    n1, n2 = _contact_frame(pts, J)
    v = v - (v * n1).sum(1, keepdims=True) * n1
    v = v - (v * n2).sum(1, keepdims=True) * n2
    vn = np.linalg.norm(v, axis=1, keepdims=True)
    if vn.min() < 1e-9 * r:
        raise TransversalityError(
            "framing section vanishes on the curve")
    v /= vn

    # the offset must stay inside the curve's own clearance, or the
    # pushoff slips past a neighboring strand and links with the wrong
    # one; the polyline must also resolve that clearance
    gap = _self_gap(pts)
    max_chord = float(np.linalg.norm(
        np.roll(pts, -1, axis=0) - pts, axis=1).max())
    if 3 * max_chord > gap:
        raise PrecisionError(
            f"polyline too coarse for its self-clearance (chord "
            f"{max_chord:.2e} vs gap {gap:.2e}); increase samples")
    eps_eff = min(eps, 0.25 * gap / r)

    for attempt in range(5):
        off = eps_eff * (0.5 ** attempt)
        q = pts + (off * r) * v
        q *= (r / np.linalg.norm(q, axis=1))[:, None]
        if _min_point_gap(pts, q) > 0.25 * off * r:
            b = linking(gamma, SphereCurve(r, [q]))
            return {"bennequin": b, "margin": margin, "offset": off}
    raise DisjointnessError(
        f"pushoff still meets the curve at offset {off:.3e}")


def bennequin(gamma, J=None, eps=1e-2):
    """Bennequin index of a sphere curve (see bennequin_report)."""
    return bennequin_report(gamma, J, eps)["bennequin"]


# ---------------------------------------------------------------------------
# germ-level invariants

def _auto_parameter_scale(curve):
    """Parameter circle radius where the leading term dominates."""
    tables = _germ_tables(curve)
    rho = 0.4
    for _ in range(40):
        ok = True
        for exps, coefs in tables:
            if exps.size < 2:
                continue
            lead = abs(coefs[0]) * rho ** exps[0]
            rest = sum(abs(c) * rho ** e
                       for e, c in zip(exps[1:], coefs[1:]))
            ok = ok and (rest <= 0.2 * lead or lead == 0.0)
        if ok:
            return rho
        rho *= 0.5
    raise TransversalityError("no parameter scale with a dominant "
                              "leading term")


def _auto_radius(curve, rho=None):
    ev, _ = _germ_norm_evaluator(curve)
    rho = _auto_parameter_scale(curve) if rho is None else rho
    theta = np.linspace(0.0, 2 * np.pi, 64, endpoint=False)
    return 0.9 * float(np.linalg.norm(
        ev(rho * np.exp(1j * theta)), axis=-1).min())


def intersection_index(u1, u2, r=None, samples=1024, tries=12):
    """Local intersection number of two distinct germs at the origin.

    Computed as the linking number of the two sphere slices at a common
    small radius.  Radii where the slices pass within 1e-3 r of each
    other are exceptional (the curves may intersect on the sphere) and
    are skipped by halving, up to ``tries`` attempts.
    """
    for u in (u1, u2):
        if not isinstance(u, CurveGerm) or u.dimension != 2:
            raise DimensionError("intersection index needs plane germs")
    compare_germs(u1, u2)        # EqualError if the germs coincide
    if r is None:
        r = min(_auto_radius(u1), _auto_radius(u2))
    for _ in range(tries):
        try:
            a = sphere_slice(u1, r, samples)
            b = sphere_slice(u2, r, samples)
        except TransversalityError:
            r *= 0.5
            continue
        if _min_point_gap(a.components[0], b.components[0]) <= 1e-3 * r:
            r *= 0.5
            continue
        return linking(a, b)
    raise ExceptionalRadiusError(
        f"no non-exceptional radius found down to {r:.3e}")


def cusp_index_topological(u, J=None, r=None, samples=None, eps=1e-2):
    """Cusp index of a germ through the Bennequin index of its slice.

    Returns (b + 1) / 2 for the slice at a small radius; the parity and
    sign are checked, and for a symbolic germ the value is checked
    against the exponent-chain formula.
    """
    if not isinstance(u, CurveGerm) or u.dimension != 2:
        raise DimensionError("cusp index needs a plane germ")
    t = characteristic_exponents(u)
    if samples is None:
        samples = 1024 * max(1, t.exponents[0] // 2)
    if r is None:
        r = _auto_radius(u)
    for doubling in range(3):      # a coarse polyline earns more samples
        try:
            gamma = sphere_slice(u, r, samples << doubling)
            b = bennequin(gamma, J, eps)
            break
        except PrecisionError:
            if doubling == 2:
                raise
    if (b + 1) % 2:
        raise ParityError(f"Bennequin index {b} has the wrong parity")
    kappa = (b + 1) // 2
    if kappa < 0:
        raise PrecisionError(f"negative cusp index {kappa}")
    expected = cusp_index_formula(t)
    if kappa != expected:
        raise PrecisionError(
            f"topological cusp index {kappa} disagrees with the "
            f"exponent formula {expected}")
    return kappa


@dataclass(frozen=True)
class WallCrossingReport:
    b_inner: int
    b_outer: int
    jump: int
    delta_sum: object
    balanced: bool

    def to_dict(self):
        return {"schema": 1, "b_inner": self.b_inner,
                "b_outer": self.b_outer, "jump": self.jump,
                "delta_sum": self.delta_sum, "balanced": self.balanced}


def wall_crossing_check(curve, r1, r2, delta_sum=None, J=None,
                        samples=2048, eps=1e-2):
    """Bennequin jump of an immersed germ across a spherical shell.

    Slices at r1 < r2, computes both Bennequin indices, and reports the
    jump; when ``delta_sum`` (the total intersection index of the
    self-intersections inside the shell) is supplied, ``balanced`` says
    whether the jump equals twice that sum.
    """
    if not r1 < r2:
        raise DomainError(f"need r1 < r2, got {r1} >= {r2}")
    inner = sphere_slice(curve, r1, samples)
    outer = sphere_slice(curve, r2, samples)
    b1 = bennequin(inner, J, eps)
    b2 = bennequin(outer, J, eps)
    jump = b2 - b1
    balanced = True if delta_sum is None else (jump == 2 * delta_sum)
    return WallCrossingReport(b1, b2, jump, delta_sum, balanced)


# ---------------------------------------------------------------------------
# genus ledger

_LEDGER_FIELDS = ("self_int_sq", "c1_pairing", "components_d",
                  "delta_sum", "kappa_sum", "genus_sum")


@dataclass(frozen=True)
class GenusLedger:
    """Integer bookkeeping for the genus formula.

    Any single field may be None (unknown); genus_check solves for it.
    Homological inputs are caller-supplied.
    """
    self_int_sq: object
    c1_pairing: object
    components_d: object
    delta_sum: object
    kappa_sum: object
    genus_sum: object = None

    def __post_init__(self):
        for name in _LEDGER_FIELDS:
            v = getattr(self, name)
            if v is not None and not isinstance(v, (int, np.integer)):
                raise DomainError(f"{name} must be an integer or None")

    def to_json(self):
        doc = {"schema": 1}
        doc.update({n: getattr(self, n) for n in _LEDGER_FIELDS})
        return json.dumps(doc)

    @staticmethod
    def from_json(text):
        doc = json.loads(text)
        if doc.get("schema") != 1:
            raise DomainError(f"unsupported schema {doc.get('schema')!r}")
        return GenusLedger(**{n: doc.get(n) for n in _LEDGER_FIELDS})


@dataclass(frozen=True)
class GenusReport:
    balanced: bool
    solved_field: object
    ledger: GenusLedger

    def to_dict(self):
        doc = {"schema": 1, "balanced": self.balanced,
               "solved_field": self.solved_field}
        doc.update({n: getattr(self.ledger, n) for n in _LEDGER_FIELDS})
        return doc


def genus_check(ledger):
    """Balance or complete the genus formula

        genus_sum = (self_int_sq - c1_pairing) / 2 + components_d
                    - delta_sum - kappa_sum.

    With every field known the report says whether it balances exactly;
    with one unknown the unknown is solved for.  Two or more unknowns
    raise UnderdeterminedError; an odd self_int_sq - c1_pairing raises
    ParityError.
    """
    unknown = [n for n in _LEDGER_FIELDS if getattr(ledger, n) is None]
    if len(unknown) > 1:
        raise UnderdeterminedError(
            f"{len(unknown)} unknown fields: {', '.join(unknown)}")
    vals = {n: getattr(ledger, n) for n in _LEDGER_FIELDS}
    if not unknown:
        diff = vals["self_int_sq"] - vals["c1_pairing"]
        if diff % 2:
            raise ParityError(f"self_int_sq - c1_pairing = {diff} is odd")
        rhs = diff // 2 + vals["components_d"] - vals["delta_sum"] \
            - vals["kappa_sum"]
        return GenusReport(vals["genus_sum"] == rhs, None, ledger)
    name = unknown[0]
    if name == "genus_sum":
        diff = vals["self_int_sq"] - vals["c1_pairing"]
        if diff % 2:
            raise ParityError(f"self_int_sq - c1_pairing = {diff} is odd")
        vals[name] = diff // 2 + vals["components_d"] \
            - vals["delta_sum"] - vals["kappa_sum"]
    else:
        g = vals["genus_sum"]
        if name == "self_int_sq":
            vals[name] = 2 * (g - vals["components_d"] + vals["delta_sum"]
                              + vals["kappa_sum"]) + vals["c1_pairing"]
        elif name == "c1_pairing":
            vals[name] = vals["self_int_sq"] - 2 * (
                g - vals["components_d"] + vals["delta_sum"]
                + vals["kappa_sum"])
        else:
            diff = vals["self_int_sq"] - vals["c1_pairing"]
            if diff % 2:
                raise ParityError(
                    f"self_int_sq - c1_pairing = {diff} is odd")
            base = diff // 2
            if name == "components_d":
                vals[name] = g - base + vals["delta_sum"] \
                    + vals["kappa_sum"]
            elif name == "delta_sum":
                vals[name] = base + vals["components_d"] \
                    - vals["kappa_sum"] - g
            else:
                vals[name] = base + vals["components_d"] \
                    - vals["delta_sum"] - g
    return GenusReport(True, name, GenusLedger(**vals))
