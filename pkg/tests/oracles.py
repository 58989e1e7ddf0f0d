"""Independent brute-force references used to freeze expected values.

Everything here is written against plain dicts {exponent: coefficient} so
no code path from the package under test is reused.
"""
from fractions import Fraction
import random

from pseudocurve.exact import QQi


def naive_mul(a, b, order):
    """Schoolbook convolution of term dicts, truncated below ``order``."""
    out = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = e1 + e2
            if e < order:
                out[e] = out.get(e, QQi(0)) + c1 * c2
    return {e: c for e, c in out.items() if c}


def naive_compose(f, g, order):
    """f(g(z)) by expanding powers of g term by term."""
    out = {}
    gp = {0: QQi(1)}
    maxe = max(f) if f else 0
    for e in range(maxe + 1):
        if e in f:
            for k, c in gp.items():
                if k < order:
                    out[k] = out.get(k, QQi(0)) + f[e] * c
        gp = naive_mul(gp, g, order)
    return {e: c for e, c in out.items() if c}


def random_qqi(rng, span=4):
    return QQi(Fraction(rng.randint(-span, span), rng.randint(1, span)),
               Fraction(rng.randint(-span, span), rng.randint(1, span)))


def random_terms(rng, order, density=0.6, span=4, min_exp=0):
    out = {}
    for e in range(min_exp, order):
        if rng.random() < density:
            c = random_qqi(rng, span)
            if c:
                out[e] = c
    return out


def rng_for(name):
    """Deterministic per-test stream so failures replay exactly."""
    return random.Random(f"pseudocurve:{name}")


def crossing_count_linking(P, Q, tilt=0.0):
    """Signed crossings where P passes over Q in a planar projection.

    Projects along the z-axis (after a small deterministic rotation by
    ``tilt`` about the x-axis to dodge degenerate views), intersects
    every segment pair in the plane, and adds the orientation sign of
    each crossing where P's strand lies above Q's.  Equals the linking
    number for disjoint closed polylines.  Pure brute force: O(N*M) with
    exact 2x2 solves, no shared code with the package.
    """
    import math

    def rotated(R):
        c, s = math.cos(tilt), math.sin(tilt)
        return [(x, c * y - s * z, s * y + c * z) for x, y, z in R]

    P = rotated([tuple(map(float, p)) for p in P])
    Q = rotated([tuple(map(float, q)) for q in Q])
    total = 0
    for i in range(len(P)):
        a1, a2 = P[i], P[(i + 1) % len(P)]
        da = (a2[0] - a1[0], a2[1] - a1[1])
        for j in range(len(Q)):
            b1, b2 = Q[j], Q[(j + 1) % len(Q)]
            db = (b2[0] - b1[0], b2[1] - b1[1])
            den = da[0] * db[1] - da[1] * db[0]
            if abs(den) < 1e-14:
                continue
            rx, ry = b1[0] - a1[0], b1[1] - a1[1]
            s = (rx * db[1] - ry * db[0]) / den
            t = (rx * da[1] - ry * da[0]) / den
            if not (0.0 <= s < 1.0 and 0.0 <= t < 1.0):
                continue
            za = a1[2] + s * (a2[2] - a1[2])
            zb = b1[2] + t * (b2[2] - b1[2])
            if abs(za - zb) < 1e-12:
                raise ValueError("degenerate view; change tilt")
            if za > zb:
                total += 1 if den > 0 else -1
    return total
