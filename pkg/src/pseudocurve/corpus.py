"""Executable worked-example fixtures.

Each fixture is a versioned JSON document bundled under ``fixtures/``:
inputs by reference (curve docs, structure specs, grid sizes, seeds) and
a list of claims.  A claim pairs an expected value with a provenance tag
-- ``paper`` for values quoted from the original worked example,
``trivial`` for bookkeeping facts, ``derived(<oracle>)`` for values
frozen from an independent oracle -- plus a comparison policy: exact
equality by default, a tolerance band, or a one-sided bound.

``run_fixture`` re-measures every claim through the public modules and
reports per-claim diffs.  Nothing here recomputes an expected value; the
documents are the frozen record.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import UnknownFixture
from .exact import QQi
from .grid import GridFunction, wirtinger
from .modulus import modulus_report
from .series import TruncatedSeries, ps_compose, ps_nth_root
from .singularity import (CurveGerm, characteristic_exponents, multiplicity,
                          normalize_first, puiseux_sequence)
from .solver import immersion_margin, perturb_cusp, picard_solve
from .structures import (cr_residual, j_to_q, lipschitz_estimate,
                         standard_matrix, structure_from_spec)
from .topology import (SphereCurve, bennequin, bennequin_report, sphere_slice,
                       transversality_margin, intersection_index)

_FIXTURE_DIR = Path(__file__).with_name("fixtures")
_PROVENANCE = re.compile(r"^(paper|trivial|derived\([a-z0-9_\- ]+\))$")
_COMPARES = ("eq", "le", "ge")


def list_fixtures():
    """Sorted ids of every bundled fixture."""
    return tuple(sorted(p.stem for p in _FIXTURE_DIR.glob("*.json")))


def load_fixture(fixture_id):
    """The raw fixture document, validated against the claim schema."""
    path = _FIXTURE_DIR / f"{fixture_id}.json"
    if not isinstance(fixture_id, str) or not path.is_file():
        raise UnknownFixture(
            f"no fixture {fixture_id!r}; available: {', '.join(list_fixtures())}")
    doc = json.loads(path.read_text())
    if doc.get("schema") != 1:
        raise ValueError(f"unsupported fixture schema {doc.get('schema')!r}")
    if doc.get("id") != fixture_id:
        raise ValueError(f"fixture file {fixture_id} declares id "
                         f"{doc.get('id')!r}")
    for entry in doc["claims"]:
        tag = entry.get("provenance", "")
        if not _PROVENANCE.match(tag):
            raise ValueError(f"bad provenance tag {tag!r} in {fixture_id}")
        if entry.get("compare", "eq") not in _COMPARES:
            raise ValueError(f"bad compare mode in {fixture_id}")
    return doc


@dataclass(frozen=True)
class ClaimResult:
    """One measured claim: what was expected, what came out, and whether
    the comparison policy accepts the difference."""
    claim: str
    expected: object
    measured: object
    provenance: str
    compare: str
    tolerance: float
    passed: bool
    diff: float | None

    def to_dict(self):
        return {"claim": self.claim, "expected": self.expected,
                "measured": self.measured, "provenance": self.provenance,
                "compare": self.compare, "tolerance": self.tolerance,
                "passed": self.passed, "diff": self.diff}


@dataclass(frozen=True)
class FixtureReport:
    fixture: str
    description: str
    passed: bool
    claims: tuple

    def to_dict(self):
        return {"schema": 1, "fixture": self.fixture,
                "description": self.description, "passed": self.passed,
                "claims": [c.to_dict() for c in self.claims]}

    def __str__(self):
        lines = [f"[{'PASS' if self.passed else 'FAIL'}] {self.fixture}"]
        for c in self.claims:
            mark = "ok " if c.passed else "BAD"
            lines.append(f"  {mark} {c.claim}: expected "
                         f"{_compact(c.expected, c.compare)}, measured "
                         f"{_compact(c.measured)}  [{c.provenance}]")
        return "\n".join(lines)


def _compact(value, compare=None):
    prefix = {"le": "<= ", "ge": ">= "}.get(compare, "")
    if isinstance(value, float):
        return f"{prefix}{value:.6g}"
    text = json.dumps(value)
    if len(text) > 48:
        text = text[:45] + "..."
    return prefix + text


def _judge(entry, measured):
    compare = entry.get("compare", "eq")
    tol = float(entry.get("tolerance", 0.0))
    expected = entry["expected"]
    diff = None
    if compare == "le":
        passed = measured <= expected
        diff = float(measured - expected)
    elif compare == "ge":
        passed = measured >= expected
        diff = float(expected - measured)
    elif isinstance(expected, (int, float)) and not isinstance(expected, bool) \
            and isinstance(measured, (int, float)) \
            and not isinstance(measured, bool):
        diff = abs(float(measured) - float(expected))
        passed = diff <= tol
    else:
        # exact branch: no bool/number punning
        passed = type(measured) is type(expected) and measured == expected
    return ClaimResult(entry["claim"], expected, measured,
                       entry["provenance"], compare, tol, bool(passed), diff)


def run_fixture(fixture_id):
    """Re-measure every claim of one fixture; per-claim pass/fail diffs."""
    doc = load_fixture(fixture_id)
    measured = _EVALUATORS[fixture_id](doc["inputs"])
    results = []
    for entry in doc["claims"]:
        if entry["claim"] not in measured:
            raise KeyError(f"evaluator for {fixture_id} returned no "
                           f"measurement for {entry['claim']!r}")
        results.append(_judge(entry, measured[entry["claim"]]))
    return FixtureReport(fixture_id, doc["description"],
                         all(r.passed for r in results), tuple(results))


def run_all():
    """Reports for every bundled fixture, in id order."""
    return [run_fixture(fid) for fid in list_fixtures()]


# -- shared input builders ----------------------------------------------------

def _pair_model(z):
    return np.stack([z, np.conj(z) ** 2], axis=-1)


_REFERENCES = {"z_conj_sq_pair": _pair_model}


def _swollen(ref, amount):
    # multiplicative interior bump vanishing on the boundary; relative,
    # so it survives the solver's rescalings
    r2 = np.abs(ref.points())[..., None] ** 2
    return GridFunction(ref.radii, ref.values * (1.0 + amount * (1.0 - r2)))


def _rational(text):
    from fractions import Fraction
    return Fraction(text)


def _log_square(z):
    return np.where(z == 0, 0.0, z ** 2 * np.log(np.abs(z) ** 2))


def _log_square_derivative(z):
    z = np.asarray(z, dtype=complex)
    out = np.zeros_like(z)
    nz = z != 0
    out[nz] = 4.0 * z[nz] * np.log(np.abs(z[nz])) + z[nz]
    return out


# -- evaluators ---------------------------------------------------------------

def _eval_ex_1_1(inputs):
    center = complex(_rational(inputs["center"]))
    half = float(_rational(inputs["half"]))
    power = inputs["power"]
    a, b = (float(_rational(s)) for s in inputs["ellipse_semi_axes"])
    lo, hi = (float(_rational(s)) for s in inputs["modulus_band"])
    image = lambda z: (half * z + center) ** power

    def inside(z):
        return (z.real / a) ** 2 + (z.imag / b) ** 2 <= 1.0

    # family with the shifted coordinate rotated by a primitive root;
    # symmetric half-angles keep both members inside the ellipse
    n = inputs["family_samples"]
    c = np.linspace(lo, hi, n)
    w = c * np.exp(-1j * math.pi / power)
    za = (w - center) / half
    zb = (w * np.exp(2j * math.pi / power) - center) / half
    family_ok = bool(np.all(inside(za)) and np.all(inside(zb)))
    collision = float(np.max(np.abs(image(za) - image(zb))))
    gap = float(np.min(np.abs(za - zb)))

    # blind pairwise scan over the elliptical domain
    rng = np.random.default_rng(inputs["seed"])
    m = inputs["scan_samples"]
    pts = (rng.uniform(-a, a, 2 * m) + 1j * rng.uniform(-b, b, 2 * m))
    pts = pts[inside(pts)][:m]
    vals = image(pts)
    sep = np.abs(pts[:, None] - pts[None, :])
    img = np.abs(vals[:, None] - vals[None, :])
    hits = (sep > 0.3) & (img < 1e-3)
    return {
        "family_in_domain": family_ok,
        "rotated_family_image_collision_sup": collision,
        "rotated_family_parameter_gap_min": gap,
        "separated_collisions_detected": bool(np.any(hits)),
    }


def _eval_ex_1_2(inputs):
    g = CurveGerm.from_doc(inputs["curve"])
    mu, v0 = multiplicity(g)
    t = characteristic_exponents(g)
    seq = puiseux_sequence(g)
    out = {
        "multiplicity": mu,
        "tangent_vector": [[str(c.re), str(c.im)] for c in v0],
        "characteristic_exponents": list(t.exponents),
        "divisor_chain": list(t.divisors),
    }
    for i, stage in enumerate(seq.stages):
        out[f"stage_{i}"] = stage.germ.to_doc()["components"]
    return out


def _eval_ex_8_6(inputs):
    g = CurveGerm.from_doc(inputs["curve"])
    t = characteristic_exponents(g)
    h, phi = normalize_first(g)
    mu = t.exponents[0]
    first = dict(h.components[0].terms())
    pure = list(first) == [mu] and complex(first[mu]) == 1.0

    # the root the normalizer must invert: z * (1 + z^(p1 - p0))^(1/p0)
    unit = TruncatedSeries({0: QQi(1), t.exponents[1] - mu: QQi(1)},
                           g.order - 1)
    root = ps_nth_root(unit, mu).shift(1)
    ident = ps_compose(root, phi)
    inverts = ident == TruncatedSeries.identity(ident.order)

    def coeff(series, e):
        c = series.coefficient(e)
        return [str(c.re), str(c.im)]

    tail = [[e] + coeff(h.components[1], e)
            for e in inputs["tail_exponents"]]
    return {
        "first_exponent": t.exponents[0],
        "second_exponent": t.exponents[1],
        "characteristic_exponents": list(t.exponents),
        "divisor_chain": list(t.divisors),
        "leading_component_pure_monomial": bool(pure),
        "normalizer_inverts_root": bool(inverts),
        "normalizer_coeff_19": coeff(phi, 19),
        "normalizer_coeff_37": coeff(phi, 37),
        "normalized_second_tail": tail,
    }


def _eval_ex_2_3(inputs):
    J = structure_from_spec(inputs["structure"])
    nr, nt = inputs["grid"]
    ref = GridFunction.from_callable(_REFERENCES[inputs["reference"]], nr, nt)

    rng = np.random.default_rng(inputs["seed"])
    pts = rng.uniform(-0.7, 0.7, (inputs["probe_points"], 4))
    M = j_to_q(J).eval(pts)
    w1 = pts[:, 0] + 1j * pts[:, 1]
    entry = float(np.max(np.abs(M[:, 1, 0] - 2.0 * np.conj(w1))))
    rest = M.copy()
    rest[:, 1, 0] = 0.0
    residual = cr_residual(J, ref)
    report = picard_solve(J, ref, initial=_swollen(ref, inputs["distortion"]))
    spts = report.solution.points()
    exact = np.stack([spts, np.conj(spts) ** 2], axis=-1)
    return {
        "antilinear_entry_sup_diff": entry,
        "antilinear_other_entries_sup": float(np.max(np.abs(rest))),
        "curve_residual_sup": residual.sup_norm(),
        "picard_converged": bool(report.converged),
        "picard_recovery_sup": float(np.max(np.abs(report.solution.values
                                                   - exact))),
        "picard_ratios_below_one": bool(all(r < 1.0 for r in
                                            report.contraction_ratios)),
    }


def _eval_ex_9_1(inputs):
    J = structure_from_spec(inputs["structure"])
    ests = []
    for h in inputs["heights"]:
        center = np.array([1.0, 0.0, h, 0.0])
        ests.append(lipschitz_estimate(J, (center, h / 2.0),
                                       budget=inputs["budget"],
                                       seed=inputs["seed"]))
    grow = ests[-1] / ests[0]
    return {
        "estimates_strictly_increase": bool(all(a < b for a, b in
                                                zip(ests, ests[1:]))),
        "growth_ratio_lower": grow,
        "growth_ratio_upper": grow,
    }


def _eval_ex_9_2(inputs):
    J = structure_from_spec(inputs["structure"])
    nr, nt = inputs["grid"]

    g = GridFunction.from_callable(_log_square, nr, nt)
    _, dzbar = wirtinger(g)
    zpts = g.points()
    want = zpts ** 2 / np.conj(zpts)
    outside = g.radii > inputs["identity_cutoff"]
    identity_sup = float(np.max(np.abs(dzbar.values[outside, :, 0]
                                       - want[outside])))

    origin_diff = float(np.max(np.abs(J(np.zeros(4)) - standard_matrix(4))))

    curve = GridFunction.from_callable(
        lambda z: np.stack([_log_square(z), z], axis=-1), nr, nt)
    res = cr_residual(J, curve)
    lo, hi = inputs["radial_band"]
    band = (curve.radii >= lo) & (curve.radii <= hi)
    band_sup = float(np.max(np.abs(res.values[band])))
    swapped = GridFunction.from_callable(
        lambda z: np.stack([z, _log_square(z)], axis=-1), nr, nt)
    swapped_sup = float(np.max(np.abs(cr_residual(J, swapped).values[band])))

    budget = inputs["modulus_budget"]
    sharp = modulus_report(_log_square_derivative, budget=budget,
                           seed=inputs["modulus_seeds"]["sharp"])
    growth = modulus_report(_log_square_derivative, budget=budget,
                            seed=inputs["modulus_seeds"]["growth"])
    finest = min(sharp.scale_breakdown)
    deltas = sorted(growth.scale_breakdown, reverse=True)
    increments = [growth.scale_breakdown[d2]["lipschitz"]
                  - growth.scale_breakdown[d1]["lipschitz"]
                  for d1, d2 in zip(deltas[6:], deltas[7:])]
    return {
        "conjugate_derivative_identity_sup": identity_sup,
        "origin_matrix_standard_diff": origin_diff,
        "curve_residual_band_sup": band_sup,
        "swapped_components_residual": swapped_sup,
        "derivative_log_lipschitz": sharp.log_lipschitz_estimate,
        "derivative_log_lipschitz_finest":
            sharp.scale_breakdown[finest]["log_lipschitz"],
        "derivative_lipschitz": sharp.lipschitz_estimate,
        "lipschitz_halving_increment_min": float(min(increments)),
        "lipschitz_halving_increment_max": float(max(increments)),
    }


def _eval_perturbed_immersion(inputs):
    J = structure_from_spec(inputs["structure"])
    nr, nt = inputs["grid"]
    ref = GridFunction.from_callable(_REFERENCES[inputs["reference"]], nr, nt)
    base = picard_solve(J, ref)
    w0 = np.array([complex(_rational(re) + 1j * _rational(im))
                   for re, im in inputs["w0"]])
    report = perturb_cusp(J, base.solution, inputs["nu"], w0,
                          tol=inputs["tol"])
    w = report.aux["w"]
    margin = immersion_margin(report.solution)
    return {
        "picard_converged": bool(base.converged),
        "perturb_converged": bool(report.converged),
        "perturb_final_residual": float(report.final_residual),
        "anchor_value_diff": float(np.max(np.abs(w.sample_at(0.0) - w0))),
        "no_zero_differential": bool(margin > 0.0),
        "immersion_margin": float(margin),
    }


def _eval_smooth_bennequin(inputs):
    g = CurveGerm.from_doc(inputs["curve"])
    r = inputs["radius"]
    gamma = sphere_slice(g, r, inputs["slice_samples"])
    rep = bennequin_report(gamma, eps=inputs["offset"])

    n = inputs["circle_samples"]
    t = 2.0 * np.pi * np.arange(n) / n
    pts = np.stack([r * np.cos(t), r * np.sin(t),
                    np.zeros(n), np.zeros(n)], axis=1)
    circle = SphereCurve(r, [pts])
    explicit = bennequin(circle, eps=inputs["offset"])
    return {
        "bennequin_slice": rep["bennequin"],
        "bennequin_explicit_circle": explicit,
        "transversality_margin": float(transversality_margin(gamma)),
    }


def _eval_intersections(inputs):
    values, dominates = [], []
    for doc1, doc2 in inputs["pairs"]:
        u1, u2 = CurveGerm.from_doc(doc1), CurveGerm.from_doc(doc2)
        delta = intersection_index(u1, u2)
        values.append(delta)
        dominates.append(delta >= multiplicity(u1)[0] * multiplicity(u2)[0])
    return {
        "intersection_indices": values,
        "all_positive": bool(all(v > 0 for v in values)),
        "dominates_multiplicity_product": bool(all(dominates)),
    }


_EVALUATORS = {
    "ex_1_1_nonprimitive": _eval_ex_1_1,
    "ex_1_2_puiseux": _eval_ex_1_2,
    "ex_8_6_type": _eval_ex_8_6,
    "ex_2_3_pde": _eval_ex_2_3,
    "ex_9_1_tangency": _eval_ex_9_1,
    "ex_9_2_regularity": _eval_ex_9_2,
    "perturbed_immersion": _eval_perturbed_immersion,
    "smooth_point_bennequin": _eval_smooth_bennequin,
    "intersection_positivity": _eval_intersections,
}
