"""Solver tests: Picard fixed point, Neumann inverse, cusp perturbation.

The round-trip checks apply the differential operators independently of
the solvers (via the spectral derivatives) so each scheme is judged
against the equation it claims to solve, not against its own internals.
"""

import json

import numpy as np
import pytest

from pseudocurve import (
    ContractionError, CurveGerm, DimensionError, DivergenceError,
    DomainError, GridError, GridFunction, SmallnessWarning,
    builtin, cr_residual, default_radii, dilated, immersion_margin,
    inverse_dbar, inverse_dbar_report, lipschitz_estimate, perturb_cusp,
    picard_solve, structure_from_spec, surrogate_norm, wirtinger,
)
from pseudocurve.grid import (cauchy_boundary, cauchy_boundary_origin,
                              cauchy_green, cauchy_green_origin)

J2 = builtin("standard", {"dim": 2})
J4 = builtin("standard", {"dim": 4})
J23 = builtin("example_2_3")
# self-coupled scalar structure: dbar u = 0.25 conj(u) conj(du/dz)
JSELF = structure_from_spec({
    "schema": 1,
    "q_matrix_polynomials": {
        "n": 1,
        "entries": [[[{"c": [0.25, 0.0], "zbar": [1]}]]],
    },
})


def grid_of(fn, n_comp=1, n_radial=128, n_angular=256):
    return GridFunction.from_callable(fn, n_radial, n_angular)


def pair_grid(n_radial=128, n_angular=256):
    """Samples of the model disc (z, conj(z)^2)."""
    return GridFunction.from_callable(
        lambda z: np.stack([z, np.conj(z) ** 2], axis=-1),
        n_radial, n_angular)


def swollen(ref, amount=0.3):
    """Multiplicative interior distortion vanishing on the boundary;
    being relative, it survives the solver's dilatations."""
    r2 = np.abs(ref.points())[..., None] ** 2
    return GridFunction(ref.radii, ref.values * (1.0 + amount * (1.0 - r2)))


@pytest.fixture(scope="module")
def model_report():
    ref = pair_grid()
    return picard_solve(J23, ref, initial=swollen(ref))


# -- surrogate norm ----------------------------------------------------------

def test_surrogate_norm_constant():
    g = grid_of(lambda z: np.full_like(z, 3.0 - 4.0j))
    assert surrogate_norm(g) == pytest.approx(5.0, abs=1e-12)


def test_surrogate_norm_homogeneous():
    g = grid_of(lambda z: z ** 2 - 0.3 * np.conj(z))
    assert surrogate_norm(g.scale(2.0)) == pytest.approx(
        2.0 * surrogate_norm(g), rel=1e-12)


# -- picard_solve ------------------------------------------------------------

def test_picard_standard_structure_single_step():
    ref = grid_of(lambda z: z ** 3)
    report = picard_solve(J2, ref)
    assert report.iterations == 1
    assert report.converged
    assert report.scale == 1.0
    assert report.final_residual < 1e-8
    assert (report.solution - ref).sup_norm() < 1e-10


def test_picard_recovers_model_disc(model_report):
    report = model_report
    assert report.scale <= 1.0 / 64.0
    pts = report.solution.points()
    exact = np.stack([pts, np.conj(pts) ** 2], axis=-1)
    err = float(np.max(np.abs(report.solution.values - exact)))
    assert err < 1e-3
    assert report.converged
    assert report.final_residual < 1e-6


def test_picard_ratios_contract_steadily(model_report):
    # The triangular model nonlinearity settles each component after
    # finitely many sweeps, so trailing ratios may collapse to exactly 0.
    ratios = model_report.contraction_ratios
    assert ratios, "expected at least one measured ratio"
    assert all(r < 1.0 for r in ratios)
    positive = [r for r in ratios if r > 0.0]
    assert positive
    if len(positive) >= 2:
        assert max(positive) / min(positive) < 4.0


def test_picard_geometric_ratios_self_coupled():
    ref = grid_of(lambda z: 0.9 * z, n_radial=64, n_angular=128)
    with pytest.warns(SmallnessWarning):
        report = picard_solve(JSELF, ref, initial=swollen(ref),
                              rescale=False)
    assert report.final_residual < 1e-4
    ratios = [r for r in report.contraction_ratios if r > 0.0]
    assert len(ratios) >= 3
    assert all(r < 1.0 for r in ratios)
    steady = ratios[1:]
    assert max(steady) / min(steady) < 4.0


def test_picard_fixed_point_identity(model_report):
    report = model_report
    s = report.scale
    u = GridFunction(report.solution.radii / s, report.solution.values / s)
    js = dilated(J23, s)
    from pseudocurve import j_to_q
    from pseudocurve.structures import complex_to_real
    dz, _ = wirtinger(u)
    m = j_to_q(js).eval(complex_to_real(u.values))
    rhs = GridFunction(u.radii, np.einsum(
        "rkij,rkj->rki", m, np.conj(dz.values)))
    boundary = u.boundary()
    rebuilt = cauchy_boundary(boundary, u.radii).values \
        - cauchy_boundary_origin(boundary)[None, None, :] \
        + cauchy_green(rhs).values \
        - cauchy_green_origin(rhs)[None, None, :]
    gap = surrogate_norm(GridFunction(u.radii, u.values - rebuilt))
    assert gap < 2e-6 * surrogate_norm(u)


def test_picard_ratios_shrink_with_dilatation():
    means = []
    for k in (7, 8, 9):
        t = 2.0 ** -k
        ref = GridFunction.from_callable(
            lambda z: np.stack([z, t * np.conj(z) ** 2], axis=-1), 64, 128)
        report = picard_solve(dilated(J23, t), ref, rescale=False,
                              initial=swollen(ref))
        assert report.converged
        assert report.contraction_ratios
        means.append(float(np.mean(report.contraction_ratios)))
    assert means[0] > means[1] > means[2]


def test_picard_divergence_detected():
    # amplitude 5 puts the feedback gain well above 1; around 3 the
    # smoothing step still holds the loop just under neutral
    ref = grid_of(lambda z: 5.0 * z, n_radial=64, n_angular=128)
    with pytest.warns(SmallnessWarning):
        with pytest.raises(DivergenceError):
            picard_solve(JSELF, ref, rescale=False)


def test_picard_smallness_warning_still_converges():
    ref = GridFunction.from_callable(
        lambda z: np.stack([0.1 * z, 0.01 * np.conj(z) ** 2], axis=-1),
        64, 128)
    with pytest.warns(SmallnessWarning):
        report = picard_solve(J23, ref, rescale=False)
    assert report.converged


def test_picard_input_validation():
    ref = grid_of(lambda z: z)
    with pytest.raises(DimensionError):
        picard_solve(J4, ref)
    inner = GridFunction(default_radii(32) * 0.5,
                         np.zeros((32, 32, 1), dtype=complex))
    with pytest.raises(GridError):
        picard_solve(J2, inner)
    with pytest.raises(TypeError):
        picard_solve(J2, "not a grid")


def test_report_serializes(tmp_path, model_report):
    path = tmp_path / "solution.csv"
    out = model_report.to_dict(solution_path=path)
    text = json.dumps(out)
    assert "picard" in text
    assert out["schema"] == 1
    assert out["solution_csv"] == str(path)
    loaded = GridFunction.load_csv(path)
    assert np.array_equal(loaded.values, model_report.solution.values)


# -- inverse_dbar ------------------------------------------------------------

def test_inverse_dbar_constant_rhs_gives_zbar():
    rhs = grid_of(lambda z: np.ones_like(z))
    w = inverse_dbar(None, None, rhs)
    err = w - grid_of(lambda z: np.conj(z))
    assert err.sup_norm() < 1e-12


def test_inverse_dbar_standard_field_matches_none():
    rhs = grid_of(lambda z: z ** 2 - 0.5 * np.conj(z))
    assert (inverse_dbar(J2, None, rhs)
            - inverse_dbar(None, None, rhs)).sup_norm() < 1e-14


def test_inverse_dbar_origin_is_exactly_zero():
    rhs = grid_of(lambda z: np.exp(z) * np.conj(z))
    w, info = inverse_dbar_report(None, 0.1 * np.eye(2), rhs)
    assert np.all(info["origin_value"] == 0.0)
    assert abs(w.sample_at(0.0)[0]) < 1e-10


def jfield_smooth(z):
    a = 0.08 * z.real
    b = 0.06 * z.imag
    m = np.zeros(z.shape + (2, 2))
    m[..., 0, 0] = a
    m[..., 0, 1] = -1.0 - b
    m[..., 1, 0] = 1.0 + b
    m[..., 1, 1] = -a
    return m


def test_inverse_dbar_round_trip():
    rhs = grid_of(lambda z: z ** 2 - 0.3 * np.conj(z) + 0.1)
    rconst = np.array([[0.015, 0.005], [-0.01, 0.02]])
    w, info = inverse_dbar_report(jfield_smooth, rconst, rhs,
                                  series_terms=20)
    dz, dzb = wirtinger(w)
    dx = dz.values + dzb.values
    dy = 1j * (dz.values - dzb.values)
    from pseudocurve.structures import complex_to_real, real_to_complex
    jm = jfield_smooth(rhs.points())
    applied = 0.5 * (complex_to_real(dx)
                     + np.einsum("rkij,rkj->rki", jm, complex_to_real(dy)))
    applied = applied + np.einsum(
        "ij,rkj->rki", rconst, complex_to_real(w.values))
    resid = real_to_complex(applied) - rhs.values
    interior = np.abs(resid[:-1])
    assert float(np.max(interior)) < 1e-5
    assert info["tail_estimate"] < 1e-12
    assert all(r < 0.5 for r in info["ratios"])


def test_inverse_dbar_matrix_grid_matches_constant():
    rhs = grid_of(lambda z: z - 0.2 * np.conj(z) ** 2)
    rconst = np.array([[0.02, 0.01], [0.0, -0.03]])
    entries = GridFunction.from_callable(
        lambda z: np.broadcast_to(rconst.reshape(4), z.shape + (4,)).astype(
            complex), 128, 256)
    a = inverse_dbar(None, rconst, rhs)
    b = inverse_dbar(None, entries, rhs)
    assert (a - b).sup_norm() < 1e-13


def test_inverse_dbar_contraction_error():
    rhs = grid_of(lambda z: np.ones_like(z))
    bad = np.array([[0.0, -1.0], [1.0, 0.0]]) + np.array(
        [[0.0, 3.0], [3.0, 0.0]])
    with pytest.raises(ContractionError):
        inverse_dbar(bad, None, rhs)


def test_inverse_dbar_validation():
    rhs = grid_of(lambda z: z)
    with pytest.raises(DimensionError):
        inverse_dbar(np.eye(3), None, rhs)
    with pytest.raises(DimensionError):
        inverse_dbar(None, grid_of(lambda z: z), rhs)
    with pytest.raises(TypeError):
        inverse_dbar(None, None, [1, 2, 3])


# -- perturb_cusp ------------------------------------------------------------

def cusp_germ():
    return CurveGerm.from_terms([{2: 1}, {3: 1}], order=8)


def test_perturb_standard_structure_is_exact():
    report = perturb_cusp(J4, cusp_germ(), 1, (0.0, 0.05))
    assert report.iterations == 1
    assert report.converged
    assert report.scale == 1.0
    pts = report.solution.points()
    expected = np.stack([pts ** 2, pts ** 3 + 0.05 * pts], axis=-1)
    assert float(np.max(np.abs(report.solution.values - expected))) < 1e-11
    w = report.aux["w"]
    assert float(np.max(np.abs(w.values - np.array([0.0, 0.05])))) < 1e-11
    assert report.aux["origin_error"] == 0.0


def test_perturb_nu_zero_translates():
    germ = CurveGerm.from_terms([{1: 1}, {2: 1}], order=6)
    w0 = np.array([0.03 + 0.01j, -0.02j])
    report = perturb_cusp(J4, germ, 0, w0)
    assert report.iterations == 1
    pts = report.solution.points()
    expected = np.stack([pts + w0[0], pts ** 2 + w0[1]], axis=-1)
    assert float(np.max(np.abs(report.solution.values - expected))) < 1e-11


def test_perturb_model_structure_converges(model_report):
    # feeding the fixed-point solution back in avoids resampling noise,
    # which the origin desingularization would otherwise amplify
    u0 = model_report.solution
    w0 = np.array([0.0, 0.02])
    report = perturb_cusp(J23, u0, 1, w0, tol=1e-7)
    assert report.converged
    assert report.final_residual < 1e-6
    assert all(r < 1.0 for r in report.contraction_ratios)
    assert np.array_equal(report.aux["w0_scaled"], w0)
    assert report.scale < 1.0
    w = report.aux["w"]
    assert np.max(np.abs(w.sample_at(0.0) - w0)) < 1e-7
    # the correction stays w0-sized across the disc
    assert float(np.max(np.abs(w.values - w0))) < 0.5 * abs(w0[1])
    assert immersion_margin(report.solution) > 1e-3


def test_perturb_contraction_error_at_unit_scale():
    u0 = pair_grid(64, 128)
    with pytest.warns(SmallnessWarning):
        with pytest.raises(ContractionError):
            perturb_cusp(J23, u0, 1, (0.0, 0.02), rescale=False)


def test_perturb_validation():
    germ = cusp_germ()
    with pytest.raises(DomainError):
        perturb_cusp(J4, germ, -1, (0.0, 0.1))
    with pytest.raises(DomainError):
        perturb_cusp(J4, germ, 1.5, (0.0, 0.1))
    with pytest.raises(DimensionError):
        perturb_cusp(J4, germ, 1, (0.1,))
    with pytest.raises(DimensionError):
        perturb_cusp(J2, germ, 1, (0.0, 0.1))
    with pytest.raises(TypeError):
        perturb_cusp(J4, [1, 2], 1, (0.0, 0.1))


def test_immersion_margin_contrast():
    cusped = GridFunction.from_callable(
        lambda z: np.stack([z ** 2, z ** 3], axis=-1), 128, 256)
    assert immersion_margin(cusped) < 1e-3
    perturbed = GridFunction.from_callable(
        lambda z: np.stack([z ** 2, z ** 3 + 0.05 * z], axis=-1), 128, 256)
    assert immersion_margin(perturbed) > 1e-3


def test_differential_inequality_on_converged_disc(model_report):
    sol = model_report.solution
    s = model_report.scale
    dz, dzb = wirtinger(sol)
    lhs = np.linalg.norm(dzb.values, axis=2)
    du = np.sqrt(np.sum(np.abs(dz.values) ** 2 + np.abs(dzb.values) ** 2,
                        axis=2))
    mag = np.linalg.norm(sol.values, axis=2)
    center = np.zeros(4)
    lip = lipschitz_estimate(J23, (center, 1.25 * s), budget=2048)
    rhs = (lip + 0.5) * du * mag + 1e-9
    assert np.all(lhs <= rhs)
