"""Almost complex structures on R^(2n) as matrix fields.

Points are real vectors in interleaved complex coordinates
(x_1, y_1, ..., x_n, y_n); the standard structure is the block diagonal
of [[0,-1],[1,0]].  A structure J is equivalent to its antilinear
deficiency Q: writing the Cauchy-Riemann equation du/dx + J(u) du/dy = 0
in Wirtinger form gives du/dzbar = Q_J(u) conj(du/dz) with

    Qbar = (J + J_st)^(-1) (J_st - J),      J = J_st (Id - Qbar)(Id + Qbar)^(-1),

where Qbar is the real representation of w -> M conj(w) for a complex
n x n matrix M.  Both directions are implemented batched over points.

Field evaluation is pure and reentrant: a StructureField holds no
mutable state, so instances can be shared freely across threads.
"""
from __future__ import annotations

import json

import numpy as np

from .errors import (DimensionError, DomainError, GridError, PrecisionError,
                     SingularError, UnknownNameError)
from .grid import GridFunction, wirtinger

SPEC_SCHEMA = 1

_DEBUG_CHECKS = False


def set_debug(flag):
    """Toggle the J^2 = -Id assertion on every field evaluation."""
    global _DEBUG_CHECKS
    _DEBUG_CHECKS = bool(flag)


def standard_matrix(dim):
    if dim % 2 or dim <= 0:
        raise DimensionError(f"ambient dimension {dim} is not even")
    J = np.zeros((dim, dim))
    for i in range(0, dim, 2):
        J[i, i + 1] = -1.0
        J[i + 1, i] = 1.0
    return J


def complex_to_real(w):
    """(..., n) complex -> (..., 2n) interleaved real."""
    w = np.asarray(w, dtype=complex)
    out = np.empty(w.shape[:-1] + (2 * w.shape[-1],))
    out[..., 0::2] = w.real
    out[..., 1::2] = w.imag
    return out


def real_to_complex(x):
    """(..., 2n) interleaved real -> (..., n) complex."""
    x = np.asarray(x, dtype=float)
    return x[..., 0::2] + 1j * x[..., 1::2]


class StructureField:
    """Matrix field x -> J(x) with J(x)^2 = -Id.

    fn maps an (N, dim) batch of points to (N, dim, dim) matrices.
    spec, when set, is the JSON-serializable description that rebuilds
    the field (builtins and polynomial-Q fields carry one).
    """

    def __init__(self, dim, fn, label, lipschitz_hint=None, spec=None):
        if dim % 2 or dim <= 0:
            raise DimensionError(f"ambient dimension {dim} is not even")
        self.dim = dim
        self._fn = fn
        self.label = label
        self.lipschitz_hint = lipschitz_hint
        self.spec = spec

    def eval(self, points):
        """Batched evaluation: (..., dim) points -> (..., dim, dim)."""
        points = np.asarray(points, dtype=float)
        if points.shape[-1] != self.dim:
            raise DimensionError(
                f"points have dimension {points.shape[-1]}, field has "
                f"{self.dim}")
        lead = points.shape[:-1]
        J = self._fn(points.reshape(-1, self.dim))
        J = np.asarray(J, dtype=float).reshape(lead + (self.dim, self.dim))
        if _DEBUG_CHECKS:
            err = J @ J + np.eye(self.dim)
            worst = float(np.max(np.abs(err)))
            if worst > 1e-10:
                raise PrecisionError(
                    f"{self.label}: J^2 + Id residual {worst:.2e}")
        return J

    def __call__(self, point):
        return self.eval(np.asarray(point, dtype=float)[None, :])[0]

    def __repr__(self):
        return f"StructureField({self.label!r}, dim={self.dim})"


class QField:
    """Antilinear part of a structure: x -> complex n x n matrix M, acting
    as w -> M conj(w) on C^n.  dim is the ambient real dimension 2n."""

    def __init__(self, dim, fn, label):
        if dim % 2 or dim <= 0:
            raise DimensionError(f"ambient dimension {dim} is not even")
        self.dim = dim
        self._fn = fn
        self.label = label

    def eval(self, points):
        points = np.asarray(points, dtype=float)
        if points.shape[-1] != self.dim:
            raise DimensionError(
                f"points have dimension {points.shape[-1]}, field has "
                f"{self.dim}")
        lead = points.shape[:-1]
        n = self.dim // 2
        M = self._fn(points.reshape(-1, self.dim))
        return np.asarray(M, dtype=complex).reshape(lead + (n, n))

    def __call__(self, point):
        return self.eval(np.asarray(point, dtype=float)[None, :])[0]

    def __repr__(self):
        return f"QField({self.label!r}, dim={self.dim})"


def _q_real_rep(M):
    """Real 2n x 2n representation of w -> M conj(w) (batched)."""
    n = M.shape[-1]
    R = np.zeros(M.shape[:-2] + (2 * n, 2 * n))
    a, b = M.real, M.imag
    R[..., 0::2, 0::2] = a
    R[..., 0::2, 1::2] = b
    R[..., 1::2, 0::2] = b
    R[..., 1::2, 1::2] = -a
    return R


def _q_complex_rep(R):
    """Complex matrix of a real antilinear operator (batched)."""
    return R[..., 0::2, 0::2] + 1j * R[..., 1::2, 0::2]


def j_to_q(J):
    """Antilinear deficiency of a structure: Qbar = (J+J_st)^(-1)(J_st-J).

    Raises SingularError where J + J_st is not invertible and
    PrecisionError if the result fails to anticommute with J_st (only
    possible through severe ill-conditioning)."""
    Jst = standard_matrix(J.dim)

    def fn(points):
        Jx = J.eval(points)
        try:
            R = np.linalg.solve(Jx + Jst, Jst - Jx)
        except np.linalg.LinAlgError:
            raise SingularError(
                f"{J.label}: J + J_st singular somewhere in the batch")
        anti = R @ Jst + Jst @ R
        worst = float(np.max(np.abs(anti))) if anti.size else 0.0
        if worst > 1e-9:
            raise PrecisionError(
                f"{J.label}: antilinearity residual {worst:.2e}")
        return _q_complex_rep(R)

    return QField(J.dim, fn, label=f"q[{J.label}]")


def q_to_j(Q):
    """Structure with a prescribed antilinear part:
    J = J_st (Id - Qbar)(Id + Qbar)^(-1).

    Raises SingularError where the reconstruction denominator is
    singular (the antilinear part reaches operator norm 1)."""
    Jst = standard_matrix(Q.dim)
    eye = np.eye(Q.dim)

    def fn(points):
        R = _q_real_rep(Q.eval(points))
        try:
            Y = np.linalg.solve(np.swapaxes(eye + R, -1, -2),
                                np.swapaxes(eye - R, -1, -2))
        except np.linalg.LinAlgError:
            raise SingularError(
                f"{Q.label}: reconstruction singular (antilinear part "
                f"reaches norm 1)")
        return Jst @ np.swapaxes(Y, -1, -2)

    return StructureField(Q.dim, fn, label=f"j[{Q.label}]")


# -- built-in structures ------------------------------------------------------

def _standard_field(dim=4):
    Jst = standard_matrix(dim)
    return StructureField(
        dim, lambda pts: np.broadcast_to(Jst, (pts.shape[0], dim, dim)),
        label="standard", lipschitz_hint=0.0,
        spec={"schema": SPEC_SCHEMA, "builtin": "standard",
              "params": {"dim": dim}})


def _example_2_3(mu=1):
    # antilinear part with single entry 2*conj(w_1); makes every curve
    # (z^mu, zbar^(2 mu)) holomorphic, so mu only labels the pairing
    def qfn(points):
        w1 = points[:, 0] + 1j * points[:, 1]
        M = np.zeros((points.shape[0], 2, 2), dtype=complex)
        M[:, 1, 0] = 2.0 * np.conj(w1)
        return M

    field = q_to_j(QField(4, qfn, label="example_2_3"))
    field.label = "example_2_3"
    field.lipschitz_hint = 4.0
    field.spec = {"schema": SPEC_SCHEMA, "builtin": "example_2_3",
                  "params": {"mu": int(mu)}}
    return field


def _ln_power(x2, k):
    """k * x2 * (-ln x2)^((k+1)/k) on 0 < x2 < 1, extended by 0 below."""
    out = np.zeros_like(x2)
    inside = (x2 > 0.0) & (x2 < 1.0)
    xi = x2[inside]
    out[inside] = k * xi * (-np.log(xi)) ** ((k + 1.0) / k)
    return out


def _example_9_1(k=1):
    if not (isinstance(k, (int, np.integer)) and k >= 1):
        raise DomainError(f"k must be a positive integer, got {k!r}")

    def fn(points):
        x1, x2 = points[:, 0], points[:, 2]
        if np.any(x2 >= 1.0):
            raise DomainError("example_9_1 is defined on x_2 < 1")
        a = np.where(x1 >= 0.0, _ln_power(x2, k), 0.0)
        J = np.zeros((points.shape[0], 4, 4))
        J[:, 0, 1] = -1.0
        J[:, 1, 0] = 1.0
        J[:, 2, 3] = -1.0
        J[:, 3, 2] = 1.0
        # J v = d/dy_1 for v = d/dx_1 + a d/dx_2, so the x_1 column picks
        # up -a in the y_2 slot and the y_1 column is -v
        J[:, 3, 0] = -a
        J[:, 2, 1] = -a
        return J

    return StructureField(
        4, fn, label=f"example_9_1(k={k})",
        spec={"schema": SPEC_SCHEMA, "builtin": "example_9_1",
              "params": {"k": int(k)}})


def _example_9_2():
    # coupling vector v = 2 w_2^2 / conj(w_2): twice the dzbar-derivative
    # of w_1 = z^2 ln|z|^2 along the curve z -> (w_1(z), z)
    def fn(points):
        w2 = points[:, 2] + 1j * points[:, 3]
        v = np.zeros_like(w2)
        nz = w2 != 0
        v[nz] = 2.0 * w2[nz] ** 2 / np.conj(w2[nz])
        v1, v2 = v.real, v.imag
        J = np.zeros((points.shape[0], 4, 4))
        J[:, 0, 1] = -1.0
        J[:, 1, 0] = 1.0
        J[:, 2, 3] = -1.0
        J[:, 3, 2] = 1.0
        J[:, 0, 2] = v2
        J[:, 0, 3] = -v1
        J[:, 1, 2] = -v1
        J[:, 1, 3] = -v2
        return J

    return StructureField(
        4, fn, label="example_9_2", lipschitz_hint=6.0,
        spec={"schema": SPEC_SCHEMA, "builtin": "example_9_2", "params": {}})


def dilated(base, t, mu=1):
    """Pullback of a structure under w -> t^mu w; tends to the constant
    structure J(0) as t -> 0 with Lipschitz constant scaled by t^mu."""
    if not 0 < t <= 1:
        raise DomainError(f"dilation parameter t={t} outside (0, 1]")
    scale = float(t) ** mu
    hint = None if base.lipschitz_hint is None \
        else base.lipschitz_hint * scale
    spec = None
    if base.spec is not None:
        spec = {"schema": SPEC_SCHEMA, "builtin": "dilated",
                "params": {"base": base.spec, "t": float(t), "mu": mu}}
    return StructureField(
        base.dim, lambda pts: base.eval(scale * pts),
        label=f"dilated[{base.label}, t={t}, mu={mu}]",
        lipschitz_hint=hint, spec=spec)


_BUILTINS = {
    "standard": _standard_field,
    "example_2_3": _example_2_3,
    "example_9_1": _example_9_1,
    "example_9_2": _example_9_2,
}


def builtin(name, params=None):
    """Named built-in structure; `dilated` takes {"base": spec-or-field,
    "t": scale, "mu": power}."""
    params = dict(params or {})
    if name == "dilated":
        base = params.pop("base", None)
        if isinstance(base, dict):
            base = structure_from_spec(base)
        elif isinstance(base, str):
            base = builtin(base)
        if not isinstance(base, StructureField):
            raise UnknownNameError("dilated needs a base structure")
        if "t" not in params:
            raise DomainError("dilated needs the scale parameter t")
        return dilated(base, params.pop("t"), params.pop("mu", 1))
    try:
        factory = _BUILTINS[name]
    except KeyError:
        raise UnknownNameError(
            f"unknown structure {name!r}; have "
            f"{sorted(_BUILTINS)+['dilated']}") from None
    return factory(**params)


# -- JSON structure specs -----------------------------------------------------

def _poly_q_field(desc):
    n = int(desc["n"])
    entries = desc["entries"]
    if len(entries) != n or any(len(row) != n for row in entries):
        raise ValueError("q_matrix_polynomials entries must be n x n")
    terms = []
    for i in range(n):
        for j in range(n):
            for term in entries[i][j] or []:
                c = complex(term["c"][0], term["c"][1])
                ze = tuple(int(e) for e in term.get("z", [0] * n))
                be = tuple(int(e) for e in term.get("zbar", [0] * n))
                if len(ze) != n or len(be) != n or min(ze + be) < 0:
                    raise ValueError("bad monomial exponents")
                terms.append((i, j, c, ze, be))

    def qfn(points):
        w = real_to_complex(points)
        M = np.zeros((points.shape[0], n, n), dtype=complex)
        for i, j, c, ze, be in terms:
            mono = np.full(points.shape[0], c)
            for idx, e in enumerate(ze):
                if e:
                    mono = mono * w[:, idx] ** e
            for idx, e in enumerate(be):
                if e:
                    mono = mono * np.conj(w[:, idx]) ** e
            M[:, i, j] += mono
        return M

    return QField(2 * n, qfn, label="polynomial_q")


def structure_from_spec(spec):
    """Build a StructureField from its JSON description (schema 1):
    {"schema": 1, "builtin": name, "params": {...}} or
    {"schema": 1, "q_matrix_polynomials": {"n": ..., "entries": ...}}."""
    if isinstance(spec, str):
        spec = json.loads(spec)
    if spec.get("schema") != SPEC_SCHEMA:
        raise ValueError(f"unsupported structure spec schema "
                         f"{spec.get('schema')!r}")
    if "builtin" in spec:
        return builtin(spec["builtin"], spec.get("params"))
    if "q_matrix_polynomials" in spec:
        field = q_to_j(_poly_q_field(spec["q_matrix_polynomials"]))
        field.spec = spec
        return field
    raise ValueError("structure spec needs 'builtin' or "
                     "'q_matrix_polynomials'")


# -- estimates and residuals --------------------------------------------------

def lipschitz_estimate(J, region, budget=4096, seed=0, n_scales=12):
    """Sampled lower bound for the Lipschitz constant of J on a ball.

    region is (center, radius).  Pairs are stratified over dyadic
    fractions of the radius; per-scale streams are seeded and consumed
    as prefixes, so the estimate is deterministic and monotone in the
    budget.  Matrix differences are measured in operator norm.
    """
    center, radius = region
    center = np.asarray(center, dtype=float)
    if center.shape != (J.dim,):
        raise DimensionError(
            f"region center has shape {center.shape}, expected ({J.dim},)")
    if radius <= 0:
        raise DomainError("region radius must be positive")
    per_scale = max(budget // n_scales, 1)
    best = 0.0
    for s in range(n_scales):
        delta = radius * 2.0 ** -(s + 1)
        rng = np.random.default_rng(np.random.SeedSequence([seed, s]))
        have = 0
        while have < per_scale:
            # fixed batch size keeps streams prefix-stable across budgets
            m = 1024
            x = rng.standard_normal((m, J.dim))
            x /= np.linalg.norm(x, axis=1, keepdims=True)
            x *= radius * rng.uniform(0, 1, (m, 1)) ** (1.0 / J.dim)
            d = rng.standard_normal((m, J.dim))
            d /= np.linalg.norm(d, axis=1, keepdims=True)
            y = x + delta * d
            ok = np.linalg.norm(y, axis=1) <= radius
            x, y = x[ok][:per_scale - have], y[ok][:per_scale - have]
            if x.size == 0:
                continue
            have += x.shape[0]
            diff = J.eval(center + x) - J.eval(center + y)
            sep = np.linalg.norm(x - y, axis=1)
            op = np.linalg.svd(diff, compute_uv=False)[:, 0]
            best = max(best, float(np.max(op / sep)))
    return best


def cr_residual(J, u):
    """Node-wise norm of du/dx + J(u(z)) du/dy for a disc map u given as
    a GridFunction with n components (J must act on R^(2n))."""
    if J.dim != 2 * u.n_comp:
        raise DimensionError(
            f"structure dim {J.dim} does not match map into C^{u.n_comp}")
    dz, dzbar = wirtinger(u)
    ux = dz.values + dzbar.values
    uy = 1j * (dz.values - dzbar.values)
    pts = complex_to_real(u.values)
    Jx = J.eval(pts)
    resid = complex_to_real(ux) + np.einsum(
        "rkij,rkj->rki", Jx, complex_to_real(uy))
    norms = np.linalg.norm(resid, axis=2)
    return GridFunction(u.radii, norms.astype(complex))
