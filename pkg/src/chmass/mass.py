"""The mass functional: sphere quadrature, integrand, extrapolation.

The boundary integral at model radius R is

    v(R) = -1/4 int_{S_R} [ (d tr_g0 e + Div_g0 e)(nu) u + (1/2) tr_g0(e) (J alpha)(nu) ] dA_g0

with e = g - g0, nu the outward g0-unit normal, u and alpha = J du the
parallel-section fields of an ambient form, and (J alpha) = -du.  Everything
is computed with respect to the model metric; Div is the negative covariant
contraction (the convention that reproduces the classical flat-space mass).
The limit R -> infinity is estimated by fitting v(R) = v_inf + c exp(-kappa R)
to the tail of the schedule.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ambient import AmbientForm, du_field_of_beta, u_field_of_beta
from .fd import fd_gradient
from .geometry import CHModelField, MetricField, RHModelField, hermitian_to_real, j_matrix
from .profiles import ProfileMetricField

H_MASS_FD = 2e-2
H_MODEL_FD = 1e-4


# ---------------------------------------------------------------------------
# quadrature on model spheres


@dataclass
class SphereQuadrature:
    """Nodes and weights on the unit sphere S^(2m-1) for the round measure.

    Product rule: Gauss-Legendre in the torus-action moment variables
    (|w_k|^2 on the simplex) and trapezoid in the m torus angles; both are
    spectrally accurate for smooth integrands.  ``area_factor(R)`` scales the
    round measure to the model sphere of geodesic radius R.
    """

    m: int
    nodes: np.ndarray  # (N, 2m) points on the unit sphere
    weights: np.ndarray  # (N,) round-measure weights
    meta: dict = field(default_factory=dict)

    @property
    def round_volume(self) -> float:
        import math

        m = self.m
        return 2.0 * np.pi**m / float(math.factorial(m - 1))

    def area_factor(self, R: float) -> float:
        return float(np.sinh(2.0 * R) * np.sinh(R) ** (2 * self.m - 2))

    def volume(self, R: float) -> float:
        return self.round_volume * self.area_factor(R)


def sphere_quadrature(m: int, n_polar: int = 24, n_torus: int = 24) -> SphereQuadrature:
    """Build the product quadrature on S^(2m-1) (m = 2 or 3)."""
    glx, glw = np.polynomial.legendre.leggauss(n_polar)
    phis = [2.0 * np.pi * np.arange(n_torus) / n_torus for _ in range(m)]
    wphi = (2.0 * np.pi / n_torus) ** m
    if m == 2:
        v1 = 0.5 * (glx + 1.0)
        wv = 0.5 * glw
        V1, P1, P2 = np.meshgrid(v1, phis[0], phis[1], indexing="ij")
        WV = np.meshgrid(wv, phis[0], phis[1], indexing="ij")[0]
        v = np.stack([V1.ravel(), 1.0 - V1.ravel()], axis=1)
        ang = np.stack([P1.ravel(), P2.ravel()], axis=1)
        weights = 0.5 * WV.ravel() * wphi
    elif m == 3:
        # Duffy map of the simplex v1 + v2 + v3 = 1
        a = 0.5 * (glx + 1.0)
        b = 0.5 * (glx + 1.0)
        A, B, P1, P2, P3 = np.meshgrid(a, b, phis[0], phis[1], phis[2], indexing="ij")
        WA, WB = np.meshgrid(0.5 * glw, 0.5 * glw, indexing="ij")
        WAB = (WA * WB)[:, :, None, None, None] * np.ones_like(P1)
        v1 = A.ravel()
        v2 = ((1.0 - A) * B).ravel()
        v3 = 1.0 - v1 - v2
        v = np.stack([v1, v2, v3], axis=1)
        ang = np.stack([P1.ravel(), P2.ravel(), P3.ravel()], axis=1)
        weights = WAB.ravel() * (1.0 - A.ravel()) * wphi * 0.25
    else:
        raise ValueError("sphere_quadrature supports m = 2, 3")
    Z = np.sqrt(v) * np.exp(1j * ang)
    nodes = np.empty((Z.shape[0], 2 * m))
    nodes[:, 0::2] = Z.real
    nodes[:, 1::2] = Z.imag
    return SphereQuadrature(
        m=m, nodes=nodes, weights=weights, meta={"n_polar": n_polar, "n_torus": n_torus}
    )


def round_sphere_quadrature(n: int, n_polar: int = 24, n_torus: int = 24):
    """Nodes/weights on S^(n-1) for the real hyperbolic path (n = 3 or 4)."""
    if n == 4:
        q = sphere_quadrature(2, n_polar, n_torus)
        return q.nodes, q.weights
    if n == 3:
        glx, glw = np.polynomial.legendre.leggauss(n_polar)
        phi = 2.0 * np.pi * np.arange(n_torus) / n_torus
        CT, PH = np.meshgrid(glx, phi, indexing="ij")
        W = np.meshgrid(glw, phi, indexing="ij")[0] * (2.0 * np.pi / n_torus)
        st = np.sqrt(1.0 - CT.ravel() ** 2)
        nodes = np.stack(
            [st * np.cos(PH.ravel()), st * np.sin(PH.ravel()), CT.ravel()], axis=1
        )
        return nodes, W.ravel()
    raise ValueError("round_sphere_quadrature supports n = 3, 4")


# ---------------------------------------------------------------------------
# metric differences


def delta_field(g_field: MetricField, model: MetricField):
    """Batched e = g - g0, preferring an exact ``delta`` if the field has one."""
    if hasattr(g_field, "delta"):
        return g_field.delta
    return lambda P: g_field.matrix(P) - model.matrix(P)


class PullbackField(MetricField):
    """Pullback of a ball metric field by a holomorphic ball automorphism.

    Since the automorphism is a model isometry, the difference to the model
    pulls back exactly: delta(P) = Df^T delta_base(f(P)) Df.
    """

    def __init__(self, base: MetricField, U: np.ndarray, m: int):
        from .ambient import ball_automorphism, ball_automorphism_jacobian, check_indefinite_unitary

        check_indefinite_unitary(U, m)
        self.base = base
        self.U = np.asarray(U, dtype=complex)
        self.m = m
        self.dim = 2 * m
        self._auto = ball_automorphism
        self._jac = ball_automorphism_jacobian
        self._model = CHModelField(m)

    def fd_scale(self, P: np.ndarray) -> np.ndarray:
        P = np.atleast_2d(P)
        return np.maximum(1.0 - np.linalg.norm(P, axis=-1), 1e-12)

    def matrix(self, P: np.ndarray) -> np.ndarray:
        P = np.atleast_2d(np.asarray(P, dtype=float))
        fP = self._auto(self.U, P, self.m)
        Df = self._jac(self.U, P, self.m)
        return np.einsum("nai,nab,nbj->nij", Df, self.base.matrix(fP), Df)

    def delta(self, P: np.ndarray) -> np.ndarray:
        P = np.atleast_2d(np.asarray(P, dtype=float))
        fP = self._auto(self.U, P, self.m)
        Df = self._jac(self.U, P, self.m)
        base_delta = delta_field(self.base, self._model)
        return np.einsum("nai,nab,nbj->nij", Df, base_delta(fP), Df)


# ---------------------------------------------------------------------------
# the integrand


def div_trace_oneform(g_field: MetricField, P: np.ndarray, m: int, h: float = H_MASS_FD):
    """The covector (d tr_g0 e + Div_g0 e) at each point, plus tr_g0 e.

    Returns (lam (N, 2m), tr (N,)).  Div is the negative g0-covariant
    contraction on the first slot.
    """
    model = CHModelField(m)
    P = np.atleast_2d(np.asarray(P, dtype=float))
    efun = delta_field(g_field, model)
    scale = model.fd_scale(P)

    e = efun(P)
    de = fd_gradient(efun, P, h * scale)  # (n, a, i, j)
    G0 = model.matrix(P)
    dG0 = fd_gradient(model.matrix, P, H_MODEL_FD * scale)
    G0inv = np.linalg.inv(G0)
    sym = np.einsum("nijl->nijl", dG0) + np.einsum("njil->nijl", dG0) - np.einsum("nlij->nijl", dG0)
    Gam0 = 0.5 * np.einsum("nkl,nijl->nkij", G0inv, sym)

    nabla_e = (
        de
        - np.einsum("nlai,nlj->naij", Gam0, e)
        - np.einsum("nlaj,nil->naij", Gam0, e)
    )
    div_e = -np.einsum("nia,naij->nj", G0inv, nabla_e)
    dG0inv = -np.einsum("nik,nakl,nlj->naij", G0inv, dG0, G0inv)
    dtr = np.einsum("naij,nij->na", dG0inv, e) + np.einsum("nij,naij->na", G0inv, de)
    tr = np.einsum("nij,nij->n", G0inv, e)
    return dtr + div_e, tr


def mass_integrand(
    g_field: MetricField, B: AmbientForm, P: np.ndarray, m: int, h: float = H_MASS_FD
):
    """lambda(nu) at each point: the scalar contracted against the outward normal.

    The two equal forms of the angular-momentum term (+1/2 tr (J alpha)(nu)
    with alpha = J du, and -1/2 tr du(nu)) coincide identically because
    J(J du) = -du; both are formed from the same closed-form du.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    lam, tr = div_trace_oneform(g_field, P, m, h)
    rho = np.linalg.norm(P, axis=-1)
    nu = (1.0 - rho**2)[:, None] * P / rho[:, None]
    u = u_field_of_beta(B, P)
    du = du_field_of_beta(B, P)
    main = np.einsum("na,na->n", lam, nu) * u
    trans = -0.5 * tr * np.einsum("na,na->n", du, nu)
    return main + trans


# ---------------------------------------------------------------------------
# extrapolation


@dataclass
class ExtrapolationResult:
    limit: float
    kappa: float | None
    residual: float
    flag: str  # finite | diverging | noisy


def extrapolate_schedule(Rs: np.ndarray, values: np.ndarray) -> ExtrapolationResult:
    """Fit v(R) = v_inf + c exp(-kappa R) on an increasing schedule.

    Geometric-difference fit; flags ``diverging`` when differences grow
    monotonically, ``noisy`` when the difference ratios are scattered.
    """
    Rs = np.asarray(Rs, dtype=float)
    values = np.asarray(values, dtype=float)
    scale = float(np.max(np.abs(values)))
    if scale < 1e-13:
        return ExtrapolationResult(limit=0.0, kappa=None, residual=0.0, flag="finite")
    d = np.diff(values)
    dR = np.diff(Rs)
    if np.max(np.abs(d)) < 1e-12 * scale:
        return ExtrapolationResult(limit=float(values[-1]), kappa=None, residual=0.0, flag="finite")
    absd = np.abs(d)
    if np.all(absd[1:] > absd[:-1]) and absd[-1] > 2.0 * absd[0]:
        return ExtrapolationResult(
            limit=float(values[-1]), kappa=None, residual=float(absd[-1] / scale), flag="diverging"
        )
    ratios = d[1:] / d[:-1]
    ratios = ratios[np.isfinite(ratios)]
    pos = ratios[ratios > 0]
    if len(pos) == 0 or len(pos) < len(ratios) / 2:
        return ExtrapolationResult(
            limit=float(values[-1]), kappa=None, residual=float(absd[-1] / scale), flag="noisy"
        )
    qbar = float(np.exp(np.mean(np.log(pos))))
    if qbar >= 1.0:
        flag = "diverging" if np.all(d > 0) or np.all(d < 0) else "noisy"
        return ExtrapolationResult(
            limit=float(values[-1]), kappa=None, residual=float(absd[-1] / scale), flag=flag
        )
    step = float(np.mean(dR))
    kappa = -np.log(qbar) / step

    def geom_limit(vals, diffs, q):
        return float(vals[-1] + diffs[-1] * q / (1.0 - q))

    v_all = geom_limit(values, d, qbar)
    if len(values) >= 5:
        d_tail = d[-3:]
        q_tail = float(np.exp(np.mean(np.log(np.abs(d_tail[1:] / d_tail[:-1])))))
        q_tail = min(q_tail, 0.999)
        v_tail = geom_limit(values, d, q_tail)
    else:
        v_tail = v_all
    denom = max(abs(v_all), 0.05 * scale)
    residual = abs(v_all - v_tail) / denom
    spread = float(np.max(np.abs(np.log(pos) - np.log(qbar)))) if len(pos) > 1 else 0.0
    flag = "finite" if spread < 1.5 else "noisy"
    return ExtrapolationResult(limit=v_all, kappa=float(kappa), residual=float(residual), flag=flag)


# ---------------------------------------------------------------------------
# mass rows and reports


@dataclass
class MassRow:
    beta_id: str
    Rs: np.ndarray
    values: np.ndarray
    limit: float
    kappa: float | None
    residual: float
    flag: str

    @property
    def scale(self) -> float:
        return max(1e-30, float(np.max(np.abs(self.values))), abs(self.limit))


@dataclass
class MassReport:
    rows: list
    basis_labels: list
    functional: np.ndarray  # limits on the basis elements

    def row(self, beta_id: str) -> MassRow:
        for r in self.rows:
            if r.beta_id == beta_id:
                return r
        raise KeyError(beta_id)


def default_r_schedule() -> np.ndarray:
    return np.linspace(2.0, 4.5, 6)


@dataclass
class SphereGeometry:
    """Per-radius geometric data of the integrand, independent of the form."""

    R: float
    P: np.ndarray
    lam_nu: np.ndarray  # (d tr e + Div e)(nu) at each node
    tr: np.ndarray
    nu: np.ndarray
    weights: np.ndarray
    area: float


def sphere_geometry(
    g_field: MetricField, m: int, R: float, quad: SphereQuadrature, h: float = H_MASS_FD
) -> SphereGeometry:
    P = np.tanh(R) * quad.nodes
    lam, tr = div_trace_oneform(g_field, P, m, h)
    rho = np.linalg.norm(P, axis=-1)
    nu = (1.0 - rho**2)[:, None] * P / rho[:, None]
    return SphereGeometry(
        R=R,
        P=P,
        lam_nu=np.einsum("na,na->n", lam, nu),
        tr=tr,
        nu=nu,
        weights=quad.weights,
        area=quad.area_factor(R),
    )


def sphere_value(geom: SphereGeometry, B: AmbientForm) -> float:
    """One sphere integral of the mass integrand against an ambient form."""
    u = u_field_of_beta(B, geom.P)
    du = du_field_of_beta(B, geom.P)
    integ = geom.lam_nu * u - 0.5 * geom.tr * np.einsum("na,na->n", du, geom.nu)
    return -0.25 * geom.area * float(np.dot(geom.weights, integ))


def schedule_geometry(
    g_field: MetricField,
    m: int,
    R_schedule=None,
    quad: SphereQuadrature | None = None,
    h: float = H_MASS_FD,
):
    Rs = np.asarray(R_schedule if R_schedule is not None else default_r_schedule(), dtype=float)
    if np.any(np.diff(Rs) <= 0):
        raise ValueError("R schedule must be increasing")
    quad = quad or sphere_quadrature(m)
    return Rs, [sphere_geometry(g_field, m, R, quad, h) for R in Rs]


def _row_from_geometry(Rs, geoms, B: AmbientForm, beta_id: str) -> MassRow:
    vals = np.array([sphere_value(g, B) for g in geoms])
    ext = extrapolate_schedule(Rs, vals)
    return MassRow(
        beta_id=beta_id,
        Rs=Rs,
        values=vals,
        limit=ext.limit,
        kappa=ext.kappa,
        residual=ext.residual,
        flag=ext.flag,
    )


def mass_of_beta(
    g_field: MetricField,
    B: AmbientForm,
    m: int,
    R_schedule=None,
    quad: SphereQuadrature | None = None,
    beta_id: str = "beta",
    h: float = H_MASS_FD,
    geometry=None,
) -> MassRow:
    """Sphere integrals of the mass integrand over the schedule plus the limit."""
    if geometry is None:
        geometry = schedule_geometry(g_field, m, R_schedule, quad, h)
    Rs, geoms = geometry
    return _row_from_geometry(Rs, geoms, B, beta_id)


def mass_functional(
    g_field: MetricField,
    m: int,
    basis: list | None = None,
    basis_labels: list | None = None,
    R_schedule=None,
    quad: SphereQuadrature | None = None,
    h: float = H_MASS_FD,
    geometry=None,
) -> MassReport:
    """Per-basis-element mass rows and the functional vector.

    The default basis is the primitive one for odd m and the full space of
    J-invariant ambient forms for even m.  The geometric part of the integrand
    is computed once per sphere and shared across basis elements.
    """
    from .ambient import ambient_basis, primitive_basis

    if basis is None:
        basis = ambient_basis(m) if m % 2 == 0 else primitive_basis(m)
        basis_labels = [f"b{i:02d}" for i in range(len(basis))]
    if basis_labels is None:
        basis_labels = [f"b{i:02d}" for i in range(len(basis))]
    if geometry is None:
        geometry = schedule_geometry(g_field, m, R_schedule, quad, h)
    Rs, geoms = geometry
    rows = [_row_from_geometry(Rs, geoms, B, lab) for B, lab in zip(basis, basis_labels)]
    functional = np.array([r.limit for r in rows])
    return MassReport(rows=rows, basis_labels=list(basis_labels), functional=functional)


def pu_transform_matrix(U: np.ndarray, basis: list) -> np.ndarray:
    """Matrix of the pullback action on a (Euclidean-orthonormal) form basis."""
    from .ambient import pu_action

    mats = [pu_action(U, B).B for B in basis]
    return np.array(
        [[0.5 * np.sum(Bi.B * Mj) for Mj in mats] for Bi in basis]
    )


# ---------------------------------------------------------------------------
# the real hyperbolic mass (cross-check path)


def rh_lift(P: np.ndarray) -> np.ndarray:
    """Hyperboloid lift of Poincare-ball points, (2x, 1 + |x|^2)/(1 - |x|^2)."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    rho2 = np.sum(P**2, axis=-1)
    out = np.empty((P.shape[0], P.shape[1] + 1))
    out[:, :-1] = 2.0 * P / (1.0 - rho2)[:, None]
    out[:, -1] = (1.0 + rho2) / (1.0 - rho2)
    return out


def rh_section_fields(A: np.ndarray):
    """u and du fields of the parallel section <A, lift(x)> on RH^n."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0] - 1

    def u(P):
        L = rh_lift(P)
        return L[:, :n] @ A[:n] - L[:, n] * A[n]

    def du(P):
        P = np.atleast_2d(np.asarray(P, dtype=float))
        rho2 = np.sum(P**2, axis=-1)
        q = 1.0 - rho2
        # d[2x_i/q] = 2 delta/q + 4 x_i x_a / q^2 ; d[(1+rho2)/q] = 4 x_a / q^2
        t1 = 2.0 * A[None, :n] / q[:, None]
        t2 = (4.0 * (P @ A[:n]) / q**2)[:, None] * P
        t3 = -A[n] * 4.0 * P / q[:, None] ** 2
        return t1 + t2 + t3

    return u, du


class RHPerturbedField(MetricField):
    """g = g_RH + eps exp(-kappa r) S on the Poincare ball (radial test metrics).

    ``kind`` chooses S: "conformal" (proportional to g_RH) or "radial"
    (supported on the radial line only).
    """

    def __init__(self, n: int, eps: float, kappa: float, kind: str = "conformal"):
        self.n = n
        self.dim = n
        self.eps = eps
        self.kappa = kappa
        self.kind = kind
        self._model = RHModelField(n)

    def fd_scale(self, P: np.ndarray) -> np.ndarray:
        P = np.atleast_2d(P)
        return np.maximum(1.0 - np.linalg.norm(P, axis=-1), 1e-12)

    def delta(self, P: np.ndarray) -> np.ndarray:
        P = np.atleast_2d(np.asarray(P, dtype=float))
        rho = np.linalg.norm(P, axis=-1)
        r = 2.0 * np.arctanh(np.minimum(rho, 1.0 - 1e-14))
        amp = self.eps * np.exp(-self.kappa * r)
        G0 = self._model.matrix(P)
        if self.kind == "conformal":
            return amp[:, None, None] * G0
        e_r = P / np.maximum(rho, 1e-300)[:, None]
        rad = np.einsum("na,nb->nab", e_r, e_r)
        lam = 4.0 / (1.0 - rho**2) ** 2
        return (amp * lam)[:, None, None] * rad

    def matrix(self, P: np.ndarray) -> np.ndarray:
        return self._model.matrix(P) + self.delta(P)


def rh_mass(
    g_field: MetricField,
    A: np.ndarray,
    n: int,
    R_schedule=None,
    n_polar: int = 24,
    n_torus: int = 24,
    h: float = H_MASS_FD,
) -> MassRow:
    """The real hyperbolic mass integral for the section of A in R^(n,1).

    ``-1/4 lim int * [ (Div e + d tr e) u - tr(e) du + e(grad u, .) ]`` with
    all structures from the ball model of RH^n.
    """
    Rs = np.asarray(R_schedule if R_schedule is not None else default_r_schedule(), dtype=float)
    model = RHModelField(n)
    nodes, wts = round_sphere_quadrature(n, n_polar, n_torus)
    u_fn, du_fn = rh_section_fields(np.asarray(A, dtype=float))
    efun = delta_field(g_field, model)
    vals = np.empty(len(Rs))
    for i, R in enumerate(Rs):
        rho = np.tanh(R / 2.0)
        P = rho * nodes
        scale = model.fd_scale(P)
        e = efun(P)
        de = fd_gradient(efun, P, h * scale)
        G0 = model.matrix(P)
        dG0 = fd_gradient(model.matrix, P, H_MODEL_FD * scale)
        G0inv = np.linalg.inv(G0)
        sym = (
            np.einsum("nijl->nijl", dG0)
            + np.einsum("njil->nijl", dG0)
            - np.einsum("nlij->nijl", dG0)
        )
        Gam0 = 0.5 * np.einsum("nkl,nijl->nkij", G0inv, sym)
        nabla_e = (
            de
            - np.einsum("nlai,nlj->naij", Gam0, e)
            - np.einsum("nlaj,nil->naij", Gam0, e)
        )
        div_e = -np.einsum("nia,naij->nj", G0inv, nabla_e)
        dG0inv = -np.einsum("nik,nakl,nlj->naij", G0inv, dG0, G0inv)
        dtr = np.einsum("naij,nij->na", dG0inv, e) + np.einsum("nij,naij->na", G0inv, de)
        tr = np.einsum("nij,nij->n", G0inv, e)
        u = u_fn(P)
        du = du_fn(P)
        grad_u = np.einsum("nab,nb->na", G0inv, du)
        lam = (dtr + div_e) * u[:, None] - tr[:, None] * du + np.einsum(
            "nab,nb->na", e, grad_u
        )
        nu = 0.5 * (1.0 - rho**2) * nodes  # outward g0-unit normal
        integ = np.einsum("na,na->n", lam, nu)
        area = np.sinh(R) ** (n - 1)
        vals[i] = -0.25 * area * float(np.dot(wts, integ))
    ext = extrapolate_schedule(Rs, vals)
    return MassRow(
        beta_id="rh",
        Rs=Rs,
        values=vals,
        limit=ext.limit,
        kappa=ext.kappa,
        residual=ext.residual,
        flag=ext.flag,
    )
