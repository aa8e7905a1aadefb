"""Ball-model geometry of complex and real hyperbolic space.

Conventions used throughout the package:

* real coordinates on the ball interleave real/imaginary parts,
  ``p = (x_1, y_1, ..., x_m, y_m)`` with ``w_k = x_k + i y_k``;
* the complex structure acts as multiplication by ``i``:
  ``J dx_k = dy_k`` on vectors, ``(J a)(X) = -a(JX)`` on covectors;
* the model metric is normalized to holomorphic sectional curvature ``-4``
  (scalar curvature ``-4m(m+1)``), with Hermitian coefficients
  ``h_jk = [(1-|w|^2) delta_jk + conj(w_j) w_k] / (2 (1-|w|^2)^2)``;
* curvature operator ``R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]`` and
  sectional curvature ``K = g(R(X,Y)Y, X) / area^2``, which makes the model's
  holomorphic sectional curvature come out ``-4``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .fd import fd_gradient, fd_jet2

EPS_BOUNDARY = 1e-9


class DomainError(ValueError):
    """Input outside the open unit ball / valid coordinate range."""


class SingularMetricError(ValueError):
    """Metric matrix not invertible at the requested point."""


# ---------------------------------------------------------------------------
# coordinates and complex structure


def complex_of(P: np.ndarray) -> np.ndarray:
    """Complex coordinates w_k from interleaved real coordinates."""
    P = np.asarray(P, dtype=float)
    return P[..., 0::2] + 1j * P[..., 1::2]


def real_of(Z: np.ndarray) -> np.ndarray:
    """Interleaved real coordinates from complex ones."""
    Z = np.asarray(Z, dtype=complex)
    out = np.empty(Z.shape[:-1] + (2 * Z.shape[-1],))
    out[..., 0::2] = Z.real
    out[..., 1::2] = Z.imag
    return out


def j_matrix(dim: int) -> np.ndarray:
    """Standard complex structure on R^dim (dim even), J e_x = e_y."""
    J = np.zeros((dim, dim))
    for k in range(dim // 2):
        J[2 * k + 1, 2 * k] = 1.0
        J[2 * k, 2 * k + 1] = -1.0
    return J


def j_covector(a: np.ndarray, J: np.ndarray) -> np.ndarray:
    """(J a)(X) = -a(JX) for covector components, batched on the left."""
    return -a @ J


@dataclass(frozen=True)
class BallPoint:
    """A point of the open unit ball of C^m in interleaved real coordinates."""

    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if c.ndim != 1 or c.shape[0] % 2:
            raise DomainError("expected 2m interleaved real coordinates")
        if np.linalg.norm(c) >= 1.0 - EPS_BOUNDARY:
            raise DomainError(f"|w| = {np.linalg.norm(c):.12g} too close to 1")
        object.__setattr__(self, "coords", c)

    @property
    def m(self) -> int:
        return self.coords.shape[0] // 2


def as_point_array(p) -> np.ndarray:
    if isinstance(p, BallPoint):
        return p.coords
    return np.asarray(p, dtype=float)


# ---------------------------------------------------------------------------
# metric fields


def hermitian_to_real(H: np.ndarray) -> np.ndarray:
    """Real 2m x 2m metric from Hermitian coefficients.

    ``g(u, v) = 2 Re sum_jk H[j,k] u_j conj(v_k)`` in complex components.
    """
    H = np.asarray(H)
    m = H.shape[-1]
    G = np.empty(H.shape[:-2] + (2 * m, 2 * m))
    re, im = H.real, H.imag
    G[..., 0::2, 0::2] = 2 * re
    G[..., 1::2, 1::2] = 2 * re
    G[..., 0::2, 1::2] = 2 * im
    G[..., 1::2, 0::2] = -2 * im
    return G


class MetricField:
    """A smooth field of metric matrices over (a subset of) R^d.

    Subclasses implement ``matrix`` (batched).  ``fd_scale`` returns the
    per-point scale multiplying finite-difference steps; fields on the unit
    ball shrink it like ``1 - |w|`` toward the boundary.
    """

    dim: int

    def matrix(self, P: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, P: np.ndarray) -> np.ndarray:
        return self.matrix(P)

    def fd_scale(self, P: np.ndarray) -> np.ndarray:
        return np.ones(np.atleast_2d(P).shape[0])


class BallMetricField(MetricField):
    def fd_scale(self, P: np.ndarray) -> np.ndarray:
        P = np.atleast_2d(P)
        return np.maximum(1.0 - np.linalg.norm(P, axis=-1), 1e-12)


class EuclideanField(MetricField):
    def __init__(self, dim: int):
        self.dim = dim

    def matrix(self, P: np.ndarray) -> np.ndarray:
        P = np.atleast_2d(P)
        return np.broadcast_to(np.eye(self.dim), (P.shape[0], self.dim, self.dim)).copy()


class HermitianMetricField(BallMetricField):
    """Kahler metric on the ball given by Hermitian coefficient matrices."""

    m: int

    def hermitian(self, P: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def matrix(self, P: np.ndarray) -> np.ndarray:
        return hermitian_to_real(self.hermitian(P))


class CHModelField(HermitianMetricField):
    """Complex hyperbolic metric on the unit ball, hol. sectional curvature -4."""

    def __init__(self, m: int):
        if m < 1:
            raise DomainError("m >= 1 required")
        self.m = m
        self.dim = 2 * m

    def hermitian(self, P: np.ndarray) -> np.ndarray:
        P = np.atleast_2d(np.asarray(P, dtype=float))
        Z = complex_of(P)
        rho2 = np.sum(np.abs(Z) ** 2, axis=-1)
        if np.any(rho2 >= (1.0 - EPS_BOUNDARY) ** 2):
            raise DomainError("point outside the metric's domain (|w| ~ 1)")
        q = 1.0 - rho2
        eye = np.eye(self.m)
        outer = np.conj(Z)[:, :, None] * Z[:, None, :]
        return (q[:, None, None] * eye + outer) / (2.0 * q**2)[:, None, None]


class RHModelField(BallMetricField):
    """Poincare ball model of real hyperbolic space, curvature -1."""

    def __init__(self, n: int):
        self.n = n
        self.dim = n

    def matrix(self, P: np.ndarray) -> np.ndarray:
        P = np.atleast_2d(np.asarray(P, dtype=float))
        rho2 = np.sum(P**2, axis=-1)
        if np.any(rho2 >= (1.0 - EPS_BOUNDARY) ** 2):
            raise DomainError("point outside the unit ball")
        lam = 4.0 / (1.0 - rho2) ** 2
        return lam[:, None, None] * np.eye(self.n)


class FunctionField(MetricField):
    """Wrap a batched callable as a metric field (controls and tests)."""

    def __init__(self, fn, dim: int, ball: bool = False):
        self._fn = fn
        self.dim = dim
        self._ball = ball

    def matrix(self, P: np.ndarray) -> np.ndarray:
        return self._fn(np.atleast_2d(np.asarray(P, dtype=float)))

    def fd_scale(self, P: np.ndarray) -> np.ndarray:
        if self._ball:
            P = np.atleast_2d(P)
            return np.maximum(1.0 - np.linalg.norm(P, axis=-1), 1e-12)
        return super().fd_scale(P)


@dataclass
class MetricValue:
    """Metric matrix at a point plus basic invariant checks."""

    G: np.ndarray

    def check(self, J: np.ndarray | None = None, kahler: bool = False, tol: float = 1e-10):
        G = self.G
        if np.max(np.abs(G - G.T)) > tol * max(1.0, np.max(np.abs(G))):
            raise ValueError("metric matrix not symmetric")
        if np.min(np.linalg.eigvalsh(G)) <= 0:
            raise ValueError("metric matrix not positive definite")
        if kahler and J is not None:
            if np.max(np.abs(J.T @ G @ J - G)) > tol * np.max(np.abs(G)):
                raise ValueError("metric not J-compatible")
        return self


def metric_ch(p, m: int | None = None) -> MetricValue:
    """Model metric g_0 at a ball point (closed form)."""
    c = as_point_array(p)
    m = m if m is not None else c.shape[0] // 2
    return MetricValue(CHModelField(m).matrix(c[None])[0])


def omega_matrix(G: np.ndarray, J: np.ndarray) -> np.ndarray:
    """Kahler form Omega(X, Y) = g(X, JY) as an antisymmetric matrix."""
    return G @ J


# ---------------------------------------------------------------------------
# Christoffel symbols and curvature (finite differences)

H_FD_DEFAULT = 1e-4
H_FD_CURVATURE = 4e-3


def _steps(field: MetricField, P: np.ndarray, base: float) -> np.ndarray:
    return base * field.fd_scale(P)


def christoffel_batch(field: MetricField, P: np.ndarray, h: float = H_FD_DEFAULT) -> np.ndarray:
    """Gamma[n, k, i, j] = Gamma^k_ij at each point of P."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    G = field.matrix(P)
    dG = fd_gradient(field.matrix, P, _steps(field, P, h))  # (n, a, i, j) = d_a G_ij
    try:
        Ginv = np.linalg.inv(G)
    except np.linalg.LinAlgError as exc:
        raise SingularMetricError(str(exc)) from exc
    sym = np.einsum("nijl->nijl", dG) + np.einsum("njil->nijl", dG) - np.einsum("nlij->nijl", dG)
    return 0.5 * np.einsum("nkl,nijl->nkij", Ginv, sym)


def christoffel(field: MetricField, p, h: float = H_FD_DEFAULT) -> np.ndarray:
    """Christoffel symbols Gamma^k_ij of the field at a single point."""
    return christoffel_batch(field, as_point_array(p)[None], h)[0]


def riemann_batch(field: MetricField, P: np.ndarray, h: float = H_FD_CURVATURE):
    """Curvature arrays R[n, i, j, k, l] with R(e_i, e_j) e_k = R[..., l] e_l."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    n, d = P.shape
    hvec = _steps(field, P, h)
    G, dG, d2G = fd_jet2(field.matrix, P, hvec)
    try:
        Ginv = np.linalg.inv(G)
    except np.linalg.LinAlgError as exc:
        raise SingularMetricError(str(exc)) from exc

    sym = np.einsum("nijl->nijl", dG) + np.einsum("njil->nijl", dG) - np.einsum("nlij->nijl", dG)
    Gam = 0.5 * np.einsum("nkl,nijl->nkij", Ginv, sym)

    # d_a Gamma^k_ij from first and second metric derivatives
    dGinv = -np.einsum("nkp,napq,nql->nakl", Ginv, dG, Ginv)
    dsym = (
        np.einsum("naijl->naijl", d2G)
        + np.einsum("najil->naijl", d2G)
        - np.einsum("nalij->naijl", d2G)
    )
    dGam = 0.5 * np.einsum("nakl,nijl->nakij", dGinv, sym) + 0.5 * np.einsum(
        "nkl,naijl->nakij", Ginv, dsym
    )

    R = (
        np.einsum("niljk->nijkl", dGam)
        - np.einsum("njlik->nijkl", dGam)
        + np.einsum("nlim,nmjk->nijkl", Gam, Gam)
        - np.einsum("nljm,nmik->nijkl", Gam, Gam)
    )
    return G, Ginv, R


@dataclass
class CurvatureSample:
    """Curvature operator R(X, Y) and derived scalars at a point."""

    X: np.ndarray
    Y: np.ndarray
    operator: np.ndarray  # matrix acting on tangent vectors
    sectional: float
    G: np.ndarray

    def holomorphic_check(self) -> float:
        return self.sectional


def riemann(field: MetricField, p, X, Y, h: float = H_FD_CURVATURE) -> CurvatureSample:
    """Curvature operator R(X, Y) at p together with the sectional curvature."""
    pt = as_point_array(p)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    G, _, R = riemann_batch(field, pt[None], h)
    G, R = G[0], R[0]
    area2 = (X @ G @ X) * (Y @ G @ Y) - (X @ G @ Y) ** 2
    if area2 <= 1e-14 * max(1.0, (X @ G @ X) * (Y @ G @ Y)):
        raise ValueError("degenerate plane spanned by X, Y")
    op = np.einsum("i,j,ijkl->kl", X, Y, R)  # maps e_k to op[k, :] components
    K = float(np.einsum("k,kl,l->", Y, op @ G, X)) / area2
    return CurvatureSample(X=X, Y=Y, operator=op.T, sectional=K, G=G)


def sectional_curvature(field: MetricField, p, X, Y, h: float = H_FD_CURVATURE) -> float:
    return riemann(field, p, X, Y, h).sectional


def holomorphic_sectional(field: MetricField, p, X, h: float = H_FD_CURVATURE) -> float:
    """Sectional curvature of the J-plane span(X, JX)."""
    J = j_matrix(field.dim)
    return sectional_curvature(field, p, X, J @ np.asarray(X, dtype=float), h)


def scal_batch(field: MetricField, P: np.ndarray, h: float = H_FD_CURVATURE) -> np.ndarray:
    _, Ginv, R = riemann_batch(field, P, h)
    ric = np.einsum("nijki->njk", R)
    return np.einsum("njk,njk->n", Ginv, ric)


def scal(field: MetricField, p, h: float = H_FD_CURVATURE) -> float:
    """Scalar curvature at a point (trace of Ricci, FD pipeline)."""
    return float(scal_batch(field, as_point_array(p)[None], h)[0])


# ---------------------------------------------------------------------------
# geodesics


@dataclass
class GeodesicResult:
    ts: np.ndarray
    points: np.ndarray
    velocities: np.ndarray
    speed_drift: float
    truncated: bool = False


def geodesic(
    field: MetricField,
    p,
    v,
    length: float,
    n_samples: int = 33,
    rtol: float = 1e-11,
    atol: float = 1e-11,
    boundary: float = 1.0 - 1e-6,
) -> GeodesicResult:
    """Unit-speed geodesic from p in direction v, by adaptive ODE integration.

    The initial velocity is normalized to unit g-length.  If the curve leaves
    the chart (|w| -> 1 for ball fields) the result is truncated and flagged.
    """
    pt = as_point_array(p).astype(float)
    v = np.asarray(v, dtype=float)
    G0 = field.matrix(pt[None])[0]
    v = v / np.sqrt(v @ G0 @ v)
    d = field.dim

    def rhs(_t, y):
        x, u = y[:d], y[d:]
        Gam = christoffel_batch(field, x[None])[0]
        acc = -np.einsum("kij,i,j->k", Gam, u, u)
        return np.concatenate([u, acc])

    is_ball = isinstance(field, BallMetricField) or (
        isinstance(field, FunctionField) and field._ball
    )

    def hit_boundary(_t, y):
        return np.linalg.norm(y[:d]) - boundary

    hit_boundary.terminal = True
    hit_boundary.direction = 1.0

    ts = np.linspace(0.0, length, n_samples)
    sol = solve_ivp(
        rhs,
        (0.0, length),
        np.concatenate([pt, v]),
        t_eval=ts,
        rtol=rtol,
        atol=atol,
        method="RK45",
        events=[hit_boundary] if is_ball else None,
        dense_output=False,
    )
    pts = sol.y[:d].T
    vel = sol.y[d:].T
    Gs = field.matrix(pts)
    speeds = np.sqrt(np.einsum("ni,nij,nj->n", vel, Gs, vel))
    drift = float(np.max(np.abs(speeds - 1.0)))
    truncated = bool(sol.status == 1)
    return GeodesicResult(
        ts=sol.t, points=pts, velocities=vel, speed_drift=drift, truncated=truncated
    )


# ---------------------------------------------------------------------------
# radial coordinate dictionary


@dataclass(frozen=True)
class RadialCoords:
    """The four radial coordinates r, s, t, x used interchangeably.

    r > 0 geodesic radius, s = tanh r the ball radius, t = log s < 0 the
    log-gauge variable, x = sinh^2 r the momentum-map variable.
    """

    r: float
    s: float
    t: float
    x: float

    @staticmethod
    def from_r(r: float) -> "RadialCoords":
        if not r > 0:
            raise DomainError("r > 0 required")
        s = np.tanh(r)
        return RadialCoords(r=r, s=s, t=float(np.log(s)), x=float(np.sinh(r) ** 2))

    @staticmethod
    def from_s(s: float) -> "RadialCoords":
        if not 0 < s < 1:
            raise DomainError("0 < s < 1 required")
        r = float(np.arctanh(s))
        # x = s^2 / (1 - s^2), stable near s -> 1 via expm1-free form
        x = s * s / ((1.0 - s) * (1.0 + s))
        return RadialCoords(r=r, s=float(s), t=float(np.log(s)), x=x)

    @staticmethod
    def from_t(t: float) -> "RadialCoords":
        if not t < 0:
            raise DomainError("t < 0 required")
        e2t = np.exp(2.0 * t)
        x = e2t / (-np.expm1(2.0 * t))
        return RadialCoords(r=float(np.arctanh(np.exp(t))), s=float(np.exp(t)), t=float(t), x=float(x))

    @staticmethod
    def from_x(x: float) -> "RadialCoords":
        if not x > 0:
            raise DomainError("x > 0 required")
        r = float(np.arcsinh(np.sqrt(x)))
        s2 = x / (1.0 + x)
        s = float(np.sqrt(s2))
        return RadialCoords(r=r, s=s, t=float(0.5 * np.log(s2)), x=float(x))


def coord_maps(r=None, s=None, t=None, x=None) -> RadialCoords:
    """Convert any one of (r, s, t, x) into the full coordinate tuple."""
    given = [v is not None for v in (r, s, t, x)]
    if sum(given) != 1:
        raise DomainError("exactly one of r, s, t, x must be given")
    if r is not None:
        return RadialCoords.from_r(float(r))
    if s is not None:
        return RadialCoords.from_s(float(s))
    if t is not None:
        return RadialCoords.from_t(float(t))
    return RadialCoords.from_x(float(x))
