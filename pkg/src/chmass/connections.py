"""Hyperbolic connections on Lambda^2_J + T* + R and on T* + R.

The one-parameter family (parameter c, constant holomorphic curvature 4c)

    D_X (xi, alpha, u) = ( nabla_X xi + (1/2)(X ^ alpha + JX ^ J alpha),
                           nabla_X alpha - 2c iota_X (xi + u Omega),
                           d_X u + (J alpha)(X) )

carries the curvature parameter only in the alpha slot; it preserves
h_c = |xi|^2 + u^2 + |alpha|^2/(2c).  c = -1 is the complex hyperbolic
connection (flat exactly on the model, h = |xi|^2 + u^2 - |alpha|^2/2),
c = +1 the projective one.  The real hyperbolic connection on T* + R is

    D_X (alpha, u) = ( nabla_X alpha - u g(X, .), d_X u - alpha(X) ).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ambient import AmbientForm, ambient_basis, j_invariant_basis, theta_z, theta_z_inv
from .fd import fd_directional, fd_gradient, fd_jet2
from .geometry import (
    MetricField,
    as_point_array,
    christoffel_batch,
    j_matrix,
    omega_matrix,
    riemann_batch,
)

C_COMPLEX_HYPERBOLIC = -1.0
C_PROJECTIVE = 1.0

SIGMA_RANK = 1e-6


# ---------------------------------------------------------------------------
# fiber elements


@dataclass
class SectionE:
    """A value (xi, alpha, u) of the bundle Lambda^2_J + T* + R at a point."""

    xi: np.ndarray
    alpha: np.ndarray
    u: float

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=float)
        d = xi.shape[0]
        scale = max(1.0, np.max(np.abs(xi)))
        if np.max(np.abs(xi + xi.T)) > 1e-12 * scale:
            raise ValueError("xi must be antisymmetric")
        J = j_matrix(d)
        if np.max(np.abs(J.T @ xi @ J - xi)) > 1e-12 * scale:
            raise ValueError("xi must be J-invariant")
        self.xi = xi
        self.alpha = np.asarray(self.alpha, dtype=float)

    def h(self, G: np.ndarray) -> float:
        """h = |xi|^2_g + u^2 - |alpha|^2_g / 2 at a point with metric G."""
        Ginv = np.linalg.inv(G)
        xi2 = 0.5 * np.einsum("ij,kl,ik,jl->", self.xi, self.xi, Ginv, Ginv)
        a2 = self.alpha @ Ginv @ self.alpha
        return float(xi2 + self.u**2 - 0.5 * a2)


@dataclass
class RHSection:
    """A value (alpha, u) of the real hyperbolic bundle T* + R."""

    alpha: np.ndarray
    u: float

    def h(self, G: np.ndarray) -> float:
        Ginv = np.linalg.inv(G)
        return float(self.alpha @ Ginv @ self.alpha - self.u**2)

    def is_future_lightlike(self, G: np.ndarray, tol: float = 1e-10) -> bool:
        return abs(self.h(G)) <= tol and self.u > 0


# ---------------------------------------------------------------------------
# algebraic pieces


def iota(X: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """Interior product (iota_X xi)(Y) = xi(X, Y) for a 2-form matrix."""
    return X @ xi


def wedge(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.outer(a, b) - np.outer(b, a)


def c_operator(X: np.ndarray, Y: np.ndarray, gamma: np.ndarray, G: np.ndarray, J: np.ndarray):
    """The curvature correction operator on 1- or 2-forms.

    ``C_(X,Y)(gamma) = X ^ iota_Y gamma - Y ^ iota_X gamma
    + JX ^ iota_JY gamma - JY ^ iota_JX gamma`` with vectors converted to
    covectors by the metric.  For a 1-form, ``X ^ s`` with the scalar
    ``s = gamma(Y)`` means ``s * X_flat``.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    Xf, Yf = G @ X, G @ Y
    JX, JY = J @ X, J @ Y
    JXf, JYf = G @ JX, G @ JY
    if gamma.ndim == 1:
        return (
            (gamma @ Y) * Xf
            - (gamma @ X) * Yf
            + (gamma @ JY) * JXf
            - (gamma @ JX) * JYf
        )
    if gamma.ndim == 2:
        return (
            wedge(Xf, iota(Y, gamma))
            - wedge(Yf, iota(X, gamma))
            + wedge(JXf, iota(JY, gamma))
            - wedge(JYf, iota(JX, gamma))
        )
    raise ValueError("gamma must be a 1-form or a 2-form")


# ---------------------------------------------------------------------------
# connections as matrix-valued fields on a fiber basis


class CHConnection:
    """The c-family connection on Lambda^2_J + T* + R over a Kahler metric."""

    def __init__(self, m: int, c: float = C_COMPLEX_HYPERBOLIC):
        self.m = m
        self.c = float(c)
        self.d = 2 * m
        self.J = j_matrix(self.d)
        self.xi_basis = np.array(j_invariant_basis(m))  # (m^2, d, d)
        self.fiber_dim = m * m + self.d + 1

    # -- packing ------------------------------------------------------------
    def pack(self, xi: np.ndarray, alpha: np.ndarray, u: float) -> np.ndarray:
        co = 0.5 * np.einsum("iab,ab->i", self.xi_basis, xi)
        return np.concatenate([co, np.asarray(alpha, dtype=float), [float(u)]])

    def unpack(self, v: np.ndarray) -> SectionE:
        k = self.m * self.m
        xi = np.einsum("i,iab->ab", v[:k], self.xi_basis)
        return SectionE(xi=xi, alpha=v[k : k + self.d], u=float(v[-1]))

    # -- connection matrices -------------------------------------------------
    def matrices(self, g_field: MetricField, P: np.ndarray, V: np.ndarray) -> np.ndarray:
        """A(V_n) at P_n such that nabla_V sigma = d_V sigma + A(V) sigma."""
        P = np.atleast_2d(np.asarray(P, dtype=float))
        V = np.atleast_2d(np.asarray(V, dtype=float))
        n = P.shape[0]
        d, k, c = self.d, self.m * self.m, self.c
        G = g_field.matrix(P)
        Gam = christoffel_batch(g_field, P)
        M = np.einsum("nkia,ni->nka", Gam, V)  # (Gamma V)^k_a
        J = self.J
        Om = np.einsum("nab,bc->nac", G, J)  # Omega matrices
        BB = self.xi_basis

        A = np.zeros((n, self.fiber_dim, self.fiber_dim))

        # xi <- xi : Gamma action on 2-forms, projected on the basis
        T = -(np.einsum("nla,jlb->njab", M, BB) + np.einsum("jal,nlb->njab", BB, M))
        A[:, :k, :k] = 0.5 * np.einsum("iab,njab->nij", BB, T)

        Xf = np.einsum("nab,nb->na", G, V)
        JV = V @ J.T
        JXf = np.einsum("nab,nb->na", G, JV)
        for cidx in range(d):
            ec = np.zeros(d)
            ec[cidx] = 1.0
            Jec = -J[cidx, :]  # (J e^c)_a = -J[c, a]
            wedge_n = (
                Xf[:, :, None] * ec[None, None, :]
                - ec[None, :, None] * Xf[:, None, :]
                + JXf[:, :, None] * Jec[None, None, :]
                - Jec[None, :, None] * JXf[:, None, :]
            )
            # xi <- alpha : +(1/2)(X ^ e^c + JX ^ J e^c)
            A[:, :k, k + cidx] = 0.5 * 0.5 * np.einsum("iab,nab->ni", BB, wedge_n)

        # alpha <- alpha : Gamma action on covectors
        A[:, k : k + d, k : k + d] = -np.swapaxes(M, 1, 2)
        # alpha <- xi : -2c iota_V B_j
        A[:, k : k + d, :k] = -2.0 * c * np.swapaxes(
            np.einsum("na,jab->njb", V, BB), 1, 2
        )
        # alpha <- u : -2c iota_V Omega
        A[:, k : k + d, -1] = -2.0 * c * np.einsum("na,nab->nb", V, Om)
        # u <- alpha : +(J alpha)(V) = -alpha(JV)... components: (J a)(V) = a @ (J V) sign
        A[:, -1, k : k + d] = -JV
        return A

    # -- theta wrappers -------------------------------------------------------
    def section_of_ambient(self, form: AmbientForm):
        """The parallel candidate field p -> theta_z^-1(form) (model metric)."""

        def field(P: np.ndarray):
            P = np.atleast_2d(np.asarray(P, dtype=float))
            xis = np.empty((P.shape[0], self.d, self.d))
            als = np.empty((P.shape[0], self.d))
            us = np.empty(P.shape[0])
            for i, p in enumerate(P):
                xi, al, u = theta_z_inv(p, form)
                xis[i], als[i], us[i] = xi, al, u
            return xis, als, us

        return field


class RHConnection:
    """The real hyperbolic connection on T* + R."""

    def __init__(self, n: int):
        self.n = n
        self.fiber_dim = n + 1

    def matrices(self, g_field: MetricField, P: np.ndarray, V: np.ndarray) -> np.ndarray:
        P = np.atleast_2d(np.asarray(P, dtype=float))
        V = np.atleast_2d(np.asarray(V, dtype=float))
        num = P.shape[0]
        n = self.n
        G = g_field.matrix(P)
        Gam = christoffel_batch(g_field, P)
        M = np.einsum("nkia,ni->nka", Gam, V)
        A = np.zeros((num, n + 1, n + 1))
        A[:, :n, :n] = -np.swapaxes(M, 1, 2)
        A[:, :n, -1] = -np.einsum("nab,nb->na", G, V)  # -u g(V, .)
        A[:, -1, :n] = -V  # -alpha(V)
        return A


# ---------------------------------------------------------------------------
# covariant derivatives of section fields (FD)


def _covector_derivative(g_field, alpha_field, P, X, h):
    """(nabla_X alpha)_a = X^i (d_i alpha_a - Gamma^l_ia alpha_l), batched."""
    P = np.atleast_2d(P)
    hv = h * g_field.fd_scale(P)
    dal = fd_directional(alpha_field, P, X, hv)
    Gam = christoffel_batch(g_field, P)
    al = alpha_field(P)
    MX = np.einsum("nlia,ni->nla", Gam, np.atleast_2d(X))
    return dal - np.einsum("nla,nl->na", MX, al)


def nabla_rh(g_field: MetricField, section_field, X, p, h: float = 1e-4) -> RHSection:
    """Covariant derivative of an (alpha, u) field along X at p.

    ``section_field(P) -> (alpha (N,n), u (N,))`` must be batched.
    """
    pt = np.atleast_2d(as_point_array(p))
    X = np.atleast_2d(np.asarray(X, dtype=float))
    G = g_field.matrix(pt)
    al, u = section_field(pt)
    hv = h * g_field.fd_scale(pt)
    nal = _covector_derivative(g_field, lambda Q: section_field(Q)[0], pt, X, h)
    du = fd_directional(lambda Q: section_field(Q)[1], pt, X, hv)
    alpha_slot = nal - u[:, None] * np.einsum("nab,nb->na", G, X)
    u_slot = du - np.einsum("na,na->n", al, X)
    return RHSection(alpha=alpha_slot[0], u=float(u_slot[0]))


def nabla_ch(
    c: float, g_field: MetricField, section_field, X, p, h: float = 1e-4
) -> SectionE:
    """Covariant derivative of a (xi, alpha, u) field along X at p.

    ``section_field(P) -> (xi (N,d,d), alpha (N,d), u (N,))`` must be batched.
    The parameterries the constant-curvature family; c = -1 is the complex
    hyperbolic connection.
    """
    pt = np.atleast_2d(as_point_array(p))
    X = np.atleast_2d(np.asarray(X, dtype=float))
    d = g_field.dim
    J = j_matrix(d)
    G = g_field.matrix(pt)
    Om = G[0] @ J
    xi, al, u = section_field(pt)
    hv = h * g_field.fd_scale(pt)

    Gam = christoffel_batch(g_field, pt)
    MX = np.einsum("nlia,ni->nla", Gam, X)[0]

    dxi = fd_directional(lambda Q: section_field(Q)[0], pt, X, hv)[0]
    nxi = dxi - (MX.T @ xi[0] + xi[0] @ MX)
    nal = _covector_derivative(g_field, lambda Q: section_field(Q)[1], pt, X, h)[0]
    du = fd_directional(lambda Q: section_field(Q)[2], pt, X, hv)[0]

    X0 = X[0]
    Xf, JXf = G[0] @ X0, G[0] @ (J @ X0)
    Jal = -al[0] @ J
    xi_slot = nxi + 0.5 * (wedge(Xf, al[0]) + wedge(JXf, Jal))
    alpha_slot = nal - 2.0 * c * iota(X0, xi[0] + u[0] * Om)
    u_slot = float(du + (Jal @ X0))
    # FD leaves roundoff-level asymmetry; project back onto Lambda^2_J
    xi_slot = 0.5 * (xi_slot - xi_slot.T)
    xi_slot = 0.5 * (xi_slot + J.T @ xi_slot @ J)
    return SectionE(xi=xi_slot, alpha=alpha_slot, u=u_slot)


# ---------------------------------------------------------------------------
# curvature of the connection


@dataclass
class ConnectionCurvature:
    """FD and closed-form estimates of the curvature operator F(X, Y)."""

    fd: np.ndarray
    predicted: np.ndarray

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.fd)))

    @property
    def agreement(self) -> float:
        scale = max(np.max(np.abs(self.fd)), np.max(np.abs(self.predicted)), 1e-300)
        return float(np.max(np.abs(self.fd - self.predicted)) / scale)


def curvature_e(
    c: float,
    g_field: MetricField,
    p,
    X,
    Y,
    h: float = 2e-3,
) -> ConnectionCurvature:
    """Curvature F(X, Y) of the c-connection at p, twice.

    The FD route differentiates the connection matrices,
    ``F = d_X A(Y) - d_Y A(X) + [A(X), A(Y)]`` for coordinate-constant X, Y;
    the closed-form route assembles the induced Riemann action plus the
    algebraic commutator (C-operator and Kahler-form terms).
    """
    conn = CHConnection(g_field.dim // 2, c)
    pt = np.atleast_2d(as_point_array(p))
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if np.linalg.matrix_rank(np.stack([X, Y])) < 2:
        raise ValueError("degenerate plane spanned by X, Y")

    hv = h * g_field.fd_scale(pt)
    dAY = fd_gradient(lambda Q: conn.matrices(g_field, Q, np.broadcast_to(Y, Q.shape)), pt, hv)[0]
    dAX = fd_gradient(lambda Q: conn.matrices(g_field, Q, np.broadcast_to(X, Q.shape)), pt, hv)[0]
    AX = conn.matrices(g_field, pt, X[None])[0]
    AY = conn.matrices(g_field, pt, Y[None])[0]
    F_fd = np.einsum("i,ikl->kl", X, dAY) - np.einsum("i,ikl->kl", Y, dAX) + AX @ AY - AY @ AX

    # closed form: block diagonal in (xi, alpha, u)
    G, _, R = riemann_batch(g_field, pt)
    G = G[0]
    M = np.einsum("i,j,ijkl->lk", X, Y, R[0])  # operator matrix, M @ v
    J = conn.J
    Om = omega_matrix(G, J)
    omXY = float(X @ Om @ Y)
    k = conn.m * conn.m
    F_pred = np.zeros((conn.fiber_dim, conn.fiber_dim))
    BB = conn.xi_basis
    for j in range(k):
        img = -(M.T @ BB[j] + BB[j] @ M) - c * c_operator(X, Y, BB[j], G, J)
        F_pred[:k, j] = 0.5 * np.einsum("iab,ab->i", BB, img)
    for cidx in range(conn.d):
        ec = np.zeros(conn.d)
        ec[cidx] = 1.0
        img = -(M.T @ ec) - c * (
            2.0 * omXY * (-ec @ J) + c_operator(X, Y, ec, G, J)
        )
        F_pred[k : k + conn.d, k + cidx] = img
    return ConnectionCurvature(fd=F_fd, predicted=F_pred)


# ---------------------------------------------------------------------------
# parallel transport and holonomy


@dataclass
class Curve:
    """A parametrized curve with batched point and velocity evaluation."""

    point: callable
    velocity: callable
    t0: float
    t1: float


def circle_loop(p, A, B, radius: float) -> Curve:
    """Closed loop through p spanning the plane of A, B."""
    p = as_point_array(p).astype(float)
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)

    def point(ts):
        ts = np.atleast_1d(ts)
        return (
            p[None, :]
            + radius * (np.cos(ts)[:, None] - 1.0) * A[None, :]
            + radius * np.sin(ts)[:, None] * B[None, :]
        )

    def velocity(ts):
        ts = np.atleast_1d(ts)
        return radius * (-np.sin(ts)[:, None] * A[None, :] + np.cos(ts)[:, None] * B[None, :])

    return Curve(point=point, velocity=velocity, t0=0.0, t1=2.0 * np.pi)


def transport_operator(
    connection, g_field: MetricField, curve: Curve, n_steps: int = 1024
) -> np.ndarray:
    """Parallel-transport operator along the curve on the whole fiber.

    Fixed-step RK4 on a dense, batch-precomputed grid of connection matrices
    (the grid stores A at every half step).  The h-conservation and flat
    round-trip tests bound the integration error well below the holonomy rank
    threshold.
    """
    ts = np.linspace(curve.t0, curve.t1, 2 * n_steps + 1)
    pts = curve.point(ts)
    vel = curve.velocity(ts)
    Amats = -connection.matrices(g_field, pts, vel)
    dt = (curve.t1 - curve.t0) / n_steps
    Y = np.eye(connection.fiber_dim)
    for i in range(n_steps):
        A0 = Amats[2 * i]
        Am = Amats[2 * i + 1]
        A1 = Amats[2 * i + 2]
        k1 = A0 @ Y
        k2 = Am @ (Y + 0.5 * dt * k1)
        k3 = Am @ (Y + 0.5 * dt * k2)
        k4 = A1 @ (Y + dt * k3)
        Y = Y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return Y


def transport_e(
    c: float,
    g_field: MetricField,
    sigma0: SectionE,
    curve: Curve,
    n_steps: int = 1024,
) -> SectionE:
    """Parallel transport of a fiber element along a curve (c-connection)."""
    conn = CHConnection(g_field.dim // 2, c)
    T = transport_operator(conn, g_field, curve, n_steps)
    return conn.unpack(T @ conn.pack(sigma0.xi, sigma0.alpha, sigma0.u))


@dataclass
class HolonomyReport:
    dimension: int
    basis: np.ndarray  # (fiber_dim, dimension) orthonormal columns
    singular_values: np.ndarray
    max_defect: float  # largest |M - I| entry over loops (flatness diagnostic)


def segment_curve(p0: np.ndarray, p1: np.ndarray) -> Curve:
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)

    def point(ts):
        ts = np.atleast_1d(ts)
        return p0[None, :] + ts[:, None] * (p1 - p0)[None, :]

    def velocity(ts):
        ts = np.atleast_1d(ts)
        return np.broadcast_to(p1 - p0, (ts.shape[0], p0.shape[0])).copy()

    return Curve(point=point, velocity=velocity, t0=0.0, t1=1.0)


def parallel_space_dim(
    connection,
    g_field: MetricField,
    n_loops: int = 40,
    rng=None,
    sigma_rank: float = SIGMA_RANK,
    radius: float = 0.18,
    base_annulus: tuple = (0.0, 0.45),
    n_steps: int = 768,
    anchor: np.ndarray | None = None,
) -> HolonomyReport:
    """Dimension of the joint fixed subspace of random lasso holonomies.

    Each loop is a circle at a random basepoint (|p| uniform in
    ``base_annulus``, so loops can be forced through the region where the
    connection actually curves), conjugated back to a common anchor fiber by
    segment transport; the joint fixed subspace there is the space of
    parallel sections.
    """
    rng = np.random.default_rng(rng)
    dim = connection.fiber_dim
    d = g_field.dim
    anchor = np.zeros(d) if anchor is None else np.asarray(anchor, dtype=float)
    rows = []
    max_defect = 0.0
    for _ in range(n_loops):
        direction = rng.normal(size=d)
        direction /= np.linalg.norm(direction)
        p = rng.uniform(*base_annulus) * direction
        A = rng.normal(size=d)
        A /= np.linalg.norm(A)
        B = rng.normal(size=d)
        B -= (B @ A) * A
        B /= np.linalg.norm(B)
        loop = circle_loop(p, A, B, min(radius, 0.98 - np.linalg.norm(p)))
        Mh = transport_operator(connection, g_field, loop, n_steps)
        if np.linalg.norm(p - anchor) > 1e-12:
            seg = segment_curve(anchor, p)
            Tseg = transport_operator(connection, g_field, seg, n_steps // 2)
            Mh = np.linalg.solve(Tseg, Mh @ Tseg)
        max_defect = max(max_defect, float(np.max(np.abs(Mh - np.eye(dim)))))
        rows.append(Mh - np.eye(dim))
    stack = np.concatenate(rows, axis=0)
    _, svals, vt = np.linalg.svd(stack)
    rank = int(np.sum(svals >= sigma_rank))
    basis = vt[rank:].T if rank < dim else np.zeros((dim, 0))
    return HolonomyReport(
        dimension=dim - rank,
        basis=basis,
        singular_values=svals,
        max_defect=max_defect,
    )


# ---------------------------------------------------------------------------
# the third-order scalar equation


def third_order_residual(
    g_field: MetricField, u_field, p, X, h1: float = 3e-3, h2: float = 6e-3
) -> np.ndarray:
    """Residual nabla_X Hess u - [2 du(X) g + X o du + JX o J du] at p.

    Vanishes exactly when u is the scalar component of a parallel section of
    the complex hyperbolic connection.  ``u_field(P) -> (N,)`` batched.
    """
    pt = np.atleast_2d(as_point_array(p))
    X = np.asarray(X, dtype=float)
    d = g_field.dim
    J = j_matrix(d)
    h1v = h1 * g_field.fd_scale(pt)

    u0, du, d2u = fd_jet2(u_field, pt, h1v)
    hess_fn = lambda Q: fd_jet2(u_field, Q, h1 * g_field.fd_scale(Q))[2]
    d3u = fd_gradient(hess_fn, pt, h2 * g_field.fd_scale(pt))[0]  # (a, i, j)
    du, d2u = du[0], d2u[0]

    G, dG, d2G = fd_jet2(g_field.matrix, pt, h1v)
    G = G[0]
    Ginv = np.linalg.inv(G)
    sym = np.einsum("nijl->nijl", dG) + np.einsum("njil->nijl", dG) - np.einsum("nlij->nijl", dG)
    Gam = 0.5 * np.einsum("kl,ijl->kij", Ginv, sym[0])
    dGinv = -np.einsum("kp,apq,ql->akl", Ginv, dG[0], Ginv)
    dsym = (
        np.einsum("naijl->naijl", d2G)
        + np.einsum("najil->naijl", d2G)
        - np.einsum("nalij->naijl", d2G)
    )[0]
    dGam = 0.5 * np.einsum("akl,ijl->akij", dGinv, sym[0]) + 0.5 * np.einsum(
        "kl,aijl->akij", Ginv, dsym
    )

    hess = d2u - np.einsum("kij,k->ij", Gam, du)
    dhess = (
        d3u
        - np.einsum("akij,k->aij", dGam, du)
        - np.einsum("kij,ak->aij", Gam, d2u)
    )
    # nabla_a Hess_ij = d_a Hess_ij - Gamma^l_ai Hess_lj - Gamma^l_aj Hess_il
    nabla_hess = (
        dhess
        - np.einsum("lai,lj->aij", Gam, hess)
        - np.einsum("laj,il->aij", Gam, hess)
    )
    lhs = np.einsum("a,aij->ij", X, nabla_hess)

    Xf = G @ X
    Jdu = -du @ J
    JXf = G @ (J @ X)
    rhs = (
        2.0 * (du @ X) * G
        + np.outer(Xf, du)
        + np.outer(du, Xf)
        + np.outer(JXf, Jdu)
        + np.outer(Jdu, JXf)
    )
    return lhs - rhs


# ---------------------------------------------------------------------------
# convenience: the fiber-basis Gram matrix of h (signature check)


def h_gram(g_field: MetricField, p, c: float = C_COMPLEX_HYPERBOLIC) -> np.ndarray:
    """Gram matrix of h on the packed fiber basis at a point."""
    conn = CHConnection(g_field.dim // 2, c)
    pt = np.atleast_2d(as_point_array(p))
    G = g_field.matrix(pt)[0]
    Ginv = np.linalg.inv(G)
    k = conn.m * conn.m
    dim = conn.fiber_dim
    gram = np.zeros((dim, dim))
    BB = conn.xi_basis
    gram[:k, :k] = 0.5 * np.einsum("iab,jcd,ac,bd->ij", BB, BB, Ginv, Ginv)
    gram[k : k + conn.d, k : k + conn.d] = -0.5 * Ginv
    gram[-1, -1] = 1.0
    return gram
