"""The ambient picture: J-invariant 2-forms on R^(2m,2) and the fiber map.

The ball lifts to the quadric <z,z> = -1 in C^(m,1) through the gauge
``z = (w, 1)/sqrt(1 - |w|^2)`` (real, positive last coordinate).  The linear
map theta identifies the fiber of Lambda^2_J + T* + R over a ball point with
the space of J-invariant ambient 2-forms; constant ambient forms correspond to
the parallel sections of the flat hyperbolic connection.

Sign conventions (see also geometry.py): the ambient pairing of 2-forms uses
``|e^i ^ e^j|^2 = eta_i eta_j`` for pseudo-orthonormal i < j, and the ambient
Kahler form is ``omega = sum_k Jdx_k ^ dx_k - Jdx_(m+1) ^ dx_(m+1)``, which
equals ``-Jnu ^ nu + pi^* Omega`` along the quadric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import (
    CHModelField,
    DomainError,
    as_point_array,
    complex_of,
    hermitian_to_real,
    j_matrix,
    real_of,
)

# ---------------------------------------------------------------------------
# signature helpers


def ambient_eta(m: int) -> np.ndarray:
    """Diagonal of the real signature form on R^(2m,2), (+..+,-,-)."""
    eta = np.ones(2 * m + 2)
    eta[-2:] = -1.0
    return eta


def ambient_gram(m: int) -> np.ndarray:
    return np.diag(ambient_eta(m))


def form_pairing(B1: np.ndarray, B2: np.ndarray, eta: np.ndarray) -> float:
    """Signature pairing of 2-forms with |e^i ^ e^j|^2 = eta_i eta_j (i < j)."""
    return 0.5 * float(np.einsum("ab,ab,a,b->", B1, B2, eta, eta))


def wedge_cov(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(a ^ b)(X, Y) = a(X) b(Y) - a(Y) b(X) as an antisymmetric matrix."""
    return np.outer(a, b) - np.outer(b, a)


@dataclass
class AmbientForm:
    """A J-invariant 2-form on R^(2m,2), stored by its component matrix."""

    B: np.ndarray
    m: int

    def __post_init__(self):
        B = np.asarray(self.B, dtype=float)
        d = 2 * self.m + 2
        if B.shape != (d, d):
            raise ValueError(f"expected {(d, d)} matrix")
        scale = max(1.0, np.max(np.abs(B)))
        if np.max(np.abs(B + B.T)) > 1e-12 * scale:
            raise ValueError("component matrix must be antisymmetric")
        J = j_matrix(d)
        if np.max(np.abs(J.T @ B @ J - B)) > 1e-12 * scale:
            raise ValueError("form is not J-invariant")
        self.B = B

    def pairing(self, other: "AmbientForm") -> float:
        return form_pairing(self.B, other.B, ambient_eta(self.m))

    @property
    def norm2(self) -> float:
        return self.pairing(self)

    def is_primitive(self, tol: float = 1e-10) -> bool:
        return abs(self.pairing(ambient_kahler_form(self.m))) <= tol * max(1.0, abs(self.norm2))


def _diag_form(d: int, k: int) -> np.ndarray:
    """Jdx_k ^ dx_k = dy_k ^ dx_k as a component matrix (k zero-based)."""
    B = np.zeros((d, d))
    B[2 * k + 1, 2 * k] = 1.0
    B[2 * k, 2 * k + 1] = -1.0
    return B


def _pair_forms(d: int, j: int, k: int):
    """The two J-invariant unit forms supported on the (j, k) complex pair."""
    Bs = np.zeros((d, d))
    # (dx_j ^ dx_k + dy_j ^ dy_k) / sqrt2
    Bs[2 * j, 2 * k] = 1.0
    Bs[2 * k, 2 * j] = -1.0
    Bs[2 * j + 1, 2 * k + 1] = 1.0
    Bs[2 * k + 1, 2 * j + 1] = -1.0
    Ba = np.zeros((d, d))
    # (dx_j ^ dy_k - dy_j ^ dx_k) / sqrt2
    Ba[2 * j, 2 * k + 1] = 1.0
    Ba[2 * k + 1, 2 * j] = -1.0
    Ba[2 * j + 1, 2 * k] = -1.0
    Ba[2 * k, 2 * j + 1] = 1.0
    s = 1.0 / np.sqrt(2.0)
    return Bs * s, Ba * s


def j_invariant_basis(n_complex: int) -> list[np.ndarray]:
    """Orthonormal (w.r.t. the identity-metric pairing) basis of Lambda^2_J(C^n).

    n_complex^2 matrices: one diagonal form per complex line plus two for each
    pair j < k.  Deterministic ordering: diagonals first, then pairs.
    """
    d = 2 * n_complex
    basis = [_diag_form(d, k) for k in range(n_complex)]
    for j in range(n_complex):
        for k in range(j + 1, n_complex):
            Bs, Ba = _pair_forms(d, j, k)
            basis.extend([Bs, Ba])
    return basis


def ambient_basis(m: int) -> list[AmbientForm]:
    """Basis of Lambda^2_J R^(2m,2); (m+1)^2 elements."""
    return [AmbientForm(B, m) for B in j_invariant_basis(m + 1)]


def ambient_kahler_form(m: int) -> AmbientForm:
    """omega = sum_(k<=m) Jdx_k ^ dx_k - Jdx_(m+1) ^ dx_(m+1)."""
    d = 2 * m + 2
    B = sum(_diag_form(d, k) for k in range(m)) - _diag_form(d, m)
    return AmbientForm(B, m)


def primitive_basis(m: int) -> list[AmbientForm]:
    """Basis of the primitive subspace (pairing with omega zero), (m+1)^2 - 1 forms."""
    d = 2 * m + 2
    out = []
    # diagonal combinations orthogonal to omega: d_k - d_(k+1) for k < m, and
    # (d_1 + ... + d_m + m * d_(m+1)) / sqrt(m^2 + m)
    for k in range(m - 1):
        out.append((_diag_form(d, k) - _diag_form(d, k + 1)) / np.sqrt(2.0))
    tot = sum(_diag_form(d, k) for k in range(m)) + m * _diag_form(d, m)
    out.append(tot / np.sqrt(m + m * m))
    for j in range(m + 1):
        for k in range(j + 1, m + 1):
            Bs, Ba = _pair_forms(d, j, k)
            out.extend([Bs, Ba])
    forms = [AmbientForm(B, m) for B in out]
    omega = ambient_kahler_form(m)
    for f in forms:
        assert abs(f.pairing(omega)) < 1e-12
    return forms


# ---------------------------------------------------------------------------
# the AdS lift and theta


@dataclass
class AdSLift:
    """Lift data of a ball point: z, the covectors nu, Jnu, and dpi."""

    z: np.ndarray  # (2m+2,) real coordinates of the lift
    nu: np.ndarray  # covector <z, .>
    jnu: np.ndarray  # covector <Jz, .>
    dpi: np.ndarray  # (2m, 2m+2) Jacobian of the projection at z
    lift_map: np.ndarray  # (2m+2, 2m) horizontal lift, right inverse of dpi
    m: int


def ads_lift(p, m: int | None = None) -> AdSLift:
    """Lift of a ball point in the gauge z = (w, 1)/sqrt(1 - |w|^2)."""
    w = as_point_array(p)
    m = m if m is not None else w.shape[0] // 2
    d = 2 * m
    rho2 = float(w @ w)
    if rho2 >= 1.0:
        raise DomainError("point outside the unit ball")
    q = np.sqrt(1.0 - rho2)
    z = np.concatenate([w, [1.0, 0.0]]) / q
    eta = ambient_eta(m)
    J = j_matrix(d + 2)
    nu = eta * z
    jnu = eta * (J @ z)

    # w_k = z_k / z_(m+1); real Jacobian of the projection, evaluated at z.
    zc = complex_of(z[None])[0]
    lam = zc[m]  # complex last coordinate (= 1/q, real in this gauge)
    dpi = np.zeros((d, d + 2))
    for k in range(m):
        # dw_k = (dz_k * lam - z_k * dz_(m+1)) / lam^2
        ck = np.zeros(m + 1, dtype=complex)
        ck[k] = 1.0 / lam
        ck[m] = -zc[k] / lam**2
        # complex-linear row -> two real rows
        for a in range(m + 1):
            c = ck[a]
            dpi[2 * k, 2 * a] += c.real
            dpi[2 * k, 2 * a + 1] += -c.imag
            dpi[2 * k + 1, 2 * a] += c.imag
            dpi[2 * k + 1, 2 * a + 1] += c.real
    # horizontal lift: right inverse of dpi with range <z, Jz>-orthogonal
    proj = np.eye(d + 2) + np.outer(z, nu) + np.outer(J @ z, jnu)
    # columns of proj span the horizontal space; restrict dpi there
    q_basis, _ = np.linalg.qr(proj)
    hb = q_basis[:, :d]  # horizontal is d-dimensional
    lift = hb @ np.linalg.inv(dpi @ hb)
    return AdSLift(z=z, nu=nu, jnu=jnu, dpi=dpi, lift_map=lift, m=m)


def theta_z(p, xi: np.ndarray, alpha: np.ndarray, u: float, m: int | None = None) -> AmbientForm:
    """Ambient form of a fiber element (xi, alpha, u) at the lifted point."""
    lift = ads_lift(p, m)
    m = lift.m
    J = j_matrix(2 * m + 2)
    a_amb = lift.dpi.T @ np.asarray(alpha, dtype=float)
    B = (
        lift.dpi.T @ np.asarray(xi, dtype=float) @ lift.dpi
        + float(u) * wedge_cov(lift.jnu, lift.nu)
        + 0.5 * (wedge_cov(lift.nu, a_amb) + wedge_cov(lift.jnu, -J.T @ a_amb))
    )
    return AmbientForm(B, m)


def theta_z_inv(p, form: AmbientForm):
    """Inverse of theta: fiber components (xi, alpha, u) of an ambient form at p."""
    lift = ads_lift(p, form.m)
    B = form.B
    J2m2 = j_matrix(2 * form.m + 2)
    u = float((J2m2 @ lift.z) @ B @ lift.z)
    alpha = -2.0 * (lift.z @ B @ lift.lift_map)
    xi = lift.lift_map.T @ B @ lift.lift_map
    return xi, alpha, u


# ---------------------------------------------------------------------------
# u-fields of ambient forms (closed forms, batched)


def lift_batch(P: np.ndarray) -> np.ndarray:
    """Lifts z(w) for a batch of ball points, shape (N, 2m+2)."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    rho2 = np.sum(P**2, axis=-1)
    q = np.sqrt(1.0 - rho2)
    n, d = P.shape
    Z = np.zeros((n, d + 2))
    Z[:, :d] = P
    Z[:, d] = 1.0
    return Z / q[:, None]


def u_field_of_beta(form: AmbientForm, P: np.ndarray) -> np.ndarray:
    """u_B(w) = B(J z(w), z(w)), batched over ball points."""
    Z = lift_batch(P)
    J = j_matrix(2 * form.m + 2)
    return np.einsum("na,ab,nb->n", Z @ J.T, form.B, Z)


def du_field_of_beta(form: AmbientForm, P: np.ndarray) -> np.ndarray:
    """Closed-form differential of u_B in ball coordinates, shape (N, 2m)."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    n, d = P.shape
    rho2 = np.sum(P**2, axis=-1)
    q2 = 1.0 - rho2
    q = np.sqrt(q2)
    Z = lift_batch(P)
    J = j_matrix(d + 2)
    B = form.B
    JZ = Z @ J.T
    u = np.einsum("na,ab,nb->n", JZ, B, Z)
    # z = E(w)/q with E(w) = (w, 1, 0); dz/dw_a = E_a/q + z w_a/q^2, so
    # du_a = [(J E_a)^T B z + (Jz)^T B E_a]/q + 2 u w_a / q^2.
    t1 = (Z @ B.T @ J[:, :d]) / q[:, None]  # (J E_a)^T B z
    t2 = (JZ @ B)[:, :d] / q[:, None]  # (Jz)^T B E_a
    t3 = 2.0 * u[:, None] * P / q2[:, None]
    return t1 + t2 + t3


# ---------------------------------------------------------------------------
# the isometry group action


def unitary_real_rep(U: np.ndarray) -> np.ndarray:
    """Real (2n x 2n) representation of a complex n x n matrix."""
    U = np.asarray(U, dtype=complex)
    n = U.shape[0]
    R = np.zeros((2 * n, 2 * n))
    R[0::2, 0::2] = U.real
    R[1::2, 1::2] = U.real
    R[1::2, 0::2] = U.imag
    R[0::2, 1::2] = -U.imag
    return R


def check_indefinite_unitary(U: np.ndarray, m: int, tol: float = 1e-10) -> None:
    U = np.asarray(U, dtype=complex)
    G = np.diag(np.concatenate([np.ones(m), [-1.0]]))
    err = np.max(np.abs(U.conj().T @ G @ U - G))
    if err > tol:
        raise ValueError(f"matrix is not a U(m,1) isometry (defect {err:.3e})")


def pu_action(U: np.ndarray, form: AmbientForm, tol: float = 1e-10) -> AmbientForm:
    """Pullback of an ambient form by an isometry U of C^(m,1)."""
    m = form.m
    check_indefinite_unitary(U, m, tol)
    R = unitary_real_rep(U)
    return AmbientForm(R.T @ form.B @ R, m)


def ball_automorphism(U: np.ndarray, P: np.ndarray, m: int) -> np.ndarray:
    """Induced ball biholomorphism f_U(w) = proj(U (w, 1)), batched."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    Z = complex_of(P)
    n = P.shape[0]
    hom = np.concatenate([Z, np.ones((n, 1), dtype=complex)], axis=1)
    img = hom @ np.asarray(U, dtype=complex).T
    return real_of(img[:, :m] / img[:, m : m + 1])


def ball_automorphism_jacobian(U: np.ndarray, P: np.ndarray, m: int) -> np.ndarray:
    """Real Jacobians of f_U, shape (N, 2m, 2m) (holomorphic map)."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    Z = complex_of(P)
    n = P.shape[0]
    U = np.asarray(U, dtype=complex)
    hom = np.concatenate([Z, np.ones((n, 1), dtype=complex)], axis=1)
    img = hom @ U.T
    A = img[:, :m]  # numerators
    Bden = img[:, m]  # denominator
    # d f_k / d w_j = U[k, j] / B - A_k U[m, j] / B^2
    Jc = U[None, :m, :m] / Bden[:, None, None] - (
        A[:, :, None] * U[None, m, :m][:, None, :]
    ) / (Bden**2)[:, None, None]
    # holomorphic complex Jacobian -> real representation, batched
    R = np.zeros((n, 2 * m, 2 * m))
    R[:, 0::2, 0::2] = Jc.real
    R[:, 1::2, 1::2] = Jc.real
    R[:, 1::2, 0::2] = Jc.imag
    R[:, 0::2, 1::2] = -Jc.imag
    return R


def boost_isometry(m: int, tau: float, axis: int = 0) -> np.ndarray:
    """Diagonal U(m,1) boost mixing z_axis with z_(m+1)."""
    U = np.eye(m + 1, dtype=complex)
    U[axis, axis] = np.cosh(tau)
    U[axis, m] = np.sinh(tau)
    U[m, axis] = np.sinh(tau)
    U[m, m] = np.cosh(tau)
    return U


# ---------------------------------------------------------------------------
# distinguished forms (the beta's of the explicit spinor families)


def beta_plain(m: int, a: tuple[int, ...]) -> AmbientForm:
    """beta of the plain family for a multi-index a (1-based, strictly increasing).

    ``-sum_(j in a) Jdx_j^dx_j + sum_(j in complement) Jdx_j^dx_j + Jdx_(m+1)^dx_(m+1)``.
    """
    d = 2 * m + 2
    a = tuple(a)
    comp = tuple(k for k in range(1, m + 1) if k not in a)
    B = np.zeros((d, d))
    for j in a:
        B -= _diag_form(d, j - 1)
    for j in comp:
        B += _diag_form(d, j - 1)
    B += _diag_form(d, m)
    return AmbientForm(B, m)


def beta_breve(m: int, b: tuple[int, ...]) -> AmbientForm:
    """beta of the breve family: signs swapped between b and its complement.

    The sign pattern (+ on b, - on the complement) is the one matching the
    squared-norm identity |phi_breve|^2 = (1 - |w_comp|^2 + |w_b|^2)/(1-|w|^2)
    through the lift; for odd m it coincides with beta_plain of the
    complementary index.
    """
    d = 2 * m + 2
    b = tuple(b)
    comp = tuple(k for k in range(1, m + 1) if k not in b)
    B = np.zeros((d, d))
    for j in b:
        B += _diag_form(d, j - 1)
    for j in comp:
        B -= _diag_form(d, j - 1)
    B += _diag_form(d, m)
    return AmbientForm(B, m)


def distinguished_orbit_elements(m: int) -> list[tuple[str, AmbientForm]]:
    """The explicit orbit elements: plain betas (|a| = l-1) and breve betas (|b| = l)."""
    from itertools import combinations

    l = (m + 1) // 2 if m % 2 else m // 2
    out = []
    for a in combinations(range(1, m + 1), l - 1):
        out.append((f"plain{''.join(map(str, a)) or '0'}", beta_plain(m, a)))
    for b in combinations(range(1, m + 1), l):
        out.append((f"breve{''.join(map(str, b))}", beta_breve(m, b)))
    return out
