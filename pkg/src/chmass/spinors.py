"""Clifford algebra on (0,*)-forms and the explicit Killing spinor families.

Spinors are stored as 2^m complex coefficients over subsets of {1..m}
(fermionic Fock basis |K> indexed by bitmasks, grade = popcount), together
with a positive weight representing the twisting power of the canonical
bundle.  With creation/annihilation operators a_k, a_k~ the Clifford product
of a real tangent vector X is

    c(X) = sum_k z_k(X) a_k^+ - conj(z_k(X)) a_k,
    z_k(X) = Hermitian frame components of X,

so c(X)c(Y) + c(Y)c(X) = -2 g(X, Y) and the Kahler form acts on grade k with
eigenvalue i(m - 2k).  The frame is the principal inverse square root of the
Hermitian metric matrix, which makes the canonical-bundle phase globally 1.

The twisting exponent of the canonical bundle is s = l/(m+1): the half-spinor
square root for odd m = 2l - 1 and the fractional power for even m = 2l;
this value is the one compatible with the closed-form squared norms of the
families (it makes them come out as rational expressions in |w_a|^2).
The family normalization is c(l) = 2^(-(l - 1 + m s)/2).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .ambient import AmbientForm, theta_z
from .fd import fd_directional, fd_gradient
from .geometry import (
    CHModelField,
    HermitianMetricField,
    as_point_array,
    christoffel_batch,
    complex_of,
    j_matrix,
)


def twist_exponent(m: int) -> float:
    """Canonical-bundle power s = l/(m+1) carried by the spinor bundle."""
    return family_level(m) / (m + 1)


def family_level(m: int) -> int:
    """The middle-grade index l: m = 2l - 1 (odd) or m = 2l (even)."""
    return (m + 1) // 2


def family_normalization(m: int) -> float:
    l = family_level(m)
    return 2.0 ** (-(l - 1 + m * twist_exponent(m)) / 2.0)


# ---------------------------------------------------------------------------
# Fock-space operators


@lru_cache(maxsize=None)
def _subsets(m: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(k for k in range(m) if mask >> k & 1) for mask in range(2**m))


@lru_cache(maxsize=None)
def creation_ops(m: int) -> np.ndarray:
    """Stack of a_k^+ matrices, shape (m, 2^m, 2^m)."""
    dim = 2**m
    ops = np.zeros((m, dim, dim))
    for k in range(m):
        for mask in range(dim):
            if not mask >> k & 1:
                sign = (-1) ** bin(mask & ((1 << k) - 1)).count("1")
                ops[k, mask | (1 << k), mask] = sign
    return ops


@lru_cache(maxsize=None)
def annihilation_ops(m: int) -> np.ndarray:
    return np.transpose(creation_ops(m), (0, 2, 1)).copy()


@lru_cache(maxsize=None)
def grade_masks(m: int) -> np.ndarray:
    """grade_masks(m)[k] is the 0/1 vector selecting grade-k coefficients."""
    counts = np.array([bin(mask).count("1") for mask in range(2**m)])
    return np.array([(counts == k).astype(float) for k in range(m + 1)])


@dataclass
class Spinor:
    """Coefficients over the subset basis plus the twisting weight.

    |psi|^2 = weight^2 * sum |coeffs|^2; grade-k parts are selected by
    popcount masks.
    """

    coeffs: np.ndarray
    weight: float
    m: int

    @property
    def full(self) -> np.ndarray:
        return self.weight * self.coeffs

    def norm2(self) -> float:
        return float(self.weight**2 * np.sum(np.abs(self.coeffs) ** 2))

    def grade(self, k: int) -> "Spinor":
        return Spinor(self.coeffs * grade_masks(self.m)[k], self.weight, self.m)


def inner(phi: np.ndarray, psi: np.ndarray) -> complex:
    """Hermitian pairing, antilinear in the second argument."""
    return complex(np.sum(phi * np.conj(psi)))


def projector_k(psi: Spinor, k: int) -> Spinor:
    return psi.grade(k)


def tilde(psi: Spinor) -> Spinor:
    """Sign flip on the grade-l part (defined on grades l-1 and l only)."""
    m = psi.m
    l = family_level(m)
    masks = grade_masks(m)
    keep = masks[l - 1] + masks[l]
    if np.any(np.abs(psi.coeffs) * (1.0 - keep) > 1e-13 * max(1.0, np.max(np.abs(psi.coeffs)))):
        raise ValueError("spinor not supported in grades l-1, l")
    return Spinor(psi.coeffs * (masks[l - 1] - masks[l]), psi.weight, m)


# ---------------------------------------------------------------------------
# unitary frames


class UnitaryCoframe:
    """Pointwise unitary frame data for a Hermitian metric field.

    V(p) is the principal inverse square root of twice the (conjugated)
    Hermitian metric matrix; its columns are the complex representatives of
    the frame vectors v_k, and (v_1, Jv_1, ..., v_m, Jv_m) is g-orthonormal.
    """

    def __init__(self, field: HermitianMetricField):
        self.field = field
        self.m = field.m

    def frames(self, P: np.ndarray) -> np.ndarray:
        H = self.field.hermitian(np.atleast_2d(P))
        return _inv_sqrtm_batch(2.0 * np.conj(H))

    def hermitian(self, P: np.ndarray) -> np.ndarray:
        return self.field.hermitian(np.atleast_2d(P))


def _inv_sqrtm_batch(A: np.ndarray) -> np.ndarray:
    w, Q = np.linalg.eigh(A)
    if np.any(w <= 0):
        raise ValueError("matrix not positive definite")
    return np.einsum("nij,nj,nkj->nik", Q, w**-0.5, np.conj(Q))


def frame_components(V: np.ndarray, H: np.ndarray, X: np.ndarray) -> np.ndarray:
    """z_k(X) = g(X, v_k) + i g(X, J v_k), batched; X in complex coordinates."""
    return 2.0 * np.einsum("nij,njk,nk->ni", V, np.conj(H), X)


def clifford_matrix(m: int, z: np.ndarray) -> np.ndarray:
    """c(X) for frame components z, acting on coefficient vectors."""
    adag = creation_ops(m)
    a = annihilation_ops(m)
    return np.einsum("k,kij->ij", z, adag) - np.einsum("k,kij->ij", np.conj(z), a)


def clifford(field: HermitianMetricField, p, X, psi: Spinor) -> Spinor:
    """Clifford product c(X) psi at a ball point."""
    fr = UnitaryCoframe(field)
    pt = np.atleast_2d(as_point_array(p))
    V = fr.frames(pt)
    H = fr.hermitian(pt)
    z = frame_components(V, H, complex_of(pt))[0]
    return Spinor(clifford_matrix(psi.m, z) @ psi.coeffs, psi.weight, psi.m)


def omega_action(psi: Spinor) -> Spinor:
    """c(Omega) psi via the grade decomposition: i(m - 2k) on grade k."""
    m = psi.m
    masks = grade_masks(m)
    eig = np.zeros(2**m, dtype=complex)
    for k in range(m + 1):
        eig += 1j * (m - 2 * k) * masks[k]
    return Spinor(eig * psi.coeffs, psi.weight, m)


def omega_action_clifford(field: HermitianMetricField, p, psi: Spinor) -> Spinor:
    """c(Omega) psi as the Clifford double sum over a unitary frame."""
    m = psi.m
    adag, a = creation_ops(m), annihilation_ops(m)
    op = sum(
        1j * (adag[k] + a[k]) @ (adag[k] - a[k]) for k in range(m)
    )  # c(Jv_k) c(v_k), frame independent in this representation
    return Spinor(op @ psi.coeffs, psi.weight, m)


# ---------------------------------------------------------------------------
# the explicit families


@dataclass(frozen=True)
class KillingFamilyLabel:
    """Label (family, multi-index) of an explicit Killing spinor.

    ``family`` is "plain" (multi-index length l-1) or "breve" (length l);
    indices are 1-based and strictly increasing.
    """

    family: str
    index: tuple[int, ...]

    def __post_init__(self):
        if self.family not in ("plain", "breve"):
            raise ValueError("family must be 'plain' or 'breve'")
        if any(b <= a for a, b in zip(self.index, self.index[1:])):
            raise ValueError("multi-index must be strictly increasing")

    def validate(self, m: int) -> None:
        l = family_level(m)
        want = l - 1 if self.family == "plain" else l
        if len(self.index) != want:
            raise ValueError(
                f"family {self.family!r} needs a multi-index of length {want} for m={m}"
            )
        if self.index and (self.index[0] < 1 or self.index[-1] > m):
            raise ValueError("multi-index out of range")


def all_family_labels(m: int) -> list[KillingFamilyLabel]:
    l = family_level(m)
    out = [
        KillingFamilyLabel("plain", a) for a in combinations(range(1, m + 1), l - 1)
    ]
    out += [KillingFamilyLabel("breve", b) for b in combinations(range(1, m + 1), l)]
    return out


def _wedge_dets(rows: np.ndarray, m: int, q: int) -> np.ndarray:
    """Components of the wedge of q 1-forms over grade-q subsets.

    ``rows`` has shape (N, q, m); returns (N, 2^m) complex with det minors in
    the grade-q slots.
    """
    n = rows.shape[0]
    out = np.zeros((n, 2**m), dtype=complex)
    if q == 0:
        out[:, 0] = 1.0
        return out
    for K in combinations(range(m), q):
        mask = sum(1 << k for k in K)
        sub = rows[:, :, K]
        out[:, mask] = np.linalg.det(sub) if q > 1 else sub[:, 0, 0]
    return out


def killing_family(
    label: KillingFamilyLabel, P: np.ndarray, field: HermitianMetricField | None = None, m: int | None = None
):
    """Evaluate an explicit Killing family spinor at ball points (batched).

    Returns (coeffs (N, 2^m), weight (N,)).  The default metric is the model.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    if m is None:
        m = P.shape[1] // 2
    label.validate(m)
    if field is None:
        field = CHModelField(m)
    l = family_level(m)
    s = twist_exponent(m)
    cl = family_normalization(m)

    fr = UnitaryCoframe(field)
    V = fr.frames(P)
    H = fr.hermitian(P)
    Z = complex_of(P)
    n = P.shape[0]
    rho2 = np.sum(np.abs(Z) ** 2, axis=-1)
    q = 1.0 - rho2

    R = np.sqrt(2.0) * np.conj(V)  # R[n, j, :] = sigma-components of dwbar_j
    wsum = np.einsum("nj,njk->nk", Z, R)  # comps of sum w_j dwbar_j

    detH = np.real(np.linalg.det(H))
    weight = detH ** (-s / 2.0)

    idx0 = [j - 1 for j in label.index]
    coeffs = np.zeros((n, 2**m), dtype=complex)
    # the grade-l constant: the first-order system coupling the two grades
    # forces this relative normalization (it also makes both closed-form
    # squared-norm identities hold simultaneously)
    dbar_const = cl / (np.sqrt(2.0) * 1j)
    if label.family == "plain":
        rows_low = R[:, idx0, :]
        low = cl * q ** (-float(l)) * np.ones(n)
        coeffs += low[:, None] * _wedge_dets(rows_low, m, l - 1)
        rows_high = np.concatenate([wsum[:, None, :], rows_low], axis=1)
        high = dbar_const * q ** (-float(l + 1))
        coeffs += high[:, None] * _wedge_dets(rows_high, m, l)
    else:
        b = idx0
        low = np.zeros((n, 2**m), dtype=complex)
        highw = np.zeros((n, 2**m), dtype=complex)
        for j_pos, j in enumerate(b):
            sign = (-1.0) ** j_pos
            rest = [k for k in b if k != j]
            rows = R[:, rest, :]
            wbar = np.conj(Z[:, j])
            low += sign * wbar[:, None] * _wedge_dets(rows, m, l - 1)
            rows_h = np.concatenate([wsum[:, None, :], rows], axis=1)
            highw += sign * wbar[:, None] * _wedge_dets(rows_h, m, l)
        coeffs += (cl * q ** (-float(l)))[:, None] * low
        coeffs += (dbar_const * q ** (-float(l + 1)))[:, None] * highw
        coeffs += (dbar_const * q ** (-float(l)))[:, None] * _wedge_dets(
            R[:, b, :], m, l
        )
    return coeffs * weight[:, None], weight


def killing_spinor(label: KillingFamilyLabel, p, m: int | None = None) -> Spinor:
    """Single-point convenience wrapper around killing_family."""
    pt = np.atleast_2d(as_point_array(p))
    m = m if m is not None else pt.shape[1] // 2
    coeffs, weight = killing_family(label, pt, m=m)
    return Spinor(coeffs[0] / weight[0], float(weight[0]), m)


# ---------------------------------------------------------------------------
# spin connection and the Killing residual


def _complexify_real_operator(M: np.ndarray) -> np.ndarray:
    """Complex m x m representation of a J-commuting real 2m x 2m operator."""
    return M[..., 0::2, 0::2] + 1j * M[..., 1::2, 0::2]


def frame_connection(field: HermitianMetricField, P: np.ndarray, X: np.ndarray, h: float = 1e-4):
    """Anti-Hermitian frame connection Gamma[j,k](X) with nabla v_k = Gamma[j,k] v_j."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    X = np.atleast_2d(np.asarray(X, dtype=float))
    fr = UnitaryCoframe(field)
    V = fr.frames(P)
    H = fr.hermitian(P)
    hv = h * field.fd_scale(P)
    dV = fd_directional(lambda Q: fr.frames(Q), P, X, hv)
    Gam = christoffel_batch(field, P)
    M = np.einsum("nkia,ni->nka", Gam, X)  # real Christoffel contraction
    Mc = _complexify_real_operator(M)
    nablaV = dV + np.einsum("nij,njk->nik", Mc, V)
    Gamma = 2.0 * np.einsum("nij,njk,nkl->nil", V, np.conj(H), nablaV)
    return Gamma


def spinor_derivative(
    field: HermitianMetricField,
    spinor_field,
    P: np.ndarray,
    X: np.ndarray,
    s: float,
    h: float = 1e-4,
) -> np.ndarray:
    """Covariant derivative of a spinor field (full coefficients) along X.

    ``spinor_field(P) -> (N, 2^m)`` full coefficients in the unitary frame;
    the connection is d + dGamma(Gamma) - s tr(Gamma), the second-quantized
    frame connection plus the twisting term.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    X = np.atleast_2d(np.asarray(X, dtype=float))
    m = field.m
    hv = h * field.fd_scale(P)
    dpsi = fd_directional(spinor_field, P, X, hv)
    psi = spinor_field(P)
    Gamma = frame_connection(field, P, X, h)
    adag, a = creation_ops(m), annihilation_ops(m)
    number_op = np.einsum("jab,kbc->jkac", adag, a)
    conn = np.einsum("njk,jkac->nac", Gamma, number_op)
    tr = np.einsum("njj->n", Gamma)
    out = dpsi + np.einsum("nac,nc->na", conn, psi) - s * tr[:, None] * psi
    return out


def killing_residual(
    label: KillingFamilyLabel,
    P: np.ndarray,
    X: np.ndarray,
    m: int | None = None,
    perturbation=None,
    h: float = 1e-4,
):
    """Relative residual of the Killing equation for a family element.

    ``nabla_X phi + (i/2) c(X) phi + (1/2) c(JX) phi~``, normalized by |phi|.
    An optional ``perturbation(P) -> (N, 2^m)`` is added to the field (used
    as a false-positive control).
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    if m is None:
        m = P.shape[1] // 2
    field = CHModelField(m)
    s = twist_exponent(m)
    l = family_level(m)

    def psi_field(Q):
        coeffs, _ = killing_family(label, Q, m=m)
        if perturbation is not None:
            coeffs = coeffs + perturbation(Q)
        return coeffs

    X = np.atleast_2d(np.asarray(X, dtype=float))
    nab = spinor_derivative(field, psi_field, P, X, s, h)
    psi = psi_field(P)
    masks = grade_masks(m)
    tilde_psi = psi * (masks[l - 1] - masks[l])[None, :]

    fr = UnitaryCoframe(field)
    V = fr.frames(P)
    H = fr.hermitian(P)
    J = j_matrix(2 * m)
    z = frame_components(V, H, complex_of(P))
    zJ = frame_components(V, H, complex_of(P @ J.T))
    res = np.empty_like(psi)
    for i in range(P.shape[0]):
        cX = clifford_matrix(m, frame_components(V[i : i + 1], H[i : i + 1], complex_of(X[i : i + 1]))[0])
        cJX = clifford_matrix(m, frame_components(V[i : i + 1], H[i : i + 1], complex_of((X[i] @ J.T)[None]))[0])
        res[i] = nab[i] + 0.5j * cX @ psi[i] + 0.5 * cJX @ tilde_psi[i]
    norm = np.sqrt(np.sum(np.abs(psi) ** 2, axis=1))
    return np.sqrt(np.sum(np.abs(res) ** 2, axis=1)) / norm


# ---------------------------------------------------------------------------
# the Q map and the lemma checks


def q_map_components(label: KillingFamilyLabel, P: np.ndarray, m: int, h: float = 1e-4):
    """(xi, alpha, u) of a family spinor at ball points.

    u = |phi|^2, alpha = J du (du by finite differences of the closed-form
    norm), xi(X, Y) = Im <c(X) c(Y) phi~, phi>.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    field = CHModelField(m)
    l = family_level(m)
    d = 2 * m
    J = j_matrix(d)
    masks = grade_masks(m)

    def u_field(Q):
        coeffs, _ = killing_family(label, Q, m=m)
        return np.sum(np.abs(coeffs) ** 2, axis=1)

    u = u_field(P)
    hv = h * field.fd_scale(P)
    du = fd_gradient(u_field, P, hv)
    alpha = -du @ J  # J a = -a J in components

    coeffs, _ = killing_family(label, P, m=m)
    tilde_c = coeffs * (masks[l - 1] - masks[l])[None, :]
    fr = UnitaryCoframe(field)
    V = fr.frames(P)
    H = fr.hermitian(P)
    n = P.shape[0]
    xi = np.zeros((n, d, d))
    eye = np.eye(d)
    for i in range(n):
        zs = [
            frame_components(V[i : i + 1], H[i : i + 1], complex_of(eye[a][None]))[0]
            for a in range(d)
        ]
        cs = [clifford_matrix(m, z) for z in zs]
        for a in range(d):
            for b in range(a + 1, d):
                val = np.imag(inner(cs[a] @ (cs[b] @ tilde_c[i]), coeffs[i]))
                xi[i, a, b] = val
                xi[i, b, a] = -val
    return xi, alpha, u


def q_map(label: KillingFamilyLabel, p, m: int) -> AmbientForm:
    """The ambient form theta_z(Q(phi)) of a family spinor (point independent)."""
    pt = as_point_array(p)
    xi, alpha, u = q_map_components(label, pt[None], m)
    return theta_z(pt, xi[0], alpha[0], float(u[0]), m)


def norm_identity_values(label: KillingFamilyLabel, P: np.ndarray, m: int):
    """Closed-form targets of the squared-norm identities, both grades.

    Returns (low_expected, high_expected, low_actual, high_actual) where the
    expected values are the rational displays in |w_a|^2.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    Z = complex_of(P)
    rho2 = np.sum(np.abs(Z) ** 2, axis=-1)
    q = 1.0 - rho2
    l = family_level(m)
    idx0 = [j - 1 for j in label.index]
    comp = [k for k in range(m) if k not in idx0]
    sq = np.abs(Z) ** 2
    if label.family == "plain":
        low_exp = (1.0 - np.sum(sq[:, idx0], axis=1)) / q
        high_exp = np.sum(sq[:, comp], axis=1) / q
    else:
        low_exp = np.sum(sq[:, idx0], axis=1) / q
        high_exp = (1.0 - np.sum(sq[:, comp], axis=1)) / q
    coeffs, _ = killing_family(label, P, m=m)
    masks = grade_masks(m)
    low_act = np.sum(np.abs(coeffs * masks[l - 1][None]) ** 2, axis=1)
    high_act = np.sum(np.abs(coeffs * masks[l][None]) ** 2, axis=1)
    return low_exp, high_exp, low_act, high_act


def lemma_checks(labels, P: np.ndarray, m: int, rng=None, h: float = 1e-4) -> dict:
    """Max violations of the pairing and derivative identities over samples.

    Checked identities (per label, max over points and random vectors):
      * der1:   d|phi|^2(X) + 2i (c(X) phi, phi) = 0
      * trucs:  (c(X) phi, phi) + (c(X) phi~, phi~) = 0
      * trucsJ: (c(JX) phi, phi) - i (c(X) phi~, phi) = 0
      * der2:   nabla_X d|phi|^2 (Y) - 2 g(X,Y)|phi|^2 + 2 Im(c(Y) c(JX) phi~, phi) = 0
      * algxi1: nabla_Z alpha + 2 iota_Z (xi + u Omega) = 0   (FD)
      * algxi2: nabla_Z xi + (1/2)(Z ^ alpha + JZ ^ J alpha) = 0   (FD)
    """
    rng = np.random.default_rng(rng)
    P = np.atleast_2d(np.asarray(P, dtype=float))
    field = CHModelField(m)
    d = 2 * m
    J = j_matrix(d)
    l = family_level(m)
    masks = grade_masks(m)
    from .connections import iota, wedge

    out = {k: 0.0 for k in ("der1", "trucs", "trucsJ", "der2", "algxi1", "algxi2")}
    for label in labels:
        coeffs, _ = killing_family(label, P, m=m)
        tilde_c = coeffs * (masks[l - 1] - masks[l])[None]
        fr = UnitaryCoframe(field)
        V, H = fr.frames(P), fr.hermitian(P)
        G = field.matrix(P)
        Om = np.einsum("nab,bc->nac", G, J)

        def u_field(Q, label=label):
            c, _ = killing_family(label, Q, m=m)
            return np.sum(np.abs(c) ** 2, axis=1)

        xi, alpha, u = q_map_components(label, P, m, h)
        hv = h * field.fd_scale(P)
        du = fd_gradient(u_field, P, hv)

        for i in range(P.shape[0]):
            X = rng.normal(size=d)
            Y = rng.normal(size=d)
            cX = clifford_matrix(m, frame_components(V[i : i + 1], H[i : i + 1], complex_of(X[None]))[0])
            cY = clifford_matrix(m, frame_components(V[i : i + 1], H[i : i + 1], complex_of(Y[None]))[0])
            cJX = clifford_matrix(m, frame_components(V[i : i + 1], H[i : i + 1], complex_of((J @ X)[None]))[0])
            phi, phit = coeffs[i], tilde_c[i]
            out["der1"] = max(out["der1"], abs(du[i] @ X + 2j * inner(cX @ phi, phi)))
            out["trucs"] = max(
                out["trucs"], abs(inner(cX @ phi, phi) + inner(cX @ phit, phit))
            )
            out["trucsJ"] = max(
                out["trucsJ"], abs(inner(cJX @ phi, phi) - 1j * inner(cX @ phit, phi))
            )
            # der2 via FD of du along X
            dudir = fd_directional(
                lambda Q, label=label: fd_gradient(
                    lambda QQ: np.sum(np.abs(killing_family(label, QQ, m=m)[0]) ** 2, axis=1),
                    Q,
                    h * field.fd_scale(Q),
                ),
                P[i : i + 1],
                X[None],
                hv[i : i + 1],
            )[0]
            Gam = christoffel_batch(field, P[i : i + 1])[0]
            nabla_du = dudir - np.einsum("lab,a,l->b", Gam, X, du[i])
            lhs = nabla_du @ Y - 2.0 * (X @ G[i] @ Y) * u[i] + 2.0 * np.imag(
                inner(cY @ (cJX @ phit), phi)
            )
            out["der2"] = max(out["der2"], abs(lhs))
            # algxi identities by FD of the q-map fields
            def alpha_field(Q, label=label):
                return q_map_components(label, Q, m, h)[1]

            def xi_field(Q, label=label):
                return q_map_components(label, Q, m, h)[0]

            Zv = rng.normal(size=d)
            dal = fd_directional(alpha_field, P[i : i + 1], Zv[None], hv[i : i + 1])[0]
            nal = dal - np.einsum("lab,a,l->b", Gam, Zv, alpha[i])
            v1 = nal + 2.0 * iota(Zv, xi[i] + u[i] * Om[i])
            out["algxi1"] = max(out["algxi1"], float(np.max(np.abs(v1))))
            dxi = fd_directional(xi_field, P[i : i + 1], Zv[None], hv[i : i + 1])[0]
            MZ = np.einsum("lab,a->lb", Gam, Zv)
            nxi = dxi - (MZ.T @ xi[i] + xi[i] @ MZ)
            Zf, JZf = G[i] @ Zv, G[i] @ (J @ Zv)
            Jal = -alpha[i] @ J
            v2 = nxi + 0.5 * (wedge(Zf, alpha[i]) + wedge(JZf, Jal))
            out["algxi2"] = max(out["algxi2"], float(np.max(np.abs(v2))))
    return out
