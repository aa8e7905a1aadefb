"""U(m)-invariant Kahler metrics on the ball from momentum profiles.

A profile Theta on (0, inf) with Theta(0) = 0, Theta'(0) = 2 determines a
Kahler metric through ``omega = dx ^ d^c x / Theta(x) + x omega_FS``; in the
shared log-radius gauge t = log|w| (anchored by t(x -> inf) = 0) the Hermitian
coefficients are closed forms,

    h_jk = [ (x/rho^2) delta_jk + (Theta(x)/2 - x) conj(w_j) w_k / rho^4 ] / 2.

Model profiles: 2x (flat), 2x + 2x^2 (complex hyperbolic, x = rho^2/(1-rho^2)),
2x - 2x^2 (Fubini-Study type, x = rho^2/(1+rho^2)).  The bump-built profile
Theta0 - alpha with alpha = x^(1-m) int int chi modifies the model beyond
x = 1 while raising the scalar curvature; its gauge shift relative to the
model is Delta(x) = int_x^inf alpha / (Theta Theta0), evaluated here by dense
cumulative Gauss-Legendre panels plus a quintic spline (the metric difference
to the model is assembled cancellation-free from Delta via expm1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import make_interp_spline

from .geometry import (
    BallMetricField,
    DomainError,
    complex_of,
    hermitian_to_real,
)


class ProfileError(ValueError):
    """Invalid momentum profile or bump specification."""


# ---------------------------------------------------------------------------
# bump functions


@dataclass
class BumpSpec:
    """A smooth bump with unit integral supported in [z0, z1] (inside [1, inf)).

    The default shape is exp(-1/((z - z0)(z1 - z))), numerically normalized.
    """

    z0: float = 1.0
    z1: float = 2.0
    n_grid: int = 4001

    norm: float = field(init=False)
    first_moment: float = field(init=False)
    _cum: object = field(init=False, repr=False)
    _cum2: object = field(init=False, repr=False)

    def __post_init__(self):
        if self.z0 < 1.0:
            raise ProfileError("bump support must lie inside [1, inf)")
        if not self.z1 > self.z0:
            raise ProfileError("empty bump support")
        zs = np.linspace(self.z0, self.z1, self.n_grid)
        raw = self._raw(zs)
        cum_raw = _cumulative_gl(zs, lambda z: self._raw(z))
        self.norm = 1.0 / cum_raw[-1]
        cum = self.norm * cum_raw
        self._cum = make_interp_spline(zs, cum, k=5)
        m1_raw = _cumulative_gl(zs, lambda z: z * self._raw(z))[-1]
        self.first_moment = self.norm * m1_raw
        # D(y) = int_z0^y C, with C the cumulative of chi
        cum2 = _cumulative_gl(zs, lambda z: _spline_eval(self._cum, z, self.z0, self.z1))
        self._cum2 = make_interp_spline(zs, cum2, k=5)
        del raw

    def _raw(self, z):
        z = np.asarray(z, dtype=float)
        out = np.zeros_like(z)
        inside = (z > self.z0) & (z < self.z1)
        zi = z[inside]
        out[inside] = np.exp(-1.0 / ((zi - self.z0) * (self.z1 - zi)))
        return out

    def chi(self, z) -> np.ndarray:
        """The normalized bump, vanishing outside (z0, z1)."""
        return self.norm * self._raw(z)

    def cumulative(self, z) -> np.ndarray:
        """C(z) = int_0^z chi."""
        z = np.asarray(z, dtype=float)
        out = np.where(z >= self.z1, 1.0, 0.0)
        inside = (z > self.z0) & (z < self.z1)
        out = out.astype(float)
        out[inside] = self._cum(z[inside])
        return out

    def double_integral(self, x) -> np.ndarray:
        """D(x) = int_0^x int_0^y chi(z) dz dy; equals x - M1 beyond z1."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        tail = x >= self.z1
        out[tail] = x[tail] - self.first_moment
        inside = (x > self.z0) & (x < self.z1)
        out[inside] = self._cum2(x[inside])
        return out


def _cumulative_gl(grid: np.ndarray, f, n_gauss: int = 12) -> np.ndarray:
    """Cumulative integral of f from grid[0] along a fixed grid (GL panels)."""
    nodes, weights = np.polynomial.legendre.leggauss(n_gauss)
    a, b = grid[:-1], grid[1:]
    mid = 0.5 * (a + b)[:, None]
    half = 0.5 * (b - a)[:, None]
    pts = mid + half * nodes[None, :]
    vals = f(pts.ravel()).reshape(pts.shape)
    panel = np.sum(vals * weights[None, :], axis=1) * half[:, 0]
    return np.concatenate([[0.0], np.cumsum(panel)])


def _spline_eval(spl, z, lo, hi):
    z = np.clip(np.asarray(z, dtype=float), lo, hi)
    return spl(z)


# ---------------------------------------------------------------------------
# momentum profiles


def _x0_of_t(t: np.ndarray) -> np.ndarray:
    """Model gauge x0(t) = e^(2t)/(1 - e^(2t)), stable for t < 0."""
    e2t = np.exp(2.0 * np.asarray(t, dtype=float))
    return e2t / (-np.expm1(2.0 * np.asarray(t, dtype=float)))


@dataclass
class MomentumProfile:
    """Theta(x) with value/derivative access, gauge data and metadata.

    ``kind`` is one of flat | ch | fs | custom | slow-decay.  Custom profiles
    carry the bump spec, the dimension m they were built for, and the gauge
    shift Delta relative to the model profile.
    """

    kind: str
    theta: Callable
    theta_prime: Callable
    x_of_t: Callable
    x_max: float = np.inf
    m: int | None = None
    spec: BumpSpec | None = None
    alpha: Callable | None = None
    chi: Callable | None = None
    delta_gauge: Callable | None = None
    delta_at_origin: float = 0.0

    def __post_init__(self):
        # smoothness at the origin: Theta(0) = 0, Theta'(0) = 2
        t0 = float(np.asarray(self.theta(np.array([0.0])))[0])
        tp0 = float(np.asarray(self.theta_prime(np.array([0.0])))[0])
        if abs(t0) > 1e-10 or abs(tp0 - 2.0) > 1e-10:
            raise ProfileError(
                f"profile not smooth at 0: Theta(0)={t0:.3e}, Theta'(0)={tp0:.6f}"
            )

    @property
    def has_gauge_shift(self) -> bool:
        return self.delta_gauge is not None

    def t_of_x(self, x) -> np.ndarray:
        """Inverse gauge map, t(x) = (1/2) log(x/(1+x)) - Delta(x)."""
        x = np.asarray(x, dtype=float)
        t0 = 0.5 * (np.log(x) - np.log1p(x))
        if self.delta_gauge is None:
            if self.kind == "flat":
                return 0.5 * np.log(x)
            if self.kind == "fs":
                return 0.5 * (np.log(x) - np.log1p(-x))
            return t0
        return t0 - self.delta_gauge(x)


def theta_model(kind: str) -> MomentumProfile:
    """The three model profiles: flat 2x, ch 2x + 2x^2, fs 2x - 2x^2."""
    if kind == "flat":
        return MomentumProfile(
            kind="flat",
            theta=lambda x: 2.0 * np.asarray(x, dtype=float),
            theta_prime=lambda x: 2.0 * np.ones_like(np.asarray(x, dtype=float)),
            x_of_t=lambda t: np.exp(2.0 * np.asarray(t, dtype=float)),
        )
    if kind == "ch":
        return MomentumProfile(
            kind="ch",
            theta=lambda x: 2.0 * np.asarray(x) * (1.0 + np.asarray(x)),
            theta_prime=lambda x: 2.0 + 4.0 * np.asarray(x, dtype=float),
            x_of_t=_x0_of_t,
        )
    if kind == "fs":
        return MomentumProfile(
            kind="fs",
            theta=lambda x: 2.0 * np.asarray(x) * (1.0 - np.asarray(x)),
            theta_prime=lambda x: 2.0 - 4.0 * np.asarray(x, dtype=float),
            x_of_t=lambda t: np.exp(2.0 * np.asarray(t)) / (1.0 + np.exp(2.0 * np.asarray(t))),
            x_max=1.0,
        )
    raise ProfileError(f"unknown model profile kind {kind!r}")


def alpha_of_x(spec: BumpSpec, m: int, x) -> np.ndarray:
    """alpha(x) = x^(1-m) int_0^x int_0^y chi; zero on [0, z0], tail closed form."""
    if m < 2:
        raise ProfileError("m >= 2 required")
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > spec.z0
    out[pos] = x[pos] ** (1 - m) * spec.double_integral(x[pos])
    return out


def _alpha_prime(spec: BumpSpec, m: int, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > spec.z0
    xp = x[pos]
    out[pos] = (1 - m) * xp ** (-m) * spec.double_integral(xp) + xp ** (1 - m) * spec.cumulative(xp)
    return out


def _build_gauge_shift(theta_fn, alpha_fn, x_lo: float, x_hi: float = 1e7, n: int = 2400):
    """Quintic spline of Delta(x) = int_x^inf alpha/(Theta Theta0) in log x."""
    theta0 = theta_model("ch").theta

    def integrand(x):
        x = np.asarray(x, dtype=float)
        return alpha_fn(x) / (theta_fn(x) * theta0(x))

    us = np.linspace(np.log(x_lo), np.log(x_hi), n)
    xs = np.exp(us)
    cum = _cumulative_gl(us, lambda u: integrand(np.exp(u)) * np.exp(u))
    # tail beyond x_hi via the substitution y = 1/x (smooth, finite interval)
    tail, _ = quad(
        lambda y: integrand(1.0 / y) / y**2 if y > 0 else 0.0,
        0.0,
        1.0 / x_hi,
        epsabs=1e-30,
        epsrel=1e-12,
        limit=200,
    )
    delta_vals = (cum[-1] - cum) + tail
    spl = make_interp_spline(us, delta_vals, k=5)
    delta0 = float(delta_vals[0])

    def delta(x):
        x = np.asarray(x, dtype=float)
        out = np.full_like(x, delta0)
        mid = (x > x_lo) & (x <= x_hi)
        out[mid] = spl(np.log(x[mid]))
        far = x > x_hi
        if np.any(far):
            out[far] = tail * (x_hi / x[far]) ** 3
        return out

    return delta, delta0


def theta_custom(spec: BumpSpec, m: int) -> MomentumProfile:
    """The bump-modified profile Theta = Theta0 - alpha (Theta0 = 2x + 2x^2)."""
    base = theta_model("ch")

    def theta(x):
        return base.theta(x) - alpha_of_x(spec, m, x)

    def theta_prime(x):
        return base.theta_prime(x) - _alpha_prime(spec, m, x)

    # positivity sweep; alpha(x) <= x makes this structural, but verify
    grid = np.concatenate([[0.0], np.geomspace(1e-3, 1e6, 400)])
    vals = theta(grid[1:])
    if np.any(vals <= 0.0):
        bad = grid[1:][vals <= 0.0][0]
        raise ProfileError(f"profile not positive at x = {bad:.6g}")
    al = alpha_of_x(spec, m, grid[1:])
    if np.any(al > grid[1:] * (1 + 1e-12)):
        raise ProfileError("alpha(x) <= x violated; bump integral exceeds 1?")

    delta, delta0 = _build_gauge_shift(theta, lambda x: alpha_of_x(spec, m, x), spec.z0)

    def x_of_t(t):
        return _solve_gauge(t, delta)

    return MomentumProfile(
        kind="custom",
        theta=theta,
        theta_prime=theta_prime,
        x_of_t=x_of_t,
        m=m,
        spec=spec,
        alpha=lambda x: alpha_of_x(spec, m, x),
        chi=spec.chi,
        delta_gauge=delta,
        delta_at_origin=delta0,
    )


def make_slow_decay_profile(m: int, c0: float = 0.5) -> MomentumProfile:
    """Control profile with alpha ~ c0 x at infinity (decay rate a = m).

    Violates the admissible-decay hypothesis (a > m + 1/2); the mass of the
    resulting metric diverges.  Smoothstep switch-on over [1, 2].
    """
    base = theta_model("ch")

    def smooth(x):
        x = np.asarray(x, dtype=float)
        s = np.clip(x - 1.0, 0.0, 1.0)
        return s * s * (3.0 - 2.0 * s)

    def dsmooth(x):
        x = np.asarray(x, dtype=float)
        s = np.clip(x - 1.0, 0.0, 1.0)
        return 6.0 * s * (1.0 - s)

    alpha_fn = lambda x: c0 * np.asarray(x, dtype=float) * smooth(x)
    theta = lambda x: base.theta(x) - alpha_fn(x)
    theta_prime = lambda x: base.theta_prime(x) - c0 * (smooth(x) + np.asarray(x) * dsmooth(x))
    delta, delta0 = _build_gauge_shift(theta, alpha_fn, 1.0)
    return MomentumProfile(
        kind="slow-decay",
        theta=theta,
        theta_prime=theta_prime,
        x_of_t=lambda t: _solve_gauge(t, delta),
        m=m,
        alpha=alpha_fn,
        delta_gauge=delta,
        delta_at_origin=delta0,
    )


def _solve_gauge(t, delta, n_iter: int = 8):
    """Solve t0(x) - Delta(x) = t by fixed-point iteration x <- x0(t + Delta(x)).

    The map is a strong contraction (|d Delta/d t0| = alpha/Theta << 1).
    """
    t = np.asarray(t, dtype=float)
    x = _x0_of_t(np.minimum(t, -1e-300))
    for _ in range(n_iter):
        x = _x0_of_t(np.minimum(t + delta(x), -1e-300))
    return x


# ---------------------------------------------------------------------------
# scalar curvature of a profile metric


def scal_profile(profile: MomentumProfile, m: int, x) -> np.ndarray:
    """Scalar curvature of the profile metric at momentum coordinate x.

    Normalized like the rest of the package (model value -4m(m+1)); the
    radial second-derivative expression is evaluated in closed form, with the
    bump appearing through ``d_xx(x^(m-1) alpha) = chi`` for custom profiles.
    """
    return 2.0 * scal_profile_display(profile, m, x)


def scal_profile_display(profile: MomentumProfile, m: int, x) -> np.ndarray:
    """The radial scalar-curvature expression in its conventional scaling.

    ``2m(m-1)/x - d_xx(x^(m-1) Theta)/x^(m-1)``; equal to half the package's
    scalar curvature, constant -2m(m+1) for the model profile.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("x >= 0 required")
    kind = profile.kind
    if kind == "flat":
        return np.zeros_like(x)
    if kind == "ch":
        return np.full_like(x, -2.0 * m * (m + 1))
    if kind == "fs":
        return np.full_like(x, 2.0 * m * (m + 1))
    if kind == "custom":
        out = np.full_like(x, -2.0 * m * (m + 1))
        pos = x > 0
        out[pos] += profile.chi(x[pos]) / x[pos] ** (m - 1)
        return out
    # generic fallback: finite differences of x^(m-1) Theta on interior points
    out = np.empty_like(x)
    h = 1e-4 * np.maximum(x, 1e-2)
    f = lambda y: y ** (m - 1) * profile.theta(y)
    d2 = (f(x + h) - 2.0 * f(x) + f(x - h)) / h**2
    pos = x > 0
    out[pos] = 2.0 * m * (m - 1) / x[pos] - d2[pos] / x[pos] ** (m - 1)
    out[~pos] = -2.0 * m * (m + 1) if kind == "slow-decay" else np.nan
    return out


# ---------------------------------------------------------------------------
# the metric field of a profile


class ProfileMetricField(BallMetricField):
    """Kahler metric of a momentum profile in the shared ball chart.

    Exposes ``hermitian`` (closed form through the gauge solve) and, for
    profiles carrying a gauge shift, the cancellation-free difference
    ``delta`` to the model metric.
    """

    def __init__(self, profile: MomentumProfile, m: int):
        if profile.m is not None and profile.m != m:
            raise ProfileError("profile was built for a different dimension m")
        self.profile = profile
        self.m = m
        self.dim = 2 * m

    # -- gauge helpers -------------------------------------------------------
    def _x_and_rho2(self, P: np.ndarray):
        P = np.atleast_2d(np.asarray(P, dtype=float))
        rho2 = np.sum(P**2, axis=-1)
        if self.profile.kind != "fs" and np.any(rho2 >= 1.0):
            raise DomainError("point outside the unit ball")
        t = 0.5 * np.log(np.maximum(rho2, 1e-300))
        x = self.profile.x_of_t(t)
        return P, rho2, x

    def hermitian(self, P: np.ndarray) -> np.ndarray:
        P, rho2, x = self._x_and_rho2(P)
        Z = complex_of(P)
        prof = self.profile
        n = P.shape[0]
        mm = self.m
        ratio = np.empty(n)  # x / rho^2
        quad_c = np.empty(n)  # (Theta/2 - x) / rho^4
        if prof.kind == "ch":
            q = 1.0 - rho2
            ratio = 1.0 / q
            quad_c = 1.0 / q**2
        elif prof.kind == "flat":
            ratio = np.ones(n)
            quad_c = np.zeros(n)
        elif prof.kind == "fs":
            q = 1.0 + rho2
            ratio = 1.0 / q
            quad_c = -1.0 / q**2
        else:
            d0 = prof.delta_at_origin
            z0 = prof.spec.z0 if prof.spec is not None else 1.0
            inner = x <= z0
            # below the bump: exact scaled-model branch, x = x0(t + Delta0)
            s2 = rho2 * np.exp(2.0 * d0)
            qin = 1.0 - s2
            ratio[inner] = (np.exp(2.0 * d0) / qin)[inner]
            quad_c[inner] = (np.exp(4.0 * d0) / qin**2)[inner]
            out = ~inner
            ratio[out] = x[out] / rho2[out]
            theta_half = 0.5 * prof.theta(x[out])
            quad_c[out] = (theta_half - x[out]) / rho2[out] ** 2
        eye = np.eye(mm)
        outerm = np.conj(Z)[:, :, None] * Z[:, None, :]
        H = 0.5 * (ratio[:, None, None] * eye + quad_c[:, None, None] * outerm)
        return H

    def matrix(self, P: np.ndarray) -> np.ndarray:
        return hermitian_to_real(self.hermitian(P))

    # -- difference to the model ----------------------------------------------
    def delta_hermitian(self, P: np.ndarray) -> np.ndarray:
        """Hermitian coefficients of g - g0, exact to relative rounding.

        Built from the gauge shift via expm1 so that no large-term
        cancellation occurs even far out in the ball.
        """
        P, rho2, x = self._x_and_rho2(P)
        prof = self.profile
        n = P.shape[0]
        Z = complex_of(P)
        if prof.kind == "ch":
            return np.zeros((n, self.m, self.m), dtype=complex)
        if not prof.has_gauge_shift:
            raise ProfileError("profile has no model gauge comparison")
        e2t = rho2
        dl = prof.delta_gauge(x)
        # x_g - x0 = e^(2t) expm1(2 Delta) / [(1 - e^(2t+2Delta))(1 - e^(2t))]
        denom = (-np.expm1(2.0 * dl + np.log(np.maximum(e2t, 1e-300)))) * (1.0 - e2t)
        dx_over_rho2 = np.expm1(2.0 * dl) / denom
        dx = dx_over_rho2 * e2t
        x0 = e2t / (1.0 - e2t)
        al = prof.alpha(x) if prof.alpha is not None else np.zeros_like(x)
        coef_quad = (dx * (x + x0) - 0.5 * al) / np.maximum(rho2, 1e-300) ** 2
        eye = np.eye(self.m)
        outerm = np.conj(Z)[:, :, None] * Z[:, None, :]
        return 0.5 * (
            dx_over_rho2[:, None, None] * eye + coef_quad[:, None, None] * outerm
        )

    def delta(self, P: np.ndarray) -> np.ndarray:
        return hermitian_to_real(self.delta_hermitian(P))
