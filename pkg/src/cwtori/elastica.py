"""Constrained elastic curve curvature functions on the round 2-sphere.

The curvature of a constrained elastic curve on S^2 of curvature G obeys

    kappa'' + kappa^3/2 + (mu + G/2) kappa + lambda = 0

with first integral

    (kappa')^2 + kappa^4/4 + (mu + G/2) kappa^2 + 2 lambda kappa + nu = 0.

Two independent evaluation routes are kept side by side: the closed form
through the Weierstrass p function on a shifted real line, and direct
high-order ODE integration.  Tests hold them against each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from . import weierstrass as W
from .errors import NegativeRadicandError, NoReturnError

_P4_TOL = 1e-10


@dataclass(frozen=True)
class ElasticParams:
    """Multipliers (mu, lam), integration constant nu, sphere curvature G,
    and initial curvature kappa0 (a root of P4, by convention the largest).
    """

    mu: float
    lam: float
    nu: float
    G: float
    kappa0: float

    @property
    def mhat(self):
        """Effective coefficient mu + G/2."""
        return self.mu + 0.5 * self.G

    def p4(self, k):
        k = np.asarray(k, dtype=float)
        return 0.25 * k**4 + self.mhat * k**2 + 2.0 * self.lam * k + self.nu

    def p4_prime(self, k):
        k = np.asarray(k, dtype=float)
        return k**3 + 2.0 * self.mhat * k + 2.0 * self.lam

    def __post_init__(self):
        scale = max(1.0, abs(self.kappa0) ** 4, abs(self.nu))
        if abs(self.p4(self.kappa0)) > _P4_TOL * scale:
            raise ValueError(
                f"kappa0={self.kappa0} is not a root of P4 "
                f"(residual {float(self.p4(self.kappa0)):.3e})"
            )


def params_from_initial(mu, lam, kappa0, G=1.0):
    """ElasticParams with nu fixed by P4(kappa0) = 0."""
    mhat = mu + 0.5 * G
    nu = -(0.25 * kappa0**4 + mhat * kappa0**2 + 2.0 * lam * kappa0)
    return ElasticParams(mu=mu, lam=lam, nu=nu, G=G, kappa0=kappa0)


def invariants_from_params(p):
    """Lattice invariants (g2, g3) of the curvature orbit."""
    m = p.mhat
    g2 = m**2 / 12.0 + p.nu / 4.0
    g3 = m**3 / 216.0 + p.lam**2 / 16.0 - p.nu * m / 24.0
    return g2, g3


def quartic_real_roots(mu, lam, nu, G=1.0):
    """Real roots of P4 with multiplicities, sorted ascending.

    Returns (roots, mults).  Wavelike data (lattice D < 0) has exactly two
    simple real roots; the degenerate case collapses to a double root.
    """
    mhat = mu + 0.5 * G
    coeffs = [0.25, 0.0, mhat, 2.0 * lam, nu]
    r = np.roots(coeffs)
    for _ in range(3):
        v = np.polyval(coeffs, r)
        dv = np.polyval(np.polyder(coeffs), r)
        r = r - np.where(np.abs(dv) > 1e-14, v / np.where(dv == 0, 1, dv), 0)
    scale = max(1.0, np.max(np.abs(r)))
    real = np.sort(r[np.abs(r.imag) < 1e-7 * scale].real)
    roots, mults = [], []
    for x in real:
        if roots and abs(x - roots[-1]) < 1e-6 * scale:
            mults[-1] += 1
            roots[-1] = (roots[-1] * (mults[-1] - 1) + x) / mults[-1]
        else:
            roots.append(x)
            mults.append(1)
    return np.asarray(roots), np.asarray(mults)


def solve_x0(lat, p):
    """x0 in i(0, |omega3|) with p(x0) = -(kappa0^2 + 2 mhat/3)/8.

    Equivalent to the curve-construction constraint
    2 p(x0) + p(rho) + kappa0^2/4 = -G/4 once p(rho) = (mu - G)/6; p is
    real and monotone on the open imaginary segment, so bisection works.
    """
    target = -(p.kappa0**2 + 2.0 * p.mhat / 3.0) / 8.0
    b = lat.omega3.imag
    # p(iy) increases from -infinity (pole at 0) to p(omega3)
    pmax = float(W.wp(1j * b, lat).real)
    if target > pmax + 1e-12 * max(1.0, abs(pmax)):
        raise NegativeRadicandError(
            f"p(x0) target {target:.6g} above imaginary-axis maximum {pmax:.6g}"
        )
    if target >= pmax:
        return 1j * b

    def f(y):
        return float(W.wp(1j * y, lat).real) - target

    ylo = b * 1e-4
    while f(ylo) > 0:
        ylo *= 0.5
        if ylo < 1e-300:
            raise NegativeRadicandError("could not bracket x0")
    y = brentq(f, ylo, b, xtol=1e-15, rtol=8.9e-16)
    return 1j * y


def _radicand(x, lat, p, x0):
    x = np.asarray(x, dtype=float)
    return -8.0 * W.wp(x + x0, lat).real - 2.0 * p.mhat / 3.0


def _crossings(lat, p, x0):
    """Zeros of kappa in one period [0, 2*omega1), via minima of the radicand."""
    period = 2.0 * lat.omega1
    xs = np.linspace(0.0, period, 512, endpoint=False)
    dr = -8.0 * W.wp_prime(xs + x0, lat).real
    zeros = []
    for i in range(len(xs)):
        j = (i + 1) % len(xs)
        if dr[i] < 0.0 <= dr[j]:
            a, b = xs[i], xs[i] + period / len(xs)
            xc = brentq(
                lambda t: -8.0 * float(W.wp_prime(t + x0, lat).real), a, b,
                xtol=1e-14,
            )
            if _radicand(xc, lat, p, x0) < 1e-6 * max(1.0, p.kappa0**2):
                zeros.append(xc)
    return np.asarray(zeros)


def kappa_closed_form(x, lat, p, x0):
    """Curvature kappa(x) = +-sqrt(-8 Re p(x + x0) - 2 mhat / 3).

    The sign branch starts positive (kappa(0) = kappa0 > 0 convention) and
    alternates at the tangential zeros of the radicand, which glues the
    square-root arches into the smooth sign-changing orbit.
    """
    x = np.asarray(x, dtype=float)
    rad = _radicand(x, lat, p, x0)
    if np.any(rad < -1e-8 * max(1.0, p.kappa0**2)):
        raise NegativeRadicandError(
            f"radicand min {float(np.min(rad)):.3e}; wrong x0 branch"
        )
    kap = np.sqrt(np.clip(rad, 0.0, None))
    roots, _ = quartic_real_roots(p.mu, p.lam, p.nu, p.G)
    if roots.size and roots[0] < -1e-12:
        zeros = _crossings(lat, p, x0)
        period = 2.0 * lat.omega1
        xr = np.mod(x, period)
        sign = np.ones_like(xr)
        if zeros.size == 2:
            inside = (xr > zeros[0]) & (xr < zeros[1])
            sign[inside] = -1.0
        kap = sign * kap
    return kap if kap.shape else float(kap)


@dataclass
class OdeOrbit:
    """Sampled curvature orbit from direct integration."""

    x: np.ndarray
    kappa: np.ndarray
    kappa_prime: np.ndarray
    period: float | None
    drift: float


def integrate_profile_ode(p, span, rtol=1e-12, atol=1e-12, nsamples=2048):
    """Integrate kappa'' = -kappa^3/2 - mhat kappa - lam from (kappa0, 0).

    Detects the intrinsic period as the first return of the orbit to its
    starting phase-space point (event on kappa' = 0 with descending
    crossing).  Constant orbits report period None.
    """
    mhat = p.mhat

    def rhs(t, y):
        return [y[1], -0.5 * y[0] ** 3 - mhat * y[0] - p.lam]

    def at_max(t, y):
        return y[1]

    # return events share the sign of the initial curvature acceleration:
    # orbits from the top root recur at maxima, from the bottom at minima
    kpp0 = -0.5 * p.kappa0**3 - mhat * p.kappa0 - p.lam
    at_max.direction = 1.0 if kpp0 > 0 else -1.0

    xs = np.linspace(0.0, span, nsamples)
    sol = solve_ivp(
        rhs, (0.0, span), [p.kappa0, 0.0], t_eval=xs, rtol=rtol, atol=atol,
        method="DOP853", events=at_max, dense_output=True,
    )
    if not sol.success:
        raise NoReturnError(sol.message)
    kap, kp = sol.y
    e0 = p.p4(p.kappa0)
    drift = float(np.max(np.abs(kp**2 + p.p4(kap) - e0)))

    if np.max(np.abs(kap - p.kappa0)) < 1e-9 * max(1.0, abs(p.kappa0)):
        return OdeOrbit(xs, kap, kp, None, drift)
    ev = sol.t_events[0]
    ev = ev[ev > 1e-9]
    if ev.size == 0:
        raise NoReturnError(f"no curvature period within span {span}")
    period = float(ev[0])
    if abs(float(sol.sol(period)[0]) - p.kappa0) > 1e-7 * max(1.0, abs(p.kappa0)):
        raise NoReturnError("orbit did not return to kappa0 at the detected period")
    return OdeOrbit(xs, kap, kp, period, drift)
