"""Closed constrained elastic curves on S^2 and their 2-parameter families.

A curvature orbit closes into an m-winding, n-lobed spherical curve when
the monodromy M(g2, g3, rho) = rho*eta1 - zeta(rho)*omega1 equals
i*m*pi/(2n).  For wavelike data (D < 0) the solve runs on the bounded
representative line rho = omega1 + i y, 0 < y < |omega3|, where M is
purely imaginary and increases from 0 to pi; the degenerate limit
rho = omega1 + i*artanh(m/n)/sqrt(3a) seeds the solve near D = 0.

Curves are produced from the sigma-quotient formulas, mapped from CP^1
to the unit sphere by inverse stereographic projection of gamma1/gamma2,
and normalized by the rigid motion placing gamma(0) at the north pole
with canonical initial tangent.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import elastica as EL
from . import weierstrass as W
from .errors import (
    DerivativeDegenerateError,
    NoConvergenceError,
    SigmaZeroProximityError,
)


@dataclass(frozen=True)
class ClosureTarget:
    """Winding number m and lobe number n, gcd-normalized."""

    m: int
    n: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("need positive winding and lobe numbers")
        g = math.gcd(self.m, self.n)
        object.__setattr__(self, "m", self.m // g)
        object.__setattr__(self, "n", self.n // g)

    @property
    def value(self):
        """Target monodromy i*m*pi/(2n)."""
        return 1j * np.pi * self.m / (2.0 * self.n)


def monodromy(lat, rho):
    """M = rho*eta1 - zeta(rho)*omega1; warns when not purely imaginary."""
    if isinstance(lat, W.DegenerateLattice):
        _, zt, om1, et1 = W.degenerate_family(lat.a, rho)
        mval = complex(rho * et1 - zt * om1)
    else:
        mval = complex(rho * lat.eta1 - W.zeta(rho, lat) * lat.omega1)
    if abs(mval.real) > 1e-9 * (1.0 + abs(mval)):
        warnings.warn(f"monodromy not purely imaginary: {mval}")
    return mval


def monodromy_drho(lat, rho):
    """dM/drho = eta1 + p(rho)*omega1."""
    if isinstance(lat, W.DegenerateLattice):
        wp, _, om1, et1 = W.degenerate_family(lat.a, rho)
        return complex(et1 + wp * om1)
    return complex(lat.eta1 + W.wp(rho, lat) * lat.omega1)


def rho_degenerate(a, target):
    """Closed-form bounded-representative rho on the D = 0 family.

    Solves cot(sqrt(3a) rho) = -i m/n; raises DerivativeDegenerateError
    when dM/drho vanishes there (the n = 1 Moebius case).
    """
    u = math.atanh(target.m / target.n) if target.m < target.n else None
    if u is None:
        raise DerivativeDegenerateError(
            f"m/n = {target.m}/{target.n} has no bounded solution"
        )
    w = math.sqrt(3.0 * a)
    rho = (0.5 * np.pi + 1j * u) / w
    d = monodromy_drho(W.DegenerateLattice(a), rho)
    if abs(d) < 1e-10:
        raise DerivativeDegenerateError(f"dM/drho = {d} at a = {a}")
    return rho


def solve_rho(lat, target, tol=1e-13):
    """rho with |M(lat, rho) - i*m*pi/(2n)| < tol.

    Degenerate lattices use the closed form; otherwise brentq on the
    bounded representative line followed by Newton polish.
    """
    if isinstance(lat, W.DegenerateLattice):
        return rho_degenerate(lat.a, target)
    tv = target.value.imag
    b = lat.omega3.imag

    def f(y):
        return monodromy(lat, lat.omega1 + 1j * y).imag - tv

    ys = np.linspace(b * 1e-6, b * (1.0 - 1e-9), 96)
    vals = np.array([f(y) for y in ys])
    idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0)[0]
    if idx.size == 0:
        raise NoConvergenceError(
            f"monodromy target {tv:.6g} not bracketed on the rho line"
        )
    y = brentq(f, ys[idx[0]], ys[idx[0] + 1], xtol=1e-15, rtol=8.9e-16)
    rho = lat.omega1 + 1j * y
    for _ in range(6):
        d = monodromy_drho(lat, rho)
        if abs(d) < 1e-10:
            raise DerivativeDegenerateError(f"dM/drho = {d} at rho = {rho}")
        step = (monodromy(lat, rho) - target.value) / d
        if abs(step) > 0.2 * b:
            break
        rho = rho - step
        if abs(step) < 1e-16:
            break
    if abs(monodromy(lat, rho) - target.value) > tol:
        raise NoConvergenceError(
            f"monodromy residual {abs(monodromy(lat, rho) - target.value):.3e}"
        )
    return rho


def mu_from_rho(lat, rho, G=1.0):
    """Multiplier from the theorem constraint p(rho) = (mu - G)/6."""
    return 6.0 * float(W.wp(rho, lat).real) + G


@dataclass
class ProfileCurve:
    """Sampled arclength-parametrized closed curve on the unit sphere."""

    x: np.ndarray
    points: np.ndarray
    kappa: np.ndarray
    length: float
    area: float
    closure_residual: float
    lattice: object
    rho: complex
    x0: complex
    params: EL.ElasticParams

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["x", "p1", "p2", "p3", "kappa"])
            for xi, pt, ki in zip(self.x, self.points, self.kappa):
                wr.writerow([f"{xi:.17g}", f"{pt[0]:.17g}", f"{pt[1]:.17g}",
                             f"{pt[2]:.17g}", f"{ki:.17g}"])


def _to_sphere(w):
    """Inverse stereographic map C u {inf} -> S^2 (unit, curvature 1)."""
    den = 1.0 + np.abs(w) ** 2
    return np.stack(
        [2.0 * w.real / den, 2.0 * w.imag / den, (np.abs(w) ** 2 - 1.0) / den],
        axis=-1,
    )


def _canonical_rotation(p0, t0):
    """Rows (t0, p0 x t0, p0): sends gamma(0) to the pole, tangent to e1."""
    b0 = np.cross(p0, t0)
    return np.stack([t0 / np.linalg.norm(t0), b0 / np.linalg.norm(b0), p0])


def build_curve(lat, rho, x0, p, samples=2048, periods=1):
    """Profile curve from the sigma-quotient formulas over `periods` lobes.

    The closed sampling includes both endpoints; closure_residual is the
    endpoint gap, area is the oriented enclosed area on the unit sphere by
    Gauss-Bonnet, reduced mod 4 pi to (-2 pi, 2 pi].
    """
    xtot = 2.0 * lat.omega1 * periods
    x = np.linspace(0.0, xtot, samples + 1)
    z = x + x0
    z0, _, _ = W._reduce_z(z, lat)
    d = W._lattice_distance(z0, lat)
    if np.min(d) < 1e-8:
        raise SigmaZeroProximityError(
            f"sampling within {np.min(d):.3e} of a sigma zero"
        )
    zr = W.zeta(rho, lat)
    # w = gamma1/gamma2 = sigma(z - rho)/sigma(z + rho) * exp(2 zeta(rho) z)
    wq = W.sigma(z - rho, lat) / W.sigma(z + rho, lat) * np.exp(2.0 * zr * z)
    pts = _to_sphere(wq)

    kap = EL.kappa_closed_form(x, lat, p, x0)
    t0 = (pts[1] - pts[0]) / np.linalg.norm(pts[1] - pts[0])
    rot = _canonical_rotation(pts[0], t0 - np.dot(t0, pts[0]) * pts[0])
    pts = pts @ rot.T

    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    length = float(np.sum(seg))
    resid = float(np.linalg.norm(pts[-1] - pts[0]))
    total_kappa = float(np.trapz(kap, x))
    area = _mod_4pi(2.0 * np.pi - total_kappa)
    return ProfileCurve(x, pts, kap, length, area, resid, lat, rho, x0, p)


def _mod_4pi(a):
    """Reduce to the symmetric fundamental domain (-2 pi, 2 pi]."""
    a = math.fmod(a, 4.0 * np.pi)
    if a > 2.0 * np.pi:
        a -= 4.0 * np.pi
    elif a <= -2.0 * np.pi:
        a += 4.0 * np.pi
    return a


def curve_invariants(c):
    """(L, A, residual); warns when the curve is not closed."""
    if c.closure_residual > 1e-6:
        warnings.warn(
            f"open curve (residual {c.closure_residual:.3e}); area mod 4pi unreliable"
        )
    return c.length, c.area, c.closure_residual


def measured_geodesic_curvature(c):
    """Discrete Frenet oracle: kappa_g = <p x p', p''> for |p'| = 1 on S^2."""
    x, pts = c.x, c.points
    h = x[1] - x[0]
    # 4th-order central stencils on the periodic closed curve (drop endpoint)
    q = pts[:-1]
    d1 = (-np.roll(q, -2, 0) + 8 * np.roll(q, -1, 0)
          - 8 * np.roll(q, 1, 0) + np.roll(q, 2, 0)) / (12 * h)
    d2 = (-np.roll(q, -2, 0) + 16 * np.roll(q, -1, 0) - 30 * q
          + 16 * np.roll(q, 1, 0) - np.roll(q, 2, 0)) / (12 * h**2)
    return np.einsum("ij,ij->i", np.cross(q, d1), d2)


# ---------------------------------------------------------------------------
# n-lobed 2-parameter families


def lambda_hom(kappa0, n):
    """lambda of the homogeneous (D = 0) member at given kappa0."""
    return -(n**2 - 1.0) * kappa0**3 - n**2 * kappa0


def mu_hom(kappa0, n):
    """Closing multiplier of the homogeneous member (G = 1)."""
    return n**2 - 0.5 + (n**2 - 1.5) * kappa0**2


def a_hom(kappa0, n):
    """Degenerate-family parameter of the homogeneous member."""
    return n**2 * (1.0 + kappa0**2) / 12.0


@dataclass
class FamilyMember:
    """One solved member of an n-lobed family."""

    lam_tilde: float
    kappa0: float
    params: EL.ElasticParams
    lattice: W.Lattice
    rho: complex
    x0: complex
    length: float
    area: float

    @property
    def half_class(self):
        """Conformal-type generator (A/2, L/2)."""
        return 0.5 * self.area, 0.5 * self.length


def solve_member(lam, kappa0, target, mu_guess=None, tol=1e-11):
    """Solve mu so that the (lam, kappa0)-curve meets the closing target.

    The residual is F(mu) = 6 p(rho(mu)) + G - mu with rho(mu) from the
    monodromy solve on the lattice of (mu, lam, kappa0); secant iteration
    from the homogeneous-slice predictor.
    """
    if mu_guess is None:
        mu_guess = mu_hom(kappa0, target.n)

    def resid(mu):
        p = EL.params_from_initial(mu, lam, kappa0)
        g2, g3 = EL.invariants_from_params(p)
        lat = W.lattice_from_invariants(g2, g3)
        rho = solve_rho(lat, target)
        return mu_from_rho(lat, rho) - mu, (p, lat, rho)

    mu0 = mu_guess
    f0, data = resid(mu0)
    mu1 = mu0 + (1e-6 + abs(f0)) * 0.5
    f1, data = resid(mu1)
    for _ in range(60):
        if abs(f1) < tol:
            break
        denom = f1 - f0
        if denom == 0:
            break
        mu2 = mu1 - f1 * (mu1 - mu0) / denom
        mu0, f0 = mu1, f1
        mu1 = mu2
        f1, data = resid(mu1)
    else:
        raise NoConvergenceError(f"member solve stalled at |F| = {abs(f1):.3e}")
    if abs(f1) > 1e-8:
        raise NoConvergenceError(f"member residual {abs(f1):.3e}")
    p, lat, rho = data
    x0 = EL.solve_x0(lat, p)
    return p, lat, rho, x0


def family_member(lam_tilde, kappa0, n, mu_guess=None):
    """Solved member at family coordinates (lam_tilde, kappa0)."""
    target = ClosureTarget(1, n)
    if lam_tilde == 0.0:
        raise ValueError("homogeneous slice is analytic; use homogeneous data")
    lam = lam_tilde + lambda_hom(kappa0, n)
    p, lat, rho, x0 = solve_member(lam, kappa0, target, mu_guess=mu_guess)
    kap = EL.kappa_closed_form(
        np.linspace(0.0, 2 * n * lat.omega1, 4097), lat, p, x0
    )
    length = 2.0 * n * lat.omega1
    area = _mod_4pi(
        2.0 * np.pi - float(np.trapz(kap, dx=2 * n * lat.omega1 / 4096))
    )
    return FamilyMember(lam_tilde, kappa0, p, lat, rho, x0, length, area)


def homogeneous_invariants(kappa0):
    """(L, A) of the circle profile with curvature kappa0 on the unit sphere."""
    c = math.sqrt(1.0 + kappa0**2)
    return 2.0 * np.pi / c, _mod_4pi(2.0 * np.pi * (1.0 - kappa0 / c))


def continue_family(n, lam_tilde_grid, kappa0_grid, max_halvings=20):
    """n-lobed family over a (lam_tilde, kappa0) grid by continuation in
    lam_tilde at fixed kappa0; failed steps halve toward the target.
    """
    members = {}
    for kappa0 in kappa0_grid:
        mu_prev = mu_hom(kappa0, n)
        lam_done = 0.0
        for lt in lam_tilde_grid:
            if lt == 0.0:
                continue
            step, halves = lt - lam_done, 0
            cur = lam_done
            while cur != lt:
                trial = lt if abs(lt - cur) <= abs(step) else cur + step
                try:
                    mem = family_member(trial, kappa0, n, mu_guess=mu_prev)
                except (NoConvergenceError, W.DegenerateLatticeError):
                    step *= 0.5
                    halves += 1
                    if halves > max_halvings:
                        raise NoConvergenceError(
                            f"continuation stalled at lam_tilde={cur}, kappa0={kappa0}"
                        )
                    continue
                cur = trial
                mu_prev = mem.params.mu
            members[(lt, kappa0)] = mem
    return members
