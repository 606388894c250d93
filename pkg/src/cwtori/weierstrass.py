"""Weierstrass elliptic functions for real invariants (g2, g3).

Only real invariants occur here, so every lattice is rectangular
(D > 0) or rhombic (D < 0).  The engine

  * inverts (g2, g3) to half-periods with Carlson symmetric integrals,
  * reduces a generating pair of half-periods to the modular
    fundamental domain (keeps the theta nome small, |q| < 0.0659),
  * reduces arguments into the fundamental cell exactly via the
    quasi-periodicity of sigma and zeta,
  * evaluates p, zeta, sigma through Jacobi theta-1 series and
    p' = -sigma(2z)/sigma(z)^4.

All evaluators accept scalars or ndarrays of complex arguments.
Accuracy is certified by the p-ODE residual rather than trusted
term counts; see tests.

Degenerate lattices (D = 0) are a separate code path with the closed
trigonometric limit formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateLatticeError, InvalidInvariantsError, PoleProximityError

# terms in the theta-1 series; |q| <= exp(-pi*sqrt(3)/2) after modular
# reduction makes 13 terms sufficient for <1e-16 relative truncation
_THETA_TERMS = 13

_POLE_TOL = 1e-9


def carlson_rf(x, y, z, rtol=1e-16):
    """Carlson symmetric elliptic integral R_F by the duplication algorithm.

    Accepts complex arguments off the negative real axis cut.
    """
    x, y, z = complex(x), complex(y), complex(z)
    for _ in range(200):
        lam = np.sqrt(x) * np.sqrt(y) + np.sqrt(y) * np.sqrt(z) + np.sqrt(z) * np.sqrt(x)
        x, y, z = 0.25 * (x + lam), 0.25 * (y + lam), 0.25 * (z + lam)
        mu = (x + y + z) / 3.0
        eps = max(abs(x - mu), abs(y - mu), abs(z - mu)) / abs(mu)
        if eps < rtol:
            break
    dx, dy, dz = (mu - x) / mu, (mu - y) / mu, (mu - z) / mu
    e2 = dx * dy + dy * dz + dz * dx
    e3 = dx * dy * dz
    s = 1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0
    return s / np.sqrt(mu)


def cubic_roots(g2, g3):
    """Roots of 4 t^3 - g2 t - g3, Newton-polished."""
    r = np.roots([4.0, 0.0, -g2, -g3]).astype(complex)
    for _ in range(3):
        f = 4.0 * r**3 - g2 * r - g3
        df = 12.0 * r**2 - g2
        step = np.where(np.abs(df) > 0, f / np.where(df == 0, 1.0, df), 0.0)
        r = r - step
    return r


def discriminant(g2, g3):
    return g2**3 - 27.0 * g3**2


def degeneracy_threshold(g2, g3):
    return 1e-13 * max(abs(g2) ** 3, 27.0 * g3**2, 1e-280)


@dataclass(frozen=True)
class Lattice:
    """Weierstrass lattice data for real invariants with D != 0.

    omega1 is the real half-period (2*omega1 generates the real lattice
    points), omega3 the purely imaginary half-lattice point of smallest
    positive imaginary part, eta1 = zeta(omega1).  wa/wb are a reduced
    generating pair of half-periods used internally by the theta series;
    for rhombic lattices (D < 0) the pair (omega1, omega3) does not
    generate, wa/wb always do.
    """

    g2: float
    g3: float
    omega1: float
    omega3: complex
    eta1: float
    disc: float
    wa: complex = field(repr=False)
    wb: complex = field(repr=False)
    eta_a: complex = field(repr=False)
    eta_b: complex = field(repr=False)
    tau: complex = field(repr=False)
    roots: tuple = field(repr=False)

    @property
    def real_period(self):
        return 2.0 * self.omega1

    def scaled(self, t):
        """Lattice for (t^-4 g2, t^-6 g3); periods scale by t."""
        return lattice_from_invariants(self.g2 / t**4, self.g3 / t**6)


def _reduce_pair(wa, wb):
    """Modular-reduce half-period generators until tau = wb/wa is fundamental."""
    for _ in range(200):
        tau = wb / wa
        if tau.imag <= 0:
            raise InvalidInvariantsError(f"generator pair not oriented: tau={tau}")
        n = round(tau.real)
        wb = wb - n * wa
        tau = wb / wa
        if abs(tau) < 1.0 - 1e-14:
            wa, wb = wb, -wa
        else:
            return wa, wb, tau
    raise InvalidInvariantsError("modular reduction did not terminate")


def _theta1_block(v, q):
    """theta1 and its first two v-derivatives at complex v (vectorized)."""
    v = np.asarray(v, dtype=complex)
    n = np.arange(_THETA_TERMS)
    sgn = (-1.0) ** n
    qp = q ** ((n + 0.5) ** 2)
    m = 2.0 * n + 1.0
    arg = np.multiply.outer(v, m)
    s, c = np.sin(arg), np.cos(arg)
    t1 = 2.0 * np.sum(sgn * qp * s, axis=-1)
    t1p = 2.0 * np.sum(sgn * qp * m * c, axis=-1)
    t1pp = -2.0 * np.sum(sgn * qp * m**2 * s, axis=-1)
    return t1, t1p, t1pp


def _theta1_consts(q):
    n = np.arange(_THETA_TERMS)
    sgn = (-1.0) ** n
    qp = q ** ((n + 0.5) ** 2)
    m = 2.0 * n + 1.0
    t1p0 = 2.0 * np.sum(sgn * qp * m)
    t1ppp0 = -2.0 * np.sum(sgn * qp * m**3)
    return t1p0, t1ppp0


def lattice_from_invariants(g2, g3):
    """Build the Lattice for real (g2, g3) with nonzero discriminant.

    Raises DegenerateLatticeError when |D| is below the relative
    threshold, InvalidInvariantsError when the computed periods fail the
    Legendre identity.
    """
    g2 = float(g2)
    g3 = float(g3)
    disc = discriminant(g2, g3)
    if abs(disc) < degeneracy_threshold(g2, g3):
        raise DegenerateLatticeError(g2, g3, disc)

    r = cubic_roots(g2, g3)
    if disc > 0:
        e = np.sort_complex(r).real[::-1]  # e1 > e2 > e3, all real
        omega1 = float(carlson_rf(0.0, e[0] - e[1], e[0] - e[2]).real)
        om3 = float(carlson_rf(0.0, e[0] - e[2], e[1] - e[2]).real)
        wa, wb = complex(omega1), complex(0.0, om3)
        roots = (e[0], e[1], e[2])
    else:
        k = int(np.argmin(np.abs(r.imag)))
        e2 = r[k].real
        ec = [r[j] for j in range(3) if j != k]
        omega1 = float(carlson_rf(0.0, e2 - ec[0], e2 - ec[1]).real)
        # imaginary direction via p(iz; g2, g3) = -p(z; g2, -g3)
        om3 = float(carlson_rf(0.0, -e2 + ec[0], -e2 + ec[1]).real)
        wa = 0.5 * complex(omega1, om3)
        wb = 0.5 * complex(-omega1, om3)
        roots = (e2, ec[0], ec[1])

    wa, wb, tau = _reduce_pair(wa, wb)
    q = np.exp(1j * np.pi * tau)
    t1p0, t1ppp0 = _theta1_consts(q)
    eta_a = -(np.pi**2) * t1ppp0 / (12.0 * wa * t1p0)
    eta_b = (eta_a * wb - 0.5j * np.pi) / wa

    lat = Lattice(
        g2=g2, g3=g3, omega1=omega1, omega3=complex(0.0, om3),
        eta1=0.0, disc=disc, wa=wa, wb=wb, eta_a=eta_a, eta_b=eta_b,
        tau=tau, roots=roots,
    )
    eta1c = complex(wp_family(omega1, lat)[2])
    object.__setattr__(lat, "eta1", eta1c.real)

    if legendre_residual(lat) > 1e-10:
        raise InvalidInvariantsError(
            f"Legendre residual {legendre_residual(lat):.3e} for g2={g2}, g3={g3}"
        )
    return lat


def legendre_residual(lat):
    """|zeta(w1) w3 - zeta(w3) w1 - c*i*pi/2| for the reported pair.

    c = 1 on rectangular lattices where (w1, w3) generate; on rhombic
    lattices the pair spans an index-2 sublattice and c = 2.
    """
    legendre = complex(lat.eta1) * lat.omega3 - zeta(lat.omega3, lat) * lat.omega1
    c = 1.0 if lat.disc > 0 else 2.0
    return float(abs(legendre - c * 0.5j * np.pi))


def _reduce_z(z, lat):
    """Split z = z0 + 2m*wa + 2n*wb with z0 in the centered fundamental cell."""
    z = np.asarray(z, dtype=complex)
    # solve z = 2a*wa + 2b*wb over the reals
    det = lat.wa.real * lat.wb.imag - lat.wa.imag * lat.wb.real
    a = (z.real * lat.wb.imag - z.imag * lat.wb.real) / (2.0 * det)
    b = (z.imag * lat.wa.real - z.real * lat.wa.imag) / (2.0 * det)
    m = np.round(a)
    n = np.round(b)
    z0 = z - 2.0 * m * lat.wa - 2.0 * n * lat.wb
    return z0, m, n


def _lattice_distance(z0, lat):
    """Distance from a reduced point to the nearest lattice point."""
    d = np.abs(z0)
    for dm in (-1.0, 0.0, 1.0):
        for dn in (-1.0, 0.0, 1.0):
            d = np.minimum(d, np.abs(z0 - 2.0 * dm * lat.wa - 2.0 * dn * lat.wb))
    return d


def sigma(z, lat):
    """Weierstrass sigma; entire, vectorized."""
    z0, m, n = _reduce_z(z, lat)
    v = np.pi * z0 / (2.0 * lat.wa)
    q = np.exp(1j * np.pi * lat.tau)
    t1, _, _ = _theta1_block(v, q)
    t1p0, _ = _theta1_consts(q)
    s0 = (2.0 * lat.wa / np.pi) * np.exp(lat.eta_a * z0**2 / (2.0 * lat.wa)) * t1 / t1p0
    sign = (-1.0) ** (m + n + m * n)
    fac = np.exp((2.0 * m * lat.eta_a + 2.0 * n * lat.eta_b) * (z0 + m * lat.wa + n * lat.wb))
    return s0 * sign * fac


def zeta(z, lat, _checked=False):
    """Weierstrass zeta; poles at lattice points."""
    z0, m, n = _reduce_z(z, lat)
    if not _checked:
        d = _lattice_distance(z0, lat)
        if np.any(d < _POLE_TOL):
            bad = np.asarray(z, dtype=complex).ravel()[np.argmin(np.atleast_1d(d))]
            raise PoleProximityError(bad, float(np.min(d)))
    v = np.pi * z0 / (2.0 * lat.wa)
    q = np.exp(1j * np.pi * lat.tau)
    t1, t1p, _ = _theta1_block(v, q)
    z0v = lat.eta_a * z0 / lat.wa + (np.pi / (2.0 * lat.wa)) * t1p / t1
    return z0v + 2.0 * m * lat.eta_a + 2.0 * n * lat.eta_b


def wp(z, lat, _checked=False):
    """Weierstrass p function."""
    z0, _, _ = _reduce_z(z, lat)
    if not _checked:
        d = _lattice_distance(z0, lat)
        if np.any(d < _POLE_TOL):
            bad = np.asarray(z, dtype=complex).ravel()[np.argmin(np.atleast_1d(d))]
            raise PoleProximityError(bad, float(np.min(d)))
    v = np.pi * z0 / (2.0 * lat.wa)
    q = np.exp(1j * np.pi * lat.tau)
    t1, t1p, t1pp = _theta1_block(v, q)
    lam = t1p / t1
    return -lat.eta_a / lat.wa - (np.pi / (2.0 * lat.wa)) ** 2 * (t1pp / t1 - lam**2)


def wp_prime(z, lat, _checked=False):
    """Derivative p'(z) = -sigma(2z)/sigma(z)^4."""
    if not _checked:
        z0, _, _ = _reduce_z(z, lat)
        d = _lattice_distance(z0, lat)
        if np.any(d < _POLE_TOL):
            bad = np.asarray(z, dtype=complex).ravel()[np.argmin(np.atleast_1d(d))]
            raise PoleProximityError(bad, float(np.min(d)))
    return -sigma(2.0 * np.asarray(z, dtype=complex), lat) / sigma(z, lat) ** 4


def wp_family(z, lat):
    """Evaluate (p, p', zeta, sigma) at z.

    Raises PoleProximityError when z is within tolerance of a lattice
    point (sigma alone is fine there, but the family is reported
    together).
    """
    z = np.asarray(z, dtype=complex)
    z0, _, _ = _reduce_z(z, lat)
    d = _lattice_distance(z0, lat)
    if np.any(d < _POLE_TOL):
        bad = z.ravel()[np.argmin(np.atleast_1d(d))] if z.shape else complex(z)
        raise PoleProximityError(bad, float(np.min(d)))
    return (
        wp(z, lat, _checked=True),
        wp_prime(z, lat, _checked=True),
        zeta(z, lat, _checked=True),
        sigma(z, lat),
    )


@dataclass(frozen=True)
class DegenerateLattice:
    """Degenerate (D = 0) family parametrized by a real number a > 0."""

    a: float

    @property
    def g2(self):
        return 12.0 * self.a**2

    @property
    def g3(self):
        return 8.0 * self.a**3

    @property
    def disc(self):
        return 0.0

    @property
    def omega1(self):
        return np.pi / math.sqrt(12.0 * self.a)

    @property
    def eta1(self):
        return self.a * np.pi / math.sqrt(12.0 * self.a)


def degenerate_family(a, z):
    """Trigonometric limits (p_inf, zeta_inf, omega1, eta1) at D = 0.

    Requires a > 0 and sqrt(3a) z away from multiples of pi.
    """
    if a <= 0:
        raise ValueError("degenerate family needs a > 0")
    z = np.asarray(z, dtype=complex)
    w = math.sqrt(3.0 * a)
    s = np.sin(w * z)
    if np.any(np.abs(s) < 1e-12):
        raise PoleProximityError(z, float(np.min(np.abs(s))))
    wp_inf = -a + 3.0 * a / s**2
    zeta_inf = a * z + w * np.cos(w * z) / s
    dl = DegenerateLattice(a)
    return wp_inf, zeta_inf, dl.omega1, dl.eta1


def sigma_degenerate(a, z):
    """Limit sigma for D = 0: sin(sqrt(3a) z)/sqrt(3a) * exp(a z^2 / 2)."""
    z = np.asarray(z, dtype=complex)
    w = math.sqrt(3.0 * a)
    return np.sin(w * z) / w * np.exp(0.5 * a * z**2)
