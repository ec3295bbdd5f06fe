"""Jacobi theta q-series and the Weierstrass-type functions built from them.

Conventions: half-periods (omega_1, omega_3) with omega_0 = 0 and
omega_2 = -omega_1 - omega_3; tau = omega_3/omega_1, nome q = exp(i*pi*tau),
R = 2*omega_1/pi, beta = 2*omega_1*omega_3/(pi*i).  theta_nu(x) is the
Whittaker-Watson theta of argument x/R and nome q.  omega_1 is held fixed
throughout, so d/dbeta = (pi*i/(2*omega_1**2)) d/dtau.

All functions are pure and scalar (complex in, complex out); instances of
:class:`LatticeParams` and :class:`LatticeConstants` are immutable, so
everything here is safe for concurrent use.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import InvalidLattice, NearSingularity, NonConvergence

_PI = math.pi

# |q| beyond this leaves too little convergence margin for double precision.
_Q_MAX = 0.7


@dataclass(frozen=True)
class LatticeParams:
    """Half-period pair plus series-truncation policy.

    `tol` is the relative size at which a series term is considered
    negligible; `nmax` caps the number of terms (NonConvergence beyond it).
    """

    omega1: float
    omega3: complex
    tol: float = 1e-15
    nmax: int = 64

    def __post_init__(self):
        if not (self.omega1 > 0):
            raise InvalidLattice(f"omega1 must be real positive, got {self.omega1}")
        if self.tau.imag <= 0:
            raise InvalidLattice(f"Im(tau) must be positive, got tau={self.tau}")
        if abs(self.q) > _Q_MAX:
            raise InvalidLattice(
                f"|q|={abs(self.q):.4f} exceeds the supported bound {_Q_MAX}"
            )
        if self.tol <= 0 or self.nmax < 4:
            raise InvalidLattice("need tol > 0 and nmax >= 4")

    @classmethod
    def from_tau(cls, tau, omega1=_PI / 2, **kw) -> "LatticeParams":
        tau = complex(tau)
        return cls(omega1=float(omega1), omega3=tau * omega1, **kw)

    @classmethod
    def from_q(cls, q, omega1=_PI / 2, **kw) -> "LatticeParams":
        """Lattice from the nome; real q in (0, 0.7] gives a rectangular lattice."""
        q = complex(q)
        if q == 0:
            raise InvalidLattice("q must be nonzero")
        tau = cmath.log(q) / (1j * _PI)
        return cls.from_tau(tau, omega1=omega1, **kw)

    @property
    def tau(self) -> complex:
        return self.omega3 / self.omega1

    @property
    def q(self) -> complex:
        return cmath.exp(1j * _PI * self.tau)

    @property
    def R(self) -> float:
        return 2.0 * self.omega1 / _PI

    @property
    def beta(self) -> complex:
        return 2.0 * self.omega1 * self.omega3 / (1j * _PI)

    @property
    def half_periods(self) -> tuple[complex, complex, complex, complex]:
        """(omega_0, omega_1, omega_2, omega_3) with omega_2 = -omega_1 - omega_3."""
        w1 = complex(self.omega1)
        w3 = complex(self.omega3)
        return (0j, w1, -w1 - w3, w3)

    @property
    def delta(self) -> float:
        """Guard radius used by samplers to stay clear of theta zeros."""
        return 0.05 * min(abs(2 * self.omega1), abs(2 * self.omega3))


@dataclass(frozen=True)
class ThetaJet:
    """theta_nu and its first three x-derivatives plus the beta-derivative."""

    f: complex
    fx: complex
    fxx: complex
    fxxx: complex
    fbeta: complex

    def dx(self, k: int) -> complex:
        return (self.f, self.fx, self.fxx, self.fxxx)[k]


def theta_jet(nu: int, x: complex, lat: LatticeParams) -> ThetaJet:
    """Evaluate theta_nu(x) and derivatives in one truncated-series pass.

    Truncation: stop once two consecutive terms fall below tol relative to
    the running magnitude of the partial sums.  Terms grow like
    exp(2n|Im x|/R) before the Gaussian q-power takes over, so keep
    |Im x|/R well below pi*Im(tau)*nmax/2 to stay in floating-point range.
    """
    if nu not in (1, 2, 3, 4):
        raise ValueError(f"theta index must be 1..4, got {nu}")
    x = complex(x)
    R = lat.R
    ipi_tau = 1j * _PI * lat.tau
    # d/dbeta = (pi*i/(2*omega1^2)) d/dtau, applied term by term below.
    beta_pref = 1j * _PI / (2.0 * lat.omega1 * lat.omega1)

    f = fx = fxx = fxxx = fb = 0j
    if nu in (3, 4):
        f = 1.0 + 0j
    run_mag = abs(f)
    small_streak = 0
    for n in range(0, lat.nmax):
        if nu in (1, 2):
            m = n + 0.5
            a = (2 * n + 1) / R
        else:
            m = float(n + 1)
            a = 2 * (n + 1) / R
        coeff = 2.0 * cmath.exp(ipi_tau * m * m)
        if nu == 1:
            coeff *= (-1) ** n
        elif nu == 4:
            coeff *= (-1) ** (n + 1)
        ang = a * x
        s, c = cmath.sin(ang), cmath.cos(ang)
        if nu == 1:
            t0, t1 = coeff * s, coeff * a * c
            t2, t3 = -coeff * a * a * s, -coeff * a * a * a * c
        else:
            t0, t1 = coeff * c, -coeff * a * s
            t2, t3 = -coeff * a * a * c, coeff * a * a * a * s
        tb = (1j * _PI * m * m) * t0
        f += t0
        fx += t1
        fxx += t2
        fxxx += t3
        fb += tb
        run_mag = max(run_mag, abs(f), abs(fx) * R, abs(fxx) * R * R)
        tmag = max(abs(t0), abs(t1) * R, abs(t2) * R * R)
        if tmag <= lat.tol * max(run_mag, 1e-300):
            small_streak += 1
            if small_streak >= 2:
                return ThetaJet(f, fx, fxx, fxxx, beta_pref * fb)
        else:
            small_streak = 0
    raise NonConvergence(
        f"theta_{nu} series not converged after {lat.nmax} terms at x={x}"
    )


def theta(nu: int, x: complex, lat: LatticeParams) -> complex:
    """theta_nu(x) for the lattice's nome, by truncated q-series."""
    return theta_jet(nu, x, lat).f


def theta_dx(nu: int, k: int, x: complex, lat: LatticeParams) -> complex:
    """k-th x-derivative of theta_nu (k = 0..3), term-by-term differentiated."""
    if not 0 <= k <= 3:
        raise ValueError(f"derivative order must be 0..3, got {k}")
    return theta_jet(nu, x, lat).dx(k)


def theta_dbeta(nu: int, x: complex, lat: LatticeParams) -> complex:
    """d theta_nu / d beta at fixed x and fixed omega_1.

    Computed from the term-by-term tau-derivative with the prefactor
    pi*i/(2*omega1^2); the heat equation theta'' = 2*theta_dbeta is a
    consequence, not an input.
    """
    return theta_jet(nu, x, lat).fbeta


@lru_cache(maxsize=256)
def _theta1_prime0(lat: LatticeParams) -> complex:
    return theta_jet(1, 0.0, lat).fx


def singular_threshold(lat: LatticeParams) -> float:
    """|theta| below this counts as sitting on a zero."""
    return 1e-8 * abs(_theta1_prime0(lat))


def _checked_jet(nu: int, x: complex, lat: LatticeParams) -> ThetaJet:
    jet = theta_jet(nu, x, lat)
    if abs(jet.f) < singular_threshold(lat):
        raise NearSingularity(f"theta_{nu}({x}) = {jet.f} is too close to a zero")
    return jet


def phi(nu: int, x: complex, lat: LatticeParams) -> complex:
    """Logarithmic derivative theta_nu'(x)/theta_nu(x)."""
    jet = _checked_jet(nu, x, lat)
    return jet.fx / jet.f


def phi_dx(nu: int, x: complex, lat: LatticeParams) -> complex:
    """d/dx of phi_nu: theta''/theta - (theta'/theta)^2."""
    jet = _checked_jet(nu, x, lat)
    r = jet.fx / jet.f
    return jet.fxx / jet.f - r * r


@lru_cache(maxsize=256)
def eta1(lat: LatticeParams) -> complex:
    """eta_1 = zeta(omega_1) = -omega_1 * theta_1'''(0) / (3 theta_1'(0))."""
    jet = theta_jet(1, 0.0, lat)
    return -lat.omega1 * jet.fxxx / (3.0 * jet.fx)


def wp(x: complex, lat: LatticeParams) -> complex:
    """Weierstrass P-function: -phi_1'(x) - eta_1/omega_1."""
    return -phi_dx(1, x, lat) - eta1(lat) / lat.omega1


def zeta_w(x: complex, lat: LatticeParams) -> complex:
    """Weierstrass zeta: phi_1(x) + eta_1 x / omega_1."""
    return phi(1, x, lat) + eta1(lat) * x / lat.omega1


@dataclass(frozen=True)
class LatticeConstants:
    """e_nu = wp(omega_nu), eta_1, and the pair table e_{nu,mu}."""

    e: tuple[complex, complex, complex]
    eta1: complex
    e_pair: tuple[tuple[int, int, complex], ...]

    def e_pair_table(self) -> dict[tuple[int, int], complex]:
        return {(nu, mu): val for nu, mu, val in self.e_pair}


@lru_cache(maxsize=256)
def lattice_constants(lat: LatticeParams) -> LatticeConstants:
    """Compute (e_1, e_2, e_3), eta_1 and the e_{nu,mu} table.

    The table realizes e_{nu,0} = e_nu, e_{2,1} = e_3, e_{3,1} = e_2,
    e_{3,2} = e_1.  Raises InvalidLattice if e_1 + e_2 + e_3 fails to vanish
    grossly (health check on the series truncation; near the |q| = 0.7 edge
    double-precision cancellation alone reaches a few times 10*tol, so the
    hard bound here is 1e4*tol while tests assert 10*tol for |q| <= 0.5).
    """
    w = lat.half_periods
    e = tuple(wp(w[nu], lat) for nu in (1, 2, 3))
    et1 = eta1(lat)
    scale = max(1.0, max(abs(v) for v in e))
    if abs(sum(e)) > 1e4 * lat.tol * scale:
        raise InvalidLattice(
            f"e_1+e_2+e_3 = {sum(e)} fails the sum rule at tol={lat.tol}"
        )
    pair = (
        (1, 0, e[0]),
        (2, 0, e[1]),
        (3, 0, e[2]),
        (2, 1, e[2]),
        (3, 1, e[1]),
        (3, 2, e[0]),
    )
    return LatticeConstants(e=e, eta1=et1, e_pair=pair)


def dist_mod_lattice(x: complex, centers, lat: LatticeParams) -> float:
    """Distance from x to the set {c + 2m*omega_1 + 2n*omega_3} over given centers.

    x is first reduced to the fundamental cell, so one ring of neighbours
    suffices.
    """
    w1, w3 = complex(2 * lat.omega1), complex(2 * lat.omega3)
    # reduce x in the (w1, w3) basis
    det = w1.real * w3.imag - w1.imag * w3.real
    a = (x.real * w3.imag - x.imag * w3.real) / det
    b = (w1.real * x.imag - w1.imag * x.real) / det
    xr = x - round(a) * w1 - round(b) * w3
    best = math.inf
    for c in centers:
        for m in (-1, 0, 1):
            for n in (-1, 0, 1):
                best = min(best, abs(xr - c - m * w1 - n * w3))
    return best


def theta_zero_centers(lat: LatticeParams) -> tuple[complex, complex, complex, complex]:
    """Representatives of the zero sets of theta_1..theta_4 modulo the period lattice."""
    w1, w3 = complex(lat.omega1), complex(lat.omega3)
    return (0j, w1, w1 + w3, w3)
