"""Coupling data for the generalized many-body operator and the mass tables
that specialize it to the named kernel-function cases."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidCoupling


@dataclass(frozen=True)
class CouplingData:
    """Particle count, masses m_J, couplings d_nu and lambda.

    Derived scalars: |m| = sum m_J, |m^2| = sum m_J^2, |d| = sum d_nu,
    exponents g_{nu,J} = m_J d_nu + (lambda/2) m_J^2 and pair couplings
    gamma_{J,K} = lambda (m_J + m_K)(lambda m_J m_K - 1).
    """

    script_n: int
    masses: tuple[complex, ...]
    d: tuple[complex, complex, complex, complex]
    lam: complex

    def __post_init__(self):
        if self.script_n < 1:
            raise InvalidCoupling(f"need at least one variable, got {self.script_n}")
        if len(self.masses) != self.script_n:
            raise InvalidCoupling(
                f"{self.script_n} variables but {len(self.masses)} masses"
            )
        if len(self.d) != 4:
            raise InvalidCoupling("need exactly four d_nu couplings")
        if any(m == 0 for m in self.masses):
            raise InvalidCoupling("all masses must be nonzero")

    @classmethod
    def make(cls, masses, d, lam) -> "CouplingData":
        masses = tuple(complex(m) for m in masses)
        return cls(
            script_n=len(masses),
            masses=masses,
            d=tuple(complex(v) for v in d),
            lam=complex(lam),
        )

    @property
    def m_abs(self) -> complex:
        return sum(self.masses)

    @property
    def m2_abs(self) -> complex:
        return sum(m * m for m in self.masses)

    @property
    def d_abs(self) -> complex:
        return sum(self.d)

    def g(self, nu: int, J: int) -> complex:
        m = self.masses[J]
        return m * self.d[nu] + 0.5 * self.lam * m * m

    def gamma(self, J: int, K: int) -> complex:
        mj, mk = self.masses[J], self.masses[K]
        return self.lam * (mj + mk) * (self.lam * mj * mk - 1.0)


def _require_nonzero_lambda(lam):
    if lam == 0:
        raise InvalidCoupling("lambda must be nonzero")


def coupling_cor1(n: int, g, lam) -> CouplingData:
    """N unit masses, d_nu = g_nu - lambda/2."""
    lam = complex(lam)
    d = tuple(complex(gv) - lam / 2 for gv in g)
    return CouplingData.make((1.0,) * n, d, lam)


def coupling_cor2(n: int, m: int, g, lam) -> CouplingData:
    """Masses (+1)^N, (-1)^M, d_nu = g_nu - lambda/2."""
    lam = complex(lam)
    d = tuple(complex(gv) - lam / 2 for gv in g)
    return CouplingData.make((1.0,) * n + (-1.0,) * m, d, lam)


def coupling_cor3(n: int, m: int, g, lam) -> CouplingData:
    """Masses (+1)^N, (1/lambda)^M, d_nu = g_nu - lambda/2."""
    lam = complex(lam)
    _require_nonzero_lambda(lam)
    d = tuple(complex(gv) - lam / 2 for gv in g)
    return CouplingData.make((1.0,) * n + (1.0 / lam,) * m, d, lam)


def coupling_pm(sign: int, n: int, nt: int, d, lam) -> CouplingData:
    """Mass table of the deformed pair: (+1)^N, (-1/lambda)^Ntilde for the
    plus family, (-1)^N, (+1/lambda)^Ntilde for the minus family."""
    lam = complex(lam)
    _require_nonzero_lambda(lam)
    if sign not in (1, -1):
        raise InvalidCoupling("sign must be +1 or -1")
    s = float(sign)
    return CouplingData.make(
        (s * 1.0,) * n + (-s / lam,) * nt, tuple(complex(v) for v in d), lam
    )


def coupling_cor4(n: int, nt: int, m: int, mt: int, d, lam) -> CouplingData:
    """Masses (+1)^N, (-1/lambda)^Ntilde, (-1)^M, (+1/lambda)^Mtilde."""
    lam = complex(lam)
    _require_nonzero_lambda(lam)
    if n + nt + m + mt < 1:
        raise InvalidCoupling("need at least one variable in total")
    masses = (1.0,) * n + (-1.0 / lam,) * nt + (-1.0,) * m + (1.0 / lam,) * mt
    return CouplingData.make(masses, tuple(complex(v) for v in d), lam)
