"""Products of theta powers times a linear exponential, with exact
logarithmic-derivative algebra.

Every wavefunction in this package is such a product.  Powers with
noninteger exponents are only ever needed through their logarithmic data
(sums of exponent * phi_nu terms), which is branch-independent; `value`
uses per-factor principal logarithms and is meant for ratio-style oracles
and for branch-tracked path evaluation in `eigen`.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from enum import Enum

from .coupling import (
    CouplingData,
    coupling_cor1,
    coupling_cor2,
    coupling_cor3,
    coupling_cor4,
    coupling_pm,
)
from .elliptic import LatticeParams, singular_threshold, theta_jet
from .errors import NearSingularity


@dataclass(frozen=True)
class ThetaFactor:
    """One factor theta_nu(sum_j coeffs[j] X_j + offset)^exponent."""

    nu: int
    coeffs: tuple[complex, ...]
    offset: complex
    exponent: complex

    def argument(self, X) -> complex:
        return sum(c * x for c, x in zip(self.coeffs, X) if c != 0) + self.offset


@dataclass(frozen=True)
class ThetaProduct:
    """Product of ThetaFactors times exp(sum_J linear_exp[J] X_J)."""

    factors: tuple[ThetaFactor, ...]
    linear_exp: tuple[complex, ...]
    n_vars: int

    def __post_init__(self):
        if len(self.linear_exp) != self.n_vars:
            raise ValueError("linear_exp length must equal n_vars")
        for f in self.factors:
            if len(f.coeffs) != self.n_vars:
                raise ValueError("factor coefficient length must equal n_vars")

    def factor_multiset(self):
        """Canonical multiset of factors, for structural-equality checks."""
        items = [
            (f.nu, f.coeffs, complex(f.offset), complex(f.exponent))
            for f in self.factors
        ]
        return sorted(items, key=repr)


def constant_product(n_vars: int) -> ThetaProduct:
    return ThetaProduct(factors=(), linear_exp=(0j,) * n_vars, n_vars=n_vars)


def _unit(n_vars, j, scale=1.0):
    return tuple((complex(scale) if i == j else 0j) for i in range(n_vars))


def factor_jets(tp: ThetaProduct, X, lat: LatticeParams):
    """Evaluate every factor's theta jet at its argument; NearSingularity if
    any factor sits on a theta zero."""
    thr = singular_threshold(lat)
    out = []
    for f in tp.factors:
        arg = f.argument(X)
        jet = theta_jet(f.nu, arg, lat)
        if abs(jet.f) < thr:
            raise NearSingularity(
                f"theta_{f.nu} factor argument {arg} is on a zero"
            )
        out.append((f, jet))
    return out


def grad_log(tp: ThetaProduct, X, J: int, lat: LatticeParams) -> complex:
    """(d/dX_J Psi)/Psi = sum p a_J phi_nu(arg) + kappa_J."""
    total = tp.linear_exp[J]
    for f, jet in factor_jets(tp, X, lat):
        aj = f.coeffs[J]
        if aj != 0:
            total += f.exponent * aj * (jet.fx / jet.f)
    return total


def hess_log_diag(tp: ThetaProduct, X, J: int, lat: LatticeParams) -> complex:
    """(d^2/dX_J^2 Psi)/Psi = dV_J/dX_J + V_J^2."""
    v = tp.linear_exp[J]
    dv = 0j
    for f, jet in factor_jets(tp, X, lat):
        aj = f.coeffs[J]
        if aj != 0:
            r = jet.fx / jet.f
            v += f.exponent * aj * r
            dv += f.exponent * aj * aj * (jet.fxx / jet.f - r * r)
    return dv + v * v


def beta_log(tp: ThetaProduct, X, lat: LatticeParams) -> complex:
    """(d Psi/d beta)/Psi at fixed X and fixed omega_1."""
    total = 0j
    for f, jet in factor_jets(tp, X, lat):
        total += f.exponent * (jet.fbeta / jet.f)
    return total


def log_value(tp: ThetaProduct, X, lat: LatticeParams) -> complex:
    """Per-factor principal log of the product (branch chosen per factor)."""
    total = sum(k * x for k, x in zip(tp.linear_exp, X))
    for f, jet in factor_jets(tp, X, lat):
        total += f.exponent * cmath.log(jet.f)
    return total


def value(tp: ThetaProduct, X, lat: LatticeParams) -> complex:
    return cmath.exp(log_value(tp, X, lat))


def build_phi0(coupling: CouplingData) -> ThetaProduct:
    """Ground-state product: one-body factors theta_{nu+1}(X_J)^{g_{nu,J}}
    and pair factors theta_1(X_J -+ X_K)^{m_J m_K lambda}.

    Zero-exponent factors are dropped, so e.g. lambda = 0 leaves a pure
    one-body product.
    """
    n = coupling.script_n
    factors = []
    for J in range(n):
        for nu in range(4):
            p = coupling.g(nu, J)
            if p != 0:
                factors.append(
                    ThetaFactor(nu + 1, _unit(n, J), 0j, p)
                )
    for J in range(n):
        for K in range(J + 1, n):
            p = coupling.masses[J] * coupling.masses[K] * coupling.lam
            if p != 0:
                cm = tuple(
                    (1 + 0j) if i == J else (-1 + 0j) if i == K else 0j
                    for i in range(n)
                )
                cp = tuple(
                    (1 + 0j) if i in (J, K) else 0j for i in range(n)
                )
                factors.append(ThetaFactor(1, cm, 0j, p))
                factors.append(ThetaFactor(1, cp, 0j, p))
    return ThetaProduct(factors=tuple(factors), linear_exp=(0j,) * n, n_vars=n)


class NamedKind(Enum):
    PSI_N = "psi_n"                    # one-family product
    PSI_NM = "psi_nm"                  # two families, opposite unit masses
    PSI_NM_TILDE = "psi_nm_tilde"      # two families, masses 1 and 1/lambda
    PSI_PM = "psi_pm"                  # deformed pair (x, xtilde), sign +/-
    PSI_KERNEL4 = "psi_kernel4"        # four families (x, xtilde, y, ytilde)


def build_named(kind: NamedKind, **params) -> ThetaProduct:
    """Named wavefunction builders, each the specialization of build_phi0
    under its mass table.

    PSI_N:        n, g, lam
    PSI_NM:       n, m, g, lam
    PSI_NM_TILDE: n, m, g, lam            (lam != 0)
    PSI_PM:       sign, n, nt, d, lam     (lam != 0)
    PSI_KERNEL4:  n, nt, m, mt, d, lam    (lam != 0)
    """
    table = {
        NamedKind.PSI_N: coupling_cor1,
        NamedKind.PSI_NM: coupling_cor2,
        NamedKind.PSI_NM_TILDE: coupling_cor3,
        NamedKind.PSI_PM: coupling_pm,
        NamedKind.PSI_KERNEL4: coupling_cor4,
    }
    return build_phi0(table[kind](**params))
