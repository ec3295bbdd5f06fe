"""Many-body Schroedinger-type operators, their named constants, and the
residual checks that certify the heat-type identities they satisfy.

An operator is stored coefficient-wise (kinetic weights, one-body wp
coefficients, pair coefficients) and applied to a ThetaProduct through its
exact logarithmic derivatives; no finite differencing is involved anywhere
in `apply`.
"""

from __future__ import annotations

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
from .elliptic import LatticeParams, eta1, lattice_constants, phi, phi_dx, theta_jet, wp
from .errors import InvalidCoupling
from .identities import ResidualReport, lattice_label, sample_points
from .products import NamedKind, ThetaProduct, build_named, build_phi0, factor_jets


@dataclass(frozen=True)
class HamiltonianSpec:
    """H = sum_J (1/m_J)(-d^2/dX_J^2) + sum_{J,nu} onebody[J,nu] wp(X_J+omega_nu)
           + sum_{J<K} pair[J,K] {wp(X_J-X_K) + wp(X_J+X_K)}."""

    masses: tuple[complex, ...]
    onebody: tuple[tuple[int, int, complex], ...]
    pair: tuple[tuple[int, int, complex], ...]
    label: str = ""

    @property
    def n_vars(self) -> int:
        return len(self.masses)

    def onebody_map(self):
        return {(j, nu): c for j, nu, c in self.onebody}

    def pair_map(self):
        return {(j, k): c for j, k, c in self.pair}


def build_generalized(coupling: CouplingData) -> HamiltonianSpec:
    """Operator of the source identity: kinetic weights 1/m_J, one-body
    coefficients g_{nu,J}(g_{nu,J}-1)/m_J, pair coefficients gamma_{J,K}.
    The kinetic sum runs over all script_n variables."""
    n = coupling.script_n
    onebody = []
    for J in range(n):
        for nu in range(4):
            g = coupling.g(nu, J)
            c = g * (g - 1.0) / coupling.masses[J]
            if c != 0:
                onebody.append((J, nu, c))
    pair = []
    for J in range(n):
        for K in range(J + 1, n):
            c = coupling.gamma(J, K)
            if c != 0:
                pair.append((J, K, c))
    return HamiltonianSpec(
        masses=coupling.masses,
        onebody=tuple(onebody),
        pair=tuple(pair),
        label=f"generalized(script_n={n})",
    )


def build_inozemtsev(n: int, g, lam) -> HamiltonianSpec:
    """The elliptic BC_n operator: unit masses, one-body g_nu(g_nu-1),
    pair coupling 2*lambda*(lambda-1)."""
    if n < 1:
        raise InvalidCoupling("need n >= 1")
    g = tuple(complex(v) for v in g)
    lam = complex(lam)
    onebody = []
    for J in range(n):
        for nu in range(4):
            c = g[nu] * (g[nu] - 1.0)
            if c != 0:
                onebody.append((J, nu, c))
    pc = 2.0 * lam * (lam - 1.0)
    pair = [(J, K, pc) for J in range(n) for K in range(J + 1, n) if pc != 0]
    return HamiltonianSpec(
        masses=(1.0 + 0j,) * n,
        onebody=tuple(onebody),
        pair=tuple(pair),
        label=f"inozemtsev(n={n})",
    )


def build_deformed(sign: int, n: int, nt: int, d, lam) -> HamiltonianSpec:
    """Deformed two-family operator H^(sign)_{n,nt}.

    Realized as the generalized build over masses (+1)^n, (-1/lambda)^nt
    with couplings sign*d; this reproduces the -lambda-scaled second block
    with couplings (1/2 -+ d_nu)/lambda, pair parameter 1/lambda, and the
    cross coefficient 2(1-lambda).
    """
    if n + nt < 1:
        raise InvalidCoupling("need n + nt >= 1")
    lam = complex(lam)
    if lam == 0:
        raise InvalidCoupling("lambda must be nonzero")
    dd = tuple(sign * complex(v) for v in d)
    cpl = CouplingData.make((1.0,) * n + (-1.0 / lam,) * nt, dd, lam)
    spec = build_generalized(cpl)
    return HamiltonianSpec(
        masses=spec.masses,
        onebody=spec.onebody,
        pair=spec.pair,
        label=f"deformed({'+' if sign > 0 else '-'},{n},{nt})",
    )


def combine(parts, cross=()) -> HamiltonianSpec:
    """Direct sum c_1 H_1 (+) c_2 H_2 (+) ... with optional cross-pair terms.

    `parts` is a sequence of (spec, multiplier); multipliers scale kinetic,
    one-body and pair coefficients alike (a kinetic weight 1/m scaled by c
    is stored as mass m/c).  `cross` holds (J, K, coeff) in the combined
    variable indexing.
    """
    masses: list[complex] = []
    onebody: list[tuple[int, int, complex]] = []
    pair: list[tuple[int, int, complex]] = []
    for spec, mult in parts:
        off = len(masses)
        mult = complex(mult)
        if mult == 0:
            raise InvalidCoupling("zero multiplier in combine")
        masses.extend(m / mult for m in spec.masses)
        onebody.extend((j + off, nu, mult * c) for j, nu, c in spec.onebody)
        pair.extend((j + off, k + off, mult * c) for j, k, c in spec.pair)
    pair.extend(cross)
    return HamiltonianSpec(
        masses=tuple(masses),
        onebody=tuple(onebody),
        pair=tuple(pair),
        label=" + ".join(s.label for s, _ in parts),
    )


def apply(spec: HamiltonianSpec, tp: ThetaProduct, X, lat: LatticeParams,
          with_scale: bool = False):
    """(H Psi)/Psi at X, exact up to series truncation.

    With with_scale=True also returns the largest additive term magnitude,
    the normalization used for relative residuals.
    """
    if spec.n_vars != tp.n_vars:
        raise InvalidCoupling(
            f"operator has {spec.n_vars} variables, product has {tp.n_vars}"
        )
    jets = factor_jets(tp, X, lat)
    w = lat.half_periods
    terms = []
    for J in range(spec.n_vars):
        v = tp.linear_exp[J]
        dv = 0j
        for f, jet in jets:
            aj = f.coeffs[J]
            if aj != 0:
                r = jet.fx / jet.f
                v += f.exponent * aj * r
                dv += f.exponent * aj * aj * (jet.fxx / jet.f - r * r)
        terms.append(-(dv + v * v) / spec.masses[J])
    for J, nu, c in spec.onebody:
        terms.append(c * wp(X[J] + w[nu], lat))
    for J, K, c in spec.pair:
        terms.append(c * (wp(X[J] - X[K], lat) + wp(X[J] + X[K], lat)))
    total = sum(terms)
    if with_scale:
        scale = max((abs(t) for t in terms), default=1.0)
        return total, max(scale, 1e-300)
    return total


class ConstantKind(Enum):
    SOURCE = "source"
    COR1 = "cor1"
    COR2 = "cor2"
    COR3 = "cor3"
    COR4 = "cor4"


@dataclass(frozen=True)
class IdentityConstants:
    """Heat coefficient A, additive constant C (== E0 for the source case),
    plus the c_0 abbreviation and |g| for reference."""

    A: complex
    C: complex
    E0: complex
    c0: complex
    g_abs: complex


def c0_constant(g, lat: LatticeParams) -> complex:
    """c_0 = (g0 g1 + g2 g3) e_1 + (g0 g2 + g1 g3) e_2 + (g0 g3 + g1 g2) e_3."""
    e = lattice_constants(lat).e
    g = tuple(complex(v) for v in g)
    return (
        (g[0] * g[1] + g[2] * g[3]) * e[0]
        + (g[0] * g[2] + g[1] * g[3]) * e[1]
        + (g[0] * g[3] + g[1] * g[2]) * e[2]
    )


def source_heat_coefficient(coupling: CouplingData) -> complex:
    """A = 4 lambda |m| + 2 |d|."""
    return 4.0 * coupling.lam * coupling.m_abs + 2.0 * coupling.d_abs


def source_energy(coupling: CouplingData, lat: LatticeParams) -> complex:
    """E_0 in its simplified form."""
    lam, d = coupling.lam, coupling.d
    m_abs, m2_abs, d_abs = coupling.m_abs, coupling.m2_abs, coupling.d_abs
    n = coupling.script_n
    ratio = eta1(lat) / lat.omega1
    e = lattice_constants(lat).e
    esum = (
        (d[0] * d[1] + d[2] * d[3]) * e[0]
        + (d[0] * d[2] + d[1] * d[3]) * e[1]
        + (d[0] * d[3] + d[1] * d[2]) * e[2]
    )
    return (2.0 * lam * m_abs + d_abs) * (
        n - lam * (m_abs * m_abs + m2_abs) - m_abs * d_abs
    ) * ratio + m_abs * esum


def source_energy_unsimplified(coupling: CouplingData, lat: LatticeParams) -> complex:
    """E_0 as assembled term by term from the one-, two- and three-body
    reductions, kept as an independent cross-check on `source_energy`."""
    lam, d, masses = coupling.lam, coupling.d, coupling.masses
    m_abs, d_abs = coupling.m_abs, coupling.d_abs
    ratio = eta1(lat) / lat.omega1
    lc = lattice_constants(lat)
    table = lc.e_pair_table()
    eta_part = 0j
    for J, mj in enumerate(masses):
        eta_part += (d_abs + 2 * mj * lam) * (mj * d_abs + 2 * mj * mj * lam - 1.0)
        eta_part += 3.0 * lam * (m_abs - mj) * mj * (d_abs + 2 * mj * lam)
    for J in range(len(masses)):
        for K in range(J + 1, len(masses)):
            mj, mk = masses[J], masses[K]
            eta_part += 2.0 * coupling.gamma(J, K)
            eta_part += 4.0 * mj * mk * (m_abs - mj - mk) * lam * lam
    epair = sum(
        d[nu] * d[mu] * table[(nu, mu)]
        for mu in range(4)
        for nu in range(mu + 1, 4)
    )
    return -eta_part * ratio + m_abs * epair


def constants(which: ConstantKind, lat: LatticeParams, **params) -> IdentityConstants:
    """Named constants (A, C) of the source identity and its special cases.

    SOURCE: coupling=CouplingData
    COR1:   n, g, lam
    COR2:   n, m, g, lam
    COR3:   n, m, g, lam   (lam != 0)
    COR4:   n, nt, m, mt, d, lam   (lam != 0)
    """
    ratio = eta1(lat) / lat.omega1
    if which is ConstantKind.SOURCE:
        cpl: CouplingData = params["coupling"]
        A = source_heat_coefficient(cpl)
        e0 = source_energy(cpl, lat)
        return IdentityConstants(A=A, C=e0, E0=e0,
                                 c0=c0_constant([0, 0, 0, 0], lat),
                                 g_abs=cpl.d_abs + 2 * cpl.lam)
    if which is ConstantKind.COR1:
        n, g, lam = params["n"], params["g"], complex(params["lam"])
        g_abs = sum(complex(v) for v in g)
        c0 = c0_constant(g, lat)
        A = 4.0 * lam * (n - 1) + 2.0 * g_abs
        C = (A / 2.0) * n * (1.0 - lam * (n - 1) - g_abs) * ratio + n * c0
        return IdentityConstants(A=A, C=C, E0=C, c0=c0, g_abs=g_abs)
    if which is ConstantKind.COR2:
        n, m = params["n"], params["m"]
        g, lam = params["g"], complex(params["lam"])
        g_abs = sum(complex(v) for v in g)
        c0 = c0_constant(g, lat)
        A = 4.0 * lam * (n - m - 1) + 2.0 * g_abs
        C = (A / 2.0) * (
            (n + m) * (1.0 - lam) - (n - m) * ((n - m - 2) * lam + g_abs)
        ) * ratio + (n - m) * c0
        return IdentityConstants(A=A, C=C, E0=C, c0=c0, g_abs=g_abs)
    if which is ConstantKind.COR3:
        n, m = params["n"], params["m"]
        g, lam = params["g"], complex(params["lam"])
        if lam == 0:
            raise InvalidCoupling("lambda must be nonzero")
        g_abs = sum(complex(v) for v in g)
        c0 = c0_constant(g, lat)
        A = 4.0 * lam * (n - 1) + 4.0 * m + 2.0 * g_abs
        C = (A / 2.0) * (
            n + m
            - (n + m / lam) * ((n - 2) * lam + m + g_abs)
            - n * lam
            - m / lam
        ) * ratio + (n + m / lam) * c0
        return IdentityConstants(A=A, C=C, E0=C, c0=c0, g_abs=g_abs)
    if which is ConstantKind.COR4:
        n, nt, m, mt = params["n"], params["nt"], params["m"], params["mt"]
        d, lam = params["d"], complex(params["lam"])
        if lam == 0:
            raise InvalidCoupling("lambda must be nonzero")
        g = tuple(complex(v) + lam / 2.0 for v in d)
        g_abs = sum(g)
        c0 = c0_constant(g, lat)
        m_abs = n - m - (nt - mt) / lam
        m2_abs = n + m + (nt + mt) / lam ** 2
        A = 4.0 * lam * (n - m - 1) - 4.0 * (nt - mt) + 2.0 * g_abs
        C = (A / 2.0) * (
            n + nt + m + mt - m_abs * ((m_abs - 2) * lam + g_abs) - m2_abs * lam
        ) * ratio + m_abs * c0
        return IdentityConstants(A=A, C=C, E0=C, c0=c0, g_abs=g_abs)
    raise ValueError(f"unknown constant kind {which}")


def residual_source(coupling: CouplingData, X, lat: LatticeParams,
                    relative: bool = False):
    """Residual of the master heat-type identity at one point:
    (4 lambda |m| + 2 |d|) (dPhi/dbeta)/Phi + (H Phi)/Phi - E_0."""
    tp = build_phi0(coupling)
    spec = build_generalized(coupling)
    A = source_heat_coefficient(coupling)
    e0 = source_energy(coupling, lat)
    hval, scale = apply(spec, tp, X, lat, with_scale=True)
    bterm = A * _beta_log_from_jets(tp, X, lat)
    res = bterm + hval - e0
    scale = max(scale, abs(bterm), abs(e0))
    if relative:
        return res / scale
    return res


def _beta_log_from_jets(tp: ThetaProduct, X, lat: LatticeParams) -> complex:
    total = 0j
    for f, jet in factor_jets(tp, X, lat):
        total += f.exponent * (jet.fbeta / jet.f)
    return total


def w_assembly(coupling: CouplingData, X, lat: LatticeParams) -> complex:
    """The full interaction functional assembled literally from its one-,
    two- and three-body pieces (the independent cross-check route for
    `apply`'s logarithmic-derivative assembly).

    Equals sum_J (1/m_J) (d^2 Phi_0/dX_J^2)/Phi_0 at every admissible point.
    """
    lam, masses, n = coupling.lam, coupling.masses, coupling.script_n
    phiv = {}
    phid = {}
    for J in range(n):
        for nu in range(4):
            phiv[(nu, J)] = phi(nu + 1, X[J], lat)
            phid[(nu, J)] = phi_dx(nu + 1, X[J], lat)
    p1 = {}
    p1d = {}
    for J in range(n):
        for K in range(n):
            if K != J:
                for r in (1, -1):
                    arg = X[J] - r * X[K]
                    p1[(J, K, r)] = phi(1, arg, lat)
                    p1d[(J, K, r)] = phi_dx(1, arg, lat)

    w1 = 0j
    for J in range(n):
        acc = 0j
        for nu in range(4):
            g = coupling.g(nu, J)
            acc += g * phid[(nu, J)] + g * g * phiv[(nu, J)] ** 2
        for nu in range(4):
            for mu in range(nu + 1, 4):
                acc += 2.0 * coupling.g(nu, J) * coupling.g(mu, J) \
                    * phiv[(nu, J)] * phiv[(mu, J)]
        w1 += acc / masses[J]

    w2 = 0j
    for J in range(n):
        for K in range(n):
            if K == J:
                continue
            mj, mk = masses[J], masses[K]
            for r in (1, -1):
                w2 += mk * lam * p1d[(J, K, r)]
                w2 += mj * mk * mk * lam * lam * p1[(J, K, r)] ** 2
                for nu in range(4):
                    w2 += 2.0 * coupling.g(nu, J) * mk * lam \
                        * phiv[(nu, J)] * p1[(J, K, r)]
            w2 += 2.0 * mj * mk * mk * lam * lam * p1[(J, K, 1)] * p1[(J, K, -1)]

    w3 = 0j
    for J in range(n):
        for K in range(n):
            if K == J:
                continue
            for L in range(n):
                if L in (J, K):
                    continue
                mprod = masses[J] * masses[K] * masses[L] * lam * lam
                for r in (1, -1):
                    for s in (1, -1):
                        w3 += mprod * p1[(J, K, r)] * p1[(J, L, s)]
    return w1 + w2 + w3


def residual_corollary(k: int, lat: LatticeParams, points, **params) -> ResidualReport:
    """Residual of corollary k's identity at the given points, assembled
    through the corollary's own packaging (named product, per-family
    operators, per-corollary constants)."""
    builders = {
        1: _corollary1_parts,
        2: _corollary2_parts,
        3: _corollary3_parts,
        4: _corollary4_parts,
    }
    if k not in builders:
        raise ValueError(f"corollary index must be 1..4, got {k}")
    tp, spec, cst = builders[k](lat, **params)
    tol = params.get("tol", 1e-9)
    max_abs = max_rel = 0.0
    worst: tuple[complex, ...] = ()
    for X in points:
        hval, scale = apply(spec, tp, X, lat, with_scale=True)
        bterm = cst.A * _beta_log_from_jets(tp, X, lat)
        res = bterm + hval - cst.C
        scale = max(scale, abs(bterm), abs(cst.C))
        rel = abs(res) / scale
        if rel >= max_rel:
            max_rel, max_abs, worst = rel, abs(res), tuple(X)
    return ResidualReport(
        identity=f"corollary{k}",
        lattice=lattice_label(lat),
        n_points=len(points),
        max_abs=max_abs,
        max_rel=max_rel,
        worst_point=worst,
        passed=max_rel < tol,
        tol_used=tol,
    )


def _corollary1_parts(lat, *, n, g, lam, **_):
    tp = build_named(NamedKind.PSI_N, n=n, g=g, lam=lam)
    spec = build_inozemtsev(n, g, lam)
    cst = constants(ConstantKind.COR1, lat, n=n, g=g, lam=lam)
    return tp, spec, cst


def _corollary2_parts(lat, *, n, m, g, lam, **_):
    lam = complex(lam)
    gt = tuple(lam - complex(v) for v in g)
    tp = build_named(NamedKind.PSI_NM, n=n, m=m, g=g, lam=lam)
    parts = []
    if n:
        parts.append((build_inozemtsev(n, g, lam), 1.0))
    if m:
        parts.append((build_inozemtsev(m, gt, lam), -1.0))
    spec = combine(parts)
    cst = constants(ConstantKind.COR2, lat, n=n, m=m, g=g, lam=lam)
    return tp, spec, cst


def _corollary3_parts(lat, *, n, m, g, lam, **_):
    lam = complex(lam)
    if lam == 0:
        raise InvalidCoupling("lambda must be nonzero")
    gtp = tuple((2.0 * complex(v) + 1.0 - lam) / (2.0 * lam) for v in g)
    tp = build_named(NamedKind.PSI_NM_TILDE, n=n, m=m, g=g, lam=lam)
    parts = []
    if n:
        parts.append((build_inozemtsev(n, g, lam), 1.0))
    if m:
        parts.append((build_inozemtsev(m, gtp, 1.0 / lam), lam))
    spec = combine(parts)
    cst = constants(ConstantKind.COR3, lat, n=n, m=m, g=g, lam=lam)
    return tp, spec, cst


def _corollary4_parts(lat, *, n, nt, m, mt, d, lam, **_):
    lam = complex(lam)
    if lam == 0:
        raise InvalidCoupling("lambda must be nonzero")
    tp = build_named(NamedKind.PSI_KERNEL4, n=n, nt=nt, m=m, mt=mt, d=d, lam=lam)
    parts = []
    if n + nt:
        parts.append((build_deformed(+1, n, nt, d, lam), 1.0))
    if m + mt:
        parts.append((build_deformed(-1, m, mt, d, lam), -1.0))
    spec = combine(parts)
    cst = constants(ConstantKind.COR4, lat, n=n, nt=nt, m=m, mt=mt, d=d, lam=lam)
    return tp, spec, cst


def corollary_coupling(k: int, **params) -> CouplingData:
    """The mass table that reduces corollary k to the source identity."""
    if k == 1:
        return coupling_cor1(params["n"], params["g"], params["lam"])
    if k == 2:
        return coupling_cor2(params["n"], params["m"], params["g"], params["lam"])
    if k == 3:
        return coupling_cor3(params["n"], params["m"], params["g"], params["lam"])
    if k == 4:
        return coupling_cor4(params["n"], params["nt"], params["m"], params["mt"],
                             params["d"], params["lam"])
    raise ValueError(f"corollary index must be 1..4, got {k}")


# -- symmetry transforms of the four-family kernel identity ------------------

@dataclass(frozen=True)
class KernelParams:
    """Parameter tuple (N, Ntilde, M, Mtilde, g_nu, lambda) of the
    four-family kernel identity."""

    n: int
    nt: int
    m: int
    mt: int
    g: tuple[complex, complex, complex, complex]
    lam: complex

    def d(self):
        return tuple(v - self.lam / 2.0 for v in self.g)

    def constants(self, lat: LatticeParams) -> IdentityConstants:
        return constants(ConstantKind.COR4, lat, n=self.n, nt=self.nt,
                         m=self.m, mt=self.mt, d=self.d(), lam=self.lam)


def sym_swap(p: KernelParams) -> KernelParams:
    """(N,Nt,M,Mt,g,lambda) -> (M,Mt,N,Nt,lambda-g,lambda)."""
    return KernelParams(p.m, p.mt, p.n, p.nt,
                        tuple(p.lam - v for v in p.g), p.lam)


def sym_dual(p: KernelParams) -> KernelParams:
    """(N,Nt,M,Mt,g,lambda) -> (Nt,N,Mt,M,(lambda+1-2g)/(2 lambda),1/lambda)."""
    if p.lam == 0:
        raise InvalidCoupling("lambda must be nonzero")
    gp = tuple((p.lam + 1.0 - 2.0 * v) / (2.0 * p.lam) for v in p.g)
    return KernelParams(p.nt, p.n, p.mt, p.m, gp, 1.0 / p.lam)


def check_symmetries(p: KernelParams, lat: LatticeParams) -> dict:
    """Sign/scale laws of A and C under the two parameter symmetries, and
    the involution property of both maps.  All checks are pure constants
    algebra; entries are relative defects."""
    base = p.constants(lat)
    scale_a = max(1.0, abs(base.A))
    scale_c = max(1.0, abs(base.C))

    s1 = sym_swap(p).constants(lat)
    s2 = sym_dual(p).constants(lat)
    s1_inv = sym_swap(sym_swap(p))
    s2_inv = sym_dual(sym_dual(p))

    def tuple_defect(a: KernelParams, b: KernelParams) -> float:
        dg = max(abs(x - y) for x, y in zip(a.g, b.g))
        ints = (a.n, a.nt, a.m, a.mt) == (b.n, b.nt, b.m, b.mt)
        return max(dg, abs(a.lam - b.lam)) + (0.0 if ints else 1.0)

    return {
        "swap_A": abs(s1.A + base.A) / scale_a,
        "swap_C": abs(s1.C + base.C) / scale_c,
        "dual_A": abs(s2.A + base.A / p.lam) / scale_a,
        "dual_C": abs(s2.C + base.C / p.lam) / scale_c,
        "swap_involution": tuple_defect(s1_inv, p),
        "dual_involution": tuple_defect(s2_inv, p),
    }


def admissible_points(lat: LatticeParams, n_points: int, n_vars: int, seed: int):
    """Random points for operator residuals: clear of all theta zero sets
    and of pair coincidences."""
    return sample_points(lat, n_points, n_vars, seed)
