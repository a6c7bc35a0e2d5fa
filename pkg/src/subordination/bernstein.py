"""Levy density t -> 1/(t psi(phi^-1(t))) and its Bernstein function.

The composite g(t) = psi(phi^-1(t)) is an exact power of t between the
images of the kinks of phi and psi.  Near t = 0 it is a power with exponent
``rho0``, near infinity with exponent ``rho_inf``.  Integrals against the
Levy density are therefore split into

* a head (0, t0] and a tail [T, inf) inside the pure-power regimes, done in
  closed form, and
* a middle part done by adaptive quadrature in log t with breakpoints at
  every kink.

Finiteness is decided from the exponents alone, never from numerics.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import factorial

import numpy as np

from .errors import DivergenceError, DomainError
from .quadrature import QuadResult, integrate_log, power_head, power_tail
from .scales import ScaleSpec

# the head series uses lam * t0 <= HEAD_X; the tail needs lam * T >= TAIL_X
HEAD_X = 0.1
TAIL_X = 40.0
_SERIES_TERMS = 30


@dataclass(frozen=True)
class LevySpec:
    phi: ScaleSpec
    psi: ScaleSpec

    @cached_property
    def rho0(self):
        """Exponent of psi(phi^-1(t)) as t -> 0."""
        return self.psi.exponent_at_zero / self.phi.exponent_at_zero

    @cached_property
    def rho_inf(self):
        return self.psi.exponent_at_infinity / self.phi.exponent_at_infinity

    @cached_property
    def t_kinks(self):
        """Times where the local exponent of psi(phi^-1(t)) may change."""
        radii = sorted(set(self.phi.kinks) | set(self.psi.kinks))
        return tuple(float(self.phi(k)) for k in radii)

    @property
    def first_kink(self):
        return self.t_kinks[0] if self.t_kinks else 1.0

    @property
    def last_kink(self):
        return self.t_kinks[-1] if self.t_kinks else 1.0

    def composite(self, t):
        """psi(phi^-1(t))."""
        return self.psi(self.phi.inverse(t))

    def density(self, t):
        return levy_density(self, t)

    def segment_exponents(self):
        """Local exponents of psi(phi^-1(t)) on each segment between kinks,
        from t -> 0 to t -> inf."""
        ks = self.t_kinks
        if not ks:
            return [self.rho0]
        probes = [ks[0] / 2.0] + [np.sqrt(a * b) for a, b in zip(ks[:-1], ks[1:])] + [ks[-1] * 2.0]
        out = []
        for t in probes:
            r = self.phi.inverse(t)
            out.append(self.psi.local_exponent(r) / self.phi.local_exponent(r))
        return out

    def moment(self, k, lo=0.0, hi=np.inf, rel_tol=1e-11):
        """Integral of t^k mu(t) over [lo, hi]; lo may be 0 and hi infinite."""
        if lo < 0 or hi < lo:
            raise DomainError("need 0 <= lo <= hi")
        if lo == hi:
            return QuadResult(0.0, 0.0, True, 0)
        head_exp = k - 1.0 - self.rho0
        tail_exp = k - 1.0 - self.rho_inf
        if lo == 0 and not head_exp > -1:
            raise DivergenceError(f"t^{k} mu(t) is not integrable at 0 (exponent {head_exp:g})",
                                  {"rho0": self.rho0, "k": k})
        if np.isinf(hi) and not tail_exp < -1:
            raise DivergenceError(f"t^{k} mu(t) is not integrable at infinity (exponent {tail_exp:g})",
                                  {"rho_inf": self.rho_inf, "k": k})

        def h(t):
            return t ** k * levy_density(self, t)

        total = QuadResult(0.0, 0.0, True, 0)
        a = lo
        if lo == 0:
            t0 = min(0.5 * self.first_kink, hi)
            total += power_head(float(h(t0)), t0, head_exp)
            a = t0
        b = hi
        if np.isinf(hi):
            b = max(2.0 * self.last_kink, a)
            total += power_tail(float(h(b)), b, tail_exp)
        if b > a:
            total += integrate_log(h, a, b, self.t_kinks, rel_tol=rel_tol)
        return total

    def to_dict(self):
        return {"phi": self.phi.to_dict(), "psi": self.psi.to_dict()}

    @classmethod
    def from_dict(cls, d):
        return cls(ScaleSpec.from_dict(d["phi"]), ScaleSpec.from_dict(d["psi"]))


def levy_density(spec, t):
    """mu(t) = 1 / (t psi(phi^-1(t))).

    This includes the 1/t factor of the Bernstein integrand, so
    phi_bar(lam) = integral of (1 - exp(-lam t)) mu(t) dt.
    """
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise DomainError("t must be positive")
    out = 1.0 / (t * spec.composite(t))
    return float(out) if np.ndim(out) == 0 else out


@dataclass
class IntegrabilityCertificate:
    finite: bool
    rho0: float
    rho_inf: float
    boundary: bool = False
    reason: str = ""
    partial_head: list = field(default_factory=list)
    partial_tail: list = field(default_factory=list)

    @property
    def status(self):
        return "finite" if self.finite else "infinite"

    def to_dict(self):
        return {"status": self.status, "boundary": self.boundary, "rho0": self.rho0,
                "rho_inf": self.rho_inf, "reason": self.reason,
                "partial_head": self.partial_head, "partial_tail": self.partial_tail}


def check_levy_integrability(spec):
    """Decide whether the integral of (1 ^ t) mu(t) is finite.

    Near 0 the integrand t mu(t) behaves like t^-rho0 (needs rho0 < 1); near
    infinity mu(t) behaves like t^(-1-rho_inf) (needs rho_inf > 0).  The
    exact boundary rho0 = 1 is a logarithmic divergence and is reported as
    infinite with ``boundary`` set.  Partial integrals over shrinking and
    growing ranges are attached for inspection.
    """
    rho0, rho_inf = spec.rho0, spec.rho_inf
    head_ok = rho0 < 1.0
    tail_ok = rho_inf > 0.0
    boundary = rho0 == 1.0
    reasons = []
    if not head_ok:
        reasons.append(f"t mu(t) ~ t^-{rho0:g} near 0 is not integrable")
    if not tail_ok:
        reasons.append(f"mu(t) ~ t^-(1+{rho_inf:g}) near infinity is not integrable")
    split = min(1.0, 0.5 * spec.first_kink)
    heads = []
    for eps in (1e-2, 1e-4, 1e-6, 1e-8, 1e-10):
        lo = eps * split
        heads.append([lo, spec.moment(1, lo, split).value])
    far = max(1.0, 2.0 * spec.last_kink)
    tails = [[far * R, spec.moment(0, far, far * R).value] for R in (1e2, 1e4, 1e6, 1e8, 1e10)]
    return IntegrabilityCertificate(head_ok and tail_ok, rho0, rho_inf, boundary,
                                    "; ".join(reasons) or "exponent test passed", heads, tails)


def _head_series(x, rho):
    # sum_{k>=1} (-1)^(k+1) x^k / (k! (k - rho)): integral of (1 - e^-x) x^(-1-rho)
    # over (0, x] scaled by x^rho
    s = 0.0
    for k in range(1, _SERIES_TERMS):
        s += (-1) ** (k + 1) * x ** k / (factorial(k) * (k - rho))
    return s


@dataclass(frozen=True)
class BernsteinFunction:
    """phi_bar(lam) = integral of (1 - exp(-lam t)) mu(t) dt over (0, inf)."""

    levy: LevySpec
    abs_tol: float = 0.0
    rel_tol: float = 1e-11
    max_panels: int = 20000

    def __post_init__(self):
        cert = check_levy_integrability(self.levy)
        if not cert.finite:
            raise DivergenceError("Levy measure is not integrable against 1 ^ t", cert)

    def __call__(self, lam):
        return bernstein_eval(self, lam)

    def integrate(self, lam, lo=0.0, hi=np.inf):
        """Integral of (1 - exp(-lam t)) mu(t) over [lo, hi], as a QuadResult."""
        lam = float(lam)
        if lam < 0:
            raise DomainError("lambda must be nonnegative")
        if lam == 0 or lo == hi:
            return QuadResult(0.0, 0.0, True, 0)
        lev = self.levy

        def h(t):
            return -np.expm1(-lam * t) * levy_density(lev, t)

        total = QuadResult(0.0, 0.0, True, 0)
        a = lo
        if lo == 0:
            t0 = min(0.5 * lev.first_kink, HEAD_X / lam, hi)
            total += _head_series(lam * t0, lev.rho0) / float(lev.composite(t0))
            a = t0
        b = hi
        if np.isinf(hi):
            b = max(2.0 * lev.last_kink, TAIL_X / lam, a)
            # 1 - exp(-lam t) = 1 to within exp(-TAIL_X) beyond b
            total += power_tail(float(levy_density(lev, b)), b, -1.0 - lev.rho_inf)
        if b > a:
            splits = (*lev.t_kinks, 1.0 / lam)
            total += integrate_log(h, a, b, splits, rel_tol=self.rel_tol, abs_tol=self.abs_tol,
                                   max_panels=self.max_panels)
        return total

    def truncated(self, lam, r):
        """phi^W(lam; r): the Bernstein integral restricted to (0, phi(r))."""
        if not r > 0:
            raise DomainError("r must be positive")
        return self.integrate(lam, 0.0, float(self.levy.phi(r)))


def bernstein_eval(f, lam):
    if not lam > 0:
        raise DomainError("lambda must be positive")
    return f.integrate(lam).value


def truncated_bernstein(f, lam, r):
    if not lam > 0:
        raise DomainError("lambda must be positive")
    return f.truncated(lam, r).value


def power_bernstein_closed_form(lam, rho):
    """phi_bar for mu(t) = t^(-1-rho): Gamma(1-rho) lam^rho / rho."""
    from scipy.special import gamma
    return gamma(1.0 - rho) * np.power(lam, rho) / rho


def proof_inequalities(f, r):
    """Check the two lower bounds for phi_bar at lam = 1/phi(r).

    (i)  phi_bar(lam) >= e^-1 lam * integral_0^{1/lam} dt / psi(phi^-1(t))
    (ii) phi_bar(lam) >= (1 - e^-1) * integral_{phi(r)}^inf mu(t) dt

    Returns the slack ratios lhs/rhs (>= 1 when the inequality holds).
    """
    if not r > 0:
        raise DomainError("r must be positive")
    lev = f.levy
    lam = 1.0 / float(lev.phi(r))
    lhs = f(lam)
    rhs1 = float(np.exp(-1.0) * lam * lev.moment(1, 0.0, 1.0 / lam).value)
    rhs2 = float((1.0 - np.exp(-1.0)) * lev.moment(0, 1.0 / lam, np.inf).value)
    return {"r": float(r), "lam": lam, "phi_bar": lhs, "rhs_i": rhs1, "rhs_ii": rhs2,
            "slack_i": lhs / rhs1, "slack_ii": lhs / rhs2,
            "holds": bool(lhs >= rhs1 and lhs >= rhs2)}


def truncation_constant(f, phi_j, radii):
    """Measured C in phi_bar(1/phi_j(r)) <= phi^W(1/phi_j(r); r) + C/psi(r).

    Returns (max C over the radii, per-radius values).
    """
    psi = f.levy.psi
    per = []
    for r in np.atleast_1d(radii):
        lam = 1.0 / float(phi_j(r))
        gap = f(lam) - f.truncated(lam, r).value
        per.append(gap * float(psi(r)))
    per = np.array(per)
    return float(per.max()), per
