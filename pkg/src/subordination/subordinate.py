"""Jump kernels of subordinate processes and their comparison with the
two-sided target estimate.

The jump kernel of the subordinated process is half the integral of the
heat kernel against the Levy density.  Here the heat kernel is only known
through its envelope, so the integral is evaluated twice: against the lower
bound and against the upper bound.  The resulting interval is compared with

    target_full(r)      = (1/V(r)) (1/psi(r) + phi_bar(1/phi_j(r)))
    target_jump(r)      = (1/V(r)) phi_bar(1/phi_j(r))
    target_diffusion(r) = 1 / (V(r) psi(r))
"""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .bernstein import BernsteinFunction, LevySpec, check_levy_integrability
from .errors import DivergenceError, DomainError
from .kernels import HeatKernelEnvelope, p_diff
from .quadrature import integrate_log, power_tail
from .scales import ScaleSpec, VolumeProfile, log_grid

TARGETS = ("full", "jump", "diffusion")
KERNEL_REL_TOL = 1e-9
SLOPE_TOL = 0.25
# fraction of the on-diagonal linear term below which p_diff is dropped
_PDIFF_NEGLIGIBLE = 1e-17


@dataclass(frozen=True)
class SubordinationProblem:
    envelope: HeatKernelEnvelope
    psi: ScaleSpec
    rel_tol: float = KERNEL_REL_TOL

    def __post_init__(self):
        cert = check_levy_integrability(self.levy)
        if not cert.finite:
            raise DivergenceError("no subordinator: Levy measure is not integrable", cert)
        probe = log_grid(1e-4, 1e4, 2)
        if not np.allclose(self.levy.phi(probe), self.envelope.phi(probe), rtol=1e-12, atol=0):
            raise ValueError("Levy spec phi differs from the envelope phi")

    @cached_property
    def levy(self):
        return LevySpec(self.envelope.phi, self.psi)

    @cached_property
    def bernstein(self):
        return BernsteinFunction(self.levy)

    def with_constants(self, constants):
        return SubordinationProblem(self.envelope.with_constants(constants), self.psi, self.rel_tol)

    @cached_property
    def _radius_kinks(self):
        env = self.envelope
        ks = set(env.phi.kinks) | set(env.phi_j.kinks) | set(env.volume.kinks) | set(self.psi.kinks)
        if env.phi_c is not None:
            ks |= set(env.phi_c.kinks)
        return sorted(ks)

    def _time_breaks(self, r):
        env = self.envelope
        c1, c2, c3, c4 = env.constants
        pts = {float(env.phi(r)), float(env.phi_j(r)), float(env.phi(c2 * r)), *self.levy.t_kinks}
        for k in self._radius_kinks:
            pts |= {float(env.phi(k)), float(env.phi_j(k))}
        if env.phi_c is not None:
            pts |= {float(env.phi_c(r)), float(env.phi_c(c1 * r)), float(env.phi_c(r)) / c4}
            for k in self._radius_kinks:
                pts.add(float(env.phi_c(k)) / c4)
        return sorted(pts)

    def kernel_integral(self, r, bound):
        """Half the integral of the lower or upper heat kernel bound against mu."""
        if not r > 0:
            raise DomainError("r must be positive")
        env, lev = self.envelope, self.levy
        c1, c2, c3, c4 = env.constants
        hk = env.lower if bound == "lower" else env.upper
        breaks = self._time_breaks(r)

        # head: the bound is (slope * t) below every break
        if env.mode == "pure_jump":
            c = c1 if bound == "lower" else c2
        else:
            c = c1 if bound == "lower" else c3
        slope = c / (float(env.volume(r)) * float(env.phi_j(r)))
        t0 = 0.5 * min(breaks[0], lev.first_kink)
        if env.mode == "diffusion_plus_jump" and bound == "upper":
            while c3 * float(p_diff(c4 * t0, r, env.phi_c, env.volume)) > _PDIFF_NEGLIGIBLE * slope * t0:
                t0 *= 0.25
        head = slope * lev.moment(1, 0.0, t0).value

        # tail: the bound is c / V(phi^-1(t)) beyond every break, an exact power
        T = 2.0 * max(breaks[-1], lev.last_kink, 1.0)
        q = -1.0 - lev.rho_inf - env.volume.exponent_at_infinity / env.phi.exponent_at_infinity

        def h(t):
            return hk(t, r) * lev.density(t)

        tail = power_tail(float(h(T)), T, q)
        mid = integrate_log(h, t0, T, breaks, rel_tol=self.rel_tol)
        return 0.5 * (head + mid.value + tail)


def jump_kernel_bounds(p, r):
    """(J_lower, J_upper) at distance r."""
    return p.kernel_integral(r, "lower"), p.kernel_integral(r, "upper")


def target_estimate(p, r, variant="full"):
    if not r > 0:
        raise DomainError("r must be positive")
    if variant not in TARGETS:
        raise ValueError(f"unknown target {variant!r}")
    env = p.envelope
    V = float(env.volume(r))
    if variant == "diffusion":
        return 1.0 / (V * float(p.psi(r)))
    jump = p.bernstein(1.0 / float(env.phi_j(r)))
    if variant == "jump":
        return jump / V
    return (1.0 / float(p.psi(r)) + jump) / V


def target_jump(p, r):
    return target_estimate(p, r, "jump")


def target_diffusion(p, r):
    return target_estimate(p, r, "diffusion")


@dataclass
class ComparabilityReport:
    radii: np.ndarray
    J_lower: np.ndarray
    J_upper: np.ndarray
    target: np.ndarray
    target_name: str
    against: str
    ratio_sup: float
    ratio_inf: float
    C: float
    verdict: str
    diverging_regime: str | None
    slopes: dict = field(default_factory=dict)
    J_slopes: dict = field(default_factory=dict)

    @property
    def ratio_lo(self):
        return self.J_lower / self.target

    @property
    def ratio_hi(self):
        return self.J_upper / self.target

    @property
    def comparable(self):
        return self.verdict == "comparable"

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "J_lower", "J_upper", "target", "ratio_lo", "ratio_hi"])
        for row in zip(self.radii, self.J_lower, self.J_upper, self.target, self.ratio_lo, self.ratio_hi):
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "C": self.C,
            "diverging_regime": self.diverging_regime,
            "target": self.target_name,
            "against": self.against,
            "ratio_sup": self.ratio_sup,
            "ratio_inf": self.ratio_inf,
            "slopes": self.slopes,
            "J_upper_slopes": self.J_slopes,
            "radii": [float(x) for x in self.radii],
            "J_lower": [float(x) for x in self.J_lower],
            "J_upper": [float(x) for x in self.J_upper],
            "target_values": [float(x) for x in self.target],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def _fit_slope(x, y):
    if len(x) < 2:
        return None
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def regime_windows(radii, fit_decades=1.0):
    """Masks for the outermost ``fit_decades`` decades on each side of r = 1."""
    radii = np.asarray(radii)
    small = (radii < 1.0) & (radii <= radii.min() * 10 ** fit_decades)
    large = (radii > 1.0) & (radii >= radii.max() / 10 ** fit_decades)
    return {"small": small, "large": large}


def comparability_verify(p, grid=None, target="full", against="kernel", fit_decades=1.0,
                         slope_tol=SLOPE_TOL, workers=None):
    """Compare the jump kernel interval (or another target) with a target.

    The verdict is "not_comparable" only when a fitted log-log slope of the
    ratio, on the outer decades of either regime, exceeds ``slope_tol`` in
    absolute value; otherwise it is "comparable" with the smallest C such
    that every ratio interval lies in [1/C, C].
    """
    radii = log_grid(1e-3, 1e3, 64) if grid is None else np.asarray(grid, dtype=float)
    if np.log10(radii.max() / radii.min()) < 6 - 1e-9:
        raise ValueError("grid must span at least 6 decades")

    def one(r):
        if against == "kernel":
            lo, hi = jump_kernel_bounds(p, r)
        else:
            lo = hi = target_estimate(p, r, against)
        return lo, hi, target_estimate(p, r, target)

    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            rows = list(ex.map(one, radii))
    else:
        rows = [one(r) for r in radii]
    lo, hi, tg = (np.array(c) for c in zip(*rows))
    ratio_lo, ratio_hi = lo / tg, hi / tg
    C = float(max(ratio_hi.max(), (1.0 / ratio_lo).max(), 1.0))

    slopes, j_slopes = {}, {}
    diverging = None
    for name, mask in regime_windows(radii, fit_decades).items():
        s_lo, s_hi = _fit_slope(radii[mask], ratio_lo[mask]), _fit_slope(radii[mask], ratio_hi[mask])
        slopes[name] = {"ratio_lo": s_lo, "ratio_hi": s_hi}
        j_slopes[name] = _fit_slope(radii[mask], hi[mask])
        worst = max(abs(s) for s in (s_lo, s_hi) if s is not None) if s_lo is not None else 0.0
        if worst > slope_tol and diverging is None:
            diverging = name
    verdict = "comparable" if diverging is None else "not_comparable"
    return ComparabilityReport(radii, lo, hi, tg, target, against, float(ratio_hi.max()),
                               float(ratio_lo.min()), C, verdict, diverging, slopes, j_slopes)


@dataclass
class CriterionCertificate:
    finite: bool
    boundary: bool
    exponent_phi: float
    exponent_psi: float
    partial_integrals: list

    @property
    def status(self):
        return "finite" if self.finite else "infinite"

    @property
    def verdict_line(self):
        if self.finite:
            return "finite"
        return "infinite (boundary)" if self.boundary else "infinite"

    def to_dict(self):
        return {"status": self.status, "boundary": self.boundary, "verdict": self.verdict_line,
                "exponent_phi_at_0": self.exponent_phi, "exponent_psi_at_0": self.exponent_psi,
                "partial_integrals": self.partial_integrals}


def criterion_check(phi, psi):
    """Is the integral over (0, 1) of phi(s) / (s psi(s)) finite?

    Near 0 the integrand is s^(b - g - 1) with b, g the exponents of phi and
    psi at 0, so it is finite iff b > g.  b == g is the logarithmic boundary
    case, reported as infinite.  Partial integrals over [eps, 1] are attached.
    """
    b, g = phi.exponent_at_zero, psi.exponent_at_zero

    def h(s):
        return phi(s) / (s * psi(s))

    kinks = sorted(set(phi.kinks) | set(psi.kinks))
    partial = []
    for eps in (1e-2, 1e-4, 1e-6, 1e-8, 1e-10):
        partial.append([eps, integrate_log(h, eps, 1.0, kinks).value])
    return CriterionCertificate(b > g, b == g, b, g, partial)


def lemma_equivalence_check(phi, psi):
    """Do the two finiteness tests agree?

    First test: the criterion integral of phi(s)/(s psi(s)) near 0.
    Second test: the integral of 1/psi(phi^-1(s)) over (0, 1), finite iff
    the exponent of psi(phi^-1(s)) at 0 is below 1.
    """
    first = criterion_check(phi, psi).finite
    second = LevySpec(phi, psi).rho0 < 1.0
    return first == second


def sufficient_comparability_check(phi, psi, a, grid=None):
    """Test psi(phi^-1(T)) / psi(phi^-1(t)) <= C (T/t)^a for t <= T.

    The decision uses the local exponents of psi(phi^-1(.)): the bound holds
    iff none exceeds a.  ``best_C`` is the smallest C that works on the grid.
    """
    if not 0 < a < 1:
        raise DomainError("need 0 < a < 1")
    lev = LevySpec(phi, psi)
    t = log_grid(1e-6, 1e6, 16) if grid is None else np.asarray(grid, dtype=float)
    lt, lg = np.log(t), np.log(lev.composite(t))
    excess = np.triu((lg[None, :] - lg[:, None]) - a * (lt[None, :] - lt[:, None]))
    best_C = float(np.exp(max(0.0, excess.max())))
    holds = max(lev.segment_exponents()) <= a
    return holds, best_C


@dataclass(frozen=True)
class FamilyMember:
    name: str
    mode: str
    phi_j: ScaleSpec
    psi: ScaleSpec
    volume: VolumeProfile
    phi_c: ScaleSpec | None = None

    def envelope(self):
        return HeatKernelEnvelope(self.mode, self.phi_j, self.volume, self.phi_c)

    @property
    def phi(self):
        return self.envelope().phi


def theorem_equivalence_suite(family, grid=None, per_decade=16):
    """For each member compare the three verdicts:

    (c) criterion integral finite;
    subordinator existence: Levy measure integrable;
    kernel estimate: the constructed jump kernel is comparable with
    target_full (impossible when there is no subordinator).
    """
    grid = log_grid(1e-3, 1e3, per_decade) if grid is None else grid
    rows = []
    for m in family:
        crit = criterion_check(m.phi, m.psi)
        integ = check_levy_integrability(LevySpec(m.phi, m.psi))
        if integ.finite:
            rep = comparability_verify(SubordinationProblem(m.envelope(), m.psi), grid, target="full")
            comparable, C, regime = rep.comparable, rep.C, rep.diverging_regime
        else:
            comparable, C, regime = False, None, "no subordinator"
        verdicts = (crit.finite, integ.finite, comparable)
        rows.append({"name": m.name, "criterion": crit.verdict_line, "integrability": integ.status,
                     "comparable": comparable, "C": C, "diverging_regime": regime,
                     "agree": len(set(verdicts)) == 1})
    return rows
