"""Model heat kernels and the two-sided envelopes built from them.

``p_jump`` is the stable-like profile, ``p_diff`` the sub-Gaussian one.
`HeatKernelEnvelope` bundles the scale functions, the volume profile and the
constants c1..c4, and exposes the lower and upper heat kernel bounds in
either pure-jump or diffusion-plus-jump mode.

All functions broadcast over array arguments.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigError, DomainError
from .scales import ScaleSpec, VolumeProfile, check_scale_order, min_scale

MODES = ("pure_jump", "diffusion_plus_jump")

_INV_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0
GOLDEN_MAX_ITER = 200
BRACKET_FACTOR = 1e6


def _positive(x, what):
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError(f"{what} must be positive")
    return x


def _nonneg(x, what):
    x = np.asarray(x, dtype=float)
    if np.any(~(x >= 0)):
        raise DomainError(f"{what} must be nonnegative")
    return x


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def golden_section_max(f, lo, hi, tol=1e-12, max_iter=GOLDEN_MAX_ITER):
    """Maximize a unimodal f on [lo, hi], elementwise over array brackets.

    Returns (argmax, max).  Iteration stops when every bracket is narrower
    than tol * max(1, |x|) or after max_iter steps.
    """
    a = np.array(lo, dtype=float)
    b = np.array(hi, dtype=float)
    c = b - _INV_GOLDEN * (b - a)
    d = a + _INV_GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if np.all(b - a <= tol * np.maximum(1.0, np.abs(a))):
            break
        left = fc > fd
        # max in [a, d] where left, else in [c, b]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - _INV_GOLDEN * (b - a)
        new_d = a + _INV_GOLDEN * (b - a)
        # left: old c becomes d; right: old d becomes c
        keep_c, keep_d = np.where(left, new_c, d), np.where(left, c, new_d)
        keep_fd = np.where(left, fc, np.nan)
        keep_fc = np.where(left, np.nan, fd)
        # one fresh evaluation per element: c on the left branch, d on the right
        probe = np.where(left, keep_c, keep_d)
        fp = f(probe)
        fc = np.where(left, fp, keep_fc)
        fd = np.where(left, keep_fd, fp)
        c, d = keep_c, keep_d
    x = 0.5 * (a + b)
    return x, f(x)


def chernoff_closed_form(r, t, beta, normalization=1.0):
    """sup_s (r/s - t/(k s^beta)) for beta > 1, in closed form."""
    t_eff = np.asarray(t, dtype=float) / normalization
    r = np.asarray(r, dtype=float)
    e = 1.0 / (beta - 1.0)
    return (beta - 1.0) * beta ** (-beta * e) * np.power(np.power(r, beta) / t_eff, e)


def chernoff_exponent(r, t, phi_c, method="auto"):
    """sup over s > 0 of (r/s - t/phi_c(s)), clamped below at 0.

    ``method``: "closed" (power phi_c only), "golden" (numeric search on
    log s), or "auto" (closed form when available).
    """
    r = _nonneg(r, "r")
    t = _positive(t, "t")
    r, t = np.broadcast_arrays(r, t)
    if method == "auto":
        method = "closed" if phi_c.kind == "power" else "golden"
    out = np.zeros(r.shape)
    pos = r > 0
    if not np.any(pos):
        return _out(out)
    rp, tp = r[pos], t[pos]
    if method == "closed":
        if phi_c.kind != "power":
            raise ValueError("closed form needs a power scale")
        out[pos] = chernoff_closed_form(rp, tp, phi_c.exponents[0], phi_c.normalization)
    elif method == "golden":
        # stationary point of the power model with the lower LU exponent
        beta = phi_c.lu_exponents[0]
        if not beta > 1:
            raise DomainError("diffusion scale needs lower exponent > 1")
        guess = np.log(beta * tp / (phi_c.normalization * rp)) / (beta - 1.0)
        span = np.log(BRACKET_FACTOR)

        def f(x):
            s = np.exp(x)
            return rp / s - tp / phi_c._raw(s)

        _, fmax = golden_section_max(f, guess - span, guess + span)
        out[pos] = fmax
    else:
        raise ValueError(f"unknown method {method!r}")
    return _out(np.maximum(out, 0.0))


def p_jump(t, r, phi_j, V):
    """min(1/V(phi_j^-1(t)), t/(V(r) phi_j(r))); the first term at r = 0."""
    t = _positive(t, "t")
    r = _nonneg(r, "r")
    on_diag = 1.0 / V(phi_j.inverse(t))
    with np.errstate(divide="ignore"):
        off_diag = np.where(r > 0, t / (V(r) * phi_j(r)), np.inf)
    return _out(np.minimum(on_diag, off_diag))


def p_diff(t, r, phi_c, V, method="auto"):
    """(1/V(phi_c^-1(t))) exp(-chernoff_exponent(r, t))."""
    t = _positive(t, "t")
    r = _nonneg(r, "r")
    return _out(np.exp(-chernoff_exponent(r, t, phi_c, method)) / V(phi_c.inverse(t)))


@dataclass(frozen=True)
class HeatKernelEnvelope:
    """Heat kernel bounds of pure-jump or diffusion-plus-jump type.

    ``constants`` is (c1, c2, c3, c4).  In pure-jump mode only c1 (lower)
    and c2 (upper) are used.
    """

    mode: str
    phi_j: ScaleSpec
    volume: VolumeProfile
    phi_c: ScaleSpec | None = None
    constants: tuple = (1.0, 1.0, 1.0, 1.0)

    def __post_init__(self):
        object.__setattr__(self, "constants", tuple(float(c) for c in self.constants))
        if self.mode not in MODES:
            raise ConfigError(f"unknown envelope mode {self.mode!r}")
        if len(self.constants) != 4 or any(not c > 0 for c in self.constants):
            raise ConfigError("constants must be four positive numbers (c1, c2, c3, c4)")
        if self.mode == "diffusion_plus_jump":
            if self.phi_c is None:
                raise ConfigError("diffusion_plus_jump mode needs phi_c")
            if not self.phi_c.lu_exponents[0] > 1:
                raise ConfigError("phi_c must have lower exponent > 1")
            if not check_scale_order(self.phi_c, self.phi_j):
                raise ConfigError("need phi_c <= phi_j on (0, 1] and phi_c >= phi_j on (1, inf)")
        elif self.phi_c is not None:
            raise ConfigError("pure_jump mode takes no phi_c")

    @cached_property
    def phi(self):
        if self.mode == "pure_jump":
            return self.phi_j
        return min_scale(self.phi_c, self.phi_j)

    def with_constants(self, constants):
        return HeatKernelEnvelope(self.mode, self.phi_j, self.volume, self.phi_c, constants)

    def lower(self, t, r):
        return hk_lower(self, t, r)

    def upper(self, t, r):
        return hk_upper(self, t, r)

    def to_dict(self):
        d = {"mode": self.mode, "phi_j": self.phi_j.to_dict(), "volume": self.volume.to_dict(),
             "constants": list(self.constants)}
        if self.phi_c is not None:
            d["phi_c"] = self.phi_c.to_dict()
        return d

    @classmethod
    def from_dict(cls, d):
        phi_c = d.get("phi_c")
        return cls(d["mode"], ScaleSpec.from_dict(d["phi_j"]), VolumeProfile.from_dict(d["volume"]),
                   None if phi_c is None else ScaleSpec.from_dict(phi_c),
                   tuple(d.get("constants", (1.0, 1.0, 1.0, 1.0))))


def _stable_part(env, t, r):
    return t / (env.volume(r) * env.phi_j(r))


def _on_diagonal(env, t):
    return 1.0 / env.volume(env.phi.inverse(t))


def hk_lower(env, t, r):
    t = _positive(t, "t")
    r = _positive(r, "r")
    c1, c2 = env.constants[:2]
    if env.mode == "pure_jump":
        return _out(c1 * np.asarray(p_jump(t, r, env.phi_j, env.volume)))
    switched = env.phi(c2 * r) <= t
    return _out(c1 * np.where(switched, _on_diagonal(env, t), _stable_part(env, t, r)))


def hk_upper(env, t, r):
    t = _positive(t, "t")
    r = _positive(r, "r")
    c1, c2, c3, c4 = env.constants
    if env.mode == "pure_jump":
        return _out(c2 * np.asarray(p_jump(t, r, env.phi_j, env.volume)))
    mixed = np.asarray(p_diff(c4 * t, r, env.phi_c, env.volume)) + np.asarray(p_jump(t, r, env.phi_j, env.volume))
    return _out(c3 * np.minimum(_on_diagonal(env, t), mixed))


def hk_upper_small_r(env, t, r):
    """Piecewise upper bound used at short range in diffusion-plus-jump mode:
    c3 (t/(V(r) phi_j(r)) + p_diff(c2 t)) for t <= phi_c(c1 r), and
    c3 / V(phi^-1(t)) beyond."""
    if env.mode != "diffusion_plus_jump":
        raise ValueError("small-r bound applies to diffusion_plus_jump mode")
    t = _positive(t, "t")
    r = _positive(r, "r")
    c1, c2, c3, _ = env.constants
    early = t <= env.phi_c(c1 * r)
    near = _stable_part(env, t, r) + np.asarray(p_diff(c2 * t, r, env.phi_c, env.volume))
    return _out(c3 * np.where(early, near, _on_diagonal(env, t)))
