"""Scale functions and radial volume profiles.

A scale function is stored symbolically (a kind plus its exponents) rather
than as an opaque callable, so that the power-law exponents near 0 and near
infinity are always available.  Finiteness questions elsewhere in the
package are decided from those exponents.

Three kinds are supported:

``power``            r ** beta
``piecewise_power``  r ** beta_small on [0, 1], r ** beta_large on (1, inf)
``min_of_two``       pointwise minimum of two scale functions

Every kind is multiplied by ``normalization``; with the default of 1 the
function takes the value 1 at r = 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import brentq

from .errors import ConfigError, DomainError

KINDS = ("power", "piecewise_power", "min_of_two")

DEFAULT_REL_TOL = 1e-12
BISECT_MAX_ITER = 200


def log_grid(lo=1e-6, hi=1e6, per_decade=64):
    """Log-spaced radii from lo to hi, ``per_decade`` points per decade."""
    decades = np.log10(hi) - np.log10(lo)
    n = int(round(decades * per_decade)) + 1
    return np.logspace(np.log10(lo), np.log10(hi), n)


def _check_nonneg(x, what="r"):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(np.isnan(x)):
        raise DomainError(f"{what} must be nonnegative")
    return x


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


@dataclass(frozen=True)
class ScaleSpec:
    kind: str
    exponents: tuple = ()
    components: tuple = ()
    normalization: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(float(e) for e in self.exponents))
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "normalization", float(self.normalization))
        if self.kind not in KINDS:
            raise ConfigError(f"unknown scale kind {self.kind!r}; expected one of {KINDS}")
        if not self.normalization > 0:
            raise ConfigError("normalization must be positive")
        if self.kind == "power" and len(self.exponents) != 1:
            raise ConfigError("power scale needs exactly one exponent")
        if self.kind == "piecewise_power" and len(self.exponents) != 2:
            raise ConfigError("piecewise_power scale needs [beta_small, beta_large]")
        if self.kind == "min_of_two":
            if len(self.components) != 2 or not all(isinstance(c, ScaleSpec) for c in self.components):
                raise ConfigError("min_of_two scale needs two component scale specs")
        elif self.components:
            raise ConfigError(f"{self.kind} scale takes no components")
        if any(not e > 0 for e in self.exponents):
            raise ConfigError("scale exponents must be positive")

    # construction helpers
    @classmethod
    def power(cls, beta, normalization=1.0):
        return cls("power", (beta,), (), normalization)

    @classmethod
    def piecewise(cls, beta_small, beta_large, normalization=1.0):
        return cls("piecewise_power", (beta_small, beta_large), (), normalization)

    # evaluation
    def __call__(self, r):
        return eval_scale(self, r)

    def inverse(self, y, rel_tol=DEFAULT_REL_TOL):
        return invert_scale(self, y, rel_tol)

    @cached_property
    def _min_rescale(self):
        a, b = self.components
        return self.normalization / min(a._raw(1.0), b._raw(1.0))

    def _raw(self, r):
        # r is a validated float array or float
        if self.kind == "power":
            return self.normalization * np.power(r, self.exponents[0])
        if self.kind == "piecewise_power":
            small, large = self.exponents
            return self.normalization * np.where(r <= 1.0, np.power(r, small), np.power(r, large))
        a, b = self.components
        m = np.minimum(a._raw(r), b._raw(r))
        s = self._min_rescale
        return m if s == 1.0 else s * m

    # exponents
    @cached_property
    def exponent_at_zero(self):
        """Power-law exponent of the function as r -> 0."""
        if self.kind == "power":
            return self.exponents[0]
        if self.kind == "piecewise_power":
            return self.exponents[0]
        return max(c.exponent_at_zero for c in self.components)

    @cached_property
    def exponent_at_infinity(self):
        if self.kind == "power":
            return self.exponents[0]
        if self.kind == "piecewise_power":
            return self.exponents[1]
        return min(c.exponent_at_infinity for c in self.components)

    @cached_property
    def lu_exponents(self):
        """Declared (lower, upper) exponents of the LU bound."""
        if self.kind == "power":
            return (self.exponents[0], self.exponents[0])
        if self.kind == "piecewise_power":
            return (min(self.exponents), max(self.exponents))
        (a1, a2), (b1, b2) = (c.lu_exponents for c in self.components)
        return (min(a1, b1), max(a2, b2))

    def local_exponent(self, r):
        """Exponent of the power law in force at radius r (r off the kinks)."""
        if self.kind == "power":
            return self.exponents[0]
        if self.kind == "piecewise_power":
            return self.exponents[0] if r <= 1.0 else self.exponents[1]
        a, b = self.components
        return a.local_exponent(r) if a._raw(r) <= b._raw(r) else b.local_exponent(r)

    @cached_property
    def kinks(self):
        """Sorted radii where the local exponent may change.

        Between consecutive kinks (and outside the extreme ones) the function
        is an exact power of r.
        """
        if self.kind == "power":
            return ()
        if self.kind == "piecewise_power":
            return (1.0,)
        a, b = self.components
        pts = set(a.kinks) | set(b.kinks) | set(_crossings(a, b))
        return tuple(sorted(pts))

    def to_dict(self):
        d = {"kind": self.kind, "exponents": list(self.exponents), "normalization": self.normalization}
        if self.kind == "min_of_two":
            d["components"] = [c.to_dict() for c in self.components]
        return d

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise ConfigError(f"scale spec must be a mapping, got {type(d).__name__}")
        unknown = set(d) - {"kind", "exponents", "components", "normalization"}
        if unknown:
            raise ConfigError(f"unknown scale spec fields: {sorted(unknown)}")
        if "kind" not in d:
            raise ConfigError("scale spec is missing 'kind'")
        comps = tuple(cls.from_dict(c) for c in d.get("components", ()))
        try:
            exps = tuple(float(e) for e in d.get("exponents", ()))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad exponents {d.get('exponents')!r}") from exc
        if d["kind"] == "min_of_two" and "normalization" not in d and len(comps) == 2:
            return min_scale(*comps)
        return cls(d["kind"], exps, comps, d.get("normalization", 1.0))


def _crossings(a, b, lo=1e-12, hi=1e12, per_decade=20):
    # roots of log a - log b on a log grid, refined by brentq
    grid = log_grid(lo, hi, per_decade)
    h = np.log(a._raw(grid)) - np.log(b._raw(grid))
    out = []
    for i in range(len(grid) - 1):
        h0, h1 = h[i], h[i + 1]
        if h0 == 0.0:
            left = h[i - 1] if i > 0 else 0.0
            if left * h1 < 0:
                out.append(float(grid[i]))
        elif h0 * h1 < 0:
            f = lambda u: np.log(a._raw(np.exp(u))) - np.log(b._raw(np.exp(u)))
            u = brentq(f, np.log(grid[i]), np.log(grid[i + 1]), xtol=1e-15, rtol=1e-15)
            out.append(float(np.exp(u)))
    return out


def eval_scale(spec, r):
    """psi(r).  Accepts scalars or arrays; raises DomainError for r < 0."""
    r = _check_nonneg(r)
    return _out(spec._raw(r))


def _closed_inverse(spec, y):
    if spec.kind == "power":
        return np.power(y / spec.normalization, 1.0 / spec.exponents[0])
    if spec.kind == "piecewise_power":
        small, large = spec.exponents
        z = y / spec.normalization
        return np.where(z <= 1.0, np.power(z, 1.0 / small), np.power(z, 1.0 / large))
    a, b = spec.components
    z = y / spec._min_rescale
    # min(a, b)(r) = z at r = max(a^-1(z), b^-1(z)) since both increase
    return np.maximum(_closed_inverse(a, z), _closed_inverse(b, z))


def invert_scale(spec, y, rel_tol=DEFAULT_REL_TOL):
    """r with spec(r) = y.

    Closed forms are used for every built-in kind; ``bisect_inverse`` is the
    generic fallback and serves as an independent check in the tests.
    """
    y = _check_nonneg(y, "y")
    return _out(_closed_inverse(spec, y))


def bisect_inverse(f, y, rel_tol=DEFAULT_REL_TOL, max_iter=BISECT_MAX_ITER):
    """Invert a strictly increasing f on [0, inf) by bisection in log r.

    The bracket starts at [1, 1] and grows geometrically until it encloses
    the target.  Vectorized over y.
    """
    y = _check_nonneg(y, "y")
    scalar = np.ndim(y) == 0
    y = np.atleast_1d(y).astype(float)
    out = np.zeros_like(y)
    pos = y > 0
    yy = y[pos]
    lo = np.zeros_like(yy)
    hi = np.zeros_like(yy)
    # grow bracket in log space by doubling the step
    step = np.full_like(yy, np.log(2.0))
    need = f(np.exp(hi)) < yy
    while np.any(need):
        hi[need] += step[need]
        step[need] *= 2.0
        need = f(np.exp(hi)) < yy
    step[:] = np.log(2.0)
    need = f(np.exp(lo)) > yy
    while np.any(need):
        lo[need] -= step[need]
        step[need] *= 2.0
        need = f(np.exp(lo)) > yy
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(np.exp(mid))
        below = fm < yy
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all(np.abs(f(np.exp(hi)) - yy) <= rel_tol * yy) or np.all(hi - lo <= 1e-16 * np.maximum(1.0, np.abs(hi))):
            break
    out[pos] = np.exp(hi)
    return float(out[0]) if scalar else out


def min_scale(a, b):
    """Pointwise minimum of two scale functions.

    The declared LU exponents are (min of lower exponents, max of upper
    exponents).  The normalization is chosen so that evaluation reproduces
    min(a(r), b(r)) exactly.
    """
    norm = min(a._raw(1.0), b._raw(1.0))
    return ScaleSpec("min_of_two", (), (a, b), float(norm))


def check_scale_order(phi_c, phi_j, grid=None, slack=1e-12):
    """phi_c <= phi_j on (0, 1] and phi_c >= phi_j on (1, inf), on the grid."""
    grid = log_grid() if grid is None else np.asarray(grid, dtype=float)
    c, j = phi_c(grid), phi_j(grid)
    small = grid <= 1.0
    ok_small = np.all(c[small] <= j[small] * (1 + slack))
    ok_large = np.all(c[~small] * (1 + slack) >= j[~small])
    return bool(ok_small and ok_large)


def _pair_log_ratio_bounds(log_r, log_f, a1, a2):
    # max over pairs i <= j of the log-excess against both power bounds
    dr = log_r[None, :] - log_r[:, None]
    df = log_f[None, :] - log_f[:, None]
    upper = np.triu(df - a2 * dr)
    lower = np.triu(a1 * dr - df)
    return max(0.0, float(upper.max()), float(lower.max()))


def verify_LU(spec, alpha1, alpha2, grid=None, max_C=10.0):
    """Check C^-1 (R/r)^a1 <= psi(R)/psi(r) <= C (R/r)^a2 on all grid pairs.

    Returns (holds, best_C).  ``best_C`` is the smallest C that works on the
    grid; the bound is reported as holding when best_C <= max_C.  With wrong
    exponents best_C grows like (R/r)^(exponent gap), so over the default 12
    decades any real mismatch exceeds max_C by orders of magnitude.
    """
    if not 0 < alpha1 <= alpha2:
        raise DomainError("need 0 < alpha1 <= alpha2")
    grid = log_grid() if grid is None else np.asarray(grid, dtype=float)
    grid = grid[grid > 0]
    log_c = _pair_log_ratio_bounds(np.log(grid), np.log(spec(grid)), alpha1, alpha2)
    best = float(np.exp(log_c))
    return best <= max_C, best


@dataclass(frozen=True)
class VolumeProfile:
    """Radial volume V(r) = constant * r^d, optionally with a different
    exponent above r = 1 (``d_large``)."""

    ahlfors_exponent: float
    constant: float = 1.0
    d_large: float | None = None

    def __post_init__(self):
        if not self.ahlfors_exponent > 0 or not self.constant > 0:
            raise ConfigError("volume exponent and constant must be positive")
        if self.d_large is not None and not self.d_large > 0:
            raise ConfigError("d_large must be positive")

    @property
    def d_small(self):
        return self.ahlfors_exponent

    @property
    def exponent_at_infinity(self):
        return self.ahlfors_exponent if self.d_large is None else self.d_large

    @property
    def exponent_at_zero(self):
        return self.ahlfors_exponent

    @property
    def doubling_exponents(self):
        """(d1, d2): reverse-doubling and doubling exponents."""
        return (min(self.d_small, self.exponent_at_infinity), max(self.d_small, self.exponent_at_infinity))

    @property
    def kinks(self):
        return () if self.d_large is None else (1.0,)

    def __call__(self, r):
        return volume(self, r)

    def to_dict(self):
        d = {"ahlfors_exponent": self.ahlfors_exponent, "constant": self.constant}
        if self.d_large is not None:
            d["d_large"] = self.d_large
        return d

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise ConfigError("volume profile must be a mapping")
        unknown = set(d) - {"ahlfors_exponent", "constant", "d_large"}
        if unknown:
            raise ConfigError(f"unknown volume fields: {sorted(unknown)}")
        if "ahlfors_exponent" not in d:
            raise ConfigError("volume profile is missing 'ahlfors_exponent'")
        return cls(float(d["ahlfors_exponent"]), float(d.get("constant", 1.0)),
                   None if d.get("d_large") is None else float(d["d_large"]))


def volume(profile, r):
    r = _check_nonneg(r)
    if profile.d_large is None:
        v = profile.constant * np.power(r, profile.ahlfors_exponent)
    else:
        v = profile.constant * np.where(r <= 1.0, np.power(r, profile.d_small), np.power(r, profile.d_large))
    return _out(v)


def verify_VD(profile, grid=None):
    """Empirical doubling constants (C, d2) with V(R)/V(r) <= C (R/r)^d2."""
    grid = log_grid() if grid is None else np.asarray(grid, dtype=float)
    grid = grid[grid > 0]
    d2 = profile.doubling_exponents[1]
    lr, lv = np.log(grid), np.log(profile(grid))
    dr = lr[None, :] - lr[:, None]
    dv = lv[None, :] - lv[:, None]
    excess = float(np.triu(dv - d2 * dr).max())
    return float(np.exp(max(0.0, excess))), d2
