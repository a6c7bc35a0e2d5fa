"""Compound-Poisson sampling of the driftless subordinator with Levy density mu.

Jumps larger than ``eps`` arrive at rate Lambda(eps), the mass of mu on
[eps, inf).  Jumps below ``eps`` are replaced by their mean, the
deterministic drift m(eps) = integral of t mu(t) over (0, eps).  For this
approximate law the Laplace transform is exactly

    E exp(-lam S_T) = exp(-T (phi_eps(lam) + lam m(eps)))

with phi_eps the Bernstein integral restricted to [eps, inf).

Random streams: paths are processed in fixed blocks of ``BLOCK`` paths; the
stream of block b is Philox seeded by SeedSequence(seed, spawn_key=(b,)).
Path i therefore always draws from the stream of block i // BLOCK, so the
output depends only on (seed, n_paths) and not on how blocks are scheduled.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .bernstein import BernsteinFunction, LevySpec
from .errors import ConfigError, DomainError

BLOCK = 4096
KNOTS_PER_DECADE = 512
MAX_EXPECTED_JUMPS = 1e7


def block_generator(seed, block):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


@dataclass(frozen=True)
class SubordinatorSampler:
    levy: LevySpec
    eps: float
    seed: int = 0
    knots_per_decade: int = KNOTS_PER_DECADE

    def __post_init__(self):
        if not self.eps > 0:
            raise ConfigError("eps must be positive")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")

    @cached_property
    def rate(self):
        """Lambda(eps): total mass of mu on [eps, inf)."""
        return self.levy.moment(0, self.eps, np.inf).value

    @cached_property
    def compensator(self):
        """m(eps): integral of t mu(t) over (0, eps)."""
        return self.levy.moment(1, 0.0, self.eps).value

    @cached_property
    def _table(self):
        # knots from eps past the last kink, kinks included, so that the
        # power-law interpolation of mu is exact for piecewise powers
        lev = self.levy
        t_max = 10.0 * max(2.0 * lev.last_kink, self.eps)
        n = max(2, int(np.ceil(np.log10(t_max / self.eps) * self.knots_per_decade)) + 1)
        knots = np.logspace(np.log10(self.eps), np.log10(t_max), n)
        inner = [k for k in lev.t_kinks if self.eps < k < t_max]
        knots = np.unique(np.concatenate([knots, inner]))
        knots[0], knots[-1] = self.eps, t_max
        mu = lev.density(knots)
        ratio = knots[1:] / knots[:-1]
        slope = np.log(mu[1:] / mu[:-1]) / np.log(ratio)
        base = mu[:-1] * knots[:-1]
        p1 = slope + 1.0
        with np.errstate(divide="ignore", invalid="ignore"):
            mass = np.where(np.abs(p1) < 1e-12, base * np.log(ratio), base * np.expm1(p1 * np.log(ratio)) / p1)
        tail = mu[-1] * t_max / lev.rho_inf
        cum = np.concatenate([[0.0], np.cumsum(mass)])
        return knots, mu, slope, cum, tail

    @property
    def table_rate(self):
        """Lambda(eps) from the interpolation table; matches ``rate``."""
        _, _, _, cum, tail = self._table
        return float(cum[-1] + tail)

    def sample_jumps(self, rng, n):
        """n independent jump sizes from mu restricted to [eps, inf), normalized."""
        knots, mu, slope, cum, tail = self._table
        total = cum[-1] + tail
        w = rng.random(n) * total
        out = np.empty(n)
        body = w < cum[-1]
        wb = w[body]
        k = np.clip(np.searchsorted(cum, wb, side="right") - 1, 0, len(knots) - 2)
        rem = wb - cum[k]
        base = mu[k] * knots[k]
        p1 = slope[k] + 1.0
        flat = np.abs(p1) < 1e-12
        with np.errstate(divide="ignore", invalid="ignore"):
            log_step = np.where(flat, rem / base, np.log1p(rem * p1 / base) / np.where(flat, 1.0, p1))
        out[body] = knots[k] * np.exp(log_step)
        rho = self.levy.rho_inf
        wt = w[~body] - cum[-1]
        t_max = knots[-1]
        # exact power tail: mass beyond t is tail * (t / t_max)^-rho
        out[~body] = t_max * np.exp(-np.log1p(-wt / tail) / rho)
        return out


def _check_cost(s, T):
    lam_T = s.rate * T
    if lam_T > MAX_EXPECTED_JUMPS:
        raise ConfigError(f"expected {lam_T:.3g} jumps per path exceeds {MAX_EXPECTED_JUMPS:g}; raise eps")


def _increments(s, rng, dt, size):
    counts = rng.poisson(s.rate * dt, size)
    jumps = s.sample_jumps(rng, int(counts.sum()))
    owner = np.repeat(np.arange(size), counts)
    return s.compensator * dt + np.bincount(owner, weights=jumps, minlength=size)


def sample_path(s, T, n_paths):
    """n_paths independent samples of S_T."""
    if T < 0:
        raise DomainError("T must be nonnegative")
    n_paths = int(n_paths)
    if n_paths < 0:
        raise DomainError("n_paths must be nonnegative")
    if T == 0:
        return np.zeros(n_paths)
    _check_cost(s, T)
    out = np.empty(n_paths)
    for b, start in enumerate(range(0, n_paths, BLOCK)):
        size = min(BLOCK, n_paths - start)
        out[start:start + size] = _increments(s, block_generator(int(s.seed), b), T, size)
    return out


def sample_trajectory(s, times, n_paths):
    """S at the increasing ``times`` for n_paths paths, shape (n_paths, len(times)).

    Built from independent increments, so every row is non-decreasing.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or np.any(times < 0) or np.any(np.diff(times) < 0):
        raise DomainError("times must be a nondecreasing sequence of nonnegative numbers")
    _check_cost(s, float(times[-1]) if len(times) else 0.0)
    steps = np.diff(np.concatenate([[0.0], times]))
    n_paths = int(n_paths)
    out = np.zeros((n_paths, len(times)))
    for b, start in enumerate(range(0, n_paths, BLOCK)):
        size = min(BLOCK, n_paths - start)
        rng = block_generator(int(s.seed), b)
        inc = np.column_stack([_increments(s, rng, dt, size) if dt > 0 else np.zeros(size) for dt in steps])
        out[start:start + size] = np.cumsum(inc, axis=1)
    return out


def validate_laplace(s, T, lambdas, n_paths, n_se=4.0):
    """Compare the empirical Laplace transform of S_T with the quadrature value.

    Each row reports the empirical mean of exp(-lam S_T), its standard error,
    the expected exp(-T (phi_eps(lam) + lam m(eps))), the deviation in
    standard errors, and the bound lam^2/2 * integral_0^eps t^2 mu(t) dt on
    |phi_bar(lam) - phi_eps(lam) - lam m(eps)|.
    """
    samples = sample_path(s, T, n_paths)
    f = BernsteinFunction(s.levy)
    second = s.levy.moment(2, 0.0, s.eps).value
    rows = []
    for lam in lambdas:
        lam = float(lam)
        vals = np.exp(-lam * samples)
        emp = float(vals.mean())
        se = float(vals.std(ddof=1) / np.sqrt(len(vals))) if len(vals) > 1 else 0.0
        phi_eps = f.integrate(lam, s.eps, np.inf).value
        expected = float(np.exp(-T * (phi_eps + lam * s.compensator)))
        dev = abs(emp - expected)
        z = 0.0 if dev == 0 else (dev / se if se > 0 else np.inf)
        full = f(lam) if lam > 0 else 0.0
        rows.append({
            "lambda": lam, "empirical": emp, "std_error": se, "expected": expected,
            "z": float(z), "pass": bool(z <= n_se),
            "phi_bar": full, "phi_eps": phi_eps, "compensator": s.compensator,
            "truncation_gap": abs(full - phi_eps - lam * s.compensator),
            "bias_bound": 0.5 * lam ** 2 * second,
        })
    return {"T": T, "n_paths": int(n_paths), "eps": s.eps, "seed": int(s.seed), "rate": s.rate,
            "rows": rows, "pass": all(r["pass"] for r in rows)}
