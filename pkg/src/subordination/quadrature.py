"""Adaptive Gauss-Kronrod quadrature, vectorized over panels.

Integrands are numpy functions of an array argument.  Every panel still
needing refinement is evaluated in a single call, so the Python overhead is
per refinement sweep rather than per node.

Integrals over (0, inf) of functions that behave like powers of t near the
ends are handled by `integrate_log`, which integrates in u = log t between
finite limits.  The caller then adds the two ends in closed form with
`power_head` and `power_tail`.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import NumericalError

# Kronrod 15-point nodes (non-negative half) and weights, Gauss 7-point
# weights on the shared nodes (QUADPACK qk15 tables).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:7], [0.0], _XGK[6::-1]])
WEIGHTS_K = np.concatenate([_WGK[:7], [_WGK[7]], _WGK[6::-1]])
_wg_half = np.zeros(8)
_wg_half[1::2] = _WG
WEIGHTS_G = np.concatenate([_wg_half[:7], [_wg_half[7]], _wg_half[6::-1]])


class QuadResult(NamedTuple):
    value: float
    error: float
    converged: bool = True
    n_panels: int = 0

    def __add__(self, other):
        if isinstance(other, QuadResult):
            return QuadResult(self.value + other.value, self.error + other.error,
                              self.converged and other.converged, self.n_panels + other.n_panels)
        return QuadResult(self.value + float(other), self.error, self.converged, self.n_panels)

    def scaled(self, c):
        return QuadResult(c * self.value, abs(c) * self.error, self.converged, self.n_panels)


def gk15(f, a, b):
    """Kronrod estimates and |Kronrod - Gauss| on panels [a_i, b_i]."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    x = c[:, None] + h[:, None] * NODES[None, :]
    fx = np.asarray(f(x), dtype=float)
    with np.errstate(invalid="ignore", over="ignore"):
        k = h * (fx @ WEIGHTS_K)
        g = h * (fx @ WEIGHTS_G)
    return k, np.abs(k - g)


def adaptive(f, breakpoints, rel_tol=1e-10, abs_tol=0.0, max_panels=20000, max_width=None):
    """Integrate f over [breakpoints[0], breakpoints[-1]].

    Interior breakpoints are where f may fail to be smooth; no panel ever
    straddles one.  A panel is accepted once its error estimate is below its
    share (by width) of max(abs_tol, rel_tol * |running total|).
    """
    pts = np.unique(np.asarray(breakpoints, dtype=float))
    if len(pts) < 2:
        return QuadResult(0.0, 0.0, True, 0)
    if max_width is not None:
        fine = [pts[:1]]
        for lo, hi in zip(pts[:-1], pts[1:]):
            n = max(1, int(np.ceil((hi - lo) / max_width)))
            fine.append(np.linspace(lo, hi, n + 1)[1:])
        pts = np.concatenate(fine)
    total_width = pts[-1] - pts[0]
    a, b = pts[:-1], pts[1:]
    done_val = 0.0
    done_err = 0.0
    n_panels = 0
    while True:
        k, e = gk15(f, a, b)
        n_panels += len(a)
        if not np.all(np.isfinite(k)):
            raise NumericalError("integrand produced non-finite values")
        estimate = done_val + k.sum()
        tol = max(abs_tol, rel_tol * abs(estimate))
        ok = e <= tol * (b - a) / total_width
        done_val += k[ok].sum()
        done_err += e[ok].sum()
        if np.all(ok):
            return QuadResult(float(done_val), float(done_err), True, n_panels)
        a, b = a[~ok], b[~ok]
        if n_panels + 2 * len(a) > max_panels:
            k_left, e_left = k[~ok], e[~ok]
            return QuadResult(float(done_val + k_left.sum()), float(done_err + e_left.sum()), False, n_panels)
        m = 0.5 * (a + b)
        a, b = np.concatenate([a, m]), np.concatenate([m, b])


def integrate_log(h, t_lo, t_hi, splits=(), rel_tol=1e-10, abs_tol=0.0, max_panels=20000):
    """Integrate h(t) dt over [t_lo, t_hi] with the substitution t = e^u."""
    if not 0 < t_lo <= t_hi:
        raise ValueError("need 0 < t_lo <= t_hi")
    if t_lo == t_hi:
        return QuadResult(0.0, 0.0, True, 0)
    lo, hi = np.log(t_lo), np.log(t_hi)
    inner = [np.log(s) for s in splits if t_lo < s < t_hi]
    bp = [lo, *inner, hi]

    def g(u):
        t = np.exp(u)
        return h(t) * t

    return adaptive(g, bp, rel_tol=rel_tol, abs_tol=abs_tol, max_panels=max_panels, max_width=1.0)


def power_head(value_at_t0, t0, exponent):
    """Integral over (0, t0] of A t^p, given A t0^p and p > -1."""
    if not exponent > -1:
        raise ValueError("head integral diverges for exponent <= -1")
    return value_at_t0 * t0 / (exponent + 1.0)


def power_tail(value_at_T, T, exponent):
    """Integral over [T, inf) of A t^p, given A T^p and p < -1."""
    if not exponent < -1:
        raise ValueError("tail integral diverges for exponent >= -1")
    return value_at_T * T / (-exponent - 1.0)
