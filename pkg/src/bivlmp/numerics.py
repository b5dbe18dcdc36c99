"""Shared numerical kernels.

Adaptive quadrature on [0, inf) and (0, 1), bracketing inversion of monotone
functions, and one-sided limit estimation by Aitken extrapolation.  Everything
here is a pure function of its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import ConvergenceError, DomainError

DEFAULT_QUAD_TOL = 1e-10
DEFAULT_INVERT_TOL = 1e-8
LIMIT_BUDGET = 40


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int


@dataclass(frozen=True)
class LimitEstimate:
    value: float
    sequence_tail: list = field(default_factory=list)
    converged: bool = False


def _checked(f):
    """Wrap an integrand so NaN evaluations raise instead of poisoning quad."""

    def g(z):
        v = f(z)
        if math.isnan(v):
            raise DomainError(f"integrand returned NaN at z={z!r}")
        return v

    return g


def integrate_upper(f, tol: float = DEFAULT_QUAD_TOL, rate: float = 1.0) -> QuadratureResult:
    """Integrate f over [0, inf).

    Uses the substitution u = exp(-rate*z), mapping the half line onto (0, 1],
    so survival-type decay needs no user cutoff.  ``rate`` should roughly match
    the decay scale of f (e.g. the model's lambda).
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    if rate <= 0:
        raise DomainError("rate must be positive")
    fc = _checked(f)

    def transformed(u):
        z = -math.log(u) / rate
        return fc(z) / (rate * u)

    value, abserr, info = integrate.quad(
        transformed, 0.0, 1.0, epsabs=tol, epsrel=tol, limit=200, full_output=True
    )[:3]
    neval = int(info["neval"])
    ok = math.isfinite(value) and abserr <= 10 * max(tol, tol * abs(value))
    if not ok:
        # The exponential substitution concentrates power-law tails into an
        # endpoint spike at u=0; retry on the half line directly, where the
        # adaptive rule handles slow decay better.
        value2, abserr2, info2 = integrate.quad(
            fc, 0.0, math.inf, epsabs=tol, epsrel=tol, limit=400, full_output=True
        )[:3]
        neval += int(info2["neval"])
        if math.isfinite(value2) and abserr2 <= 10 * max(tol, tol * abs(value2)):
            return QuadratureResult(value=value2, abs_error_estimate=abserr2, evaluations=max(neval, 1))
    if not math.isfinite(value):
        raise ConvergenceError("semi-infinite integral did not converge (non-finite value)", estimate=value)
    if abserr > 10 * max(tol, tol * abs(value)):
        raise ConvergenceError(
            f"semi-infinite integral error estimate {abserr:.3e} exceeds tolerance {tol:.1e}",
            estimate=value,
        )
    return QuadratureResult(value=value, abs_error_estimate=abserr, evaluations=max(neval, 1))


def integrate_unit(f, tol: float = DEFAULT_QUAD_TOL) -> QuadratureResult:
    """Integrate f over (0, 1); integrable endpoint singularities are fine."""
    if tol <= 0:
        raise DomainError("tol must be positive")
    value, abserr, info = integrate.quad(
        _checked(f), 0.0, 1.0, epsabs=tol, epsrel=tol, limit=200, full_output=True
    )[:3]
    neval = int(info["neval"])
    if not math.isfinite(value):
        raise ConvergenceError("unit-interval integral did not converge (non-finite value)", estimate=value)
    if abserr > 10 * max(tol, tol * abs(value)):
        raise ConvergenceError(
            f"unit-interval integral error estimate {abserr:.3e} exceeds tolerance {tol:.1e}",
            estimate=value,
        )
    return QuadratureResult(value=value, abs_error_estimate=abserr, evaluations=max(neval, 1))


def invert_monotone(f, target: float, lo: float, hi: float, tol: float = DEFAULT_INVERT_TOL) -> float:
    """Solve f(x) = target for strictly monotone f on [lo, hi].

    Bisection with secant acceleration; the bracket is preserved at every
    step, so derivative degeneracy at the endpoints is harmless.
    """
    if not lo < hi:
        raise DomainError("need lo < hi")
    flo, fhi = f(lo), f(hi)
    increasing = fhi > flo
    a, b = lo, hi
    fa, fb = (flo, fhi) if increasing else (fhi, flo)
    # After orientation fa <= target <= fb must hold for a monotone f.
    if not (min(flo, fhi) - tol <= target <= max(flo, fhi) + tol):
        raise DomainError(
            f"target {target!r} outside bracket values [{min(flo, fhi)!r}, {max(flo, fhi)!r}]"
        )
    if abs(flo - target) <= tol:
        return lo
    if abs(fhi - target) <= tol:
        return hi
    lo_x, hi_x = (a, b) if increasing else (a, b)
    g_lo = flo - target
    g_hi = fhi - target
    if g_lo == 0:
        return lo
    if g_hi == 0:
        return hi
    if math.copysign(1.0, g_lo) == math.copysign(1.0, g_hi):
        raise DomainError("f(lo) and f(hi) lie on the same side of target; f not monotone on bracket?")
    # False position with the Illinois modification: when the same endpoint
    # survives two steps in a row its residual is halved, which prevents the
    # stall that plain regula falsi exhibits on flat tails.
    g_lo_w, g_hi_w = g_lo, g_hi
    last_side = 0
    for _ in range(200):
        if g_hi_w != g_lo_w:
            x = hi_x - g_hi_w * (hi_x - lo_x) / (g_hi_w - g_lo_w)
        else:
            x = 0.5 * (lo_x + hi_x)
        if not (lo_x < x < hi_x):
            x = 0.5 * (lo_x + hi_x)
        gx = f(x) - target
        if math.isnan(gx):
            raise DomainError(f"f returned NaN at x={x!r}")
        if abs(gx) <= tol:
            return x
        if math.copysign(1.0, gx) == math.copysign(1.0, g_lo):
            lo_x, g_lo_w = x, gx
            if last_side == -1:
                g_hi_w *= 0.5
            last_side = -1
        else:
            hi_x, g_hi_w = x, gx
            if last_side == 1:
                g_lo_w *= 0.5
            last_side = 1
        if hi_x - lo_x <= 1e-15 * max(1.0, abs(hi_x)):
            # Bracket exhausted in double precision; return the better end.
            return lo_x if abs(g_lo_w) < abs(g_hi_w) else hi_x
    raise ConvergenceError("monotone inversion did not reach tolerance", estimate=0.5 * (lo_x + hi_x))


def limit_at_zero(g, u0: float = 0.25, tol: float = 1e-6, budget: int = LIMIT_BUDGET) -> LimitEstimate:
    """Estimate lim_{u->0+} g(u) along u_k = u0 * 2^-k with Aitken acceleration.

    Returns converged=False when the accelerated sequence is still drifting at
    the smallest evaluated u.
    """
    raw = []
    acc = []
    for k in range(budget):
        u = u0 * 2.0 ** (-k)
        if u == 0.0:
            break
        v = g(u)
        if math.isnan(v) or math.isinf(v):
            raise DomainError(
                f"g({u!r}) is not finite; evaluate the underlying survival in the log domain"
            )
        raw.append(v)
        if len(raw) >= 3:
            a0, a1, a2 = raw[-3], raw[-2], raw[-1]
            denom = a2 - 2.0 * a1 + a0
            if denom != 0.0:
                acc.append(a2 - (a2 - a1) ** 2 / denom)
            else:
                acc.append(a2)
            if len(acc) >= 3:
                d1 = abs(acc[-1] - acc[-2])
                d2 = abs(acc[-2] - acc[-3])
                if d1 <= tol and d1 <= d2 + tol:
                    return LimitEstimate(value=acc[-1], sequence_tail=acc[-6:], converged=True)
    if acc:
        return LimitEstimate(value=acc[-1], sequence_tail=acc[-6:], converged=False)
    value = raw[-1] if raw else float("nan")
    return LimitEstimate(value=value, sequence_tail=raw[-6:], converged=False)


def expanding_upper_bracket(f, target: float, start: float = 1.0, factor: float = 2.0, max_iter: int = 200) -> float:
    """Find hi with f(hi) < target for a decreasing f on [0, inf)."""
    hi = start
    for _ in range(max_iter):
        if f(hi) < target:
            return hi
        hi *= factor
    raise ConvergenceError("could not bracket target with expanding upper bound", estimate=hi)


def solve_decreasing_batch(fn, targets: np.ndarray, start: float = 1.0, iters: int = 80) -> np.ndarray:
    """Vectorized inversion of a nonincreasing array function on [0, inf).

    ``fn`` maps an array of abscissae to an array of values; each entry i is
    solved for fn(d)_i = targets_i by doubling then bisection.
    """
    targets = np.asarray(targets, dtype=float)
    hi = np.full_like(targets, start)
    for _ in range(120):
        vals = fn(hi)
        need = vals > targets
        if not np.any(need):
            break
        hi = np.where(need, hi * 2.0, hi)
    else:
        raise ConvergenceError("batch bracket expansion failed", estimate=None)
    lo = np.zeros_like(targets)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        vals = fn(mid)
        go_right = vals > targets
        lo = np.where(go_right, mid, lo)
        hi = np.where(go_right, hi, mid)
    return 0.5 * (lo + hi)
