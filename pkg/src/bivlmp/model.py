"""The distorted model layer: Fbar = h(Gbar).

A model pairs a distortion generator h with a core parameter set.  The joint
survival function Fbar(x, y) = h(Gbar(x, y)) satisfies the generalized weak
lack-of-memory equation

    Fbar(x+t, y+t) / Fbar(t, t) = d_tau(Fbar(x, y)),   tau = lambda * t,

where d_tau is the time distortion induced by h.  Because the core diagonal is
Gbar(t, t) = e^{-lambda t}, every t-level operation below feeds the generator
machinery the rescaled time tau = lambda * t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import core as core_mod
from . import generators as gen_mod
from .core import CoreParams, gbar_log, marginal_survival, require_valid, singular_mass
from .errors import ConvergenceError, DomainError, ValidationError
from .generators import Generator, Mo15Generator
from .numerics import integrate_upper

_LOG_SWITCH = math.log(1e-250)


@dataclass(frozen=True)
class Model:
    generator: Generator
    core: CoreParams
    label: str = ""

    def __post_init__(self):
        require_valid(self.core)
        if isinstance(self.generator, Mo15Generator) and self.generator.xi < 1.0:
            raise ValidationError("mo15 generator requires xi >= 1 in a model")

    @property
    def lam(self) -> float:
        return self.core.lam

    def tau(self, t: float) -> float:
        if t < 0:
            raise DomainError("t must be nonnegative")
        return self.core.lam * t

    def describe(self):
        return {
            "label": self.label,
            "generator": self.generator.describe(),
            "core": self.core.describe(),
        }


def fbar_log(m: Model, x, y):
    """log Fbar(x, y); the core stays in the log domain so deep tails survive."""
    out = np.log(np.maximum(m.generator.h_from_log(gbar_log(m.core, x, y)), 1e-300))
    return float(out) if np.ndim(out) == 0 else out


def fbar(m: Model, x, y):
    """Fbar(x, y) = h(Gbar(x, y)), evaluated from log Gbar to keep heavy tails."""
    out = m.generator.h_from_log(gbar_log(m.core, x, y))
    return float(out) if np.ndim(out) == 0 else out


def fbar_marginal(m: Model, i: int, z):
    """Marginal survival of the model: h(Gbar_i(z))."""
    z = np.asarray(z, dtype=float)
    lg = gbar_log(m.core, z, 0.0) if i == 1 else gbar_log(m.core, 0.0, z)
    out = m.generator.h_from_log(lg)
    return float(out) if np.ndim(out) == 0 else out


def fbar_residual(m: Model, t: float, x, y):
    """Fbar_t(x, y) = Fbar(x+t, y+t) / Fbar(t, t) = h_tau(Gbar(x, y))."""
    tau = m.tau(t)
    lg = np.asarray(gbar_log(m.core, x, y), dtype=float)
    denom = m.generator.h_from_log(-tau) if tau > 0 else 1.0
    out = np.asarray(m.generator.h_from_log(lg - tau), dtype=float) / denom
    return float(out) if np.ndim(out) == 0 else out


def residual_marginal(m: Model, i: int, t: float, x):
    """Margin of Fbar_t: h_tau(Gbar_i(x))."""
    tau = m.tau(t)
    x = np.asarray(x, dtype=float)
    # Gbar(x, 0) and Gbar(0, x) are the core marginals, already in log form
    lg = np.asarray(gbar_log(m.core, x, 0.0) if i == 1 else gbar_log(m.core, 0.0, x), dtype=float)
    denom = m.generator.h_from_log(-tau) if tau > 0 else 1.0
    out = np.asarray(m.generator.h_from_log(lg - tau), dtype=float) / denom
    return float(out) if np.ndim(out) == 0 else out


def generalized_weak_residual(m: Model, t: float, x, y):
    """Fbar(x+t, y+t)/Fbar(t, t) - d_tau(Fbar(x, y)); identically zero for h(Gbar) models.

    The ratio is taken in the log domain whenever the denominator is tiny.
    """
    tau = m.tau(t)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    g = m.generator
    num_log = np.log(np.maximum(g.h_from_log(gbar_log(m.core, x + t, y + t)), 1e-300))
    den_log = g.h_log(math.exp(-tau)) if tau > 0 else 0.0
    lhs = np.exp(np.asarray(num_log) - den_log)
    rhs = gen_mod.time_distortion(g, tau, g.h_from_log(gbar_log(m.core, x, y)))
    out = np.asarray(lhs - rhs, dtype=float)
    return float(out) if out.ndim == 0 else out


def copula_t(m: Model, t: float, u, v):
    """Survival copula of the residual vector at age t.

    C_t(u, v) = h_tau(C_Gbar(h_tau^-1(u), h_tau^-1(v))).
    """
    tau = m.tau(t)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any(u < 0) or np.any(u > 1) or np.any(v < 0) or np.any(v > 1):
        raise DomainError("u and v must lie in [0, 1]")
    a = gen_mod.residual_distortion_inverse(m.generator, tau, u)
    b = gen_mod.residual_distortion_inverse(m.generator, tau, v)
    c = core_mod.core_copula(m.core, a, b)
    out = gen_mod.residual_distortion(m.generator, tau, c)
    out = np.asarray(out, dtype=float)
    out = np.where((u <= 0) | (v <= 0), 0.0, out)
    out = np.where(u >= 1, v, np.where(v >= 1, u, out))
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def copula_t_diag_log(m: Model, t: float, log_u):
    """log C_t(u, u) taken along the diagonal from log u; used by tail probes.

    Works directly in the log domain so u can go far below double-precision
    ulp(1) territory without the copula underflowing to 0.
    """
    tau = m.tau(t)
    g = m.generator
    log_u = np.asarray(log_u, dtype=float)
    base_log = g.h_log(math.exp(-tau)) if tau > 0 else 0.0
    a = g.h_inverse_from_log(log_u + base_log)
    if tau > 0:
        a = np.minimum(np.asarray(a) / math.exp(-tau), 1.0)
    c = core_mod.core_copula(m.core, a, a)
    et = math.exp(-tau)
    out = g.h_log(et * np.asarray(c)) - base_log
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def singular_line_survival(m: Model, t: float, x):
    """S_t(x) = P(X = Y) h_tau(e^{-lambda x}): residual mass beyond x on the diagonal."""
    if x < 0:
        raise DomainError("x must be nonnegative")
    p0 = singular_mass(m.core)
    if p0 == 0.0:
        return 0.0
    tau = m.tau(t)
    return p0 * gen_mod.residual_distortion(m.generator, tau, math.exp(-m.lam * x))


def mean_excess(m: Model, i: int, t: float, tol: float = 1e-10) -> float:
    """Mean residual life of margin i at age t: integral of d_tau(Fbar_i(z)) dz.

    Returns +inf when the residual marginal is heavy tailed: local decay
    exponent d ln surv / d ln z at z ~ hundreds of mean lifetimes is <= ~1.
    """
    if i not in (1, 2):
        raise DomainError("margin index must be 1 or 2")
    tau = m.tau(t)

    def surv(z):
        return float(residual_marginal(m, i, t, z))

    z1, z2 = 150.0 / m.lam, 600.0 / m.lam
    s_big, s_big2 = surv(z1), surv(z2)
    if s_big > 0.0 and s_big2 > 0.0:
        expo = -(math.log(s_big2) - math.log(s_big)) / math.log(z2 / z1)
        if expo <= 1.05:
            return math.inf
    try:
        res = integrate_upper(surv, tol=tol, rate=m.lam)
    except ConvergenceError as exc:
        if exc.estimate is not None and math.isfinite(exc.estimate) and exc.estimate > 1e6:
            return math.inf
        raise
    return res.value


# ---------------------------------------------------------------------------
# bridge to the bivariate-Gompertz parametrization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Mo15Params:
    """Six-parameter bivariate Gompertz: rates lam, lam1, lam2 and shapes xi, xi1, xi2."""

    lam: float
    lam1: float
    lam2: float
    xi: float
    xi1: float
    xi2: float

    def __post_init__(self):
        for name in ("lam", "lam1", "lam2", "xi", "xi1", "xi2"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive")
        if self.lam < max(self.lam1, self.lam2) - 1e-12:
            raise ValidationError("constraint lam >= max(lam1, lam2) violated")
        if self.lam * (self.xi - 1.0) < max(self.lam1 * (self.xi1 - 1.0), self.lam2 * (self.xi2 - 1.0)) - 1e-12:
            raise ValidationError("constraint lam (xi - 1) >= max(lam_i (xi_i - 1)) violated")
        if self.lam1 * self.xi1 + self.lam2 * self.xi2 < self.lam * self.xi - 1e-12:
            raise ValidationError("constraint lam1 xi1 + lam2 xi2 >= lam xi violated")


def mo15_bridge(q: Mo15Params, slack: float = core_mod.DEFAULT_SLACK, label: str = "mo15") -> Model:
    """Express the bivariate Gompertz family as h(Gbar).

    Generator h(x) = exp(-xi (1/x - 1)); core alpha = 1, gamma_i = lam_i,
    alpha_i = 1 - xi_i / xi.  Requires xi >= max(xi1, xi2) strictly so the
    weights stay in (0, 1).
    """
    a1 = 1.0 - q.xi1 / q.xi
    a2 = 1.0 - q.xi2 / q.xi
    if not (0.0 < a1 < 1.0 and 0.0 < a2 < 1.0):
        raise ValidationError(
            f"bridge weights 1 - xi_i/xi = ({a1:.6g}, {a2:.6g}) must lie in (0, 1); need xi_i < xi"
        )
    core = CoreParams(
        lam=q.lam, alpha=1.0, gamma1=q.lam1, gamma2=q.lam2, alpha1=a1, alpha2=a2, slack=slack
    )
    return Model(generator=Mo15Generator(xi=q.xi), core=core, label=label)


def mo15_survival(q: Mo15Params, x, y):
    """The piecewise closed form of the bivariate Gompertz survival function.

    For x >= y:
        exp(-xi (e^{lam y} - 1) - e^{lam y} xi1 (e^{lam1 (x-y)} - 1)),
    symmetric (with xi2, lam2) for x < y.  Serves as the independent oracle for
    the h(Gbar) composition produced by the bridge.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x < 0) or np.any(y < 0):
        raise DomainError("x and y must be nonnegative")
    mn = np.minimum(x, y)
    d = np.abs(x - y)
    xi_side = np.where(x >= y, q.xi1, q.xi2)
    lam_side = np.where(x >= y, q.lam1, q.lam2)
    e = np.exp(q.lam * mn)
    out = np.exp(-q.xi * (e - 1.0) - e * xi_side * np.expm1(lam_side * d))
    return float(out) if np.ndim(out) == 0 else out
