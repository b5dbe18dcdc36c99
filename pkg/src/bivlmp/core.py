"""The undistorted layer.

The five-parameter family

    Gbar(x, y) = e^{-lambda y} (alpha1 + (1-alpha1) e^{gamma1 (x-y)})^{-1/alpha},  x >= y,

symmetric for x < y, satisfies the classical weak lack-of-memory property
Gbar(x+t, y+t) = Gbar(x, y) e^{-lambda t}.  It is a valid survival function iff

    (1/alpha) max(gamma1, gamma2) <= lambda <= (1/alpha)(gamma1(1-alpha1) + gamma2(1-alpha2)).

Setting gamma1 = gamma2 = gamma and lambda = gamma/alpha gives the
Muliere-Scarsini style subfamily with absolutely explicit copula.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ValidationError
from .numerics import invert_monotone

DEFAULT_SLACK = 1e-9


@dataclass(frozen=True)
class CoreParams:
    lam: float
    alpha: float
    gamma1: float
    gamma2: float
    alpha1: float
    alpha2: float
    slack: float = DEFAULT_SLACK

    def __post_init__(self):
        for name in ("lam", "alpha", "gamma1", "gamma2", "alpha1", "alpha2", "slack"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise ValidationError(f"{name} must be a finite number, got {v!r}")
        if self.alpha <= 0 or self.gamma1 <= 0 or self.gamma2 <= 0 or self.lam <= 0:
            raise ValidationError("lam, alpha, gamma1, gamma2 must all be positive")
        if not (0.0 < self.alpha1 < 1.0 and 0.0 < self.alpha2 < 1.0):
            raise ValidationError("alpha1 and alpha2 must lie in the open interval (0, 1)")
        if self.slack < 0:
            raise ValidationError("slack must be nonnegative")

    @property
    def is_mu(self) -> bool:
        """True on the absolutely-explicit subfamily gamma1=gamma2, lambda=gamma/alpha."""
        return (
            abs(self.gamma1 - self.gamma2) <= 1e-12 * max(self.gamma1, self.gamma2)
            and abs(self.lam - self.gamma1 / self.alpha) <= 1e-12 * self.lam
        )

    def describe(self):
        return {
            "lambda": self.lam,
            "alpha": self.alpha,
            "gamma1": self.gamma1,
            "gamma2": self.gamma2,
            "alpha1": self.alpha1,
            "alpha2": self.alpha2,
            "slack": self.slack,
        }


def mu_core(alpha: float, gamma: float, alpha1: float, alpha2: float, slack: float = DEFAULT_SLACK) -> CoreParams:
    """Convenience constructor for the gamma1=gamma2=gamma, lambda=gamma/alpha subfamily."""
    return CoreParams(
        lam=gamma / alpha, alpha=alpha, gamma1=gamma, gamma2=gamma,
        alpha1=alpha1, alpha2=alpha2, slack=slack,
    )


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple = ()
    margins: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def validate_core(p: CoreParams) -> ValidationReport:
    """Check the two admissibility inequalities, reporting named margins.

    Margins are signed distances to each bound; a negative margin inside the
    slack still validates (rounded published parameter sets need this).
    """
    lower = max(p.gamma1, p.gamma2) / p.alpha
    upper = (p.gamma1 * (1.0 - p.alpha1) + p.gamma2 * (1.0 - p.alpha2)) / p.alpha
    mass = singular_mass_raw(p)
    margins = {
        "lower_bound": p.lam - lower,          # need >= -slack
        "upper_bound": upper - p.lam,          # need >= -slack
        "singular_mass": mass,                 # need >= -slack
    }
    violations = []
    if margins["lower_bound"] < -p.slack:
        violations.append(
            f"lower bound violated: lambda={p.lam} < max(gamma1,gamma2)/alpha={lower} "
            f"(margin {margins['lower_bound']:.3e})"
        )
    if margins["upper_bound"] < -p.slack:
        violations.append(
            f"upper bound violated: lambda={p.lam} > (gamma1(1-alpha1)+gamma2(1-alpha2))/alpha={upper} "
            f"(margin {margins['upper_bound']:.3e})"
        )
    if mass < -p.slack:
        violations.append(f"singular mass {mass:.3e} below -slack")
    if mass > 1.0:
        violations.append(f"singular mass {mass:.3e} exceeds 1")
    return ValidationReport(ok=not violations, violations=tuple(violations), margins=margins)


def require_valid(p: CoreParams) -> None:
    rep = validate_core(p)
    if not rep.ok:
        raise ValidationError("; ".join(rep.violations))


def gbar_log(p: CoreParams, x, y):
    """log Gbar(x, y), vectorized; the diagonal uses the exact -lambda*t form."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x < 0) or np.any(y < 0):
        raise DomainError("x and y must be nonnegative")
    d = x - y
    m = np.minimum(x, y)
    gamma = np.where(d >= 0, p.gamma1, p.gamma2)
    aw = np.where(d >= 0, p.alpha1, p.alpha2)
    z = np.abs(d)
    # log(alpha_i + (1-alpha_i) e^{gamma z}) computed overflow-safe
    inner = gamma * z + np.log1p(aw * np.exp(-gamma * z) / (1.0 - aw)) + np.log1p(-aw)
    out = -p.lam * m - inner / p.alpha
    return float(out) if out.ndim == 0 else out


def gbar_eval(p: CoreParams, x, y):
    """Gbar(x, y)."""
    require_valid(p)
    out = np.exp(gbar_log(p, x, y))
    return float(out) if np.ndim(out) == 0 else out


def marginal_survival(p: CoreParams, i: int, z):
    gamma, aw = _marg(p, i)
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise DomainError("z must be nonnegative")
    inner = gamma * z + np.log1p(aw * np.exp(-gamma * z) / (1.0 - aw)) + math.log1p(-aw)
    out = np.exp(-inner / p.alpha)
    return float(out) if out.ndim == 0 else out


def marginal_density(p: CoreParams, i: int, z):
    """g_i(z) = -d/dz Gbar_i(z), closed form."""
    gamma, aw = _marg(p, i)
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise DomainError("z must be nonnegative")
    base = aw + (1.0 - aw) * np.exp(gamma * z)
    out = (gamma * (1.0 - aw) / p.alpha) * np.exp(gamma * z) * base ** (-1.0 / p.alpha - 1.0)
    return float(out) if out.ndim == 0 else out


def marginal_quantile(p: CoreParams, i: int, u):
    """Solve Gbar_i(z) = u; closed form z = (1/gamma_i) ln((u^-alpha - alpha_i)/(1 - alpha_i))."""
    gamma, aw = _marg(p, i)
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0.0) or np.any(u > 1.0):
        raise DomainError("u must lie in (0, 1]")
    with np.errstate(over="ignore"):
        out = np.log((u ** (-p.alpha) - aw) / (1.0 - aw)) / gamma
    out = np.maximum(out, 0.0)
    return float(out) if out.ndim == 0 else out


def _marg(p: CoreParams, i: int):
    if i == 1:
        return p.gamma1, p.alpha1
    if i == 2:
        return p.gamma2, p.alpha2
    raise DomainError("margin index must be 1 or 2")


def singular_mass_raw(p: CoreParams) -> float:
    """((1-alpha1) gamma1 + (1-alpha2) gamma2) / (alpha lambda) - 1, unclamped."""
    return ((1.0 - p.alpha1) * p.gamma1 + (1.0 - p.alpha2) * p.gamma2) / (p.alpha * p.lam) - 1.0


def singular_mass(p: CoreParams) -> float:
    """P(X = Y) of the core; negative-within-slack values clamp to 0 with a warning."""
    mass = singular_mass_raw(p)
    if mass < -p.slack:
        raise ValidationError(
            f"singular mass {mass:.6e} is negative beyond slack {p.slack:.1e}; parameters inconsistent"
        )
    if mass < 0.0:
        warnings.warn(
            f"singular mass {mass:.3e} slightly negative (rounded parameters); clamped to 0",
            RuntimeWarning,
            stacklevel=2,
        )
        return 0.0
    if mass > 1.0:
        raise ValidationError(f"singular mass {mass:.6e} exceeds 1")
    return mass


def core_copula(p: CoreParams, u, v):
    """Survival copula of Gbar.

    On the gamma1=gamma2, lambda=gamma/alpha subfamily the closed form

        C(u, v) = (alpha2 A(u) + alpha1 B(v) + (1-alpha1-alpha2) max(A(u), B(v)))^{-1/alpha}

    with A(u) = (u^-alpha - alpha1)/(1 - alpha1) applies; otherwise the copula
    is composed as Gbar(Gbar1^-1(u), Gbar2^-1(v)).
    """
    require_valid(p)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any(u < 0) or np.any(u > 1) or np.any(v < 0) or np.any(v > 1):
        raise DomainError("u and v must lie in [0, 1]")
    ui = np.clip(u, 1e-300, 1.0)
    vi = np.clip(v, 1e-300, 1.0)
    if p.is_mu:
        with np.errstate(over="ignore"):
            A = (ui ** (-p.alpha) - p.alpha1) / (1.0 - p.alpha1)
            B = (vi ** (-p.alpha) - p.alpha2) / (1.0 - p.alpha2)
            core = p.alpha2 * A + p.alpha1 * B + (1.0 - p.alpha1 - p.alpha2) * np.maximum(A, B)
            out = core ** (-1.0 / p.alpha)
    else:
        x = marginal_quantile(p, 1, ui)
        y = marginal_quantile(p, 2, vi)
        out = np.exp(gbar_log(p, x, y))
    out = np.where((u <= 0) | (v <= 0), 0.0, out)
    out = np.where(u >= 1, v, np.where(v >= 1, u, out))
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def core_copula_generic(p: CoreParams, u, v):
    """The composition route Gbar(Gbar1^-1(u), Gbar2^-1(v)); oracle for the closed form."""
    u = np.clip(np.asarray(u, dtype=float), 1e-300, 1.0)
    v = np.clip(np.asarray(v, dtype=float), 1e-300, 1.0)
    x = marginal_quantile(p, 1, u)
    y = marginal_quantile(p, 2, v)
    out = np.exp(gbar_log(p, x, y))
    return float(out) if np.ndim(out) == 0 else out


def weak_lmp_residual(p: CoreParams, x, y, t):
    """Gbar(x+t, y+t) - Gbar(x, y) Gbar(t, t); zero for every member of the family."""
    if min(np.min(np.asarray(x)), np.min(np.asarray(y)), np.min(np.asarray(t))) < 0:
        raise DomainError("x, y, t must be nonnegative")
    lhs = np.exp(gbar_log(p, np.asarray(x) + t, np.asarray(y) + t))
    rhs = np.exp(gbar_log(p, x, y) + gbar_log(p, t, t))
    out = np.asarray(lhs - rhs, dtype=float)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# strong lack-of-memory solutions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StrongCore:
    """F(x, y) = Hbar(x + a y) for a convex univariate survival function Hbar.

    These are exactly the solutions of the strong two-parameter equation
    F(x+s, y+t) = F(x, y) F(s, t) relaxed through a distortion d_{s,t} that
    depends on s + a t only.
    """

    hbar: object
    a: float

    def __post_init__(self):
        if self.a <= 0:
            raise ValidationError("a must be positive")
        if abs(self.hbar(0.0) - 1.0) > 1e-9:
            raise ValidationError("Hbar(0) must equal 1")
        grid = np.concatenate([[0.0], np.geomspace(1e-3, 1e3, 41)])
        vals = np.array([self.hbar(z) for z in grid])
        if np.any(np.diff(vals) > 1e-12):
            raise ValidationError("Hbar must be nonincreasing")
        # convexity via second differences on the log-spaced grid
        second = vals[:-2] - 2.0 * vals[1:-1] + vals[2:]
        # uneven spacing: use divided differences instead
        dd = np.diff(vals) / np.diff(grid)
        if np.any(np.diff(dd) < -1e-9):
            raise ValidationError("Hbar must be convex")
        del second


def strong_eval(s: StrongCore, x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x < 0) or np.any(y < 0):
        raise DomainError("x and y must be nonnegative")
    out = np.vectorize(s.hbar)(x + s.a * y)
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def _hbar_inverse(s: StrongCore, v: float) -> float:
    if v >= 1.0:
        return 0.0
    hi = 1.0
    for _ in range(400):
        if s.hbar(hi) < v:
            break
        hi *= 2.0
    return invert_monotone(s.hbar, v, 0.0, hi, tol=1e-13)


def strong_distortion(s: StrongCore, s_shift: float, t_shift: float, v):
    """d_{s,t}(v) = Hbar(s + a t + Hbar^-1(v)) / Hbar(s + a t)."""
    if s_shift < 0 or t_shift < 0:
        raise DomainError("shifts must be nonnegative")
    w = s_shift + s.a * t_shift
    denom = s.hbar(w)
    if denom <= 0:
        raise DomainError("Hbar vanishes at the shift; distortion undefined")
    v = np.asarray(v, dtype=float)
    if np.any(v < 0) or np.any(v > 1):
        raise DomainError("v must lie in [0, 1]")

    def one(vi):
        if vi <= 0.0:
            return 0.0
        if vi >= 1.0:
            return 1.0
        return s.hbar(w + _hbar_inverse(s, vi)) / denom

    out = np.vectorize(one)(v)
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out
