"""Closed-form travelling waves with unit velocity.

Every wave is phi(x, t) = g(xi) - pi with xi = chirality*x - t, where g
solves the reduced equation alpha*g' = gamma - sin(g).  The solution
families come from the substitution chain g = 4*atan(F), F = y + sqrt(1+y^2),
which turns the g equation into the Riccati equation

    2*alpha*y' = 2*y + gamma*(1 + y^2).

Branches by forcing strength:

* 0 < gamma < 1: two heteroclinic families joining the Riccati fixed points
  y_-, y_+ (one decreasing in g, one increasing with a benign pole of y).
* gamma == 1:    a single critical profile with an algebraic 1/xi tail.
* gamma > 1:     a periodic tan profile whose g is linear-periodic with
  period Xi = 2*pi*alpha/sqrt(gamma^2 - 1) -- an array of equally spaced
  kinks.
* gamma == 0:    the undriven equation alpha*g' = -sin(g) integrates to
  g = 2*atan(exp((xi0 - xi)/alpha)) and its mirror; both are kept as
  explicit branches because the gamma < 1 formulas degenerate there.

g is kept continuous through the poles of y by adding 2*pi per pole
crossed; pole locations are known analytically per branch, so no numerical
unwrap heuristics are involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError
from .model import ModelParams, constant_solutions

TWO_PI = 2.0 * math.pi

# Relative half-width of the analytic pole windows inside which g is
# evaluated by its (exact) limit value instead of through F(y(xi)).
_POLE_WINDOW = 1e-8


class WaveBranch(Enum):
    CONSTANT_S = "constant_s"
    CONSTANT_U = "constant_u"
    DECREASING1 = "decreasing1"
    INCREASING2 = "increasing2"
    CRITICAL_KINK = "critical_kink"
    KINK_ARRAY = "kink_array"
    PURE_SG_DECREASING = "pure_sg_decreasing"
    PURE_SG_INCREASING = "pure_sg_increasing"

    @property
    def is_constant(self) -> bool:
        return self in (WaveBranch.CONSTANT_S, WaveBranch.CONSTANT_U)


def branch_compatible(branch: WaveBranch, gamma: float) -> bool:
    """Whether a branch exists at the given (normalized) forcing."""
    if branch.is_constant:
        return gamma <= 1.0
    if branch in (WaveBranch.DECREASING1, WaveBranch.INCREASING2):
        return 0.0 < gamma < 1.0
    if branch is WaveBranch.CRITICAL_KINK:
        return gamma == 1.0
    if branch is WaveBranch.KINK_ARRAY:
        return gamma > 1.0
    return gamma == 0.0  # pure sine-Gordon pair


@dataclass(frozen=True)
class TravellingWave:
    """One unit-velocity wave: branch + phase offset + direction of travel.

    chirality +1 selects xi = x - t (right-moving), -1 selects xi = -x - t.
    """

    params: ModelParams
    branch: WaveBranch
    xi0: float = 0.0
    chirality: int = 1

    def __post_init__(self):
        if self.chirality not in (1, -1):
            raise DomainError(f"chirality must be +1 or -1, got {self.chirality}")
        if not math.isfinite(self.xi0):
            raise DomainError(f"xi0 must be finite, got {self.xi0}")
        if not branch_compatible(self.branch, self.params.gamma):
            raise DomainError(
                f"branch {self.branch.value} does not exist at gamma={self.params.gamma}"
            )


@dataclass(frozen=True)
class FixedPoints:
    """Real roots of gamma*(1 + y^2) + 2*y = 0, when they exist."""

    y_plus: float
    y_minus: float
    real_valued: bool


def y_fixed_points(params: ModelParams) -> FixedPoints:
    """Constant Riccati solutions y_- <= y_+ < 0, real only for 0 < gamma <= 1."""
    g = params.gamma
    if g == 0.0:
        raise DomainError("fixed-point quadratic degenerates at gamma = 0")
    if g > 1.0:
        return FixedPoints(math.nan, math.nan, False)
    root = math.sqrt((1.0 - g) * (1.0 + g))
    y_minus = -(1.0 + root) / g
    # product of the roots is 1; this form avoids cancellation for small gamma
    y_plus = -g / (1.0 + root)
    return FixedPoints(y_plus, y_minus, True)


def subcritical_rate(params: ModelParams) -> float:
    """Exponential approach rate A = sqrt(1 - gamma^2)/alpha (gamma <= 1)."""
    if params.gamma > 1.0:
        raise DomainError("rate defined only for gamma <= 1")
    return math.sqrt((1.0 - params.gamma) * (1.0 + params.gamma)) / params.alpha


def xi_period(params: ModelParams) -> float:
    """Spatial period Xi = 2*pi*alpha / sqrt(gamma^2 - 1) of the kink array."""
    g = params.gamma
    if g <= 1.0:
        raise DomainError(f"period requires gamma > 1, got {g}")
    return TWO_PI * params.alpha / math.sqrt((g - 1.0) * (g + 1.0))


def theta(gamma: float) -> float:
    """Quarter arcsine of the forcing, the angle entering the F limits."""
    if not 0.0 <= gamma <= 1.0:
        raise DomainError(f"theta requires 0 <= gamma <= 1, got {gamma}")
    return 0.25 * math.asin(gamma)


def F_map(y):
    """Map y to F = y + sqrt(1 + y^2) without catastrophic cancellation.

    For y < 0 the equivalent form 1/(sqrt(1+y^2) - y) is used.  Accepts
    scalars or arrays and extended reals: F(-inf) = 0, F(+inf) = +inf.
    """
    arr = np.asarray(y, dtype=float)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        r = np.sqrt(1.0 + arr * arr)
        F = np.where(arr >= 0.0, arr + r, 1.0 / (r - arr))
    return F if arr.ndim else float(F)


def _require_branch(wave: TravellingWave, allowed) -> None:
    if wave.branch not in allowed:
        raise DomainError(f"operation not defined for branch {wave.branch.value}")


_Y_BRANCHES = (
    WaveBranch.DECREASING1,
    WaveBranch.INCREASING2,
    WaveBranch.CRITICAL_KINK,
    WaveBranch.KINK_ARRAY,
    WaveBranch.PURE_SG_DECREASING,
    WaveBranch.PURE_SG_INCREASING,
)


def y_eval(wave: TravellingWave, xi):
    """Riccati profile y(xi) for a non-constant branch.

    Inside the analytic pole windows (increasing2 and critical_kink at xi0,
    kink_array at xi0 + Xi*(k + 1/2)) the profile is served as a signed
    infinity: +inf approaching a pole from the left, -inf leaving it to the
    right, +inf at the exact pole (y increases through all of them).
    """
    _require_branch(wave, _Y_BRANCHES)
    p = wave.params
    branch = wave.branch
    arr = np.asarray(xi, dtype=float)
    d = arr - wave.xi0
    pole_offset = None  # signed distance to the nearest pole, if any
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        if branch is WaveBranch.DECREASING1:
            fp = y_fixed_points(p)
            e = np.exp(subcritical_rate(p) * d)
            y = fp.y_minus + (fp.y_plus - fp.y_minus) / (1.0 + e)
        elif branch is WaveBranch.INCREASING2:
            fp = y_fixed_points(p)
            e = np.exp(subcritical_rate(p) * d)
            y = fp.y_minus + (fp.y_plus - fp.y_minus) / (1.0 - e)
            pole_offset = d
        elif branch is WaveBranch.CRITICAL_KINK:
            y = -1.0 - 2.0 * p.alpha / d
            pole_offset = d
        elif branch is WaveBranch.KINK_ARRAY:
            period = xi_period(p)
            u = d / period
            w = u - np.round(u)  # reduced phase in [-1/2, 1/2]; poles at |w| = 1/2
            c = math.sqrt((p.gamma - 1.0) * (p.gamma + 1.0)) / p.gamma
            y = -1.0 / p.gamma + c * np.tan(math.pi * w)
            pole_offset = d - period * (np.round(u - 0.5) + 0.5)
        else:  # pure sine-Gordon: y = -cot(g/2) with g from the explicit profile
            g = _g_pure_sg(wave, d)
            y = -np.cos(0.5 * g) / np.sin(0.5 * g)
        if pole_offset is not None:
            window = _pole_window(wave)
            near = np.abs(pole_offset) < window
            y = np.where(near & (pole_offset <= 0.0), math.inf, y)
            y = np.where(near & (pole_offset > 0.0), -math.inf, y)
    return y if arr.ndim else float(y)


def _g_pure_sg(wave: TravellingWave, d):
    """Unwrapped g for the gamma = 0 branches (no poles, base range (0, 2*pi))."""
    with np.errstate(over="ignore"):
        half = 2.0 * np.arctan(np.exp(-d / wave.params.alpha))
    if wave.branch is WaveBranch.PURE_SG_DECREASING:
        return half
    return TWO_PI - half


def _pole_window(wave: TravellingWave) -> float:
    """Half-width of the neighborhood where g is served from its limit value."""
    p = wave.params
    if wave.branch is WaveBranch.KINK_ARRAY:
        scale = max(1.0, xi_period(p))
    elif wave.branch is WaveBranch.CRITICAL_KINK:
        scale = max(1.0, p.alpha)
    else:
        scale = max(1.0, 1.0 / subcritical_rate(p))
    return _POLE_WINDOW * scale


def g_eval(wave: TravellingWave, xi):
    """Continuous unwrapped g(xi) for a non-constant branch.

    The base value 4*atan(F(y(xi))) lies in (0, 2*pi); continuity through
    each pole of y is restored by adding 2*pi per pole left of xi.  Within
    a tiny analytic window of each pole g is served from its exact limit
    value (y overflows there, the limit does not).
    """
    _require_branch(wave, _Y_BRANCHES)
    branch = wave.branch
    arr = np.asarray(xi, dtype=float)
    d = arr - wave.xi0

    if branch in (WaveBranch.PURE_SG_DECREASING, WaveBranch.PURE_SG_INCREASING):
        g = _g_pure_sg(wave, d)
        return g if arr.ndim else float(g)

    base = 4.0 * np.arctan(F_map(y_eval(wave, arr)))
    if branch is WaveBranch.DECREASING1:
        g = base
    elif branch in (WaveBranch.INCREASING2, WaveBranch.CRITICAL_KINK):
        g = base + TWO_PI * (d > 0.0)
        g = np.where(np.abs(d) < _pole_window(wave), TWO_PI, g)
    else:  # kink array
        period = xi_period(wave.params)
        g = base + TWO_PI * np.floor(d / period + 0.5)
        k = np.round(d / period - 0.5)  # index of the nearest pole
        dist = np.abs(d - period * (k + 0.5))
        g = np.where(dist < _pole_window(wave), TWO_PI * (k + 1.0), g)
    return g if arr.ndim else float(g)


def g_slope(wave: TravellingWave, xi):
    """Exact derivative g'(xi) = (gamma - sin(g))/alpha via the reduced equation."""
    p = wave.params
    return (p.gamma - np.sin(g_eval(wave, xi))) / p.alpha


def phi_eval(wave: TravellingWave, x, t):
    """Field value phi(x, t); constant branches return the uniform states."""
    if wave.branch.is_constant:
        cs = constant_solutions(wave.params)
        value = cs.phi_s if wave.branch is WaveBranch.CONSTANT_S else cs.phi_u
        shape = np.broadcast(np.asarray(x), np.asarray(t)).shape
        return np.full(shape, value) if shape else value
    xi = wave.chirality * np.asarray(x, dtype=float) - np.asarray(t, dtype=float)
    return g_eval(wave, xi) - math.pi


def g_limits(wave: TravellingWave) -> tuple[float, float]:
    """Asymptotic values (lim xi->-inf, lim xi->+inf) of g; gamma <= 1 only."""
    branch = wave.branch
    if branch.is_constant or branch is WaveBranch.KINK_ARRAY:
        raise DomainError(f"g has no finite limits for branch {branch.value}")
    a = math.asin(wave.params.gamma)
    if branch is WaveBranch.DECREASING1:
        return (math.pi - a, a)
    if branch is WaveBranch.INCREASING2:
        return (math.pi - a, TWO_PI + a)
    if branch is WaveBranch.CRITICAL_KINK:
        return (0.5 * math.pi, 2.5 * math.pi)
    if branch is WaveBranch.PURE_SG_DECREASING:
        return (math.pi, 0.0)
    return (math.pi, TWO_PI)


def phi_limits(wave: TravellingWave) -> tuple[float, float]:
    """Field limits (x -> -inf, x -> +inf), accounting for chirality."""
    lo, hi = g_limits(wave)
    if wave.chirality == 1:
        return (lo - math.pi, hi - math.pi)
    return (hi - math.pi, lo - math.pi)


def constant_y_value(params: ModelParams, branch: WaveBranch) -> float:
    """y value of a constant branch (the gamma = 0 unstable state maps to -inf)."""
    if branch is WaveBranch.CONSTANT_S:
        return -params.gamma / (1.0 + math.sqrt((1.0 - params.gamma) * (1.0 + params.gamma)))
    if branch is WaveBranch.CONSTANT_U:
        if params.gamma == 0.0:
            return -math.inf
        return y_fixed_points(params).y_minus
    raise DomainError(f"branch {branch.value} is not constant")
