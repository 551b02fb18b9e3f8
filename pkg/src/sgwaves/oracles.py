"""Independent numerical cross-checks for the closed-form waves.

Nothing in here reuses the closed-form solution formulas: the reduced ODE
and the Riccati equation are integrated directly with a classic 4th-order
fixed-step scheme (step-halved until two refinements agree), the period
integral is done by adaptive Gauss-Kronrod bisection, and the field
equation residual is measured with 5-point finite-difference stencils on
phi_eval.  Agreement between these routes and the closed forms is what the
test suite asserts.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .closed_form import F_map, TravellingWave, WaveBranch, phi_eval, theta, xi_period
from .errors import DomainError, NoConvergence, PoleProximity
from .model import ModelParams

TWO_PI = 2.0 * math.pi

DEFAULT_ODE_TOL = 1e-9
DEFAULT_QUAD_TOL = 1e-10
MAX_QUAD_EVALS = 10**6
_BLOWUP_Y = 1e12     # |y| beyond this is reported as a pole in the samples
_CHART_SWAP = 1.0    # |y| (or |z|) beyond this switches the projective chart


@dataclass
class OdeSolution:
    """Trajectory samples of a scalar first-order ODE in xi."""

    xs: np.ndarray
    ys: np.ndarray
    step_used: float
    pole_events: list[float] = field(default_factory=list)


def _check_span(xi_span, tol):
    lo, hi = float(xi_span[0]), float(xi_span[1])
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise DomainError(f"xi span must be finite with hi > lo, got {xi_span}")
    if not tol > 0.0:
        raise DomainError(f"tol must be positive, got {tol}")
    return lo, hi


def _rk4_scalar(rhs, x0: float, y0: float, n: int, h: float) -> np.ndarray:
    ys = np.empty(n + 1)
    ys[0] = y = y0
    x = x0
    for i in range(n):
        k1 = rhs(x, y)
        k2 = rhs(x + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(x + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(x + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        x = x0 + (i + 1) * h
        ys[i + 1] = y
    return ys


def ode_solve_g(
    params: ModelParams,
    g0: float,
    xi_span,
    tol: float = DEFAULT_ODE_TOL,
    max_halvings: int = 20,
) -> OdeSolution:
    """Integrate alpha*g' = gamma - sin(g) over the span by fixed-step RK4.

    The step is halved until two successive refinements differ by less than
    tol in sup norm at the shared grid points.
    """
    lo, hi = _check_span(xi_span, tol)
    alpha, gamma = params.alpha, params.gamma

    def rhs(_x, g):
        return (gamma - math.sin(g)) / alpha

    n = max(16, int(math.ceil((hi - lo) * 4.0)))
    prev = _rk4_scalar(rhs, lo, g0, n, (hi - lo) / n)
    for _ in range(max_halvings):
        n *= 2
        h = (hi - lo) / n
        cur = _rk4_scalar(rhs, lo, g0, n, h)
        if np.max(np.abs(cur[::2] - prev)) < tol:
            return OdeSolution(lo + h * np.arange(n + 1), cur, h)
        prev = cur
    raise NoConvergence(f"RK4 for g did not converge to tol={tol} in {max_halvings} halvings")


def _integrate_riccati(params: ModelParams, y0: float, lo: float, hi: float, n: int):
    """One fixed-step projective RK4 pass through the Riccati equation.

    The state lives on the chart where it is small: y while |y| <= 1, else
    z = -1/y (which obeys 2*alpha*z' = gamma*(1+z^2) - 2*z, a regular flow
    with z = 0 exactly at the poles of y).  Chart swaps keep fixed-step RK4
    uniformly accurate; pole crossings are recorded where z changes sign.
    Returns (angle samples atan(y), y samples, pole xis).
    """
    alpha, gamma = params.alpha, params.gamma
    h = (hi - lo) / n

    def rhs_y(v):
        return (2.0 * v + gamma * (1.0 + v * v)) / (2.0 * alpha)

    def rhs_z(v):
        return (gamma * (1.0 + v * v) - 2.0 * v) / (2.0 * alpha)

    in_y = abs(y0) <= _CHART_SWAP
    v = y0 if in_y else -1.0 / y0
    angles = np.empty(n + 1)
    ys = np.empty(n + 1)
    poles: list[float] = []

    def record(i, v, in_y):
        if in_y:
            ys[i] = v
            angles[i] = math.atan(v)
        else:
            ys[i] = math.inf if v == 0.0 else -1.0 / v
            angles[i] = math.copysign(0.5 * math.pi, ys[i]) if v == 0.0 else math.atan(ys[i])

    record(0, v, in_y)
    for i in range(n):
        x = lo + i * h
        f = rhs_y if in_y else rhs_z
        k1 = f(v)
        k2 = f(v + 0.5 * h * k1)
        k3 = f(v + 0.5 * h * k2)
        k4 = f(v + h * k3)
        v_new = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not in_y and (v <= 0.0 < v_new or v_new <= 0.0 < v):
            # linear interpolation of the z zero crossing = pole of y
            poles.append(x + h * v / (v - v_new))
        v = v_new
        if abs(v) > _CHART_SWAP:
            v = -1.0 / v
            in_y = not in_y
        record(i + 1, v, in_y)
    return angles, ys, poles


def ode_solve_y(
    params: ModelParams,
    y0: float,
    xi_span,
    tol: float = DEFAULT_ODE_TOL,
    max_halvings: int = 20,
) -> OdeSolution:
    """Integrate the Riccati equation 2*alpha*y' = 2*y + gamma*(1 + y^2).

    Blow-ups of y are coordinate artifacts: the integration swaps to
    z = -1/y near them and records each z zero crossing as a pole event.
    Refinement convergence is measured in atan(y), which stays bounded
    through the poles; samples where |y| exceeds 1e12 are flagged by the
    nearest pole event rather than stored as huge values.
    """
    lo, hi = _check_span(xi_span, tol)
    n = max(16, int(math.ceil((hi - lo) * 4.0)))
    prev_angles, _, _ = _integrate_riccati(params, y0, lo, hi, n)
    for _ in range(max_halvings):
        n *= 2
        h = (hi - lo) / n
        angles, ys, poles = _integrate_riccati(params, y0, lo, hi, n)
        # projective-line distance: atan(y) mod pi, so a sample that lands
        # on a pole compares +pi/2 and -pi/2 as coincident, not a pi jump
        diff = np.abs(angles[::2] - prev_angles)
        diff = np.minimum(diff, math.pi - np.minimum(diff, math.pi))
        if np.max(diff) < tol:
            xs = lo + h * np.arange(n + 1)
            keep = np.abs(ys) <= _BLOWUP_Y
            return OdeSolution(xs[keep], ys[keep], h, poles)
        prev_angles = angles
    raise NoConvergence(f"RK4 for y did not converge to tol={tol} in {max_halvings} halvings")


# 15-point Kronrod nodes with the embedded 7-point Gauss rule (QUADPACK values).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
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

_NODES = np.concatenate([-_XGK[:7], _XGK[7:], _XGK[6::-1]])          # ascending in [-1, 1]
_KWEIGHTS = np.concatenate([_WGK[:7], _WGK[7:], _WGK[6::-1]])
_GWEIGHTS = np.zeros(15)
_GWEIGHTS[1:14:2] = np.concatenate([_WG[:3], _WG[3:], _WG[2::-1]])


def _gk15(f, a: float, b: float) -> tuple[float, float]:
    """Kronrod-15 estimate of the panel integral plus an embedded error bound."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    fx = f(mid + half * _NODES)
    ik = half * float(np.dot(_KWEIGHTS, fx))
    ig = half * float(np.dot(_GWEIGHTS, fx))
    return ik, abs(ik - ig)


def adaptive_quadrature(f, a: float, b: float, tol: float, max_evals: int = MAX_QUAD_EVALS) -> float:
    """Integrate f over [a, b] to absolute tolerance tol by panel bisection.

    Each panel carries a 15-point Kronrod value plus a 7-point embedded
    error estimate; the panel with the largest estimate is split until the
    total estimate drops below tol.  f must accept numpy arrays.
    """
    if not tol > 0.0:
        raise DomainError(f"tol must be positive, got {tol}")
    if b <= a:
        raise DomainError("adaptive quadrature expects b > a")
    value, err = _gk15(f, a, b)
    heap = [(-err, 0, a, b, value, err)]
    count = 1
    evals = 15
    total_err = err
    while total_err > tol:
        if evals >= max_evals:
            raise NoConvergence(
                f"quadrature tolerance {tol} unreachable within {max_evals} evaluations"
            )
        _, _, pa, pb, pv, perr = heapq.heappop(heap)
        pm = 0.5 * (pa + pb)
        lv, le = _gk15(f, pa, pm)
        rv, re = _gk15(f, pm, pb)
        evals += 30
        heapq.heappush(heap, (-le, (count := count + 1), pa, pm, lv, le))
        heapq.heappush(heap, (-re, (count := count + 1), pm, pb, rv, re))
        total_err = math.fsum(item[5] for item in heap)
    return math.fsum(item[4] for item in heap)


def quad_period(params: ModelParams, tol: float = DEFAULT_QUAD_TOL,
                max_evals: int = MAX_QUAD_EVALS) -> float:
    """Period integral alpha * int_0^{2pi} ds/(gamma - sin s) by quadrature.

    The integrand is smooth for gamma > 1 but develops a sharp peak at
    s = pi/2 as gamma -> 1+; adaptive bisection concentrates panels there.
    """
    gamma = params.gamma
    if gamma <= 1.0:
        raise DomainError(f"period integral requires gamma > 1, got {gamma}")

    def f(s):
        return params.alpha / (gamma - np.sin(s))

    return adaptive_quadrature(f, 0.0, TWO_PI, tol, max_evals)


def _singular_points_in(gamma: float, lo: float, hi: float) -> bool:
    """Whether sin(s) = gamma has a solution in the closed interval [lo, hi]."""
    if gamma > 1.0:
        return False
    a = math.asin(gamma)
    for base in (a, math.pi - a):
        k_lo = math.ceil((lo - base) / TWO_PI - 1e-15)
        k_hi = math.floor((hi - base) / TWO_PI + 1e-15)
        if k_lo <= k_hi:
            return True
    return False


def implicit_xi_of_g(params: ModelParams, g_from: float, g_to: float,
                     tol: float = DEFAULT_QUAD_TOL) -> float:
    """xi displacement alpha * int_{g_from}^{g_to} ds/(gamma - sin s).

    Valid only while the denominator keeps one sign on the path; a zero of
    gamma - sin(s) anywhere on the closed path (endpoints included) makes
    the displacement divergent and raises DomainError.
    """
    lo, hi = min(g_from, g_to), max(g_from, g_to)
    if _singular_points_in(params.gamma, lo, hi):
        raise DomainError("gamma - sin(s) vanishes on the integration path")
    if lo == hi:
        return 0.0

    def f(s):
        return params.alpha / (params.gamma - np.sin(s))

    value = adaptive_quadrature(f, lo, hi, tol)
    return value if g_to >= g_from else -value


_IDENTITY_KEYS = ("zaza", "zaza2", "F_plus", "F_minus", "pi8", "rationalize_sin4")


@dataclass
class IdentityReport:
    """Absolute residuals of the closed-form trigonometric identities."""

    gamma: float
    residuals: dict[str, float]


def identities_check(gamma: float) -> IdentityReport:
    """Numeric residuals of the identities behind the F limits.

    Checked against theta = asin(gamma)/4: the two bisection square roots,
    the F values at both fixed points, tan(pi/8) = sqrt(2) - 1, and the
    quadruplication formula for sin(4*theta).  At gamma = 0 the y_- fixed
    point diverges, so that residual is recorded as 0 by convention (the F
    limit is 0 = tan 0).
    """
    if not 0.0 <= gamma <= 1.0:
        raise DomainError(f"identities defined for 0 <= gamma <= 1, got {gamma}")
    th = theta(gamma)
    root = math.sqrt((1.0 - gamma) * (1.0 + gamma))
    sqrt2 = math.sqrt(2.0)
    tan_th = math.tan(th)
    res = {
        "zaza": abs(math.sqrt(1.0 + root) - sqrt2 * math.cos(2.0 * th)),
        "zaza2": abs(math.sqrt(1.0 - root) - sqrt2 * math.sin(2.0 * th)),
        "pi8": abs((sqrt2 - 1.0) - math.tan(0.125 * math.pi)),
        "rationalize_sin4": abs(
            math.sin(4.0 * th)
            - 4.0 * tan_th * (1.0 - tan_th ** 2) / (1.0 + tan_th ** 2) ** 2
        ),
    }
    y_plus = -gamma / (1.0 + root)
    res["F_plus"] = abs(F_map(y_plus) - math.tan(0.25 * math.pi - th))
    if gamma == 0.0:
        res["F_minus"] = 0.0
    else:
        y_minus = -(1.0 + root) / gamma
        res["F_minus"] = abs(F_map(y_minus) - tan_th)
    assert set(res) == set(_IDENTITY_KEYS)
    return IdentityReport(gamma, res)


def _nearest_pole_distance(wave: TravellingWave, xi: float) -> float:
    """Distance from xi to the nearest pole of y, inf for pole-free branches."""
    d = xi - wave.xi0
    if wave.branch in (WaveBranch.INCREASING2, WaveBranch.CRITICAL_KINK):
        return abs(d)
    if wave.branch is WaveBranch.KINK_ARRAY:
        period = xi_period(wave.params)
        k = round(d / period - 0.5)
        return abs(d - period * (k + 0.5))
    return math.inf


def pde_residual(wave: TravellingWave, x: float, t: float, h: float) -> float:
    """Field-equation residual phi_tt - phi_xx + sin(phi) + alpha*phi_t + gamma.

    Second derivatives use 5-point central stencils of step h on phi_eval;
    the point must keep more than 10*h away from any pole of y so no
    stencil point lands in a pole window.
    """
    if not h > 0.0:
        raise DomainError(f"h must be positive, got {h}")
    xi = wave.chirality * x - t
    if not wave.branch.is_constant and _nearest_pole_distance(wave, xi) <= 10.0 * h:
        raise PoleProximity(f"(x={x}, t={t}) maps within 10*h of a pole of y")
    off = h * np.arange(-2.0, 3.0)
    w2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / (12.0 * h * h)
    w1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / (12.0 * h)
    phi_x5 = phi_eval(wave, x + off, t)
    phi_t5 = phi_eval(wave, x, t + off)
    phi0 = float(np.asarray(phi_t5)[2])
    phi_tt = float(np.dot(w2, phi_t5))
    phi_xx = float(np.dot(w2, phi_x5))
    phi_t = float(np.dot(w1, phi_t5))
    p = wave.params
    return phi_tt - phi_xx + math.sin(phi0) + p.alpha * phi_t + p.gamma
