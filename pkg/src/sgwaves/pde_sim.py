"""Finite-difference evolution of the damped, driven sine-Gordon equation.

The scheme is a second-order leapfrog on phi_tt - phi_xx + sin(phi)
+ alpha*phi_t + gamma = 0 with the damping term time-centered and solved
implicitly (one scalar division per point), so the CFL restriction comes
from the wave part alone.  Domains are either a circle of length m*Xi with
twisted periodic boundaries phi(x + L) = phi(x) + chirality*2*pi*m, or a
segment whose end points are pinned to the exact travelling wave at the
current time.

The stability observable is the co-moving deviation: the RMS distance
between the field and the reference wave minimized over spatial shifts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .closed_form import TravellingWave, phi_eval, xi_period
from .errors import BlowUp, DomainError
from .model import ModelParams, wrap_to

TWO_PI = 2.0 * math.pi

BLOWUP_THRESHOLD = 1e6  # radians; far beyond any physical excursion


class BoundaryMode(Enum):
    TWISTED_PERIODIC = "twisted_periodic"
    DIRICHLET_FROM_WAVE = "dirichlet_from_wave"


@dataclass(frozen=True)
class Circle:
    """Periodic domain of length m * Xi; requires gamma > 1."""

    m: int


@dataclass(frozen=True)
class Segment:
    x_lo: float
    x_hi: float


@dataclass(frozen=True)
class FieldState:
    """Discretized (phi, phi at t - dt) plus the grid and boundary metadata."""

    n: int
    dx: float
    phi: np.ndarray
    phi_prev: np.ndarray
    t: float
    winding: int
    boundary: BoundaryMode
    chirality: int
    x0: float
    dt: float
    boundary_wave: TravellingWave | None = None

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    @property
    def twist(self) -> float:
        return self.chirality * TWO_PI * self.winding

    @property
    def length(self) -> float:
        """Domain extent: n*dx on a circle, (n-1)*dx on a segment."""
        if self.boundary is BoundaryMode.TWISTED_PERIODIC:
            return self.n * self.dx
        return (self.n - 1) * self.dx


@dataclass(frozen=True)
class Perturbation:
    """One-off sinusoidal kick applied to phi (and phi_prev, so phi_t is untouched)."""

    amplitude: float
    mode: int

    def __post_init__(self):
        if self.amplitude < 0.0:
            raise DomainError("perturbation amplitude must be >= 0")
        if self.mode < 1:
            raise DomainError("perturbation mode number must be >= 1")


@dataclass(frozen=True)
class SimConfig:
    dt: float
    t_end: float
    cfl_guard: float = 0.9
    record_every: int = 50
    perturbation: Perturbation | None = None
    probe: bool = False  # record divergence instead of raising BlowUp

    def __post_init__(self):
        if not self.dt > 0.0:
            raise DomainError("dt must be positive")
        if not self.t_end > 0.0:
            raise DomainError("t_end must be positive")
        if not 0.0 < self.cfl_guard <= 1.0:
            raise DomainError("cfl_guard must lie in (0, 1]")
        if self.record_every < 1:
            raise DomainError("record_every must be >= 1")


@dataclass
class DeviationReport:
    """Co-moving distance to the reference wave sampled over the run."""

    times: list[float] = field(default_factory=list)
    deviation: list[float] = field(default_factory=list)
    best_shift: list[float] = field(default_factory=list)
    diverged_at: float | None = None
    final_state: FieldState | None = None


def init_from_wave(wave: TravellingWave, n: int, domain, dt: float | None = None) -> FieldState:
    """Sample a wave at t = 0 (and t = -dt into phi_prev) on the given domain.

    dt defaults to 0.9*dx.  phi_prev is sampled from the exact wave, so the
    initial data carry no start-up error.
    """
    if n < 64:
        raise DomainError(f"grid must have n >= 64 points, got {n}")
    if isinstance(domain, Circle):
        if domain.m < 1:
            raise DomainError("circle winding m must be >= 1")
        if wave.params.gamma <= 1.0:
            raise DomainError("circle domains need gamma > 1 (period undefined otherwise)")
        length = domain.m * xi_period(wave.params)
        dx = length / n
        x0 = 0.0
        winding = domain.m
        boundary = BoundaryMode.TWISTED_PERIODIC
        boundary_wave = None
    elif isinstance(domain, Segment):
        if not domain.x_hi > domain.x_lo:
            raise DomainError("segment needs x_hi > x_lo")
        dx = (domain.x_hi - domain.x_lo) / (n - 1)
        x0 = domain.x_lo
        winding = 0
        boundary = BoundaryMode.DIRICHLET_FROM_WAVE
        boundary_wave = wave
    else:
        raise DomainError(f"unknown domain type {type(domain).__name__}")

    if dt is None:
        dt = 0.9 * dx
    if not 0.0 < dt <= dx:
        raise DomainError(f"dt must satisfy 0 < dt <= dx, got dt={dt}, dx={dx}")
    x = x0 + dx * np.arange(n)
    phi = np.asarray(phi_eval(wave, x, 0.0), dtype=float)
    phi_prev = np.asarray(phi_eval(wave, x, -dt), dtype=float)
    return FieldState(
        n=n, dx=dx, phi=phi, phi_prev=phi_prev, t=0.0, winding=winding,
        boundary=boundary, chirality=wave.chirality, x0=x0, dt=dt,
        boundary_wave=boundary_wave,
    )


def _second_difference(state: FieldState) -> np.ndarray:
    phi = state.phi
    dd = np.empty_like(phi)
    dd[1:-1] = phi[2:] - 2.0 * phi[1:-1] + phi[:-2]
    if state.boundary is BoundaryMode.TWISTED_PERIODIC:
        twist = state.twist
        dd[0] = phi[1] - 2.0 * phi[0] + (phi[-1] - twist)
        dd[-1] = (phi[0] + twist) - 2.0 * phi[-1] + phi[-2]
    else:
        dd[0] = 0.0   # end points are pinned below, values unused
        dd[-1] = 0.0
    return dd / (state.dx * state.dx)


def step(state: FieldState, params: ModelParams, dt: float) -> FieldState:
    """Advance one leapfrog step; raises BlowUp past the divergence threshold."""
    if dt != state.dt:
        raise DomainError("dt must match the state's leapfrog spacing")
    if dt > state.dx:
        raise DomainError(f"CFL violation: dt={dt} > dx={state.dx}")
    phi, phi_prev = state.phi, state.phi_prev
    accel = _second_difference(state) - np.sin(phi) - params.gamma
    half = 0.5 * params.alpha * dt
    phi_next = (dt * dt * accel + 2.0 * phi - (1.0 - half) * phi_prev) / (1.0 + half)
    t_next = state.t + dt
    if state.boundary is BoundaryMode.DIRICHLET_FROM_WAVE:
        bw = state.boundary_wave
        phi_next[0] = phi_eval(bw, state.x0, t_next)
        phi_next[-1] = phi_eval(bw, state.x0 + (state.n - 1) * state.dx, t_next)
    if np.max(np.abs(phi_next)) > BLOWUP_THRESHOLD:
        raise BlowUp(f"|phi| exceeded {BLOWUP_THRESHOLD:g} at t={t_next:g}", t=t_next)
    return replace(state, phi=phi_next, phi_prev=phi, t=t_next)


def _perturbation_profile(state: FieldState, pert: Perturbation) -> np.ndarray:
    u = (state.x - state.x0) / state.length
    wave = np.sin(TWO_PI * pert.mode * u)
    if state.boundary is BoundaryMode.DIRICHLET_FROM_WAVE:
        wave *= 0.5 * (1.0 - np.cos(TWO_PI * u))  # Hann window keeps the ends pinned
    return pert.amplitude * wave


def evolve(
    state: FieldState,
    params: ModelParams,
    config: SimConfig,
    reference: TravellingWave | None = None,
) -> DeviationReport:
    """Advance to t_end, recording co-moving deviation against the reference.

    The optional perturbation is applied once, to phi and phi_prev alike so
    that the initial phi_t is untouched.  In probe mode a BlowUp ends the
    run and is recorded in diverged_at instead of raising.
    """
    if config.dt != state.dt:
        raise DomainError("config.dt must match the state's leapfrog spacing")
    if config.dt > config.cfl_guard * state.dx:
        raise DomainError(
            f"dt={config.dt} violates the CFL guard {config.cfl_guard}*dx={config.cfl_guard * state.dx}"
        )
    if config.perturbation is not None:
        kick = _perturbation_profile(state, config.perturbation)
        state = replace(state, phi=state.phi + kick, phi_prev=state.phi_prev + kick)

    report = DeviationReport()

    def record(s: FieldState) -> None:
        if reference is None:
            return
        dev, shift = comoving_deviation(s, reference)
        report.times.append(s.t)
        report.deviation.append(dev)
        report.best_shift.append(shift)

    record(state)
    n_steps = int(math.ceil(config.t_end / config.dt - 1e-12))
    for i in range(1, n_steps + 1):
        try:
            state = step(state, params, config.dt)
        except BlowUp as exc:
            if config.probe:
                report.diverged_at = exc.t
                break
            raise
        if i % config.record_every == 0 or i == n_steps:
            record(state)
    report.final_state = state
    return report


def comoving_deviation(state: FieldState, reference: TravellingWave) -> tuple[float, float]:
    """(RMS distance, shift) to the reference wave, minimized over translation.

    Scans n candidate shifts one grid spacing apart, then refines the
    minimum with a 3-point parabola through the squared distances.
    """
    xs = state.x
    n = state.n
    shifts = (np.arange(n) - n // 2) * state.dx
    ref = np.asarray(phi_eval(reference, xs[None, :] - shifts[:, None], state.t))
    d2 = np.mean((state.phi[None, :] - ref) ** 2, axis=1)
    j = int(np.argmin(d2))

    periodic = state.boundary is BoundaryMode.TWISTED_PERIODIC
    if periodic:
        jm, jp = (j - 1) % n, (j + 1) % n
    elif 0 < j < n - 1:
        jm, jp = j - 1, j + 1
    else:
        return float(math.sqrt(d2[j])), float(shifts[j])

    denom = d2[jm] - 2.0 * d2[j] + d2[jp]
    s_best = float(shifts[j])
    if denom > 0.0 and math.isfinite(denom):
        offset = 0.5 * state.dx * float(d2[jm] - d2[jp]) / float(denom)
        s_ref = s_best + max(-state.dx, min(state.dx, offset))
        d2_ref = float(np.mean((state.phi - phi_eval(reference, xs - s_ref, state.t)) ** 2))
        if d2_ref <= d2[j]:
            return math.sqrt(d2_ref), s_ref
    return float(math.sqrt(d2[j])), s_best


def _phi_t_centered(state: FieldState, params: ModelParams) -> np.ndarray:
    """Second-order phi_t at the current time via one internal step forward."""
    nxt = step(state, params, state.dt)
    return (nxt.phi - state.phi_prev) / (2.0 * state.dt)


def _phi_x_centered(state: FieldState) -> np.ndarray:
    phi = state.phi
    px = np.empty_like(phi)
    px[1:-1] = (phi[2:] - phi[:-2]) / (2.0 * state.dx)
    if state.boundary is BoundaryMode.TWISTED_PERIODIC:
        twist = state.twist
        px[0] = (phi[1] - (phi[-1] - twist)) / (2.0 * state.dx)
        px[-1] = ((phi[0] + twist) - phi[-2]) / (2.0 * state.dx)
    else:
        px[0] = (-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / (2.0 * state.dx)
        px[-1] = (3.0 * phi[-1] - 4.0 * phi[-2] + phi[-3]) / (2.0 * state.dx)
    return px


def total_energy(state: FieldState, params: ModelParams) -> float:
    """Trapezoidal integral of the energy density over the grid.

    Diagnostic only: the damping and forcing terms make the true dynamics
    non-conservative.
    """
    phi_t = _phi_t_centered(state, params)
    phi_x = _phi_x_centered(state)
    h = 0.5 * phi_t ** 2 + 0.5 * phi_x ** 2 + params.gamma * state.phi - np.cos(state.phi)
    if state.boundary is BoundaryMode.TWISTED_PERIODIC:
        return float(state.dx * np.sum(h))
    return float(state.dx * (0.5 * h[0] + np.sum(h[1:-1]) + 0.5 * h[-1]))


def winding_number(state: FieldState) -> float:
    """Accumulated phase turns around a twisted periodic domain, in units of 2*pi.

    Equals chirality * m while the field stays in its topological sector;
    a 2*pi slip anywhere on the grid changes it by a whole unit.
    """
    if state.boundary is not BoundaryMode.TWISTED_PERIODIC:
        raise DomainError("winding is defined on twisted periodic domains only")
    inc = wrap_to(np.diff(state.phi), 0.0)
    closing = wrap_to(state.phi[0] + state.twist - state.phi[-1], 0.0)
    return float((np.sum(inc) + closing) / TWO_PI)


def write_snapshot_csv(state: FieldState, params: ModelParams, path) -> None:
    """Write the grid as CSV rows x,phi,phi_t (phi_t by centered difference)."""
    phi_t = _phi_t_centered(state, params)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("x,phi,phi_t\n")
        for x, p, pt in zip(state.x, state.phi, phi_t):
            fh.write(f"{x:.17g},{p:.17g},{pt:.17g}\n")


def write_deviation_csv(report: DeviationReport, path) -> None:
    """Write the recorded co-moving deviations as CSV rows t,deviation,shift."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t,deviation,shift\n")
        for t, dev, s in zip(report.times, report.deviation, report.best_shift):
            fh.write(f"{t:.17g},{dev:.17g},{s:.17g}\n")
