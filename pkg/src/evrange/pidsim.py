"""Cascaded saturated-PID longitudinal dynamics simulator.

Four-state ODE system (distance, velocity, acceleration, jerk) driven by a
commanded velocity, integrated with explicit Euler.  A three-mode state
machine (standard / curve / stop tracking) shapes the command from the
reference profile using a precomputed stopping-distance lookup table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .rules import LimitType, ReferencePoint, coalesce_stop_events, curve_events


class SimulationError(RuntimeError):
    pass


class TrackingMode(Enum):
    STANDARD = "standard_speed_limit"
    CURVE = "curve_speed"
    STOP = "stop_event"


@dataclass(frozen=True)
class SimState:
    s: float = 0.0  # m
    v: float = 0.0  # m/s
    a: float = 0.0  # m/s^2
    j: float = 0.0  # m/s^3
    t: float = 0.0  # s


@dataclass(frozen=True)
class ControllerConfig:
    k1: float = 0.5  # 1/s, velocity loop
    k2: float = 2.0  # 1/s, acceleration loop
    k3: float = 8.0  # 1/s, jerk loop
    a_min: float = -4.0
    a_max: float = 2.0
    j_min: float = -10.0
    j_max: float = 10.0
    h: float = 0.01  # s
    k_curve: float = 0.5
    a0: float = 2.0  # worst-case initial acceleration for the stopping LUT
    v_stop_eps: float = 0.1  # m/s
    lut_grid_step: float = 0.5  # m/s
    lut_v_max: float = 42.0  # m/s
    stop_dwell_s: float = 1.0
    # Worst-case stopping distances make the vehicle halt short of the line
    # when braking starts from cruise; with creep enabled it rolls up to the
    # stop point before dwelling, like a driver stopping at the stop line.
    creep_to_line: bool = True
    creep_v_max: float = 1.5  # m/s
    creep_gain: float = 0.4  # 1/s, commanded creep speed per meter of gap
    creep_stop_gap: float = 2.5  # m, command zero once this close
    creep_engage_gap: float = 0.5  # m, skip creep for halts closer than this
    max_time_factor: float = 4.0
    min_gap_m: float = 0.1  # floor for the curve-command denominator

    def __post_init__(self):
        if not (self.k1 < self.k2 < self.k3):
            raise ValueError("gains must satisfy k1 < k2 < k3")
        if not (self.a_min < 0.0 < self.a_max):
            raise ValueError("acceleration bounds must bracket 0")
        if not (self.j_min < 0.0 < self.j_max):
            raise ValueError("jerk bounds must bracket 0")
        if self.h <= 0:
            raise ValueError("timestep must be positive")


def sat(x: float, lo: float, hi: float) -> float:
    """Clamp x to [lo, hi]."""
    if lo > hi:
        raise ValueError(f"saturation bounds inverted: {lo} > {hi}")
    return min(hi, max(lo, x))


def _jerk_rate(v: float, a: float, j: float, v_c: float, cfg: ControllerConfig) -> float:
    inner = sat(cfg.k1 * (v_c - v), cfg.a_min, cfg.a_max)
    mid = sat(cfg.k2 * (inner - a), cfg.j_min, cfg.j_max)
    return cfg.k3 * (mid - j)


def dynamics_derivative(
    state: SimState, v_c: float, cfg: ControllerConfig
) -> tuple[float, float, float, float]:
    """(ds/dt, dv/dt, da/dt, dj/dt) of the cascaded saturated system."""
    return state.v, state.a, state.j, _jerk_rate(state.v, state.a, state.j, v_c, cfg)


def euler_step(state: SimState, v_c: float, cfg: ControllerConfig) -> SimState:
    """One explicit Euler update; velocity clamped at 0 (no reverse driving)."""
    h = cfg.h
    s = state.s + h * state.v
    v = state.v + h * state.a
    a = state.a + h * state.j
    j = state.j + h * _jerk_rate(state.v, state.a, state.j, v_c, cfg)
    if v < 0.0:
        v, a, j = 0.0, 0.0, 0.0
    if not (math.isfinite(v) and math.isfinite(a) and math.isfinite(j)):
        raise SimulationError("non-finite state; integration unstable, reduce h")
    return SimState(s=s, v=v, a=a, j=j, t=state.t + h)


@dataclass
class StoppingLUT:
    velocities: np.ndarray  # m/s, ascending from 0
    distances: np.ndarray  # m, monotone non-decreasing

    def __post_init__(self):
        self.velocities = np.asarray(self.velocities, dtype=float)
        self.distances = np.asarray(self.distances, dtype=float)
        if self.velocities[0] != 0.0 or self.distances[0] != 0.0:
            raise ValueError("LUT must start at (0, 0)")
        if np.any(np.diff(self.distances) < 0):
            raise ValueError("LUT distances must be monotone non-decreasing")

    def lookup(self, v: float) -> float:
        return float(np.interp(v, self.velocities, self.distances))


def _stop_distance(v0: float, a0: float, cfg: ControllerConfig, guard_s: float = 120.0) -> float:
    """Distance to brake from (v0, a0) to standstill with v_c = 0."""
    s, v, a, j, t = 0.0, v0, a0, 0.0, 0.0
    h = cfg.h
    while v > cfg.v_stop_eps:
        dj = _jerk_rate(v, a, j, 0.0, cfg)
        s += h * v
        v += h * a
        a += h * j
        j += h * dj
        if v < 0.0:
            v, a, j = 0.0, 0.0, 0.0
        t += h
        if t > guard_s:
            raise SimulationError(
                f"stopping simulation from v={v0} did not halt within {guard_s} s; check gains"
            )
    return s


def build_stopping_lut(cfg: ControllerConfig) -> StoppingLUT:
    """Worst-case stopping distance per grid velocity, starting at a = a0."""
    grid = np.arange(0.0, cfg.lut_v_max + cfg.lut_grid_step / 2, cfg.lut_grid_step)
    dists = np.empty_like(grid)
    for i, v0 in enumerate(grid):
        dists[i] = 0.0 if v0 <= cfg.v_stop_eps else _stop_distance(float(v0), cfg.a0, cfg)
    np.maximum.accumulate(dists, out=dists)
    return StoppingLUT(velocities=grid, distances=dists)


def required_decel_distance(v: float, event: ReferencePoint, lut: StoppingLUT) -> float:
    """Distance at which braking for the event must begin."""
    if event.limit_type is LimitType.STOP:
        return lut.lookup(v)
    if event.limit_type is LimitType.CURVE:
        v_f = event.v_ref
        if v <= v_f or v <= 0.0:
            return 0.0
        return lut.lookup(v) * (v - v_f) / v
    raise ValueError(f"no deceleration rule for {event.limit_type}")


def command_velocity(
    state: SimState,
    mode: TrackingMode,
    event: Optional[ReferencePoint],
    base_ref: float,
    lut: StoppingLUT,
    cfg: ControllerConfig,
) -> float:
    if mode is TrackingMode.STANDARD:
        return base_ref
    if mode is TrackingMode.STOP:
        return 0.0
    # curve: back off below the curve speed as the gap closes
    v_f = event.v_ref
    gap = max(event.arc_length - state.s, cfg.min_gap_m)
    s_r = required_decel_distance(state.v, event, lut)
    v_c = v_f - abs(v_f * math.tanh(cfg.k_curve * s_r / gap))
    return max(0.0, v_c)


def update_tracking_mode(
    state: SimState,
    events: list[ReferencePoint],
    lut: StoppingLUT,
    cfg: ControllerConfig,
) -> tuple[TrackingMode, Optional[ReferencePoint]]:
    """Pick the active mode from the upcoming events.

    Looks ahead by the worst-case stopping distance; the nearest event whose
    gap has shrunk below its required deceleration distance takes over, with
    stops outranking curves at equal distance.
    """
    horizon = lut.lookup(state.v)
    best: Optional[tuple[float, int, ReferencePoint]] = None
    for event in events:
        gap = event.arc_length - state.s
        if gap < 0.0 or gap > horizon:
            continue
        if gap < required_decel_distance(state.v, event, lut):
            rank = 0 if event.limit_type is LimitType.STOP else 1
            key = (gap, rank)
            if best is None or key < (best[0], best[1]):
                best = (gap, rank, event)
    if best is None:
        return TrackingMode.STANDARD, None
    mode = TrackingMode.STOP if best[2].limit_type is LimitType.STOP else TrackingMode.CURVE
    return mode, best[2]


@dataclass
class StopOutcome:
    arc_length: float
    min_velocity: float
    honored: bool


@dataclass
class SimTrace:
    t: np.ndarray
    s: np.ndarray
    v: np.ndarray
    a: np.ndarray
    j: np.ndarray
    v_c: np.ndarray
    stop_outcomes: list[StopOutcome] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.t)


def _base_reference(profile: list[ReferencePoint]) -> np.ndarray:
    """Reference speed per step for standard tracking.

    Stop points get the next non-stop reference (the speed to resume to after
    the stop), falling back to the previous one near the route end.
    """
    refs = np.array([p.v_ref for p in profile])
    is_stop = np.array([p.limit_type is LimitType.STOP for p in profile])
    filled = refs.copy()
    nxt = 0.0
    for i in range(len(profile) - 1, -1, -1):
        if is_stop[i]:
            filled[i] = nxt
        else:
            nxt = refs[i]
    prev = 0.0
    for i in range(len(profile)):
        if is_stop[i] and filled[i] == 0.0:
            filled[i] = prev
        elif not is_stop[i]:
            prev = refs[i]
    return filled


class _StopPhase(Enum):
    BRAKE = "brake"
    CREEP = "creep"
    DWELL = "dwell"


class _ModeTracker:
    """Per-run state machine layered over update_tracking_mode.

    Owns event consumption and the stop sequence (brake, optional creep to the
    line, dwell) that the memoryless mode selection cannot express.
    """

    def __init__(self, events: list[ReferencePoint], lut: StoppingLUT, cfg: ControllerConfig):
        self.pending = sorted(events, key=lambda e: e.arc_length)
        self.lut = lut
        self.cfg = cfg
        self.mode = TrackingMode.STANDARD
        self.event: Optional[ReferencePoint] = None
        self.stop_phase: Optional[_StopPhase] = None
        self.dwell_until = 0.0

    def _consume(self, event: ReferencePoint) -> None:
        self.pending.remove(event)
        self.mode = TrackingMode.STANDARD
        self.event = None
        self.stop_phase = None

    def command(self, state: SimState, base_ref: float) -> float:
        cfg = self.cfg
        if self.mode is TrackingMode.CURVE:
            if state.s >= self.event.arc_length:
                self._consume(self.event)
            else:
                # a stop inside the curve approach takes priority
                stops = [e for e in self.pending if e.limit_type is LimitType.STOP]
                mode, event = update_tracking_mode(state, stops, self.lut, cfg)
                if mode is TrackingMode.STOP:
                    self.mode, self.event = mode, event
                    self.stop_phase = _StopPhase.BRAKE

        if self.mode is TrackingMode.STANDARD:
            mode, event = update_tracking_mode(state, self.pending, self.lut, cfg)
            if mode is not TrackingMode.STANDARD:
                self.mode, self.event = mode, event
                self.stop_phase = _StopPhase.BRAKE if mode is TrackingMode.STOP else None

        if self.mode is TrackingMode.STOP:
            return self._stop_command(state)
        if self.mode is TrackingMode.CURVE:
            return command_velocity(state, self.mode, self.event, base_ref, self.lut, cfg)
        return base_ref

    def _stop_command(self, state: SimState) -> float:
        cfg = self.cfg
        gap = self.event.arc_length - state.s
        if self.stop_phase is _StopPhase.BRAKE:
            if state.v <= cfg.v_stop_eps:
                if cfg.creep_to_line and gap > cfg.creep_engage_gap:
                    self.stop_phase = _StopPhase.CREEP
                else:
                    self.stop_phase = _StopPhase.DWELL
                    self.dwell_until = state.t + cfg.stop_dwell_s
            return 0.0
        if self.stop_phase is _StopPhase.CREEP:
            if gap <= cfg.creep_stop_gap:
                if state.v <= cfg.v_stop_eps:
                    self.stop_phase = _StopPhase.DWELL
                    self.dwell_until = state.t + cfg.stop_dwell_s
                return 0.0
            return min(cfg.creep_v_max, cfg.creep_gain * gap)
        # dwell
        if state.t >= self.dwell_until:
            self._consume(self.event)
        return 0.0


def simulate(
    profile: list[ReferencePoint],
    cfg: ControllerConfig,
    lut: Optional[StoppingLUT] = None,
    stop_window_m: float = 2.0,
) -> SimTrace:
    """Track the reference profile from rest until the route end is reached."""
    if not profile:
        raise ValueError("empty reference profile")
    if profile[0].arc_length != 0.0:
        raise ValueError("profile must start at arc length 0")
    if lut is None:
        lut = build_stopping_lut(cfg)

    total = profile[-1].arc_length
    base = _base_reference(profile)
    n = len(profile)
    events = coalesce_stop_events(profile, stop_window_m) + curve_events(profile)
    tracker = _ModeTracker(events, lut, cfg)

    drive_time = float(np.sum(1.0 / np.maximum(base, 0.5)))
    n_stops = sum(1 for e in events if e.limit_type is LimitType.STOP)
    guard = cfg.max_time_factor * (drive_time + n_stops * (cfg.stop_dwell_s + 15.0)) + 10.0

    state = SimState()
    ts, ss, vs, accs, jerks, cmds = [0.0], [0.0], [0.0], [0.0], [0.0], [0.0]
    peak_v = 0.0
    while state.s < total - 1e-9:
        if state.t > guard:
            if peak_v <= cfg.v_stop_eps:
                break  # all-zero reference: the vehicle legitimately never moves
            raise SimulationError(
                f"simulation exceeded time guard {guard:.0f} s at s={state.s:.1f} m"
            )
        idx = min(int(state.s + 0.5), n - 1)
        v_c = tracker.command(state, float(base[idx]))
        state = euler_step(state, v_c, cfg)
        peak_v = max(peak_v, state.v)
        ts.append(state.t)
        ss.append(state.s)
        vs.append(state.v)
        accs.append(state.a)
        jerks.append(state.j)
        cmds.append(v_c)

    trace = SimTrace(
        t=np.array(ts),
        s=np.array(ss),
        v=np.array(vs),
        a=np.array(accs),
        j=np.array(jerks),
        v_c=np.array(cmds),
    )
    for event in (e for e in events if e.limit_type is LimitType.STOP):
        near = np.abs(trace.s - event.arc_length) <= 2.0
        min_v = float(np.min(trace.v[near])) if np.any(near) else math.inf
        trace.stop_outcomes.append(
            StopOutcome(event.arc_length, min_v, honored=min_v <= cfg.v_stop_eps)
        )
    return trace
