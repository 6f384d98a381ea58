"""Quasi-steady backward BEV powertrain model.

Works backward from a per-meter velocity profile to tractive force, power at
the wheels / motor / battery, cumulative energy, Wh/km, and the SOC
trajectory.  All power signs follow the discharge-positive convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class EnergyModelError(ValueError):
    pass


# per-meter grids cannot represent true standstill dwell; this floor keeps
# dt = ds / v finite at stops
V_FLOOR = 0.1  # m/s


@dataclass(frozen=True)
class VehicleParams:
    """Representative compact-BEV defaults; configuration, not ground truth."""

    m: float = 1600.0  # kg
    g: float = 9.81  # m/s^2
    rho: float = 1.2256  # kg/m^3
    A_f: float = 2.3256  # m^2
    C_D: float = 0.28
    C_r: float = 1.75
    C1: float = 0.0328
    C2: float = 4.575
    eta_driveline: float = 0.92
    eta_motor: float = 0.91
    eta_batt: float = 0.90
    eta_rb_max: float = 0.95
    alpha: float = 0.0411  # m/s^2, regen shape constant
    P_aux: float = 700.0  # W
    C_W: float = 24000.0  # Wh battery capacity
    soc_min: float = 0.20
    soc_max: float = 0.95

    def __post_init__(self):
        positive = ("m", "g", "rho", "A_f", "C_D", "C_W")
        for name in positive:
            if getattr(self, name) <= 0:
                raise EnergyModelError(f"vehicle parameter {name} must be positive")
        for name in ("eta_driveline", "eta_motor", "eta_batt", "eta_rb_max"):
            if not 0.0 < getattr(self, name) <= 1.0:
                raise EnergyModelError(f"{name} must be in (0, 1]")
        if not self.soc_min < self.soc_max:
            raise EnergyModelError("soc_min must be below soc_max")


@dataclass
class EnergyResult:
    p_wheels: np.ndarray  # W
    p_motor: np.ndarray  # W
    p_batt: np.ndarray  # W
    dt: np.ndarray  # s
    acceleration: np.ndarray  # m/s^2
    cumulative_wh: np.ndarray
    ec_wh_per_km: float
    soc: np.ndarray  # fraction, same length as the input series
    clamp_events: list[dict] = field(default_factory=list)


def acceleration_from_velocity(
    velocity: np.ndarray, ds: float = 1.0
) -> tuple[np.ndarray, np.ndarray]:
    """Per-step acceleration and time from a spatial velocity series.

    dt_i = ds / max(v_i, floor); a_i = (v_{i+1} - v_i) / dt_i, last step
    repeats the previous acceleration.
    """
    v = np.asarray(velocity, dtype=float)
    if v.size < 2:
        raise EnergyModelError("velocity series needs at least 2 samples")
    dt = ds / np.maximum(v, V_FLOOR)
    a = np.empty_like(v)
    a[:-1] = np.diff(v) / dt[:-1]
    a[-1] = a[-2]
    return a, dt


def tractive_force(v: float, a: float, theta: float, p: VehicleParams) -> float:
    """Inertial + grade + aerodynamic + rolling resistance force in N."""
    return (
        p.m * a
        + p.m * p.g * math.sin(theta)
        + 0.5 * p.rho * p.A_f * p.C_D * v * v
        + p.m * p.g * math.cos(theta) * (p.C2 + p.C1 * v) * p.C_r / 1000.0
    )


def wheel_power(force: float, v: float) -> float:
    """Tractive power; positive pulls the vehicle, negative brakes it."""
    return force * v


def regen_efficiency(a: float, p: VehicleParams) -> float:
    """Recoverable fraction of braking power, exponential in deceleration."""
    if a >= 0.0:
        return 0.0
    return min(math.exp(-p.alpha / abs(a)), p.eta_rb_max)


def motor_power(p_wheels: float, a: float, p: VehicleParams) -> float:
    if p_wheels >= 0.0:
        return p_wheels / (p.eta_driveline * p.eta_motor)
    return p_wheels * regen_efficiency(a, p) * p.eta_driveline * p.eta_motor


def battery_power(p_motor: float, p: VehicleParams) -> float:
    load = p_motor + p.P_aux
    if load >= 0.0:
        return load / p.eta_batt
    return load * p.eta_batt


def integrate_energy(
    p_batt: np.ndarray, dt: np.ndarray, total_distance_km: float
) -> tuple[np.ndarray, float]:
    """Cumulative battery energy in Wh and route-level Wh/km."""
    p_batt = np.asarray(p_batt, dtype=float)
    dt = np.asarray(dt, dtype=float)
    if p_batt.shape != dt.shape:
        raise EnergyModelError("power and time series must align")
    if total_distance_km <= 0:
        raise EnergyModelError("total distance must be positive")
    cumulative = np.cumsum(p_batt * dt) / 3600.0
    return cumulative, float(cumulative[-1] / total_distance_km)


def soc_update(soc_prev: float, p_batt: float, dt: float, p: VehicleParams) -> tuple[float, bool]:
    """One SOC step; returns (new soc, clamped?).  Discharge lowers SOC."""
    delta = p_batt * dt / (3600.0 * p.C_W)
    raw = soc_prev - delta
    clamped = raw < p.soc_min or raw > p.soc_max
    return min(p.soc_max, max(p.soc_min, raw)), clamped


def run_energy_model(
    velocity: np.ndarray,
    grade_percent: np.ndarray,
    initial_soc: float,
    p: VehicleParams,
    ds: float = 1.0,
) -> EnergyResult:
    """Chain the full backward model over aligned per-meter series."""
    v = np.asarray(velocity, dtype=float)
    grade = np.asarray(grade_percent, dtype=float)
    if v.size == 0 or grade.size == 0:
        raise EnergyModelError("empty route")
    if v.shape != grade.shape:
        raise EnergyModelError("velocity and grade series must align")
    if not p.soc_min <= initial_soc <= p.soc_max:
        raise EnergyModelError(
            f"initial SOC {initial_soc} outside [{p.soc_min}, {p.soc_max}]"
        )

    a, dt = acceleration_from_velocity(v, ds=ds)
    theta = np.arctan(grade / 100.0)

    n = v.size
    p_wheels = np.empty(n)
    p_motor = np.empty(n)
    p_batt = np.empty(n)
    for i in range(n):
        f = tractive_force(v[i], a[i], theta[i], p)
        p_wheels[i] = wheel_power(f, v[i])
        p_motor[i] = motor_power(p_wheels[i], a[i], p)
        p_batt[i] = battery_power(p_motor[i], p)

    total_km = ds * (n - 1) / 1000.0 if n > 1 else ds / 1000.0
    cumulative, ec = integrate_energy(p_batt, dt, total_km)

    soc = np.empty(n)
    clamp_events = []
    current = initial_soc
    for i in range(n):
        current, clamped = soc_update(current, p_batt[i], dt[i], p)
        soc[i] = current
        if clamped:
            clamp_events.append(
                {"index": i, "limit": "min" if current <= p.soc_min else "max"}
            )

    return EnergyResult(
        p_wheels=p_wheels,
        p_motor=p_motor,
        p_batt=p_batt,
        dt=dt,
        acceleration=a,
        cumulative_wh=cumulative,
        ec_wh_per_km=ec,
        soc=soc,
        clamp_events=clamp_events,
    )
