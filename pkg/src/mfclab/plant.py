"""Vehicle plant models.

Two levels of fidelity share the same 3DoF planar core (longitudinal,
lateral, yaw):

* ``step_control_model`` -- the design model: linear tires, net wheel torque
  acting through the wheel radius, no drag, massless wheels.
* ``step_truth_plant``   -- the validation model: saturating tires,
  aerodynamic drag, wheel spin dynamics with a longitudinal slip force,
  and a friction coefficient scaling every tire force.

Both are pure state-transition functions integrated with fixed-step RK4;
identical inputs produce bit-identical outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import NonFiniteStateError, SingularityError


@dataclass(frozen=True)
class VehicleParams:
    """Physical constants of the car and tires (SI units).

    Defaults describe a typical mid-size sedan; every value can be
    overridden from scenario configs.
    """

    m: float = 1600.0          # mass [kg]
    Iz: float = 2600.0         # yaw inertia [kg m^2]
    Lf: float = 1.2            # CoG to front axle [m]
    Lr: float = 1.4            # CoG to rear axle [m]
    Cf: float = 57000.0        # front cornering stiffness [N/rad]
    Cr: float = 47000.0        # rear cornering stiffness [N/rad]
    R: float = 0.3             # wheel radius [m]
    Ir: float = 1.2            # wheel spin inertia [kg m^2]
    mu: float = 1.0            # road adhesion coefficient, (0, 1]
    rho_x: float = 0.35        # aerodynamic drag coefficient [N s^2/m^2]
    g: float = 9.81            # gravity [m/s^2]
    # Truth-plant extras (ignored by the control model).
    Cx: float = 25000.0        # longitudinal slip stiffness per axle [N/unit slip]
    brake_split_front: float = 0.6   # share of braking torque on the front axle
    # Actuator limits.
    delta_max: float = 0.5     # |steering angle| bound [rad]
    T_max: float = 2000.0      # |wheel torque| bound [N m]
    # Singularity guard for the slip-angle division.
    vx_min: float = 0.5        # [m/s]

    def __post_init__(self):
        for name in ("m", "Iz", "Lf", "Lr", "Cf", "Cr", "R", "g",
                     "Cx", "delta_max", "T_max", "vx_min"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"VehicleParams.{name} must be strictly positive")
        if self.Ir < 0.0 or self.rho_x < 0.0:
            raise ValueError("VehicleParams.Ir and rho_x must be non-negative")
        if not 0.0 < self.mu <= 1.0:
            raise ValueError("VehicleParams.mu must be in (0, 1]")
        if not 0.0 <= self.brake_split_front <= 1.0:
            raise ValueError("VehicleParams.brake_split_front must be in [0, 1]")

    def with_overrides(self, **kw) -> "VehicleParams":
        return replace(self, **kw)

    @property
    def wheelbase(self) -> float:
        return self.Lf + self.Lr

    def front_static_load(self) -> float:
        return self.m * self.g * self.Lr / self.wheelbase

    def rear_static_load(self) -> float:
        return self.m * self.g * self.Lf / self.wheelbase


@dataclass(frozen=True)
class ControlModelParams:
    """Subset of :class:`VehicleParams` the model-based (flatness) controller
    is allowed to read.  Deliberately excludes drag, wheel inertia, tire
    saturation shape and the true road friction."""

    m: float
    Iz: float
    Lf: float
    Lr: float
    Cf: float
    Cr: float
    R: float
    mu_nominal: float = 1.0
    delta_max: float = 0.5
    T_max: float = 2000.0

    @classmethod
    def nominal(cls, p: VehicleParams, mu_nominal: float = 1.0) -> "ControlModelParams":
        return cls(m=p.m, Iz=p.Iz, Lf=p.Lf, Lr=p.Lr, Cf=p.Cf, Cr=p.Cr,
                   R=p.R, mu_nominal=mu_nominal,
                   delta_max=p.delta_max, T_max=p.T_max)

    @property
    def wheelbase(self) -> float:
        return self.Lf + self.Lr


@dataclass(frozen=True)
class PlantState:
    """Dynamic state of the simulated vehicle."""

    Vx: float                  # longitudinal speed [m/s]
    Vy: float = 0.0            # lateral speed [m/s]
    psi: float = 0.0           # yaw angle [rad], unwrapped
    psi_dot: float = 0.0       # yaw rate [rad/s]
    X: float = 0.0             # global position [m]
    Y: float = 0.0
    omega_f: float = 0.0       # front wheel angular speed [rad/s]
    omega_r: float = 0.0       # rear wheel angular speed [rad/s]

    def as_array(self) -> np.ndarray:
        return np.array([self.Vx, self.Vy, self.psi, self.psi_dot,
                         self.X, self.Y, self.omega_f, self.omega_r])

    @staticmethod
    def rolling(Vx: float, params: VehicleParams, **kw) -> "PlantState":
        """State at speed ``Vx`` with wheels rolling without slip."""
        w = Vx / params.R
        return PlantState(Vx=Vx, omega_f=w, omega_r=w, **kw)


@dataclass(frozen=True)
class ControlInput:
    """Net driving/braking wheel torque (signed) and front steering angle."""

    T_omega: float = 0.0       # [N m]
    delta: float = 0.0         # [rad]

    def clamped(self, params: VehicleParams) -> "ControlInput":
        return ControlInput(
            T_omega=min(max(self.T_omega, -params.T_max), params.T_max),
            delta=min(max(self.delta, -params.delta_max), params.delta_max),
        )


@dataclass(frozen=True)
class TireModel:
    """Lateral force vs slip-angle law.

    ``linear``: F = mu*C*alpha.  ``saturating``: an odd curve through the
    origin with slope mu*C at zero slip and peak force
    mu*peak_factor*(static axle load); reduces to the linear law for small
    slip.  ``peak_factor_x`` plays the same role for the longitudinal
    slip force of the truth plant.
    """

    kind: str = "saturating"   # "linear" | "saturating"
    peak_factor: float = 1.0
    peak_factor_x: float = 0.9

    def __post_init__(self):
        if self.kind not in ("linear", "saturating"):
            raise ValueError(f"unknown tire kind {self.kind!r}")
        if self.peak_factor <= 0.0 or self.peak_factor_x <= 0.0:
            raise ValueError("tire peak factors must be strictly positive")

    def force(self, slip: float, stiffness: float, peak: float, mu: float) -> float:
        """Force at the given slip for an axle with the given nominal
        stiffness and nominal peak force; mu scales both."""
        if self.kind == "linear":
            return mu * stiffness * slip
        fp = mu * peak
        return fp * math.tanh(stiffness * slip / peak)


LINEAR_TIRE = TireModel(kind="linear")


def slip_angles(state: PlantState, delta: float, params: VehicleParams) -> tuple[float, float]:
    """Front/rear slip angles; raises below the Vx guard (Eq. divides by Vx)."""
    if state.Vx < params.vx_min:
        raise SingularityError(
            f"Vx={state.Vx:.3f} m/s below vx_min={params.vx_min} m/s; slip angles undefined")
    af = delta - (state.Vy + state.psi_dot * params.Lf) / state.Vx
    ar = -(state.Vy - state.psi_dot * params.Lr) / state.Vx
    return af, ar


def lateral_forces(state: PlantState, delta: float, params: VehicleParams,
                   tire: TireModel = LINEAR_TIRE) -> tuple[float, float]:
    """Front and rear lateral tire forces [N] in vehicle coordinates."""
    af, ar = slip_angles(state, delta, params)
    Fyf = tire.force(af, params.Cf, tire.peak_factor * params.front_static_load(), params.mu)
    Fyr = tire.force(ar, params.Cr, tire.peak_factor * params.rear_static_load(), params.mu)
    return Fyf, Fyr


def _control_rhs(x: np.ndarray, u: ControlInput, params: VehicleParams) -> np.ndarray:
    """Design-model dynamics: linear tires, Fx = T/R, no drag."""
    Vx, Vy, psi, psi_dot = x[0], x[1], x[2], x[3]
    if Vx < params.vx_min:
        raise SingularityError(f"Vx={Vx:.3f} m/s below vx_min during integration")
    af = u.delta - (Vy + psi_dot * params.Lf) / Vx
    ar = -(Vy - psi_dot * params.Lr) / Vx
    Fyf = params.mu * params.Cf * af
    Fyr = params.mu * params.Cr * ar
    Fx = u.T_omega / params.R
    dVx = psi_dot * Vy + Fx / params.m
    dVy = -psi_dot * Vx + (Fyf + Fyr) / params.m
    dpsi_dot = (params.Lf * Fyf - params.Lr * Fyr) / params.Iz
    dX = Vx * math.cos(psi) - Vy * math.sin(psi)
    dY = Vx * math.sin(psi) + Vy * math.cos(psi)
    # Wheels follow the rolling constraint in the design model.
    return np.array([dVx, dVy, psi_dot, dpsi_dot, dX, dY, dVx / params.R, dVx / params.R])


def _truth_rhs(x: np.ndarray, u: ControlInput, params: VehicleParams,
               tire: TireModel) -> np.ndarray:
    """Truth-plant dynamics: saturating tires, drag, wheel spin states."""
    Vx, Vy, psi, psi_dot = x[0], x[1], x[2], x[3]
    omega_f, omega_r = x[6], x[7]
    if Vx < params.vx_min:
        raise SingularityError(f"Vx={Vx:.3f} m/s below vx_min during integration")

    af = u.delta - (Vy + psi_dot * params.Lf) / Vx
    ar = -(Vy - psi_dot * params.Lr) / Vx
    Fyf = tire.force(af, params.Cf, tire.peak_factor * params.front_static_load(), params.mu)
    Fyr = tire.force(ar, params.Cr, tire.peak_factor * params.rear_static_load(), params.mu)

    # Positive torque drives the front axle; braking is split front/rear.
    if u.T_omega >= 0.0:
        Tf, Tr = u.T_omega, 0.0
    else:
        Tf = params.brake_split_front * u.T_omega
        Tr = (1.0 - params.brake_split_front) * u.T_omega

    if params.Ir > 0.0:
        # Longitudinal force from wheel slip; wheel speeds are true states.
        sf = (params.R * omega_f - Vx) / Vx
        sr = (params.R * omega_r - Vx) / Vx
        Fxf = tire.force(sf, params.Cx, tire.peak_factor_x * params.front_static_load(), params.mu)
        Fxr = tire.force(sr, params.Cx, tire.peak_factor_x * params.rear_static_load(), params.mu)
        domega_f = (Tf - params.R * Fxf) / params.Ir
        domega_r = (Tr - params.R * Fxr) / params.Ir
    else:
        # Massless wheels: torque balance is algebraic, wheels roll.
        Fxf, Fxr = Tf / params.R, Tr / params.R
        domega_f = domega_r = None  # filled below from dVx

    drag = params.rho_x * Vx * Vx
    dVx = psi_dot * Vy + (Fxf + Fxr - drag) / params.m
    dVy = -psi_dot * Vx + (Fyf + Fyr) / params.m
    dpsi_dot = (params.Lf * Fyf - params.Lr * Fyr) / params.Iz
    dX = Vx * math.cos(psi) - Vy * math.sin(psi)
    dY = Vx * math.sin(psi) + Vy * math.cos(psi)
    if domega_f is None:
        domega_f = domega_r = dVx / params.R
    return np.array([dVx, dVy, psi_dot, dpsi_dot, dX, dY, domega_f, domega_r])


def _rk4(rhs, x: np.ndarray, dt: float, substeps: int) -> np.ndarray:
    h = dt / substeps
    for _ in range(substeps):
        k1 = rhs(x)
        k2 = rhs(x + 0.5 * h * k1)
        k3 = rhs(x + 0.5 * h * k2)
        k4 = rhs(x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return x


def _check_finite(x: np.ndarray) -> None:
    if not np.all(np.isfinite(x)):
        raise NonFiniteStateError(f"non-finite plant state: {x}")


def step_control_model(state: PlantState, u: ControlInput, params: VehicleParams,
                       dt: float, substeps: int = 1) -> PlantState:
    """Advance the design model one fixed step under zero-order-held input."""
    if dt <= 0.0:
        raise ValueError("dt must be strictly positive")
    x = _rk4(lambda x: _control_rhs(x, u, params), state.as_array(), dt, substeps)
    _check_finite(x)
    return PlantState(Vx=x[0], Vy=x[1], psi=x[2], psi_dot=x[3], X=x[4], Y=x[5],
                      omega_f=x[0] / params.R, omega_r=x[0] / params.R)


def step_truth_plant(state: PlantState, u: ControlInput, params: VehicleParams,
                     tire: TireModel, dt: float, substeps: int = 1) -> PlantState:
    """Advance the truth plant one fixed step under zero-order-held input."""
    if dt <= 0.0:
        raise ValueError("dt must be strictly positive")
    x = _rk4(lambda x: _truth_rhs(x, u, params, tire), state.as_array(), dt, substeps)
    _check_finite(x)
    if params.Ir > 0.0:
        wf, wr = x[6], x[7]
    else:
        wf = wr = x[0] / params.R
    return PlantState(Vx=x[0], Vy=x[1], psi=x[2], psi_dot=x[3], X=x[4], Y=x[5],
                      omega_f=wf, omega_r=wr)


def lateral_eigenvalues(params: VehicleParams, Vx: float) -> np.ndarray:
    """Eigenvalues of the linearized (Vy, psi_dot) subsystem at constant Vx."""
    m, Iz, Lf, Lr = params.m, params.Iz, params.Lf, params.Lr
    Cf, Cr = params.mu * params.Cf, params.mu * params.Cr
    a11 = -(Cf + Cr) / (m * Vx)
    a12 = -Vx + (Cr * Lr - Cf * Lf) / (m * Vx)
    a21 = (Cr * Lr - Cf * Lf) / (Iz * Vx)
    a22 = -(Cf * Lf * Lf + Cr * Lr * Lr) / (Iz * Vx)
    return np.linalg.eigvals(np.array([[a11, a12], [a21, a22]]))


def steady_state_yaw_rate(params: VehicleParams, Vx: float, delta: float) -> float:
    """Steady-state yaw rate of the linear bicycle model at fixed speed."""
    Cf, Cr = params.mu * params.Cf, params.mu * params.Cr
    L = params.wheelbase
    denom = L + params.m * Vx * Vx * (params.Lr * Cr - params.Lf * Cf) / (L * Cf * Cr)
    return Vx * delta / denom
