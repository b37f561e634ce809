"""Vehicle parameters, state layout, lumped constants and attitude kinematics.

State vector (n=12), fixed order::

    0 phi     1 phi_dot     2 theta   3 theta_dot   4 psi   5 psi_dot
    6 x       7 x_dot       8 y       9 y_dot      10 z    11 z_dot

Angles are in radians everywhere. The rotation matrix is body -> inertial,
built from ZYX Euler angles.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields
from importlib import resources
from typing import Mapping, NamedTuple, Sequence

import numpy as np

STATE_NAMES = (
    "phi", "phi_dot", "theta", "theta_dot", "psi", "psi_dot",
    "x", "x_dot", "y", "y_dot", "z", "z_dot",
)
N_STATE = len(STATE_NAMES)

# Below this |cos(theta)| the Euler-rate map is refused.
GIMBAL_TOL = 1e-6


# Thrust and yaw-moment coefficients are not part of the published airframe
# data; placeholder values ship as package data rather than code.
_ROTOR = json.loads((resources.files("quadsmc") / "configs" / "rotor_coefficients.json").read_text())


class GimbalLock(ValueError):
    """Raised when the Euler-rate map is evaluated at |cos(theta)| <= tolerance."""


@dataclass(frozen=True)
class QuadParams:
    """Physical constants of the airframe, rotors and motors (SI units)."""

    m: float = 0.486
    d: float = 0.25
    g: float = 9.8
    Ix: float = 3.8278e-3
    Iy: float = 3.8288e-3
    Iz: float = 7.5666e-3
    Jr: float = 2.8385e-5
    Kfax: float = 5.567e-4
    Kfay: float = 5.567e-4
    Kfaz: float = 6.543e-4
    Kftx: float = 5.567e-4
    Kfty: float = 5.567e-4
    Kftz: float = 6.345e-4
    KF: float = _ROTOR["KF"]
    KM: float = _ROTOR["KM"]
    beta0: float = 189.63
    beta1: float = 6.0612
    beta2: float = 0.0122
    b_motor: float = 280.19

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ValueError(f"QuadParams.{f.name} must be a finite number, got {v!r}")
        for name in ("m", "d", "Ix", "Iy", "Iz", "KF", "KM"):
            if getattr(self, name) <= 0:
                raise ValueError(f"QuadParams.{name} must be > 0")
        for name in ("Jr", "Kfax", "Kfay", "Kfaz", "Kftx", "Kfty", "Kftz"):
            if getattr(self, name) < 0:
                raise ValueError(f"QuadParams.{name} must be >= 0")
        if self.b_motor == 0:
            raise ValueError("QuadParams.b_motor must be non-zero")

    @classmethod
    def from_dict(cls, data: Mapping[str, float]) -> "QuadParams":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown QuadParams keys: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in data.items()})

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def hover_thrust(self) -> float:
        return self.m * self.g


@dataclass(frozen=True)
class DerivedConstants:
    """Lumped coefficients of the state-space model."""

    a1: float
    a2: float
    a3: float
    a4: float
    a5: float
    a6: float
    a7: float
    a8: float
    a9: float
    a10: float
    a11: float
    b1: float
    b2: float
    b3: float


def derive_constants(p: QuadParams) -> DerivedConstants:
    """Lumped constants for the 12-state model.

    ``a8`` uses the yaw aerodynamic friction ``Kfaz`` (torque term), not the
    translational drag ``Kftz``.
    """
    if p.m <= 0 or p.Ix <= 0 or p.Iy <= 0 or p.Iz <= 0:
        raise ValueError("mass and inertias must be positive")
    return DerivedConstants(
        a1=(p.Iy - p.Iz) / p.Ix,
        a2=-p.Kfax / p.Ix,
        a3=-p.Jr / p.Ix,
        a4=(p.Iz - p.Ix) / p.Iy,
        a5=-p.Kfay / p.Iy,
        a6=p.Jr / p.Iy,
        a7=(p.Ix - p.Iy) / p.Iz,
        a8=-p.Kfaz / p.Iz,
        a9=-p.Kftx / p.m,
        a10=-p.Kfty / p.m,
        a11=-p.Kftz / p.m,
        b1=p.d / p.Ix,
        b2=p.d / p.Iy,
        b3=1.0 / p.Iz,
    )


class ControlVector(NamedTuple):
    """Total thrust U1 [N] and the roll, pitch, yaw torque channels U2..U4."""

    U1: float
    U2: float
    U3: float
    U4: float

    def is_finite(self) -> bool:
        return all(math.isfinite(v) for v in self)


def state_from_dict(data: Mapping[str, float]) -> np.ndarray:
    """Build a state vector from named components; missing names default to 0."""
    unknown = set(data) - set(STATE_NAMES)
    if unknown:
        raise ValueError(f"unknown state components: {sorted(unknown)}")
    s = np.array([float(data.get(name, 0.0)) for name in STATE_NAMES])
    if not np.all(np.isfinite(s)):
        raise ValueError("state components must be finite")
    return s


def state_to_dict(s: Sequence[float]) -> dict:
    if len(s) != N_STATE:
        raise ValueError(f"expected {N_STATE} state components, got {len(s)}")
    return {name: float(v) for name, v in zip(STATE_NAMES, s)}


def rotation_matrix(phi: float, theta: float, psi: float) -> np.ndarray:
    """Body -> inertial rotation for ZYX Euler angles."""
    cf, sf = math.cos(phi), math.sin(phi)
    ct, st = math.cos(theta), math.sin(theta)
    cp, sp = math.cos(psi), math.sin(psi)
    return np.array([
        [ct * cp, sf * st * cp - cf * sp, cf * st * cp + sf * sp],
        [ct * sp, sf * st * sp + cf * cp, cf * st * sp - sf * cp],
        [-st, sf * ct, cf * ct],
    ])


def skew(omega: Sequence[float]) -> np.ndarray:
    """Cross-product matrix: ``skew(w) @ v == np.cross(w, v)``."""
    w1, w2, w3 = (float(v) for v in omega)
    return np.array([
        [0.0, -w3, w2],
        [w3, 0.0, -w1],
        [-w2, w1, 0.0],
    ])


def body_rate_map(phi: float, theta: float) -> np.ndarray:
    """Euler-angle rates -> body angular rates (p, q, r)."""
    cf, sf = math.cos(phi), math.sin(phi)
    ct, st = math.cos(theta), math.sin(theta)
    return np.array([
        [1.0, 0.0, -st],
        [0.0, cf, ct * sf],
        [0.0, -sf, ct * cf],
    ])


def euler_rate_map(phi: float, theta: float) -> np.ndarray:
    """Body angular rates (p, q, r) -> Euler-angle rates.

    Raises GimbalLock when ``|cos(theta)| <= GIMBAL_TOL``.
    """
    ct = math.cos(theta)
    if abs(ct) <= GIMBAL_TOL:
        raise GimbalLock(f"euler rate map singular at theta={theta!r}")
    cf, sf = math.cos(phi), math.sin(phi)
    tt = math.tan(theta)
    return np.array([
        [1.0, sf * tt, cf * tt],
        [0.0, cf, -sf],
        [0.0, sf / ct, cf / ct],
    ])
