"""Rotor mixing, its inverse, and the first-order DC-motor rotor model.

Mixer rows (rotor order 1..4, squared speeds on the right)::

    U1 =  KF   KF   KF   KF
    U2 = -KFd  0    KFd  0
    U3 =  0    KFd  0   -KFd
    U4 =  KM  -KM   KM  -KM
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

from .model import ControlVector, QuadParams

ACTUATION_MODES = ("ideal", "motor")


class Allocation(NamedTuple):
    speeds: np.ndarray  # (4,) rad/s, all >= 0
    clamped: bool  # True if any squared speed was negative before clamping


def mixer_matrix(p: QuadParams) -> np.ndarray:
    kf, kfd, km = p.KF, p.KF * p.d, p.KM
    return np.array([
        [kf, kf, kf, kf],
        [-kfd, 0.0, kfd, 0.0],
        [0.0, kfd, 0.0, -kfd],
        [km, -km, km, -km],
    ])


def mix(w: Sequence[float], p: QuadParams) -> ControlVector:
    w = np.asarray(w, dtype=float)
    if np.any(w < 0):
        raise ValueError("rotor speeds must be non-negative")
    return ControlVector(*(float(v) for v in mixer_matrix(p) @ (w * w)))


def allocate(u: Sequence[float], p: QuadParams) -> Allocation:
    """Invert the mixer; negative squared speeds are clamped to zero and flagged.

    Closed form of the mixer inverse, so no linear solve per call.
    """
    U1, U2, U3, U4 = (float(v) for v in u)
    t = U1 / (4.0 * p.KF)
    r = U2 / (2.0 * p.KF * p.d)
    q = U3 / (2.0 * p.KF * p.d)
    y = U4 / (4.0 * p.KM)
    sq = (t - r + y, t + q - y, t + r + y, t - q - y)
    clamped = any(v < 0.0 for v in sq)
    speeds = np.array([math.sqrt(v) if v > 0.0 else 0.0 for v in sq])
    return Allocation(speeds, clamped)


def motor_step_derivative(ms: Sequence[float], voltages: Sequence[float], p: QuadParams) -> np.ndarray:
    w = np.asarray(ms, dtype=float)
    v = np.asarray(voltages, dtype=float)
    return p.b_motor * v - p.beta0 - p.beta1 * w - p.beta2 * w * w


def steady_voltage_for(w_target, p: QuadParams):
    """Voltage that holds a rotor at ``w_target`` in steady state."""
    w = np.asarray(w_target, dtype=float)
    if np.any(w < 0):
        raise ValueError("target speed must be non-negative")
    v = (p.beta0 + p.beta1 * w + p.beta2 * w * w) / p.b_motor
    return float(v) if v.ndim == 0 else v


def steady_speed_for(voltage: float, p: QuadParams) -> float:
    """Positive root of beta2 w^2 + beta1 w + (beta0 - b V) = 0 (0 if none)."""
    c = p.beta0 - p.b_motor * voltage
    if p.beta2 == 0:
        return max(-c / p.beta1, 0.0)
    disc = p.beta1 ** 2 - 4.0 * p.beta2 * c
    if disc < 0:
        return 0.0
    return max((-p.beta1 + math.sqrt(disc)) / (2.0 * p.beta2), 0.0)
