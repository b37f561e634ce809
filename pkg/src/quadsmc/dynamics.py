"""Nonlinear 12-state quadrotor dynamics in two independent forms.

``state_derivative`` uses the lumped constants a1..a11, b1..b3.
``torque_form_derivative`` rebuilds the same derivative from raw inertias,
the rotation matrix and the drag/friction terms. The two must agree to
round-off; the second exists only as an oracle for the first.

``omega_r`` is the signed rotor-speed residual w1 - w2 + w3 - w4 that
multiplies the gyroscopic terms.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .model import DerivedConstants, QuadParams, rotation_matrix


def rotor_residual(w: Sequence[float]) -> float:
    return float(w[0] - w[1] + w[2] - w[3])


def state_derivative(s, u, omega_r: float, c: DerivedConstants, p: QuadParams) -> np.ndarray:
    if hasattr(s, "tolist"):
        s = s.tolist()
    x1, x2, x3, x4, x5, x6, _, x8, _, x10, _, x12 = s[:12]
    U1, U2, U3, U4 = u
    c1, s1 = math.cos(x1), math.sin(x1)
    c3, s3 = math.cos(x3), math.sin(x3)
    c5, s5 = math.cos(x5), math.sin(x5)
    ux = c1 * s3 * c5 + s1 * s5
    uy = c1 * s3 * s5 - s1 * c5
    return np.array([
        x2,
        c.a1 * x4 * x6 + c.a2 * x2 * x2 + c.a3 * omega_r * x4 + c.b1 * U2,
        x4,
        c.a4 * x2 * x6 + c.a5 * x4 * x4 + c.a6 * omega_r * x2 + c.b2 * U3,
        x6,
        c.a7 * x2 * x4 + c.a8 * x6 * x6 + c.b3 * U4,
        x8,
        c.a9 * x8 + ux * U1 / p.m,
        x10,
        c.a10 * x10 + uy * U1 / p.m,
        x12,
        c.a11 * x12 + U1 * c1 * c3 / p.m - p.g,
    ])


def torque_form_derivative(s, u, omega_r: float, p: QuadParams) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    U1, U2, U3, U4 = (float(v) for v in u)
    phi, theta, psi = s[0], s[2], s[4]
    rates = s[[1, 3, 5]]
    vel = s[[7, 9, 11]]
    fd, td, pd = rates

    # Euler torque balance with gyroscopic coupling and quadratic friction
    torque = np.array([
        td * pd * (p.Iy - p.Iz) - p.Jr * omega_r * td + p.d * U2 - p.Kfax * fd**2,
        fd * pd * (p.Iz - p.Ix) + p.Jr * omega_r * fd + p.d * U3 - p.Kfay * td**2,
        fd * td * (p.Ix - p.Iy) + U4 - p.Kfaz * pd**2,
    ])
    ang_acc = torque / np.array([p.Ix, p.Iy, p.Iz])

    thrust = rotation_matrix(phi, theta, psi) @ np.array([0.0, 0.0, U1])
    drag = -np.array([p.Kftx, p.Kfty, p.Kftz]) * vel
    lin_acc = (thrust + drag) / p.m - np.array([0.0, 0.0, p.g])

    out = np.empty(12)
    out[[0, 2, 4]] = rates
    out[[1, 3, 5]] = ang_acc
    out[[6, 8, 10]] = vel
    out[[7, 9, 11]] = lin_acc
    return out
