"""Randomised invariant checks run by ``quadsmc check``.

Each check returns ``(passed, detail)``. ``constants`` lets a caller inject
a corrupted set of lumped constants; the checks then compare it against
quantities rebuilt from the raw parameters.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .actuation import allocate, mix
from .control import GainSet, control_laws, switch, tracking_errors
from .dynamics import state_derivative, torque_form_derivative
from .model import DerivedConstants, QuadParams, derive_constants, euler_rate_map, body_rate_map, rotation_matrix
from .trajectory import ReferencePoint

DUAL_FORM_TOL = 1e-12
MIXER_TOL = 1e-9
SO3_TOL = 1e-12
REACHING_TOL = 1e-9


def dual_form(p: QuadParams, c: DerivedConstants, rng, n=1000):
    worst = 0.0
    for _ in range(n):
        s = rng.uniform(-1, 1, 12)
        u = rng.uniform(-5, 5, 4)
        om = rng.uniform(-50, 50)
        d = np.max(np.abs(state_derivative(s, u, om, c, p) - torque_form_derivative(s, u, om, p)))
        worst = max(worst, float(d))
    return bool(worst < DUAL_FORM_TOL), f"max |lumped - torque form| = {worst:.3e} (tol {DUAL_FORM_TOL:g})"


def mixer_roundtrip(p: QuadParams, rng, n=1000):
    worst = 0.0
    for _ in range(n):
        w = rng.uniform(0, 800, 4)
        u = np.array(mix(w, p))
        back = np.array(mix(allocate(u, p).speeds, p))
        worst = max(worst, float(np.max(np.abs(back - u)) / max(np.max(np.abs(u)), 1e-300)))
    return bool(worst < MIXER_TOL), f"max relative mix/allocate/mix error = {worst:.3e} (tol {MIXER_TOL:g})"


def rotation_orthonormal(rng, n=1000):
    worst = 0.0
    for _ in range(n):
        f, t, s = rng.uniform(-np.pi, np.pi, 3)
        R = rotation_matrix(f, t, s)
        worst = max(worst, float(np.max(np.abs(R.T @ R - np.eye(3)))), abs(float(np.linalg.det(R)) - 1.0))
        if abs(np.cos(t)) > 0.1:
            worst = max(worst, float(np.max(np.abs(euler_rate_map(f, t) @ body_rate_map(f, t) - np.eye(3)))))
    return bool(worst < SO3_TOL), f"max SO(3) defect = {worst:.3e} (tol {SO3_TOL:g})"


def reaching_law(p: QuadParams, c: DerivedConstants, rng, n=1000):
    """Plant from raw parameters, controller from ``c``: the regulated surfaces
    must obey S_dot = -q switch(S) - k S exactly."""
    gains = GainSet()
    worst = 0.0
    for i in range(n):
        s = rng.uniform(-1, 1, 12)
        ref = ReferencePoint(*(tuple(rng.uniform(-1, 1, 6)) for _ in range(3)))
        om = rng.uniform(-50, 50)
        sw = "sign" if i % 2 else "saturation"
        z, S = tracking_errors(s, ref, gains)
        u, _, _ = control_laws(s, ref, S, z, om, c, p, gains, sw, 0.05, position=False)
        ds = torque_form_derivative(s, u, om, p)
        for j in (0, 1, 2, 5):  # phi, theta, psi, z
            rate = ds[2 * j + 1]
            Sdot = rate - ref.accel[j] - gains.alpha[j] * (ref.rate[j] - s[2 * j + 1])
            law = -gains.q[j] * switch(S[j], sw, 0.05) - gains.k[j] * S[j]
            worst = max(worst, abs(Sdot - law) / max(1.0, abs(rate)))
    return bool(worst < REACHING_TOL), f"max reaching-law residual = {worst:.3e} (tol {REACHING_TOL:g})"


def run_all(p: QuadParams, overrides: dict | None = None, n: int = 1000, seed: int = 0):
    c = derive_constants(p)
    if overrides:
        c = dataclasses.replace(c, **overrides)
    rng = np.random.default_rng(seed)
    return {
        "dual_form_equivalence": dual_form(p, c, rng, n),
        "mixer_roundtrip": mixer_roundtrip(p, rng, n),
        "rotation_orthonormality": rotation_orthonormal(rng, n),
        "reaching_law_residual": reaching_law(p, c, rng, n),
    }
