"""Backstepping sliding-mode controller.

Loops are ordered phi, theta, psi, x, y, z throughout. For loop j the
tracking error and surface are::

    z_j = ref_j - x_j
    S_j = x_j_dot - ref_j_dot - alpha_j * z_j

and each law enforces the reaching dynamics
``S_dot = -q * switch(S) - k * S`` by cancelling the modelled terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence

from .model import ControlVector, DerivedConstants, QuadParams, derive_constants
from .trajectory import ReferencePoint

LOOPS = ("phi", "theta", "psi", "x", "y", "z")
MODES = ("attitude", "position")
SWITCHING = ("sign", "saturation")

# paper-reported optimum, applied uniformly to every loop
PAPER_ALPHA = 0.2285737
PAPER_K = 0.1
PAPER_Q = 0.1

THRUST_TOL = 1e-3
VIRTUAL_TOL = 1e-6


class ThrustSingularity(ArithmeticError):
    """|cos(phi) cos(theta)| too small to solve the altitude law for U1."""


class VirtualControlSingularity(ArithmeticError):
    """|U1| too small to solve the x/y laws for the virtual controls."""


def _six(name: str, v) -> tuple:
    if isinstance(v, (int, float)):
        return (float(v),) * 6
    v = tuple(float(x) for x in v)
    if len(v) != 6:
        raise ValueError(f"gains.{name} needs 1 or 6 values, got {len(v)}")
    return v


@dataclass(frozen=True)
class GainSet:
    """Per-loop gains: backstepping ``alpha`` (paper indices 1, 3, ..., 11),
    surface gain ``k`` and switching gain ``q`` (indices 1..6)."""

    alpha: tuple = (PAPER_ALPHA,) * 6
    k: tuple = (PAPER_K,) * 6
    q: tuple = (PAPER_Q,) * 6

    def __post_init__(self):
        for name in ("alpha", "k", "q"):
            object.__setattr__(self, name, _six(name, getattr(self, name)))
            if not all(math.isfinite(v) for v in getattr(self, name)):
                raise ValueError(f"gains.{name} must be finite")
        if any(a <= 0 for a in self.alpha):
            raise ValueError("every alpha must be > 0")
        if any(v < 0 for v in self.k) or any(v < 0 for v in self.q):
            raise ValueError("k and q must be >= 0")

    @classmethod
    def uniform(cls, alpha: float, k: float, q: float) -> "GainSet":
        return cls(alpha, k, q)

    @classmethod
    def paper(cls) -> "GainSet":
        return cls()

    @classmethod
    def from_dict(cls, data: Mapping) -> "GainSet":
        bad = set(data) - {"alpha", "k", "q"}
        if bad:
            raise ValueError(f"unknown gains keys: {sorted(bad)}")
        return cls(
            data.get("alpha", PAPER_ALPHA), data.get("k", PAPER_K), data.get("q", PAPER_Q)
        )

    def to_dict(self) -> dict:
        return {"alpha": list(self.alpha), "k": list(self.k), "q": list(self.q)}


class SlidingSurfaces(NamedTuple):
    S_phi: float
    S_theta: float
    S_psi: float
    S_x: float
    S_y: float
    S_z: float


def sign(v: float) -> float:
    """sign with sign(0) = 0."""
    if v > 0.0:
        return 1.0
    if v < 0.0:
        return -1.0
    return 0.0


def sat(v: float) -> float:
    return -1.0 if v < -1.0 else (1.0 if v > 1.0 else v)


def switch(S: float, switching: str = "sign", epsilon: float = 0.05) -> float:
    if switching == "sign":
        return sign(S)
    return sat(S / epsilon)


def tracking_errors(s: Sequence[float], ref: ReferencePoint, g: GainSet):
    """Return (z, surfaces): six position/angle errors and six sliding surfaces."""
    if hasattr(s, "tolist"):
        s = s.tolist()
    v, r, al = ref.value, ref.rate, g.alpha
    z = (v[0] - s[0], v[1] - s[2], v[2] - s[4], v[3] - s[6], v[4] - s[8], v[5] - s[10])
    S = SlidingSurfaces(
        s[1] - r[0] - al[0] * z[0],
        s[3] - r[1] - al[1] * z[1],
        s[5] - r[2] - al[2] * z[2],
        s[7] - r[3] - al[3] * z[3],
        s[9] - r[4] - al[4] * z[4],
        s[11] - r[5] - al[5] * z[5],
    )
    return z, S


def control_laws(
    s: Sequence[float],
    ref: ReferencePoint,
    surfaces: Sequence[float],
    z: Sequence[float],
    omega_r: float,
    c: DerivedConstants,
    p: QuadParams,
    g: GainSet,
    switching: str = "sign",
    epsilon: float = 0.05,
    position: bool = True,
):
    """Evaluate the six sliding-mode laws.

    Returns ``(ControlVector, Ux, Uy)``. U1 is solved first; Ux and Uy are
    ``None`` when ``position`` is False.
    """
    if hasattr(s, "tolist"):
        s = s.tolist()
    x1, x2, x3, x4, x5, x6, _, x8, _, x10, _, x12 = s[:12]
    rd, ra = ref.rate, ref.accel
    al, k, q = g.alpha, g.k, g.q
    if switching == "sign":
        sw = [sign(S) for S in surfaces]
    else:
        sw = [sat(S / epsilon) for S in surfaces]
    reach = [-q[j] * sw[j] - k[j] * surfaces[j] for j in range(6)]

    cc = math.cos(x1) * math.cos(x3)
    if abs(cc) < THRUST_TOL:
        raise ThrustSingularity(f"cos(phi)cos(theta)={cc:.3e}")
    U1 = p.m / cc * (reach[5] - c.a11 * x12 + ra[5] + al[5] * (rd[5] - x12) + p.g)

    U2 = (reach[0] - c.a1 * x4 * x6 - c.a2 * x2 * x2 - c.a3 * omega_r * x4
          + ra[0] + al[0] * (rd[0] - x2)) / c.b1
    U3 = (reach[1] - c.a4 * x2 * x6 - c.a5 * x4 * x4 - c.a6 * omega_r * x2
          + ra[1] + al[1] * (rd[1] - x4)) / c.b2
    U4 = (reach[2] - c.a7 * x2 * x4 - c.a8 * x6 * x6
          + ra[2] + al[2] * (rd[2] - x6)) / c.b3

    Ux = Uy = None
    if position:
        if abs(U1) < VIRTUAL_TOL:
            raise VirtualControlSingularity(f"U1={U1:.3e}")
        Ux = p.m / U1 * (reach[3] - c.a9 * x8 + ra[3] + al[3] * (rd[3] - x8))
        Uy = p.m / U1 * (reach[4] - c.a10 * x10 + ra[4] + al[4] * (rd[4] - x10))
    return ControlVector(U1, U2, U3, U4), Ux, Uy


def attitude_from_virtual(Ux: float, Uy: float, psi: float):
    """Roll/pitch that realise the thrust direction (Ux, Uy) at yaw ``psi``.

    Inverts ``Ux = cos(phi) sin(theta) cos(psi) + sin(phi) sin(psi)`` and
    ``Uy = cos(phi) sin(theta) sin(psi) - sin(phi) cos(psi)``. Arguments of
    arcsin are clamped to [-1, 1]; returns ``(phi_d, theta_d, clamped)``.
    """
    cp, sp = math.cos(psi), math.sin(psi)
    a = Ux * sp - Uy * cp
    clamped = abs(a) > 1.0
    phi_d = math.asin(sat(a))
    b = (Ux * cp + Uy * sp) / math.cos(phi_d) if abs(phi_d) < math.pi / 2 else 0.0
    clamped = clamped or abs(b) > 1.0
    theta_d = math.asin(sat(b))
    return phi_d, theta_d, clamped


class ControlOutput(NamedTuple):
    u: ControlVector
    ref: ReferencePoint  # reference actually tracked (inner refs substituted in position mode)
    z: tuple
    surfaces: SlidingSurfaces
    Ux: float | None
    Uy: float | None
    clamped: bool


@dataclass
class Controller:
    """Cascade wrapper around the laws.

    ``attitude`` mode tracks (phi, theta, psi, z) references directly.
    ``position`` mode solves U1, Ux, Uy, converts (Ux, Uy) to roll/pitch
    commands and then runs the attitude laws on them. The only state is the
    last committed (t, phi_d, theta_d) used for the backward-difference rate
    of the derived commands; independent rollouts need independent instances.
    """

    params: QuadParams
    gains: GainSet = field(default_factory=GainSet)
    mode: str = "attitude"
    switching: str = "sign"
    epsilon: float = 0.05

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"controller.mode must be one of {MODES}")
        if self.switching not in SWITCHING:
            raise ValueError(f"controller.switching must be one of {SWITCHING}")
        if not self.epsilon > 0:
            raise ValueError("controller.epsilon must be > 0")
        self.constants = derive_constants(self.params)
        self._memory = None

    def reset(self) -> None:
        self._memory = None

    def step(self, t: float, s: Sequence[float], ref: ReferencePoint, omega_r: float) -> ControlOutput:
        """Evaluate the cascade at (t, s) without touching the memory."""
        c, p, g = self.constants, self.params, self.gains
        position = self.mode == "position"
        clamped = False
        if position:
            z, S = tracking_errors(s, ref, g)
            u, Ux, Uy = control_laws(
                s, ref, S, z, omega_r, c, p, g, self.switching, self.epsilon, position=True
            )
            phi_d, theta_d, clamped = attitude_from_virtual(Ux, Uy, s[4])
            if self._memory is None or t <= self._memory[0]:
                phi_rate = theta_rate = 0.0
            else:
                t0, phi0, theta0 = self._memory
                phi_rate = (phi_d - phi0) / (t - t0)
                theta_rate = (theta_d - theta0) / (t - t0)
            v, r, a = ref
            ref = ReferencePoint(
                (phi_d, theta_d) + v[2:],
                (phi_rate, theta_rate) + r[2:],
                (0.0, 0.0) + a[2:],
            )
        z, S = tracking_errors(s, ref, g)
        u, Ux, Uy = control_laws(
            s, ref, S, z, omega_r, c, p, g, self.switching, self.epsilon, position=position
        )
        return ControlOutput(u, ref, z, S, Ux, Uy, clamped)

    def commit(self, t: float, out: ControlOutput) -> None:
        """Record the derived roll/pitch commands evaluated at step start ``t``."""
        if self.mode == "position":
            self._memory = (t, out.ref.value[0], out.ref.value[1])


def cascade_step(controller: Controller, t: float, s, ref: ReferencePoint, omega_r: float = 0.0) -> ControlVector:
    return controller.step(t, s, ref, omega_r).u
