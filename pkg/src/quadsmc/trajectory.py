"""Closed-form reference trajectories with analytic derivatives."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

CHANNELS = ("phi", "theta", "psi", "x", "y", "z")
KINDS = ("sine", "cosine", "ramp", "constant", "zero")


class ReferencePoint(NamedTuple):
    """Desired value, rate and acceleration per channel, ordered phi, theta, psi, x, y, z."""

    value: tuple
    rate: tuple
    accel: tuple

    @classmethod
    def zeros(cls) -> "ReferencePoint":
        z = (0.0,) * 6
        return cls(z, z, z)


@dataclass(frozen=True)
class ChannelRef:
    """One reference channel.

    ``sine``:     amplitude * sin(frequency * t + phase) + offset
    ``cosine``:   amplitude * cos(frequency * t + phase) + offset
    ``ramp``:     slope * t + offset
    ``constant``: value
    ``zero``:     0
    """

    kind: str = "zero"
    amplitude: float = 1.0
    frequency: float = 1.0
    phase: float = 0.0
    slope: float = 0.0
    offset: float = 0.0
    value: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown trajectory kind {self.kind!r}; expected one of {KINDS}")
        for name in ("amplitude", "frequency", "phase", "slope", "offset", "value"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"trajectory parameter {name} must be finite")

    def eval(self, t: float) -> tuple[float, float, float]:
        k = self.kind
        if k == "sine" or k == "cosine":
            a, w = self.amplitude, self.frequency
            arg = w * t + self.phase
            if k == "sine":
                s, c = math.sin(arg), math.cos(arg)
                return a * s + self.offset, a * w * c, -a * w * w * s
            s, c = math.sin(arg), math.cos(arg)
            return a * c + self.offset, -a * w * s, -a * w * w * c
        if k == "ramp":
            return self.slope * t + self.offset, self.slope, 0.0
        if k == "constant":
            return self.value, 0.0, 0.0
        return 0.0, 0.0, 0.0

    @classmethod
    def from_dict(cls, data: Mapping) -> "ChannelRef":
        data = dict(data)
        kind = data.pop("type", data.pop("kind", "zero"))
        params = data.pop("params", {})
        if data:
            raise ValueError(f"unknown trajectory keys: {sorted(data)}")
        allowed = {"amplitude", "frequency", "phase", "slope", "offset", "value"}
        bad = set(params) - allowed
        if bad:
            raise ValueError(f"unknown trajectory params: {sorted(bad)}")
        return cls(kind=kind, **{k: float(v) for k, v in params.items()})

    def to_dict(self) -> dict:
        params = {
            "sine": ("amplitude", "frequency", "phase", "offset"),
            "cosine": ("amplitude", "frequency", "phase", "offset"),
            "ramp": ("slope", "offset"),
            "constant": ("value",),
            "zero": (),
        }[self.kind]
        return {"type": self.kind, "params": {k: getattr(self, k) for k in params}}


def sine(amplitude=1.0, frequency=1.0, phase=0.0) -> ChannelRef:
    return ChannelRef("sine", amplitude=amplitude, frequency=frequency, phase=phase)


def cosine(amplitude=1.0, frequency=1.0, phase=0.0) -> ChannelRef:
    return ChannelRef("cosine", amplitude=amplitude, frequency=frequency, phase=phase)


def ramp(slope: float, offset: float = 0.0) -> ChannelRef:
    return ChannelRef("ramp", slope=slope, offset=offset)


def constant(value: float) -> ChannelRef:
    return ChannelRef("constant", value=value)


@dataclass(frozen=True)
class TrajectorySpec:
    phi: ChannelRef = field(default_factory=ChannelRef)
    theta: ChannelRef = field(default_factory=ChannelRef)
    psi: ChannelRef = field(default_factory=ChannelRef)
    x: ChannelRef = field(default_factory=ChannelRef)
    y: ChannelRef = field(default_factory=ChannelRef)
    z: ChannelRef = field(default_factory=ChannelRef)

    def channels(self) -> tuple[ChannelRef, ...]:
        return tuple(getattr(self, c) for c in CHANNELS)

    @classmethod
    def from_dict(cls, data: Mapping) -> "TrajectorySpec":
        bad = set(data) - set(CHANNELS)
        if bad:
            raise ValueError(f"unknown trajectory channels: {sorted(bad)}")
        return cls(**{c: ChannelRef.from_dict(v) for c, v in data.items()})

    def to_dict(self) -> dict:
        return {c: getattr(self, c).to_dict() for c in CHANNELS}


def fig3_attitude() -> TrajectorySpec:
    """phi = sin t, theta = cos t, psi = 0.1 t."""
    return TrajectorySpec(phi=sine(), theta=cosine(), psi=ramp(0.1))


def fig7_position() -> TrajectorySpec:
    """x = sin t, y = 2 t, z = 3 t, psi = 0.1 t."""
    return TrajectorySpec(psi=ramp(0.1), x=sine(), y=ramp(2.0), z=ramp(3.0))


def sample(spec: TrajectorySpec, t: float) -> ReferencePoint:
    if t < 0:
        raise ValueError("trajectory time must be non-negative")
    vals = [ch.eval(t) for ch in spec.channels()]
    return ReferencePoint(
        tuple(v[0] for v in vals),
        tuple(v[1] for v in vals),
        tuple(v[2] for v in vals),
    )
