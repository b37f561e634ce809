"""Quadrotor flight-dynamics simulator with backstepping sliding-mode control."""

from .actuation import allocate, mix
from .control import Controller, GainSet
from .dynamics import state_derivative, torque_form_derivative
from .model import QuadParams, derive_constants
from .sim import SimConfig, SimLog, metrics, run
from .trajectory import TrajectorySpec
from .tune import TuneProblem, optimize

__version__ = "0.1.0"

__all__ = [
    "Controller",
    "GainSet",
    "QuadParams",
    "SimConfig",
    "SimLog",
    "TrajectorySpec",
    "TuneProblem",
    "allocate",
    "derive_constants",
    "metrics",
    "mix",
    "optimize",
    "run",
    "state_derivative",
    "torque_form_derivative",
]
