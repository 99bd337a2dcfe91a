"""Exocentric grab-and-drag UAV teleoperation sandbox.

A virtual leader UAV is manipulated directly by the operator's hand; a
simulated real UAV follows it across a latent link and reports back through
a phantom (last known pose). The package bundles the interaction automaton,
the link and plant simulation, scripted pilots for headless runs, flight-log
persistence, journey metrics, workload statistics, a live session service,
and a CLI.
"""

__version__ = "0.1.0"

from .geometry import BodyVector, GripOffset, Pose, wrap_angle  # noqa: F401
from .metaphor import HitBox, InteractionState, Mode, VisualState  # noqa: F401
from .uav import Limits, PidGains, UavState  # noqa: F401
