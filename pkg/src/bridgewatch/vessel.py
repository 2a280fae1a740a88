"""Vessel kinematics and line-of-sight waypoint guidance.

Coordinates are NED-style: north/east in metres, course in radians wrapped
to (-pi, pi] with 0 = due north, positive clockwise (toward east).  The
motion model is a first-order lag on course and speed over the commanded
references, integrated with forward Euler at substeps of at most
``max_substep`` seconds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .config import GuidanceConfig, VesselConfig
from .errors import ScenarioError

TAU = math.tau


def wrap_angle(angle: float) -> float:
    """Wrap an angle in radians to (-pi, pi]."""
    if not math.isfinite(angle):
        raise ValueError(f"angle must be finite, got {angle!r}")
    wrapped = math.remainder(angle, TAU)
    if wrapped <= -math.pi:
        wrapped += TAU
    return wrapped


@dataclass(frozen=True)
class VesselState:
    """Pose and speed of a vessel at a simulation time."""
    time: float     # s
    north: float    # m
    east: float     # m
    course: float   # rad, (-pi, pi], 0 = north, clockwise positive
    speed: float    # m/s, >= 0

    def velocity(self) -> tuple[float, float]:
        """(north, east) velocity components in m/s."""
        return self.speed * math.cos(self.course), self.speed * math.sin(self.course)


@dataclass(frozen=True)
class GuidanceCommand:
    """Course/speed references handed to the vessel controller."""
    course_ref: float   # rad
    speed_ref: float    # m/s


@dataclass(frozen=True)
class Waypoint:
    north: float
    east: float
    acceptance_radius: float = 20.0  # m, switch distance to the next leg


def propagate(state: VesselState, cmd: GuidanceCommand, dt: float,
              vessel: VesselConfig = VesselConfig()) -> VesselState:
    """Advance a vessel state by ``dt`` seconds under a fixed command.

    Course follows a first-order lag toward ``cmd.course_ref`` along the
    shortest angular path; speed follows a first-order lag toward
    ``cmd.speed_ref`` clamped to [0, max_speed].  Position integrates the
    pre-update course/speed of each substep (forward Euler).
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    # ceil with a small bias so dt that is an exact multiple of max_substep
    # does not gain a spurious extra substep from float division
    steps = max(1, math.ceil(dt / vessel.max_substep - 1e-9))
    h = dt / steps
    n, e = state.north, state.east
    psi, u = state.course, state.speed
    course_ref = cmd.course_ref
    umax = vessel.max_speed
    speed_ref = min(max(cmd.speed_ref, 0.0), umax)
    k_psi = h / vessel.course_time_constant
    k_u = h / vessel.speed_time_constant
    rem, sin, cos = math.remainder, math.sin, math.cos
    for _ in range(steps):
        n += h * u * cos(psi)
        e += h * u * sin(psi)
        psi += k_psi * rem(course_ref - psi, TAU)
        u += k_u * (speed_ref - u)
        if u < 0.0:
            u = 0.0
        elif u > umax:
            u = umax
    psi = rem(psi, TAU)
    if psi <= -math.pi:
        psi += TAU
    return VesselState(state.time + dt, n, e, psi, u)


def los_guidance(state: VesselState, route: tuple[Waypoint, ...] | list[Waypoint],
                 active_index: int,
                 guidance: GuidanceConfig = GuidanceConfig(),
                 cruise_speed: float = 5.0) -> tuple[GuidanceCommand, int]:
    """Lookahead line-of-sight guidance along a waypoint route.

    Returns the course/speed references and the (possibly advanced) active
    segment index.  The vessel switches to the next leg when inside the
    acceptance radius of the leg's end waypoint; at the final waypoint it
    holds the last leg's bearing.
    """
    if len(route) < 2:
        raise ScenarioError("route must contain at least two waypoints")
    last_seg = len(route) - 2
    if not 0 <= active_index <= last_seg:
        raise ValueError(f"active_index {active_index} out of range for "
                         f"{len(route)} waypoints")
    i = active_index
    while i < last_seg and _inside(state, route[i + 1]):
        i += 1
    a, b = route[i], route[i + 1]
    bearing = math.atan2(b.east - a.east, b.north - a.north)
    if i == last_seg and _inside(state, b):
        # arrived: keep the final leg's bearing, no cross-track correction
        return GuidanceCommand(bearing, cruise_speed), i
    sin_b, cos_b = math.sin(bearing), math.cos(bearing)
    # cross-track error, positive to starboard of the leg
    cross = -(state.north - a.north) * sin_b + (state.east - a.east) * cos_b
    course = wrap_angle(bearing + math.atan(-cross / guidance.lookahead))
    return GuidanceCommand(course, cruise_speed), i


def _inside(state: VesselState, wp: Waypoint) -> bool:
    return math.hypot(state.north - wp.north, state.east - wp.east) <= wp.acceptance_radius
