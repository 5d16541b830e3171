"""Kinematic force harness.

Feet follow prescribed trajectories over a compiled terrain; at every step the
force kernels are evaluated per leg and combined into a horizontal force,
a torque about the center of mass and an effective mass. Nothing is
integrated: the point is to exercise the force models in isolation.
"""

from __future__ import annotations

import csv
import dataclasses
import io as _io
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import physics as ph
from .errors import BoundsError, InvalidArgument, TerrainError
from .spec import GeneratedTerrain

LEG_NAMES = ("left", "right")
PRESETS = ("walk-in-place", "straight-walk", "sinusoid")


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.01
    duration: float = 10.0
    seed: int = 0
    body_mass: float = 30.0
    leg_radius: float = 0.05
    leg_length: float = 0.6
    lever_arm: float = 0.5
    flow_heading: tuple = (1.0, 0.0)
    noise: ph.NoiseSpec = field(default_factory=ph.NoiseSpec)

    def __post_init__(self):
        if not self.dt > 0 or self.duration < self.dt:
            raise InvalidArgument("need dt > 0 and duration >= dt")
        for name in ("body_mass", "leg_radius", "leg_length", "lever_arm"):
            if not getattr(self, name) > 0:
                raise InvalidArgument(f"{name} must be positive")
        if math.hypot(*self.flow_heading) == 0:
            raise InvalidArgument("flow_heading must be non-zero")

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))

    @property
    def flow_unit(self) -> tuple[float, float]:
        fx, fy = self.flow_heading
        n = math.hypot(fx, fy)
        return fx / n, fy / n


@dataclass(frozen=True)
class TerrainSample:
    elevation: float
    wading: int
    deformable: int
    water_level: float
    soil_region: int


@dataclass(frozen=True)
class LegKinematics:
    position: tuple
    velocity: tuple
    shear_displacement: float = 0.0


@dataclass(frozen=True)
class FootTrajectory:
    """``positions``/``velocities`` are ``(steps, 2, 3)`` arrays, legs ordered left, right."""

    positions: np.ndarray
    velocities: np.ndarray
    dt: float

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=np.float64)
        vel = np.asarray(self.velocities, dtype=np.float64)
        if pos.ndim != 3 or pos.shape[1:] != (2, 3) or pos.shape != vel.shape:
            raise InvalidArgument("trajectory arrays must both be (steps, 2, 3)")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "velocities", vel)

    def __len__(self):
        return self.positions.shape[0]


@dataclass(frozen=True)
class LegReport:
    x: float
    y: float
    z: float
    ux: float
    uy: float
    speed: float
    submerged_length: float
    wading: int
    deformable: int
    sinkage: float
    shear_displacement: float
    normal_load: float
    drag: float
    flow: float
    bulldozing: float
    friction: float

    def components(self, flow_unit) -> dict[str, tuple[float, float]]:
        """Signed (x, y) components: resistive terms oppose motion, flow follows its heading."""
        fx, fy = flow_unit
        return {
            "drag": (-self.drag * self.ux, -self.drag * self.uy),
            "flow": (self.flow * fx, self.flow * fy),
            "bulldozing": (-self.bulldozing * self.ux, -self.bulldozing * self.uy),
            "friction": (-self.friction * self.ux, -self.friction * self.uy),
        }


@dataclass(frozen=True)
class ReportRow:
    t: float
    epsilon: float
    xi: float
    effective_mass: float
    horizontal_x: float
    horizontal_y: float
    torque_x: float
    torque_y: float
    legs: tuple


LEG_FIELDS = tuple(f.name for f in dataclasses.fields(LegReport))
ROW_FIELDS = ("t", "epsilon", "xi", "effective_mass", "horizontal_x", "horizontal_y", "torque_x", "torque_y")
COLUMNS = ROW_FIELDS + tuple(f"{leg}_{name}" for leg in LEG_NAMES for name in LEG_FIELDS)


@dataclass(frozen=True)
class ForceReport:
    rows: tuple
    flow_unit: tuple = (1.0, 0.0)

    def __len__(self):
        return len(self.rows)

    def column(self, name: str) -> np.ndarray:
        return np.array([flatten_row(r)[name] for r in self.rows])

    def to_csv(self) -> str:
        buf = _io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        for row in self.rows:
            flat = flatten_row(row)
            writer.writerow([repr(float(flat[c])) if isinstance(flat[c], float) else flat[c] for c in COLUMNS])
        return buf.getvalue()

    def to_jsonl(self) -> str:
        return "".join(json.dumps(flatten_row(r)) + "\n" for r in self.rows)


def flatten_row(row: ReportRow) -> dict:
    out = {name: getattr(row, name) for name in ROW_FIELDS}
    for leg_name, leg in zip(LEG_NAMES, row.legs):
        for name in LEG_FIELDS:
            out[f"{leg_name}_{name}"] = getattr(leg, name)
    return out


# --- terrain queries -----------------------------------------------------------------------

def _axis(coord: float, cs: float, n: int) -> tuple[int, float]:
    f = coord / cs - 0.5
    r = round(f)
    if abs(f - r) < 1e-9:
        f = float(r)
    f = min(max(f, 0.0), n - 1.0)
    i0 = min(int(math.floor(f)), n - 2)
    return i0, f - i0


def _lerp(a: float, b: float, t: float) -> float:
    # endpoints are returned bit-exactly so cell centers reproduce the grid
    if t == 0.0:
        return a
    if t == 1.0:
        return b
    return a + (b - a) * t


def query_terrain(terrain: GeneratedTerrain, x: float, y: float) -> TerrainSample:
    """Bilinear elevation between cell centers, nearest-cell attributes."""
    hmap = terrain.heightmap
    cs = hmap.cell_size
    x_ext, y_ext = hmap.extent
    if not (0.0 <= x <= x_ext and 0.0 <= y <= y_ext):
        raise BoundsError(f"point ({x:.4f}, {y:.4f}) outside map [0, {x_ext}] x [0, {y_ext}]")
    i, tx = _axis(x, cs, hmap.width)
    j, ty = _axis(y, cs, hmap.height)
    d = hmap.data
    bottom = _lerp(d[j, i], d[j, i + 1], tx)
    top = _lerp(d[j + 1, i], d[j + 1, i + 1], tx)
    elevation = float(_lerp(bottom, top, ty))
    c = min(int(x / cs), hmap.width - 1)
    r = min(int(y / cs), hmap.height - 1)
    a = terrain.attributes
    return TerrainSample(elevation, int(a.wading[r, c]), int(a.deformable[r, c]),
                         float(a.water_level[r, c]), int(a.soil_region[r, c]))


def submerged_length(foot_z: float, water_level: float, leg_length: float) -> float:
    if not leg_length > 0:
        raise InvalidArgument(f"leg_length must be positive, got {leg_length}")
    return min(max(water_level - foot_z, 0.0), leg_length)


def torque_about_com(horizontal_force: float, lever_arm: float) -> float:
    if not lever_arm > 0:
        raise InvalidArgument(f"lever_arm must be positive, got {lever_arm}")
    return horizontal_force * lever_arm


def pd_torque(kp: float, kd: float, theta_d: float, theta: float, theta_dot: float) -> float:
    if kp < 0 or kd < 0:
        raise InvalidArgument("PD gains must be >= 0")
    return kp * (theta_d - theta) - kd * theta_dot


# --- stepping ------------------------------------------------------------------------------

def step(terrain: GeneratedTerrain, config: SimConfig, legs: Sequence[LegKinematics], t: float,
         eps: float, xi: float) -> ReportRow:
    fluid = terrain.fluid
    samples, wet, contact, h, sink, volumes, motion = [], [], [], [], [], [], []
    for leg in legs:
        x, y, z = leg.position
        s = query_terrain(terrain, x, y)
        h_leg = submerged_length(z, s.water_level, config.leg_length) if s.wading else 0.0
        in_soil = bool(s.deformable) and z <= s.elevation
        vx, vy = leg.velocity[0], leg.velocity[1]
        speed = math.hypot(vx, vy)
        u = (vx / speed, vy / speed) if speed > 0 else (0.0, 0.0)
        samples.append(s)
        h.append(h_leg)
        wet.append(1 if h_leg > 0 else 0)
        contact.append(1 if in_soil else 0)
        sink.append(s.elevation - z if in_soil else 0.0)
        volumes.append(ph.submerged_volume(config.leg_radius, h_leg))
        motion.append((speed, u))

    m_eff = ph.effective_mass(eps, config.body_mass, fluid, volumes[0], volumes[1])
    n_contact = sum(contact)
    normal_load = m_eff * ph.GRAVITY / n_contact if n_contact else 0.0
    flow = ph.flow_force(fluid, t, 1.0)  # xi enters once, through the horizontal combination

    reports = []
    total = [0.0, 0.0]
    for k, leg in enumerate(legs):
        speed, u = motion[k]
        drag = flow_k = bull = fric = 0.0
        if wet[k]:
            drag = ph.drag_force(eps, fluid, ph.projected_area(config.leg_radius, h[k]), speed)
            flow_k = flow
        load = normal_load if contact[k] else 0.0
        if contact[k] and speed > 0:
            soil = terrain.soil_regions[samples[k].soil_region]
            bull = ph.bulldozing_resistance(soil, sink[k])
            fric = ph.friction_force(soil, load, leg.shear_displacement)
        rep = LegReport(leg.position[0], leg.position[1], leg.position[2], u[0], u[1], speed, h[k],
                        wet[k], contact[k], sink[k], leg.shear_displacement, load, drag, flow_k, bull, fric)
        comp = rep.components(config.flow_unit)
        for axis in (0, 1):
            total[axis] += ph.horizontal_force(wet[k], contact[k], xi, comp["drag"][axis], comp["flow"][axis],
                                               comp["bulldozing"][axis], comp["friction"][axis])
        reports.append(rep)
    return ReportRow(t, eps, xi, m_eff, total[0], total[1],
                     torque_about_com(total[0], config.lever_arm), torque_about_com(total[1], config.lever_arm),
                     tuple(reports))


def run(terrain: GeneratedTerrain, config: SimConfig, trajectory: FootTrajectory) -> ForceReport:
    """Step through the trajectory; epsilon is drawn once, xi every step, both from ``config.seed``."""
    n = config.n_steps
    if len(trajectory) != n:
        raise InvalidArgument(f"trajectory has {len(trajectory)} samples, config needs {n}")
    rng = np.random.default_rng(config.seed)
    eps = ph.sample_noise(config.noise, rng)
    shear = [0.0, 0.0]
    prev_contact = [False, False]
    rows = []
    for k in range(n):
        t = k * config.dt
        legs = []
        for leg in range(2):
            pos = trajectory.positions[k, leg]
            s = query_terrain_safe(terrain, pos, t)
            in_soil = bool(s.deformable) and float(pos[2]) <= s.elevation
            if in_soil and prev_contact[leg]:
                prev = trajectory.positions[k - 1, leg]
                shear[leg] += math.hypot(float(pos[0] - prev[0]), float(pos[1] - prev[1]))
            else:
                shear[leg] = 0.0
            prev_contact[leg] = in_soil
            legs.append(LegKinematics(tuple(pos.tolist()), tuple(trajectory.velocities[k, leg].tolist()), shear[leg]))
        xi = ph.sample_noise(config.noise, rng)
        try:
            rows.append(step(terrain, config, legs, t, eps, xi))
        except TerrainError as exc:
            exc.args = (f"t={t:.6g} s: {exc}",)
            exc.t = t
            raise
    return ForceReport(tuple(rows), config.flow_unit)


def query_terrain_safe(terrain, pos, t):
    try:
        return query_terrain(terrain, pos[0], pos[1])
    except BoundsError as exc:
        raise BoundsError(f"t={t:.6g} s: {exc}") from exc


# --- trajectory presets ----------------------------------------------------------------------

def make_trajectory(preset: str, terrain: GeneratedTerrain, config: SimConfig, speed: float = 1.0,
                    start: tuple | None = None, heading: tuple = (1.0, 0.0), stance_width: float = 0.2,
                    sink_depth: float = 0.02, lift: float = 0.1, frequency: float = 1.0) -> FootTrajectory:
    """Closed-form foot trajectories.

    walk-in-place
        Feet stay at ``start +- stance_width/2`` (lateral); each foot rises
        ``lift * max(0, sin(2 pi f t + phase))`` with phases 0 and pi.
    straight-walk
        Both feet translate at ``speed`` along ``heading`` from ``start``.
    sinusoid
        Both feet oscillate along ``heading`` with velocity
        ``speed * sin(2 pi f t)``.

    Feet rest on the surface, or ``sink_depth`` below it on deformable cells.
    ``start`` defaults to the map center for the stationary presets and to
    the center of the west edge plus one leg length for straight-walk.
    """
    if preset not in PRESETS:
        raise InvalidArgument(f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}")
    hx, hy = heading
    norm = math.hypot(hx, hy)
    if norm == 0:
        raise InvalidArgument("heading must be non-zero")
    hx, hy = hx / norm, hy / norm
    x_ext, y_ext = terrain.heightmap.extent
    if start is None:
        start = (config.leg_length, y_ext / 2) if preset == "straight-walk" else (x_ext / 2, y_ext / 2)
    n = config.n_steps
    t = np.arange(n) * config.dt
    omega = 2.0 * math.pi * frequency
    lateral = np.array([-hy, hx]) * stance_width / 2.0

    if preset == "straight-walk":
        along = speed * t
        along_v = np.full(n, float(speed))
    elif preset == "sinusoid":
        along = speed / omega * (1.0 - np.cos(omega * t))
        along_v = speed * np.sin(omega * t)
    else:
        along = np.zeros(n)
        along_v = np.zeros(n)

    pos = np.zeros((n, 2, 3))
    vel = np.zeros((n, 2, 3))
    for leg, side in enumerate((1.0, -1.0)):
        phase = 0.0 if leg == 0 else math.pi
        for k in range(n):
            x = start[0] + along[k] * hx + side * lateral[0]
            y = start[1] + along[k] * hy + side * lateral[1]
            s = query_terrain_safe(terrain, (x, y), t[k])
            ground = s.elevation - (sink_depth if s.deformable else 0.0)
            z = ground
            vz = 0.0
            if preset == "walk-in-place":
                arg = omega * t[k] + phase
                if math.sin(arg) > 0:
                    z = s.elevation + lift * math.sin(arg)
                    vz = lift * omega * math.cos(arg)
            pos[k, leg] = (x, y, z)
            vel[k, leg] = (along_v[k] * hx, along_v[k] * hy, vz)
    return FootTrajectory(pos, vel, config.dt)
