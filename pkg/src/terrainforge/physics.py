"""Force kernels for wading and deformable terrain.

Every kernel returns a magnitude (or signed scalar for flow); applying the
direction, e.g. opposing the leg velocity, is left to the caller.
Units are SI throughout.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, SaturationError

GRAVITY = 9.81
TURBULENT_REYNOLDS = 4000.0
FLOW_KINDS = ("still", "current", "tide")
DRAG_COEFF_RANGE = (0.82, 1.0)


@dataclass(frozen=True)
class FluidParams:
    rho: float = 1025.0
    drag_coeff: float = 0.9
    added_mass_coeff: float = 0.5
    dyn_viscosity: float = 0.0011
    flow_kind: str = "still"
    current_amplitude: float = 0.0
    tide_amplitude: float = 0.0
    tide_omega: float = 1.0
    tide_phase: float = 0.0
    water_level: float = 0.0
    check_drag_range: bool = dataclasses.field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if not self.rho > 0:
            raise InvalidArgument(f"rho must be positive, got {self.rho}")
        if not self.dyn_viscosity > 0:
            raise InvalidArgument(f"dyn_viscosity must be positive, got {self.dyn_viscosity}")
        lo, hi = DRAG_COEFF_RANGE
        if self.check_drag_range and not lo <= self.drag_coeff <= hi:
            raise InvalidArgument(f"drag_coeff {self.drag_coeff} outside [{lo}, {hi}]")
        if self.added_mass_coeff < 0:
            raise InvalidArgument(f"added_mass_coeff must be >= 0, got {self.added_mass_coeff}")
        if self.flow_kind not in FLOW_KINDS:
            raise InvalidArgument(f"flow_kind must be one of {FLOW_KINDS}, got {self.flow_kind!r}")


@dataclass(frozen=True)
class SoilParams:
    """Defaults are artifact choices, not measured values."""

    bulldozing_coeff: float = 1000.0
    bulldozing_exp: float = 1.1
    friction_coeff: float = 0.6
    presliding_scale: float = 0.01

    def __post_init__(self):
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if not value > 0:
                raise InvalidArgument(f"{f.name} must be strictly positive, got {value}")


@dataclass(frozen=True)
class LegState:
    radius: float
    submerged_length: float = 0.0
    speed: float = 0.0
    shear_displacement: float = 0.0
    sinkage: float = 0.0
    normal_load: float = 0.0

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidArgument(f"radius must be positive, got {self.radius}")
        for name in ("submerged_length", "sinkage", "shear_displacement", "normal_load"):
            if getattr(self, name) < 0:
                raise InvalidArgument(f"{name} must be >= 0, got {getattr(self, name)}")


@dataclass(frozen=True)
class NoiseSpec:
    mean: float = 1.0
    std_dev: float = 0.1
    truncation: float = 3.0  # in units of std_dev
    seed: int = 0

    def __post_init__(self):
        if self.std_dev < 0 or self.truncation <= 0:
            raise InvalidArgument("std_dev must be >= 0 and truncation > 0")

    @property
    def bounds(self) -> tuple[float, float]:
        half = self.truncation * self.std_dev
        return self.mean - half, self.mean + half


def projected_area(radius: float, submerged_length: float) -> float:
    if radius < 0 or submerged_length < 0:
        raise InvalidArgument("radius and submerged_length must be >= 0")
    return 2.0 * math.pi * radius * submerged_length


def drag_force(eps: float, fluid: FluidParams, area: float, speed: float) -> float:
    if area < 0:
        raise InvalidArgument(f"area must be >= 0, got {area}")
    return 0.5 * eps * fluid.drag_coeff * fluid.rho * area * speed * speed


def reynolds(rho: float, speed: float, char_length: float, dyn_viscosity: float) -> float:
    if dyn_viscosity <= 0:
        raise InvalidArgument(f"dyn_viscosity must be positive, got {dyn_viscosity}")
    return rho * speed * char_length / dyn_viscosity


def is_turbulent(re: float) -> bool:
    return re > TURBULENT_REYNOLDS


def submerged_volume(radius: float, submerged_length: float) -> float:
    if radius < 0 or submerged_length < 0:
        raise InvalidArgument("radius and submerged_length must be >= 0")
    return math.pi * radius * radius * submerged_length


def added_mass(fluid: FluidParams, submerged_vol: float) -> float:
    if submerged_vol < 0:
        raise InvalidArgument(f"submerged volume must be >= 0, got {submerged_vol}")
    return fluid.added_mass_coeff * fluid.rho * submerged_vol


def effective_mass(eps: float, body_mass: float, fluid: FluidParams,
                   v_left: float, v_right: float) -> float:
    """Body mass corrected for buoyancy and added mass of both legs.

    Raises SaturationError instead of clamping when buoyancy wins.
    """
    if not body_mass > 0:
        raise InvalidArgument(f"body_mass must be positive, got {body_mass}")
    if v_left < 0 or v_right < 0:
        raise InvalidArgument("submerged volumes must be >= 0")
    m_eff = eps * (body_mass + (fluid.added_mass_coeff - 1.0) * fluid.rho * (v_left + v_right))
    if m_eff <= 0:
        raise SaturationError(f"effective mass {m_eff:.6g} kg <= 0: robot fully buoyant")
    return m_eff


def flow_force(fluid: FluidParams, t: float, xi: float = 1.0) -> float:
    if fluid.flow_kind == "still":
        return 0.0
    if fluid.flow_kind == "current":
        return xi * fluid.current_amplitude
    return xi * fluid.tide_amplitude * math.cos(fluid.tide_omega * t + fluid.tide_phase)


def bulldozing_resistance(soil: SoilParams, sinkage: float) -> float:
    if sinkage < 0:
        raise InvalidArgument(f"sinkage must be >= 0, got {sinkage}")
    return soil.bulldozing_coeff * sinkage ** soil.bulldozing_exp


def friction_force(soil: SoilParams, normal_load: float, shear_displacement: float) -> float:
    if normal_load < 0 or shear_displacement < 0:
        raise InvalidArgument("normal_load and shear_displacement must be >= 0")
    if soil.presliding_scale == 0:
        raise InvalidArgument("presliding_scale must be non-zero")
    # -expm1(-u) == 1 - exp(-u) without cancellation near u = 0
    return soil.friction_coeff * normal_load * -math.expm1(-shear_displacement / soil.presliding_scale)


def horizontal_force(wading_flag: int, deformable_flag: int, xi: float,
                     drag: float, flow: float, bulldozing: float, friction: float) -> float:
    """Inner product of ``xi * [1w, 1w, 1d, 1d]`` with ``[drag, flow, bulldozing, friction]``."""
    if wading_flag not in (0, 1) or deformable_flag not in (0, 1):
        raise InvalidArgument("terrain flags must be 0 or 1")
    total = 0.0
    if wading_flag:
        total += drag + flow
    if deformable_flag:
        total += bulldozing + friction
    # one multiplication keeps f(xi) == xi * f(1) bit-exact
    return xi * total


def sample_noise(spec: NoiseSpec, rng: np.random.Generator) -> float:
    """One multiplicative noise draw from N(mean, std_dev) truncated by rejection."""
    if spec.std_dev == 0:
        return float(spec.mean)
    lo, hi = spec.bounds
    while True:
        value = float(rng.normal(spec.mean, spec.std_dev))
        if lo <= value <= hi:
            return value


def noise_rng(spec: NoiseSpec) -> np.random.Generator:
    return np.random.default_rng(spec.seed)


# Physical validity floors/ceilings used when jittering parameters.
_FLUID_BOUNDS = {
    "rho": (1e-6, math.inf),
    "drag_coeff": DRAG_COEFF_RANGE,
    "added_mass_coeff": (0.0, math.inf),
    "dyn_viscosity": (1e-12, math.inf),
}
_SOIL_BOUNDS = {
    "bulldozing_coeff": (1e-12, math.inf),
    "bulldozing_exp": (1e-12, math.inf),
    "friction_coeff": (1e-12, math.inf),
    "presliding_scale": (1e-12, math.inf),
}


def _jitter(value: float, rel_std: float, rng: np.random.Generator, bounds) -> float:
    if rel_std == 0 or value == 0:
        return value
    spec = NoiseSpec(mean=1.0, std_dev=rel_std)
    lo, hi = bounds
    return float(min(max(value * sample_noise(spec, rng), lo), hi))


def jitter_fluid(fluid: FluidParams, rng: np.random.Generator, rel_std: float = 0.1) -> FluidParams:
    """Gaussian per-parameter randomization (truncated at 3 sigma, clipped to validity)."""
    changes = {name: _jitter(getattr(fluid, name), rel_std, rng, b) for name, b in _FLUID_BOUNDS.items()}
    return dataclasses.replace(fluid, **changes)


def jitter_soil(soil: SoilParams, rng: np.random.Generator, rel_std: float = 0.1) -> SoilParams:
    changes = {name: _jitter(getattr(soil, name), rel_std, rng, b) for name, b in _SOIL_BOUNDS.items()}
    return dataclasses.replace(soil, **changes)


# --- JSON config section {fluid, soil, noise} -------------------------------------------

_CONFIG_TYPES = {"fluid": FluidParams, "soil": SoilParams, "noise": NoiseSpec}


def _public_fields(cls) -> list[str]:
    return [f.name for f in dataclasses.fields(cls) if f.repr]


def params_to_dict(obj) -> dict:
    return {name: getattr(obj, name) for name in _public_fields(type(obj))}


def params_from_dict(cls, data: dict, section: str = ""):
    allowed = set(_public_fields(cls))
    unknown = sorted(set(data) - allowed)
    if unknown:
        where = f" in {section!r}" if section else ""
        raise InvalidArgument(f"unknown keys{where}: {', '.join(unknown)}")
    return cls(**data)


def load_physics_config(data: dict) -> dict:
    """Parse ``{fluid: {...}, soil: {...}, noise: {...}}``; missing sections get defaults."""
    unknown = sorted(set(data) - set(_CONFIG_TYPES))
    if unknown:
        raise InvalidArgument(f"unknown config sections: {', '.join(unknown)}")
    return {name: params_from_dict(cls, data.get(name, {}), name) for name, cls in _CONFIG_TYPES.items()}


def dump_physics_config(fluid: FluidParams, soil: SoilParams, noise: NoiseSpec) -> dict:
    return {"fluid": params_to_dict(fluid), "soil": params_to_dict(soil), "noise": params_to_dict(noise)}
