"""Registry of terrain tools and their JSON-schema definitions."""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass


def _num(description, minimum=None, maximum=None, default=None, example=None,
         integer=False, exclusive_minimum=None):
    prop = {"type": "integer" if integer else "number", "description": description}
    if minimum is not None:
        prop["minimum"] = minimum
    if exclusive_minimum is not None:
        prop["exclusiveMinimum"] = exclusive_minimum
    if maximum is not None:
        prop["maximum"] = maximum
    if default is not None:
        prop["default"] = default
    prop["examples"] = [example if example is not None else default]
    return prop


def _enum(description, values, default):
    return {"type": "string", "enum": list(values), "default": default,
            "description": description, "examples": [default]}


@dataclass(frozen=True)
class Tool:
    name: str
    description: str
    properties: dict
    required: tuple = ()
    geometry: bool = True
    whole_map_only: bool = False

    def args_schema(self) -> dict:
        return {
            "type": "object",
            "properties": copy.deepcopy(self.properties),
            "required": list(self.required),
            "additionalProperties": False,
        }

    def defaults(self) -> dict:
        return {k: v["default"] for k, v in self.properties.items() if "default" in v}

    def example_args(self) -> dict:
        return {k: v["examples"][0] for k, v in self.properties.items()}

    def resolve(self, args: dict) -> dict:
        """Fill defaults and coerce integer-typed values."""
        out = self.defaults()
        out.update(args)
        for k, prop in self.properties.items():
            if prop.get("type") == "integer" and k in out:
                out[k] = int(out[k])
        return out


def _obstacle_props(kind, r_range, h_range, density_example):
    return {
        "density": _num("Obstacles per square meter of the target region.", 0.0, 5.0,
                        example=density_example),
        "radius_min": _num(f"Smallest {kind} footprint radius in meters (>= cell size).", 0.01, 2.0,
                           default=r_range[0]),
        "radius_max": _num(f"Largest {kind} footprint radius in meters.", 0.01, 2.0, default=r_range[1]),
        "height_min": _num(f"Lowest {kind} height in meters.", h_range[0], h_range[1], default=h_range[2]),
        "height_max": _num(f"Tallest {kind} height in meters.", h_range[0], h_range[1], default=h_range[3]),
    }


TARGET_SCHEMA = {
    "description": 'Where the tool applies: "all" for the whole map, or {"row": r, "col": c} for one tile.',
    "oneOf": [
        {"type": "string", "enum": ["all"]},
        {
            "type": "object",
            "properties": {"row": {"type": "integer", "minimum": 0}, "col": {"type": "integer", "minimum": 0}},
            "required": ["row", "col"],
            "additionalProperties": False,
        },
    ],
    "examples": ["all"],
}


TOOLS: dict[str, Tool] = {t.name: t for t in [
    Tool("flat", "Set the target region to flat ground at a fixed elevation.",
         {"elevation": _num("Ground elevation in meters (0 is nominal ground).", -10.0, 10.0, example=0.0)},
         ("elevation",)),
    Tool("slope", "Add a planar incline to the target region, zero at the region center.",
         {"grade": _num("Rise over run (0.1 = 10% grade); negative descends along the heading.",
                        -1.0, 1.0, example=0.1),
          "heading_deg": _num("Uphill heading in degrees, 0 = +x, 90 = +y.", -360.0, 360.0, default=0.0)},
         ("grade",)),
    Tool("stairs", "Add a staircase: a landing, then `count` steps, then a top plateau.",
         {"step_height": _num("Rise of each step in meters.", maximum=0.5, exclusive_minimum=0.0, example=0.15),
          "step_depth": _num("Tread depth in meters (>= cell size).", 0.05, 5.0, example=0.3),
          "count": _num("Number of steps.", 1, 50, example=5, integer=True),
          "direction": _enum("Whether the stairs climb or descend along the heading.",
                             ("ascending", "descending"), "ascending"),
          "heading": _enum("Grid axis the stairs run along.", ("x", "y"), "x")},
         ("step_height", "step_depth", "count")),
    Tool("rough", "Add bounded fractal value noise (uneven ground).",
         {"amplitude": _num("Maximum deviation from the underlying surface in meters.", 0.0, 0.5, example=0.05),
          "octaves": _num("Number of noise octaves.", 1, 8, default=4, integer=True),
          "lacunarity": _num("Frequency multiplier between octaves.", 1.0, 4.0, default=2.0),
          "persistence": _num("Amplitude multiplier between octaves.", maximum=1.0, exclusive_minimum=0.0,
                              default=0.5),
          "scale": _num("Feature size of the first octave in meters.", 0.1, 20.0, default=1.0)},
         ("amplitude",)),
    Tool("pillars", "Scatter tall cylindrical obstacles (trees, lamp posts).",
         _obstacle_props("pillar", (0.1, 0.3), (0.5, 5.0, 1.0, 2.0), 0.2), ("density",)),
    Tool("rocks", "Scatter low obstacles (rocks, bins).",
         _obstacle_props("rock", (0.1, 0.4), (0.01, 0.5, 0.05, 0.3), 0.3), ("density",)),
    Tool("wading", "Flood the target region with water; legs below the surface feel drag, "
                   "added mass, buoyancy and flow forces.",
         {"water_level": _num("Absolute water surface elevation in meters.", -5.0, 5.0, example=0.2),
          "flow_kind": _enum("Water motion: still, constant current, or periodic tide.",
                             ("still", "current", "tide"), "still"),
          "current_amplitude": _num("Current force amplitude in newtons.", 0.0, 200.0, default=0.0),
          "tide_amplitude": _num("Tide force amplitude in newtons.", 0.0, 200.0, default=0.0),
          "tide_omega": _num("Tide angular frequency in rad/s.", 0.0, 10.0, default=1.0),
          "tide_phase": _num("Tide phase shift in radians.", -2 * math.pi, 2 * math.pi, default=0.0),
          "rho": _num("Water density in kg/m^3.", 950.0, 1100.0, default=1025.0),
          "drag_coeff": _num("Cylinder drag coefficient (dimensionless).", 0.82, 1.0, default=0.9),
          "added_mass_coeff": _num("Added mass coefficient (dimensionless).", 0.0, 1.0, default=0.5),
          "param_jitter": _num("Relative std of Gaussian parameter randomization (0 disables).",
                               0.0, 0.3, default=0.0)},
         ("water_level",), geometry=False),
    Tool("deformable", "Mark the target region as deformable soil (sand, mud); feet sink and feel "
                       "bulldozing resistance and pre-sliding friction.",
         {"bulldozing_coeff": _num("Bulldozing coefficient a in N/m^n.", 1.0, 1e5, default=1000.0),
          "bulldozing_exp": _num("Bulldozing exponent n (dimensionless).", 0.5, 2.0, default=1.1),
          "friction_coeff": _num("Soil friction coefficient.", 0.05, 1.5, default=0.6),
          "presliding_scale": _num("Pre-sliding displacement scale K in meters.", 1e-4, 0.1, default=0.01),
          "param_jitter": _num("Relative std of Gaussian parameter randomization (0 disables).",
                               0.0, 0.3, default=0.0)},
         (), geometry=False),
    Tool("compose", "Cross-fade all tile seams of the layout over `blend_width` cells.",
         {"blend_width": _num("Seam blend band width in cells (0 keeps hard edges).", 0, 64, example=4,
                              integer=True)},
         ("blend_width",), whole_map_only=True),
]}


def export_function_schemas() -> list[dict]:
    """Chat-completions style ``tools`` array, one function per registered tool."""
    out = []
    for tool in TOOLS.values():
        params = tool.args_schema()
        params["properties"]["target"] = copy.deepcopy(TARGET_SCHEMA)
        out.append({
            "type": "function",
            "function": {"name": tool.name, "description": tool.description, "parameters": params},
        })
    return out
