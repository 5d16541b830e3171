"""Terrain spec documents: parsing, validation, serialization and compilation.

Wire format (version "1")::

    {"version": "1",
     "layout": {"rows": R, "cols": C, "tile_cells": N, "cell_size": S},
     "global_seed": U64,
     "calls": [{"tool": name, "target": "all" | {"row": r, "col": c}, "args": {...}}]}

Tile ``(row, col)`` covers grid rows ``row*N .. (row+1)*N`` (y) and columns
``col*N .. (col+1)*N`` (x).
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Any, Union

import jsonschema
import numpy as np

from . import heightmap as hm
from .errors import CapacityError, InvalidArgument, RangeError, SchemaError, SpecParseError, UnknownToolError
from .physics import FluidParams, SoilParams, jitter_fluid, jitter_soil
from .tools import TOOLS

SPEC_VERSION = "1"
MAX_CELLS = 16_000_000
U64_MAX = 2 ** 64 - 1

Target = Union[str, tuple]

_RANGE_VALIDATORS = {"minimum", "maximum", "exclusiveMinimum", "exclusiveMaximum", "enum"}


@dataclass(frozen=True)
class Layout:
    rows: int = 1
    cols: int = 1
    tile_cells: int = 64
    cell_size: float = hm.DEFAULT_CELL_SIZE

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows * self.tile_cells, self.cols * self.tile_cells


@dataclass(frozen=True)
class ToolCall:
    tool: str
    args: dict = field(default_factory=dict)
    target: Target = "all"


@dataclass(frozen=True)
class TerrainSpec:
    layout: Layout = field(default_factory=Layout)
    calls: tuple = ()
    global_seed: int = 0
    version: str = SPEC_VERSION


# --- parsing ----------------------------------------------------------------------------

def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _is_num(v) -> bool:
    return (isinstance(v, (int, float)) and not isinstance(v, bool)) and math.isfinite(v)


def _parse_layout(data) -> Layout:
    if not isinstance(data, dict):
        raise SchemaError("layout must be an object", path="layout")
    expected = {"rows", "cols", "tile_cells", "cell_size"}
    extra = sorted(set(data) - expected)
    if extra:
        raise SchemaError(f"unknown key {extra[0]!r}", path=f"layout.{extra[0]}")
    for key in ("rows", "cols", "tile_cells"):
        if key not in data:
            raise SchemaError("required field missing", path=f"layout.{key}")
        if not _is_int(data[key]):
            raise SchemaError("must be an integer", path=f"layout.{key}")
    if "cell_size" not in data:
        raise SchemaError("required field missing", path="layout.cell_size")
    if not _is_num(data["cell_size"]):
        raise SchemaError("must be a number", path="layout.cell_size")
    if data["rows"] < 1 or data["cols"] < 1:
        raise RangeError("rows and cols must be >= 1", path="layout")
    if data["tile_cells"] < 2:
        raise RangeError("tile_cells must be >= 2", path="layout.tile_cells")
    if not data["cell_size"] > 0:
        raise RangeError("cell_size must be positive", path="layout.cell_size")
    return Layout(data["rows"], data["cols"], data["tile_cells"], float(data["cell_size"]))


def _parse_target(raw, layout: Layout, path: str) -> Target:
    if raw == "all":
        return "all"
    if isinstance(raw, dict) and set(raw) == {"row", "col"} and _is_int(raw["row"]) and _is_int(raw["col"]):
        r, c = raw["row"], raw["col"]
        if not (0 <= r < layout.rows and 0 <= c < layout.cols):
            raise RangeError(f"tile ({r}, {c}) outside {layout.rows}x{layout.cols} layout", path=path)
        return (r, c)
    raise SchemaError('target must be "all" or {"row": int, "col": int}', path=path)


def _validate_args(tool_name: str, args, path: str) -> None:
    tool = TOOLS[tool_name]
    if not isinstance(args, dict):
        raise SchemaError("args must be an object", path=path)
    validator = jsonschema.Draft202012Validator(tool.args_schema())
    errors = sorted(validator.iter_errors(args), key=lambda e: (list(e.absolute_path), e.validator))
    if not errors:
        return
    err = errors[0]
    if err.validator == "required":
        missing = [k for k in tool.required if k not in args][0]
        raise SchemaError("required argument missing", path=f"{path}.{missing}")
    if err.validator == "additionalProperties":
        extra = sorted(set(args) - set(tool.properties))[0]
        raise SchemaError("unknown argument", path=f"{path}.{extra}")
    sub = ".".join(str(p) for p in err.absolute_path)
    where = f"{path}.{sub}" if sub else path
    cls = RangeError if err.validator in _RANGE_VALIDATORS else SchemaError
    raise cls(err.message, path=where)


def _region_shape(layout: Layout, target: Target) -> tuple[int, int]:
    if target == "all":
        return layout.shape
    return layout.tile_cells, layout.tile_cells


def _check_semantics(call: ToolCall, layout: Layout, path: str) -> None:
    """Layout-dependent constraints, so compile never fails on a parsed spec."""
    args = TOOLS[call.tool].resolve(call.args)
    rows, cols = _region_shape(layout, call.target)
    cs = layout.cell_size
    if call.tool == "stairs":
        if args["step_depth"] < cs:
            raise RangeError(f"step_depth below cell_size {cs}", path=f"{path}.args.step_depth")
        n = cols if args["heading"] == "x" else rows
        if hm.stair_levels(n, cs, args["step_depth"], args["count"])[-1] < args["count"]:
            raise RangeError(f"{args['count']} steps of depth {args['step_depth']} m do not fit in "
                             f"{n * cs:.3f} m", path=f"{path}.args.count")
    elif call.tool in ("pillars", "rocks"):
        if args["radius_min"] < cs:
            raise RangeError(f"radius_min below cell_size {cs}", path=f"{path}.args.radius_min")
        if args["radius_min"] > args["radius_max"]:
            raise RangeError("radius_min exceeds radius_max", path=f"{path}.args.radius_min")
        if args["height_min"] > args["height_max"]:
            raise RangeError("height_min exceeds height_max", path=f"{path}.args.height_min")
        if 2 * args["radius_min"] > min(rows, cols) * cs:
            raise RangeError("obstacle footprint larger than target region", path=f"{path}.args.radius_min")
    elif call.tool == "compose":
        if call.target != "all":
            raise RangeError('compose only applies to target "all"', path=f"{path}.target")
        if args["blend_width"] > layout.tile_cells:
            raise RangeError("blend_width exceeds tile_cells", path=f"{path}.args.blend_width")


def spec_from_dict(data: Any) -> TerrainSpec:
    if not isinstance(data, dict):
        raise SchemaError("spec must be a JSON object")
    extra = sorted(set(data) - {"version", "layout", "global_seed", "calls"})
    if extra:
        raise SchemaError("unknown top-level key", path=extra[0])
    for key in ("version", "layout", "calls"):
        if key not in data:
            raise SchemaError("required field missing", path=key)
    if data["version"] != SPEC_VERSION:
        raise SchemaError(f"unsupported version {data['version']!r}, expected {SPEC_VERSION!r}", path="version")
    layout = _parse_layout(data["layout"])
    seed = data.get("global_seed", 0)
    if not _is_int(seed) or not 0 <= seed <= U64_MAX:
        raise SchemaError("global_seed must be an unsigned 64-bit integer", path="global_seed")
    raw_calls = data["calls"]
    if not isinstance(raw_calls, list):
        raise SchemaError("calls must be a list", path="calls")

    calls = []
    for i, raw in enumerate(raw_calls):
        path = f"calls[{i}]"
        if not isinstance(raw, dict):
            raise SchemaError("call must be an object", path=path, index=i)
        extra = sorted(set(raw) - {"tool", "target", "args"})
        if extra:
            raise SchemaError("unknown key", path=f"{path}.{extra[0]}", index=i)
        name = raw.get("tool")
        if not isinstance(name, str):
            raise SchemaError("tool name missing", path=f"{path}.tool", index=i)
        if name not in TOOLS:
            raise UnknownToolError(name, index=i)
        args = raw.get("args", {})
        try:
            _validate_args(name, args, f"{path}.args")
            target = _parse_target(raw.get("target", "all"), layout, f"{path}.target")
            call = ToolCall(name, dict(args), target)
            _check_semantics(call, layout, path)
        except SchemaError as exc:
            exc.index = i
            raise
        calls.append(call)
    return TerrainSpec(layout, tuple(calls), seed, data["version"])


def parse_spec(text: str | bytes) -> TerrainSpec:
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SpecParseError(f"spec is not valid UTF-8: {exc.reason}", offset=exc.start) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[:exc.pos].encode("utf-8"))
        raise SpecParseError(f"malformed JSON at byte {offset}: {exc.msg}", offset=offset) from exc
    return spec_from_dict(data)


def spec_to_dict(spec: TerrainSpec) -> dict:
    def target(t):
        return "all" if t == "all" else {"row": t[0], "col": t[1]}

    return {
        "version": spec.version,
        "layout": dataclasses.asdict(spec.layout),
        "global_seed": spec.global_seed,
        "calls": [{"tool": c.tool, "target": target(c.target), "args": dict(c.args)} for c in spec.calls],
    }


def serialize_spec(spec: TerrainSpec) -> str:
    return json.dumps(spec_to_dict(spec), indent=2) + "\n"


def spec_roundtrip(spec: TerrainSpec) -> TerrainSpec:
    return parse_spec(serialize_spec(spec))


# --- compilation -------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AttributeGrid:
    """Per-cell physical layer: wading/deformable flags, water surface and soil region id."""

    width: int
    height: int
    wading: np.ndarray
    deformable: np.ndarray
    water_level: np.ndarray
    soil_region: np.ndarray

    def __post_init__(self):
        shape = (self.height, self.width)
        for name, dtype in (("wading", np.uint8), ("deformable", np.uint8),
                            ("water_level", np.float64), ("soil_region", np.uint16)):
            arr = np.array(getattr(self, name), dtype=dtype).reshape(shape)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def empty(cls, width: int, height: int) -> "AttributeGrid":
        z = np.zeros((height, width))
        return cls(width, height, z, z, z, z)

    def __eq__(self, other):
        if not isinstance(other, AttributeGrid):
            return NotImplemented
        return all(getattr(self, n).tobytes() == getattr(other, n).tobytes()
                   for n in ("wading", "deformable", "water_level", "soil_region")) \
            and self.shape == other.shape

    __hash__ = None

    @property
    def shape(self):
        return self.height, self.width


@dataclass(frozen=True, eq=False)
class GeneratedTerrain:
    heightmap: hm.HeightMap
    attributes: AttributeGrid
    fluid: FluidParams
    soil_regions: dict
    provenance: TerrainSpec
    obstacles: tuple = ()
    warnings: tuple = ()

    def __eq__(self, other):
        if not isinstance(other, GeneratedTerrain):
            return NotImplemented
        return (self.heightmap == other.heightmap and self.attributes == other.attributes
                and self.fluid == other.fluid and self.soil_regions == other.soil_regions
                and self.provenance == other.provenance and self.obstacles == other.obstacles)

    __hash__ = None


def child_seed(global_seed: int, index: int) -> int:
    """Per-call seed; depends only on the global seed and the call's position."""
    digest = hashlib.blake2b(f"{global_seed}:{index}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def _static_warnings(spec: TerrainSpec) -> list[str]:
    warnings = []
    if not spec.calls:
        warnings.append("empty terrain, flat default")
        return warnings
    last_all = {}
    for i, call in enumerate(spec.calls):
        if call.target != "all" or call.tool == "compose":
            continue
        family = "geometry" if TOOLS[call.tool].geometry else call.tool
        overwrites = call.tool in ("flat", "wading", "deformable")
        if overwrites and family in last_all:
            warnings.append(f"overlapping whole-map calls: call {i} ({call.tool}) overwrites "
                            f"call {last_all[family]}")
        last_all[family] = i
    if spec.layout.rows * spec.layout.cols > 1 and not last_all:
        used = {c.target for c in spec.calls if c.target != "all"}
        for r in range(spec.layout.rows):
            for c in range(spec.layout.cols):
                if (r, c) not in used:
                    warnings.append(f"unused tile ({r}, {c}): stays flat at 0.0")
    return warnings


class _Compiler:
    def __init__(self, spec: TerrainSpec):
        self.spec = spec
        layout = spec.layout
        rows, cols = layout.shape
        if rows * cols > MAX_CELLS:
            raise CapacityError(f"terrain of {rows}x{cols} cells exceeds the {MAX_CELLS}-cell limit")
        self.heights = np.zeros((rows, cols))
        self.wading = np.zeros((rows, cols), dtype=np.uint8)
        self.deformable = np.zeros((rows, cols), dtype=np.uint8)
        self.water = np.zeros((rows, cols))
        self.region = np.zeros((rows, cols), dtype=np.uint16)
        self.fluid = FluidParams()
        self.soils: dict[int, SoilParams] = {}
        self.obstacles = []
        self.warnings = _static_warnings(spec)

    def _slice(self, target):
        if target == "all":
            return np.s_[:, :]
        n = self.spec.layout.tile_cells
        r, c = target
        return np.s_[r * n:(r + 1) * n, c * n:(c + 1) * n]

    def run(self) -> GeneratedTerrain:
        for i, call in enumerate(self.spec.calls):
            self._apply(i, call)
        self._enforce_water()
        layout = self.spec.layout
        rows, cols = layout.shape
        heightmap = hm.HeightMap(cols, rows, layout.cell_size, self.heights, self.spec.global_seed)
        attrs = AttributeGrid(cols, rows, self.wading, self.deformable, self.water, self.region)
        return GeneratedTerrain(heightmap, attrs, self.fluid, dict(self.soils), self.spec,
                                tuple(self.obstacles), tuple(self.warnings))

    def _apply(self, index: int, call: ToolCall) -> None:
        args = TOOLS[call.tool].resolve(call.args)
        seed = child_seed(self.spec.global_seed, index)
        sl = self._slice(call.target)
        region = self.heights[sl]
        cs = self.spec.layout.cell_size
        sub = hm.HeightMap(region.shape[1], region.shape[0], cs, region, seed)

        if call.tool == "flat":
            self.heights[sl] = args["elevation"]
        elif call.tool == "slope":
            theta = math.radians(args["heading_deg"])
            self.heights[sl] = hm.gen_slope(sub, args["grade"], (math.cos(theta), math.sin(theta))).data
        elif call.tool == "stairs":
            out = hm.gen_stairs(sub, args["step_height"], args["step_depth"], args["count"],
                                args["direction"], args["heading"])
            self.heights[sl] = out.data
        elif call.tool == "rough":
            out = hm.gen_rough(sub, args["amplitude"], args["octaves"], args["lacunarity"],
                               args["persistence"], seed, args["scale"])
            self.heights[sl] = out.data
        elif call.tool in ("pillars", "rocks"):
            kind = "pillar" if call.tool == "pillars" else "rock"
            out, obstacles = hm.place_obstacles(sub, kind, args["density"],
                                                (args["radius_min"], args["radius_max"]),
                                                (args["height_min"], args["height_max"]), seed)
            self.heights[sl] = out.data
            self.obstacles.append((index, call.target, obstacles))
        elif call.tool == "wading":
            level = args["water_level"]
            if level <= float(region.min()):
                self.warnings.append(f"dry wading region: call {index} water_level {level} m is at or "
                                     f"below the region's lowest ground {float(region.min()):.3f} m")
            fluid = FluidParams(
                rho=args["rho"], drag_coeff=args["drag_coeff"], added_mass_coeff=args["added_mass_coeff"],
                flow_kind=args["flow_kind"], current_amplitude=args["current_amplitude"],
                tide_amplitude=args["tide_amplitude"], tide_omega=args["tide_omega"],
                tide_phase=args["tide_phase"], water_level=level)
            if args["param_jitter"] > 0:
                fluid = jitter_fluid(fluid, np.random.default_rng(seed), args["param_jitter"])
            self.fluid = fluid
            self.wading[sl] = 1
            self.water[sl] = level
        elif call.tool == "deformable":
            soil = SoilParams(args["bulldozing_coeff"], args["bulldozing_exp"], args["friction_coeff"],
                              args["presliding_scale"])
            if args["param_jitter"] > 0:
                soil = jitter_soil(soil, np.random.default_rng(seed), args["param_jitter"])
            region_id = len(self.soils) + 1
            self.soils[region_id] = soil
            self.deformable[sl] = 1
            self.region[sl] = region_id
        elif call.tool == "compose":
            self._compose(args["blend_width"])
        else:  # pragma: no cover - registry and dispatch out of sync
            raise InvalidArgument(f"no compiler for tool {call.tool!r}")

    def _compose(self, blend_width: int) -> None:
        layout = self.spec.layout
        n = layout.tile_cells
        tiles = [[hm.HeightMap(n, n, layout.cell_size, self.heights[r * n:(r + 1) * n, c * n:(c + 1) * n])
                  for c in range(layout.cols)] for r in range(layout.rows)]
        self.heights = np.array(hm.compose_tiles(tiles, blend_width).data)

    def _enforce_water(self) -> None:
        dry = (self.wading == 1) & (self.water <= self.heights)
        count = int(dry.sum())
        if count:
            self.warnings.append(f"clipped wading flag on {count} cells where ground reaches the water surface")
            self.wading[dry] = 0
        self.water[self.wading == 0] = 0.0


def validate_spec(spec: TerrainSpec) -> list[str]:
    """Semantic warnings; never blocks compilation."""
    return list(_Compiler(spec).run().warnings)


def compile_spec(spec: TerrainSpec) -> GeneratedTerrain:
    """Run the calls in order over a zero-elevation accumulator; later calls win on overlap."""
    return _Compiler(spec).run()
