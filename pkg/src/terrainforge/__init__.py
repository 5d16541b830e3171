"""Procedural terrains with wading and deformable-soil force models for legged-robot simulation."""

from .heightmap import (HeightMap, Obstacle, ObstacleField, compose_tiles, gen_rough, gen_slope, gen_stairs,
                        new_flat, place_obstacles)
from .physics import FluidParams, LegState, NoiseSpec, SoilParams
from .spec import (AttributeGrid, GeneratedTerrain, Layout, TerrainSpec, ToolCall, compile_spec, parse_spec,
                   serialize_spec, spec_roundtrip, validate_spec)
from .tools import TOOLS, export_function_schemas

__version__ = "0.1.0"

__all__ = [
    "HeightMap", "Obstacle", "ObstacleField", "compose_tiles", "gen_rough", "gen_slope", "gen_stairs",
    "new_flat", "place_obstacles",
    "FluidParams", "LegState", "NoiseSpec", "SoilParams",
    "AttributeGrid", "GeneratedTerrain", "Layout", "TerrainSpec", "ToolCall", "compile_spec", "parse_spec",
    "serialize_spec", "spec_roundtrip", "validate_spec",
    "TOOLS", "export_function_schemas",
]
