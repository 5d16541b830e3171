"""File formats for height maps and attribute grids.

Height maps:
  * ``<stem>.raw``  little-endian float32, row-major, ``height`` rows of ``width``
  * ``<stem>.png``  16-bit grayscale, ``min -> 0`` and ``max -> 65535``
  * ``<stem>.csv``  one grid row per line (debug only)
  * ``<stem>.json`` sidecar ``{width, height, cell_size, min, max, seed, ...}``

Attributes (``attributes.raw`` + ``attributes.json``): one packed 7-byte
record per cell, ``flags:u8`` (bit 0 wading, bit 1 deformable),
``water_level:f32le``, ``soil_region:u16le``.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import InvalidArgument
from .heightmap import HeightMap
from .physics import FluidParams, SoilParams, params_from_dict, params_to_dict
from .spec import AttributeGrid, GeneratedTerrain, TerrainSpec, parse_spec

FORMATS = ("raw", "png", "csv")
CSV_MAX_CELLS = 250_000

ATTRIBUTE_DTYPE = np.dtype([("flags", "u1"), ("water_level", "<f4"), ("soil_region", "<u2")])
FLAG_WADING = 1
FLAG_DEFORMABLE = 2


class CorruptFileError(OSError):
    pass


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def raw_bytes(heightmap: HeightMap) -> bytes:
    return heightmap.data.astype("<f4").tobytes()


def to_uint16(data: np.ndarray, lo: float, hi: float, invert: bool = False) -> np.ndarray:
    if hi > lo:
        scaled = np.rint((data - lo) / (hi - lo) * 65535.0)
    else:
        scaled = np.zeros(data.shape)
    out = np.clip(scaled, 0, 65535).astype(np.uint16)
    return 65535 - out if invert else out


def write_png16(path: Path, pixels: np.ndarray) -> None:
    # row 0 is y = 0; flip so north (max y) is at the top of the image
    Image.fromarray(np.ascontiguousarray(pixels[::-1], dtype=np.uint16)).save(path, format="PNG")


def read_png16(path: Path) -> np.ndarray:
    with Image.open(path) as img:
        return np.array(img, dtype=np.uint16)[::-1]


def sidecar(heightmap: HeightMap, formats) -> dict:
    return {
        "width": heightmap.width,
        "height": heightmap.height,
        "cell_size": heightmap.cell_size,
        "min": float(heightmap.data.min()),
        "max": float(heightmap.data.max()),
        "seed": heightmap.seed,
        "dtype": "float32le",
        "layout": "row-major, row 0 at y=0",
        "formats": sorted(formats),
    }


def write_heightmap(heightmap: HeightMap, out_dir, stem: str = "heightmap",
                    formats=("raw", "png")) -> dict[str, Path]:
    formats = set(formats)
    unknown = formats - set(FORMATS)
    if unknown or not formats:
        raise InvalidArgument(f"formats must be a non-empty subset of {FORMATS}, got {sorted(formats)}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    meta = sidecar(heightmap, formats)
    written = {}
    if "raw" in formats:
        written["raw"] = out_dir / f"{stem}.raw"
        written["raw"].write_bytes(raw_bytes(heightmap))
    if "png" in formats:
        written["png"] = out_dir / f"{stem}.png"
        write_png16(written["png"], to_uint16(heightmap.data, meta["min"], meta["max"]))
    if "csv" in formats:
        if heightmap.data.size > CSV_MAX_CELLS:
            raise InvalidArgument(f"csv export is for small grids (<= {CSV_MAX_CELLS} cells)")
        written["csv"] = out_dir / f"{stem}.csv"
        np.savetxt(written["csv"], heightmap.data, delimiter=",", fmt="%.9g")
    written["sidecar"] = out_dir / f"{stem}.json"
    _write_json(written["sidecar"], meta)
    return written


def read_sidecar(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def read_heightmap(raw_path) -> HeightMap:
    """Load ``<stem>.raw`` using the ``<stem>.json`` sidecar next to it."""
    raw_path = Path(raw_path)
    meta = read_sidecar(raw_path.with_suffix(".json"))
    buf = raw_path.read_bytes()
    expected = meta["width"] * meta["height"] * 4
    if len(buf) != expected:
        raise CorruptFileError(f"{raw_path}: {len(buf)} bytes, sidecar implies {expected}")
    data = np.frombuffer(buf, dtype="<f4").astype(np.float64)
    return HeightMap(meta["width"], meta["height"], meta["cell_size"], data, meta.get("seed", 0))


def attribute_bytes(attrs: AttributeGrid) -> bytes:
    rec = np.zeros(attrs.shape, dtype=ATTRIBUTE_DTYPE)
    rec["flags"] = attrs.wading * FLAG_WADING | attrs.deformable * FLAG_DEFORMABLE
    rec["water_level"] = attrs.water_level
    rec["soil_region"] = attrs.soil_region
    return rec.tobytes()


def write_attributes(terrain: GeneratedTerrain, out_dir, stem: str = "attributes") -> dict[str, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    attrs = terrain.attributes
    raw = out_dir / f"{stem}.raw"
    raw.write_bytes(attribute_bytes(attrs))
    meta = {
        "width": attrs.width,
        "height": attrs.height,
        "cell_size": terrain.heightmap.cell_size,
        "record": [["flags", "u8", "bit0 wading, bit1 deformable"],
                   ["water_level", "float32le", "meters"],
                   ["soil_region", "uint16le", "0 = none"]],
        "record_size": ATTRIBUTE_DTYPE.itemsize,
        "fluid": params_to_dict(terrain.fluid),
        "soil_regions": {str(k): params_to_dict(v) for k, v in sorted(terrain.soil_regions.items())},
    }
    side = out_dir / f"{stem}.json"
    _write_json(side, meta)
    return {"raw": raw, "sidecar": side}


def read_attributes(raw_path) -> tuple[AttributeGrid, FluidParams, dict[int, SoilParams]]:
    raw_path = Path(raw_path)
    meta = read_sidecar(raw_path.with_suffix(".json"))
    buf = raw_path.read_bytes()
    expected = meta["width"] * meta["height"] * ATTRIBUTE_DTYPE.itemsize
    if len(buf) != expected:
        raise CorruptFileError(f"{raw_path}: {len(buf)} bytes, sidecar implies {expected}")
    rec = np.frombuffer(buf, dtype=ATTRIBUTE_DTYPE).reshape(meta["height"], meta["width"])
    grid = AttributeGrid(meta["width"], meta["height"],
                         (rec["flags"] & FLAG_WADING) != 0,
                         (rec["flags"] & FLAG_DEFORMABLE) != 0,
                         rec["water_level"].astype(np.float64),
                         rec["soil_region"])
    fluid = params_from_dict(FluidParams, meta["fluid"], "fluid")
    soils = {int(k): params_from_dict(SoilParams, v, "soil") for k, v in meta["soil_regions"].items()}
    return grid, fluid, soils


def write_terrain(terrain: GeneratedTerrain, out_dir, formats=("raw", "png")) -> dict[str, Path]:
    """Export the heightmap in ``formats``; the attribute layer goes along with ``raw``."""
    hm_files = write_heightmap(terrain.heightmap, out_dir, "heightmap", formats)
    written = {f"heightmap_{k}": v for k, v in hm_files.items()}
    if "raw" in formats:
        written.update({f"attributes_{k}": v for k, v in write_attributes(terrain, out_dir).items()})
    return written


def load_terrain(terrain_dir) -> GeneratedTerrain:
    """Rebuild a terrain from ``heightmap.raw`` and ``attributes.raw`` in ``terrain_dir``."""
    terrain_dir = Path(terrain_dir)
    heightmap = read_heightmap(terrain_dir / "heightmap.raw")
    attrs, fluid, soils = read_attributes(terrain_dir / "attributes.raw")
    if attrs.shape != heightmap.shape:
        raise CorruptFileError("attribute grid and heightmap dimensions differ")
    provenance = TerrainSpec()
    spec_path = terrain_dir / "spec.json"
    if spec_path.exists():
        provenance = parse_spec(spec_path.read_bytes())
    return GeneratedTerrain(heightmap, attrs, fluid, soils, provenance)


def render_preview(heightmap: HeightMap, out_png) -> dict:
    """Inverted 16-bit grayscale preview (dark = high) with a sidecar stamping min/max."""
    out_png = Path(out_png)
    out_png.parent.mkdir(parents=True, exist_ok=True)
    lo, hi = float(heightmap.data.min()), float(heightmap.data.max())
    write_png16(out_png, to_uint16(heightmap.data, lo, hi, invert=True))
    meta = {"width": heightmap.width, "height": heightmap.height, "cell_size": heightmap.cell_size,
            "min": lo, "max": hi, "polarity": "dark=high"}
    _write_json(out_png.with_suffix(".json"), meta)
    return meta
