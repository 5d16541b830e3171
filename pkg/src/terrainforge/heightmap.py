"""Height maps and the atomic geometric terrain generators.

Grid convention: ``data[row, col]`` with row ~ y and col ~ x. Cell ``(r, c)``
has its center at ``((c + 0.5) * cell_size, (r + 0.5) * cell_size)`` meters,
so the map covers ``[0, width*cell_size] x [0, height*cell_size]``.
Elevation 0.0 is nominal ground.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidArgument

DEFAULT_CELL_SIZE = 0.1

# Pillars are the tall family, rocks the low one; the split keeps the two ranges disjoint.
OBSTACLE_HEIGHT_SPLIT = 0.5
DEFAULT_OBSTACLE_RANGES = {
    "pillar": {"radius_range": (0.1, 0.3), "height_range": (1.0, 2.0)},
    "rock": {"radius_range": (0.1, 0.4), "height_range": (0.05, 0.3)},
}

MAX_OBSTACLE_ATTEMPTS_PER_TARGET = 50


@dataclass(frozen=True, eq=False)
class HeightMap:
    width: int
    height: int
    cell_size: float
    data: np.ndarray
    seed: int = 0

    def __post_init__(self):
        if self.width < 2 or self.height < 2:
            raise InvalidArgument(f"height map needs at least 2x2 cells, got {self.width}x{self.height}")
        if not self.cell_size > 0:
            raise InvalidArgument(f"cell_size must be positive, got {self.cell_size}")
        arr = np.array(self.data, dtype=np.float64)
        if arr.size != self.width * self.height:
            raise InvalidArgument(f"data has {arr.size} values, expected {self.width * self.height}")
        arr = arr.reshape(self.height, self.width)
        if not np.all(np.isfinite(arr)):
            raise InvalidArgument("height map contains non-finite elevations")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "seed", int(self.seed) & 0xFFFFFFFFFFFFFFFF)

    @property
    def shape(self) -> tuple[int, int]:
        return self.height, self.width

    @property
    def extent(self) -> tuple[float, float]:
        """Map size in meters as ``(x_extent, y_extent)``."""
        return self.width * self.cell_size, self.height * self.cell_size

    def replace(self, data: np.ndarray, seed: int | None = None) -> "HeightMap":
        return HeightMap(self.width, self.height, self.cell_size, data,
                         self.seed if seed is None else seed)

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Meshgrids ``(x, y)`` of cell-center coordinates, shaped like ``data``."""
        xs = (np.arange(self.width) + 0.5) * self.cell_size
        ys = (np.arange(self.height) + 0.5) * self.cell_size
        return np.meshgrid(xs, ys)

    def __eq__(self, other):
        if not isinstance(other, HeightMap):
            return NotImplemented
        return (self.width == other.width and self.height == other.height
                and self.cell_size == other.cell_size and self.seed == other.seed
                and self.data.tobytes() == other.data.tobytes())

    __hash__ = None


@dataclass(frozen=True)
class Obstacle:
    x: float
    y: float
    radius: float
    height: float


@dataclass(frozen=True)
class ObstacleField:
    kind: str
    placements: tuple[Obstacle, ...] = field(default_factory=tuple)


def new_flat(width: int, height: int, cell_size: float = DEFAULT_CELL_SIZE,
             elevation: float = 0.0) -> HeightMap:
    if width < 2 or height < 2:
        raise InvalidArgument(f"width and height must be >= 2, got {width}x{height}")
    if not cell_size > 0:
        raise InvalidArgument(f"cell_size must be positive, got {cell_size}")
    return HeightMap(width, height, cell_size, np.full((height, width), float(elevation)))


def _unit(direction: Sequence[float]) -> tuple[float, float]:
    dx, dy = float(direction[0]), float(direction[1])
    norm = math.hypot(dx, dy)
    if norm == 0.0 or not math.isfinite(norm):
        raise InvalidArgument(f"direction must be a non-zero finite vector, got {direction!r}")
    return dx / norm, dy / norm


def gen_slope(base: HeightMap, grade: float, direction: Sequence[float] = (1.0, 0.0)) -> HeightMap:
    """Add a linear ramp rising at ``grade`` (rise over run) along ``direction``.

    The ramp is zero at the map center so opposite directions cancel exactly.
    """
    if not math.isfinite(grade):
        raise InvalidArgument(f"grade must be finite, got {grade}")
    ux, uy = _unit(direction)
    x, y = base.cell_centers()
    cx, cy = base.extent[0] / 2.0, base.extent[1] / 2.0
    ramp = grade * ((x - cx) * ux + (y - cy) * uy)
    return base.replace(base.data + ramp)


def stair_levels(n_cells: int, cell_size: float, step_depth: float, count: int) -> np.ndarray:
    """Step index (0..count) of each cell along the heading.

    Cell ``i`` starts at ``i * cell_size``; the first ``step_depth`` meters are
    the bottom landing and the top plateau runs to the end of the map.
    """
    starts = np.arange(n_cells) * cell_size
    # small slack absorbs i*cell_size landing a hair below an exact step edge
    k = np.floor(starts / step_depth + 1e-9).astype(np.int64)
    return np.minimum(k, count)


def gen_stairs(base: HeightMap, step_height: float, step_depth: float, count: int,
               direction: str = "ascending", heading: str = "x") -> HeightMap:
    if count < 1:
        raise InvalidArgument(f"stairs need count >= 1, got {count}")
    if not step_height > 0:
        raise InvalidArgument(f"step_height must be positive, got {step_height}")
    if step_depth < base.cell_size:
        raise InvalidArgument(
            f"step_depth {step_depth} is smaller than cell_size {base.cell_size}; steps unrepresentable")
    if direction not in ("ascending", "descending"):
        raise InvalidArgument(f"direction must be 'ascending' or 'descending', got {direction!r}")
    if heading not in ("x", "y"):
        raise InvalidArgument(f"heading must be 'x' or 'y', got {heading!r}")

    n = base.width if heading == "x" else base.height
    levels = stair_levels(n, base.cell_size, step_depth, count)
    if levels[-1] < count:
        raise InvalidArgument(
            f"map is {n * base.cell_size:.3f} m along {heading}; {count} steps of depth "
            f"{step_depth} m need at least {count * step_depth + base.cell_size:.3f} m")
    sign = 1.0 if direction == "ascending" else -1.0
    profile = sign * step_height * levels.astype(np.float64)
    offset = profile[np.newaxis, :] if heading == "x" else profile[:, np.newaxis]
    return base.replace(base.data + offset)


def _smoothstep(t: np.ndarray) -> np.ndarray:
    return t * t * (3.0 - 2.0 * t)


def value_noise(x: np.ndarray, y: np.ndarray, frequency: float, rng: np.random.Generator) -> np.ndarray:
    """Smoothly interpolated lattice noise in [-1, 1] sampled at ``(x, y)`` meters."""
    u = x * frequency
    v = y * frequency
    nx = int(np.floor(u.max())) + 2
    ny = int(np.floor(v.max())) + 2
    lattice = rng.uniform(-1.0, 1.0, size=(ny, nx))
    i0 = np.floor(u).astype(np.int64)
    j0 = np.floor(v).astype(np.int64)
    tx = _smoothstep(u - i0)
    ty = _smoothstep(v - j0)
    a = lattice[j0, i0]
    b = lattice[j0, i0 + 1]
    c = lattice[j0 + 1, i0]
    d = lattice[j0 + 1, i0 + 1]
    top = a + (b - a) * tx
    bottom = c + (d - c) * tx
    return top + (bottom - top) * ty


def gen_rough(base: HeightMap, amplitude: float, octaves: int = 4, lacunarity: float = 2.0,
              persistence: float = 0.5, seed: int = 0, scale: float = 1.0) -> HeightMap:
    """Add fractal value noise bounded by ``amplitude``.

    ``scale`` is the lattice spacing of the first octave in meters.
    """
    if amplitude < 0:
        raise InvalidArgument(f"amplitude must be >= 0, got {amplitude}")
    if octaves < 1:
        raise InvalidArgument(f"octaves must be >= 1, got {octaves}")
    if not lacunarity > 0 or not persistence > 0 or not scale > 0:
        raise InvalidArgument("lacunarity, persistence and scale must be positive")
    if amplitude == 0:
        return base.replace(base.data, seed=seed)

    rng = np.random.default_rng(seed)
    x, y = base.cell_centers()
    total = np.zeros(base.shape)
    weight_sum = 0.0
    for octave in range(octaves):
        weight = persistence ** octave
        frequency = lacunarity ** octave / scale
        total += weight * value_noise(x, y, frequency, rng)
        weight_sum += weight
    noise = np.clip(total / weight_sum, -1.0, 1.0) * amplitude
    return base.replace(base.data + noise, seed=seed)


def _check_range(name: str, rng_: Sequence[float]) -> tuple[float, float]:
    lo, hi = float(rng_[0]), float(rng_[1])
    if not (0 < lo <= hi) or not math.isfinite(hi):
        raise InvalidArgument(f"{name} must satisfy 0 < low <= high, got {rng_!r}")
    return lo, hi


def place_obstacles(base: HeightMap, kind: str, density: float,
                    radius_range: Sequence[float] | None = None,
                    height_range: Sequence[float] | None = None,
                    seed: int = 0) -> tuple[HeightMap, ObstacleField]:
    """Scatter non-overlapping cylindrical obstacles by seeded rejection sampling.

    The target count is ``round(density * area)``. Candidates overlapping an
    accepted obstacle are rejected; after ``50 * target`` attempts the field is
    returned as is, so very dense requests can come back short.
    Every cell whose center lies inside a footprint is raised by that
    obstacle's height.
    """
    if kind not in DEFAULT_OBSTACLE_RANGES:
        raise InvalidArgument(f"kind must be 'pillar' or 'rock', got {kind!r}")
    if density < 0 or not math.isfinite(density):
        raise InvalidArgument(f"density must be >= 0, got {density}")
    defaults = DEFAULT_OBSTACLE_RANGES[kind]
    r_lo, r_hi = _check_range("radius_range", radius_range or defaults["radius_range"])
    h_lo, h_hi = _check_range("height_range", height_range or defaults["height_range"])
    if r_lo < base.cell_size:
        raise InvalidArgument(f"radius lower bound {r_lo} is below cell_size {base.cell_size}")
    if kind == "pillar" and h_lo < OBSTACLE_HEIGHT_SPLIT:
        raise InvalidArgument(f"pillar heights must be >= {OBSTACLE_HEIGHT_SPLIT} m, got {h_lo}")
    if kind == "rock" and h_hi > OBSTACLE_HEIGHT_SPLIT:
        raise InvalidArgument(f"rock heights must be <= {OBSTACLE_HEIGHT_SPLIT} m, got {h_hi}")

    x_ext, y_ext = base.extent
    if 2 * r_lo > min(x_ext, y_ext):
        raise InvalidArgument("smallest obstacle footprint does not fit inside the map")
    target = int(round(density * x_ext * y_ext))
    if target == 0:
        return base.replace(base.data, seed=seed), ObstacleField(kind)

    rng = np.random.default_rng(seed)
    accepted: list[Obstacle] = []
    for _ in range(MAX_OBSTACLE_ATTEMPTS_PER_TARGET * target):
        if len(accepted) == target:
            break
        r = float(rng.uniform(r_lo, min(r_hi, x_ext / 2, y_ext / 2)))
        cx = float(rng.uniform(r, x_ext - r))
        cy = float(rng.uniform(r, y_ext - r))
        h = float(rng.uniform(h_lo, h_hi))
        if all(math.hypot(cx - o.x, cy - o.y) >= r + o.radius for o in accepted):
            accepted.append(Obstacle(cx, cy, r, h))

    out = np.array(base.data)
    x, y = base.cell_centers()
    for o in accepted:
        mask = (x - o.x) ** 2 + (y - o.y) ** 2 <= o.radius ** 2
        out[mask] += o.height
    return base.replace(out, seed=seed), ObstacleField(kind, tuple(accepted))


def _blend_seams(arr: np.ndarray, seams: Sequence[int], blend_width: int) -> np.ndarray:
    """Cross-fade across column seams of ``arr`` (seam = index of first right column)."""
    out = np.array(arr)
    if blend_width == 0:
        return out
    weights = (np.arange(blend_width) + 1.0) / (blend_width + 1.0)
    for seam in seams:
        start = seam - blend_width // 2
        cols = np.arange(start, start + blend_width)
        left = arr[:, np.minimum(cols, seam - 1)]
        right = arr[:, np.maximum(cols, seam)]
        out[:, cols] = left * (1.0 - weights) + right * weights
    return out


def compose_tiles(tiles: Sequence[Sequence[HeightMap]], blend_width: int = 0) -> HeightMap:
    """Concatenate a rectangular grid of tiles, optionally cross-fading the seams.

    ``tiles[i][j]`` is the tile at row ``i`` (y) and column ``j`` (x). Every
    seam is blended linearly over ``blend_width`` cells centered on it, using
    the edge values of each neighbour extended across the band.
    """
    if not tiles or not tiles[0]:
        raise InvalidArgument("tile grid is empty")
    n_cols = len(tiles[0])
    if any(len(row) != n_cols for row in tiles):
        raise InvalidArgument("tile grid is not rectangular")
    cell_size = tiles[0][0].cell_size
    if any(t.cell_size != cell_size for row in tiles for t in row):
        raise InvalidArgument("tiles have mismatched cell_size")
    if blend_width < 0:
        raise InvalidArgument(f"blend_width must be >= 0, got {blend_width}")
    row_heights = [row[0].height for row in tiles]
    col_widths = [t.width for t in tiles[0]]
    for i, row in enumerate(tiles):
        for j, t in enumerate(row):
            if t.height != row_heights[i] or t.width != col_widths[j]:
                raise InvalidArgument(f"tile ({i}, {j}) does not line up with its row/column")
    if blend_width > min(row_heights + col_widths):
        raise InvalidArgument("blend_width exceeds the smallest tile dimension")

    arr = np.block([[t.data for t in row] for row in tiles])
    col_seams = np.cumsum(col_widths)[:-1]
    row_seams = np.cumsum(row_heights)[:-1]
    arr = _blend_seams(arr, col_seams, blend_width)
    arr = _blend_seams(arr.T, row_seams, blend_width).T
    first = tiles[0][0]
    return HeightMap(arr.shape[1], arr.shape[0], cell_size, arr, first.seed)
