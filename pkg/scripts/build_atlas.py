"""Write a seeded batch of random specs, then compile them with the atlas command.

    python3 scripts/build_atlas.py --count 20 --out runs/atlas
"""

import argparse
import json
from pathlib import Path

import numpy as np

from terrainforge.cli import main as cli_main
from terrainforge.tools import TOOLS


def random_call(rng, rows, cols):
    tool = str(rng.choice(["slope", "stairs", "rough", "pillars", "rocks", "wading", "deformable"]))
    target = {"row": int(rng.integers(rows)), "col": int(rng.integers(cols))}
    args = {
        "slope": lambda: {"grade": round(float(rng.uniform(-0.3, 0.3)), 3),
                          "heading_deg": round(float(rng.uniform(0, 360)), 1)},
        "stairs": lambda: {"step_height": round(float(rng.uniform(0.05, 0.2)), 3), "step_depth": 0.3,
                           "count": int(rng.integers(2, 8))},
        "rough": lambda: {"amplitude": round(float(rng.uniform(0.01, 0.1)), 3)},
        "pillars": lambda: {"density": round(float(rng.uniform(0.1, 0.5)), 2)},
        "rocks": lambda: {"density": round(float(rng.uniform(0.2, 1.5)), 2)},
        "wading": lambda: {"water_level": round(float(rng.uniform(0.1, 0.4)), 2),
                           "flow_kind": str(rng.choice(["still", "current", "tide"]))},
        "deformable": lambda: {"friction_coeff": round(float(rng.uniform(0.3, 0.9)), 2)},
    }[tool]()
    assert tool in TOOLS
    return {"tool": tool, "target": target, "args": args}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--count", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="runs/atlas")
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    spec_dir = Path(args.out) / "specs"
    spec_dir.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        rows, cols = int(rng.integers(1, 3)), int(rng.integers(1, 4))
        calls = [{"tool": "flat", "target": "all", "args": {"elevation": 0.0}}]
        calls += [random_call(rng, rows, cols) for _ in range(int(rng.integers(1, 5)))]
        if rows * cols > 1:
            calls.append({"tool": "compose", "target": "all", "args": {"blend_width": 4}})
        doc = {"version": "1", "layout": {"rows": rows, "cols": cols, "tile_cells": 40, "cell_size": 0.1},
               "global_seed": int(rng.integers(2 ** 32)), "calls": calls}
        (spec_dir / f"terrain_{i:03d}.json").write_text(json.dumps(doc, indent=2) + "\n")
    raise SystemExit(cli_main(["atlas", str(spec_dir), "--out", str(Path(args.out) / "terrains")]))


if __name__ == "__main__":
    main()
