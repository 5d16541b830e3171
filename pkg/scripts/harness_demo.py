"""Run every trajectory preset over a compiled spec and write one CSV per preset.

    python3 scripts/harness_demo.py tests/fixtures/specs/beach.json --out runs/beach
"""

import argparse
from pathlib import Path

import numpy as np

from terrainforge.harness import PRESETS, SimConfig, make_trajectory, run
from terrainforge.physics import NoiseSpec
from terrainforge.spec import compile_spec, parse_spec


def summarize(name, report):
    drag = report.column("left_drag") + report.column("right_drag")
    soil = (report.column("left_bulldozing") + report.column("right_bulldozing")
            + report.column("left_friction") + report.column("right_friction"))
    print(f"{name:14s} rows={len(report):5d}  peak drag={drag.max():8.3f} N  "
          f"peak soil={soil.max():8.3f} N  mean m_eff={np.mean(report.column('effective_mass')):7.3f} kg  "
          f"eps={report.rows[0].epsilon:.4f}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("spec")
    parser.add_argument("--out", default="runs/demo")
    parser.add_argument("--duration", type=float, default=5.0)
    parser.add_argument("--dt", type=float, default=0.01)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--noise-std", type=float, default=0.1)
    parser.add_argument("--speed", type=float, default=1.0)
    args = parser.parse_args()

    terrain = compile_spec(parse_spec(Path(args.spec).read_bytes()))
    for w in terrain.warnings:
        print("warning:", w)
    cfg = SimConfig(dt=args.dt, duration=args.duration, seed=args.seed, noise=NoiseSpec(std_dev=args.noise_std))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    x_ext, y_ext = terrain.heightmap.extent
    for preset in PRESETS:
        # straight-walk crosses the map from its left edge; the others stay over the last tile,
        # where the beach example keeps its water
        kwargs = {} if preset == "straight-walk" else {"start": (x_ext - 2.0, y_ext / 2)}
        report = run(terrain, cfg, make_trajectory(preset, terrain, cfg, speed=args.speed, **kwargs))
        (out / f"{preset}.csv").write_text(report.to_csv())
        summarize(preset, report)
    print(f"CSVs written to {out}")


if __name__ == "__main__":
    main()
