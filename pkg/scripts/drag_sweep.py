"""Sweep leg speed and water depth through the drag, Reynolds and effective-mass kernels.

Prints a table and the fitted exponent of drag against speed, and writes the
grid to CSV for external plotting.

    python3 scripts/drag_sweep.py --out runs/drag_sweep.csv
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from terrainforge import physics as ph


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="runs/drag_sweep.csv")
    parser.add_argument("--radius", type=float, default=0.05)
    parser.add_argument("--body-mass", type=float, default=30.0)
    parser.add_argument("--drag-coeff", type=float, default=0.9)
    args = parser.parse_args()

    fluid = ph.FluidParams(drag_coeff=args.drag_coeff)
    speeds = np.linspace(0.05, 2.0, 40)
    depths = (0.1, 0.2, 0.3, 0.45, 0.6)
    rows = []
    for h in depths:
        area = ph.projected_area(args.radius, h)
        v_sub = ph.submerged_volume(args.radius, h)
        m_eff = ph.effective_mass(1.0, args.body_mass, fluid, v_sub, v_sub)
        for v in speeds:
            re = ph.reynolds(fluid.rho, v, 2 * args.radius, fluid.dyn_viscosity)
            rows.append({"depth": h, "speed": float(v), "drag": ph.drag_force(1.0, fluid, area, v),
                         "reynolds": re, "turbulent": int(ph.is_turbulent(re)), "effective_mass": m_eff})

    print(f"{'depth':>6s} {'m_eff':>8s} {'drag@1m/s':>10s} {'exponent':>9s} {'min Re':>10s}")
    for h in depths:
        sel = [r for r in rows if r["depth"] == h]
        v = np.array([r["speed"] for r in sel])
        f = np.array([r["drag"] for r in sel])
        exponent = np.polyfit(np.log(v), np.log(f), 1)[0]
        min_re = min(r["reynolds"] for r in sel)
        drag_1 = ph.drag_force(1.0, fluid, ph.projected_area(args.radius, h), 1.0)
        print(f"{h:6.2f} {sel[0]['effective_mass']:8.3f} {drag_1:10.3f} {exponent:9.4f} "
              f"{min_re:10.0f}{'' if all(r['turbulent'] for r in sel) else ' (laminar at low speed)'}")

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {len(rows)} rows to {out}")


if __name__ == "__main__":
    main()
