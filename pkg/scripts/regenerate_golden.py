"""Recompute the pinned sha256 hashes for the golden specs.

Run only when an output change is intended:

    python3 scripts/regenerate_golden.py
"""

import json
from pathlib import Path

from terrainforge.io import attribute_bytes, raw_bytes, sha256_bytes
from terrainforge.physics import params_to_dict
from terrainforge.spec import compile_spec, parse_spec

GOLDEN = Path(__file__).resolve().parents[1] / "tests" / "golden"


def physics_json(terrain) -> str:
    """Fluid and soil parameters as canonical JSON, so seeded jitter is pinned too."""
    doc = {"fluid": params_to_dict(terrain.fluid),
           "soil": {str(k): params_to_dict(v) for k, v in sorted(terrain.soil_regions.items())}}
    return json.dumps(doc, sort_keys=True)


def golden_hashes() -> dict:
    out = {}
    for path in sorted((GOLDEN / "specs").glob("*.json")):
        terrain = compile_spec(parse_spec(path.read_bytes()))
        out[path.stem] = {
            "heightmap_raw": sha256_bytes(raw_bytes(terrain.heightmap)),
            "attributes_raw": sha256_bytes(attribute_bytes(terrain.attributes)),
            "physics": sha256_bytes(physics_json(terrain).encode()),
        }
    return out


if __name__ == "__main__":
    target = GOLDEN / "hashes.json"
    target.write_text(json.dumps(golden_hashes(), indent=2, sort_keys=True) + "\n")
    print(f"wrote {target}")
