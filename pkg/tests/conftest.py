import json
from pathlib import Path

import pytest

from terrainforge.spec import compile_spec, spec_from_dict

FIXTURES = Path(__file__).parent / "fixtures"


def layout(rows=1, cols=1, tile_cells=32, cell_size=0.1):
    return {"rows": rows, "cols": cols, "tile_cells": tile_cells, "cell_size": cell_size}


def spec_doc(calls, seed=0, **lay):
    return {"version": "1", "layout": layout(**lay), "global_seed": seed, "calls": calls}


def call(tool, target="all", **args):
    return {"tool": tool, "target": target, "args": args}


def load_fixture(name):
    return json.loads((FIXTURES / "specs" / name).read_text())


@pytest.fixture
def beach_doc():
    return load_fixture("beach.json")


@pytest.fixture
def all_tools_doc():
    return load_fixture("all_tools.json")


def water_terrain(water_level=0.2, tiles=7, tile_cells=20, flow_kind="still", **wading_args):
    """Flat ground at 0 flooded to ``water_level``; a 1 x ``tiles`` strip (14 m x 2 m by default)."""
    doc = spec_doc([call("flat", elevation=0.0),
                    call("wading", water_level=water_level, flow_kind=flow_kind, **wading_args)],
                   cols=tiles, tile_cells=tile_cells)
    return compile_spec(spec_from_dict(doc))


def dry_terrain(tiles=7, tile_cells=20):
    return compile_spec(spec_from_dict(spec_doc([call("flat", elevation=0.0)], cols=tiles, tile_cells=tile_cells)))


def sand_terrain(tiles=7, tile_cells=20, **soil):
    doc = spec_doc([call("flat", elevation=0.0), call("deformable", **soil)], cols=tiles, tile_cells=tile_cells)
    return compile_spec(spec_from_dict(doc))


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion, when that module ran."""
    import sys

    module = sys.modules.get(f"{__package__}.test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(module.TITLES):
        entry = results.get(n)
        if entry is None:
            status = "NOT RUN"
        else:
            status = "PASS" if entry["passed"] else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {status}  {module.TITLES[n]}")
