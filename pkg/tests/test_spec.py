import copy
import json

import jsonschema
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from terrainforge.errors import RangeError, SchemaError, SpecParseError, UnknownToolError
from terrainforge.spec import (child_seed, compile_spec, parse_spec, serialize_spec, spec_from_dict,
                               spec_roundtrip, validate_spec)
from terrainforge.tools import TOOLS, export_function_schemas

from .conftest import call, spec_doc


def parse(doc):
    return parse_spec(json.dumps(doc))


# --- schemas ---------------------------------------------------------------------------

def test_schema_cardinality_and_shape():
    schemas = export_function_schemas()
    assert len(schemas) == 9
    assert {s["function"]["name"] for s in schemas} == set(TOOLS)
    for s in schemas:
        assert s["type"] == "function"
        assert s["function"]["description"]
        assert s["function"]["parameters"]["type"] == "object"


def test_stairs_schema_required():
    stairs = next(s for s in export_function_schemas() if s["function"]["name"] == "stairs")
    required = stairs["function"]["parameters"]["required"]
    assert {"step_height", "step_depth", "count"} <= set(required)


def test_schemas_pass_metaschema():
    for s in export_function_schemas():
        jsonschema.Draft202012Validator.check_schema(s["function"]["parameters"])


def test_every_tool_constructible_from_schema_examples():
    for s in export_function_schemas():
        fn = s["function"]
        args = {k: v["examples"][0] for k, v in fn["parameters"]["properties"].items()}
        jsonschema.validate(args, fn["parameters"])
        target = args.pop("target")
        doc = spec_doc([{"tool": fn["name"], "target": target, "args": args}], tile_cells=40)
        terrain = compile_spec(parse(doc))
        assert terrain.heightmap.shape == (40, 40)


# --- parsing ---------------------------------------------------------------------------

def test_minimal_spec():
    spec = parse(spec_doc([call("flat", elevation=0.0)]))
    assert len(spec.calls) == 1 and spec.calls[0].tool == "flat"


def test_unknown_tool():
    with pytest.raises(UnknownToolError) as info:
        parse(spec_doc([call("lava", depth=1.0)]))
    assert info.value.tool == "lava" and info.value.index == 0


def test_missing_arg_reports_path():
    with pytest.raises(SchemaError) as info:
        parse(spec_doc([call("stairs", step_depth=0.3, count=3)]))
    assert info.value.path == "calls[0].args.step_height"
    assert not isinstance(info.value, RangeError)


def test_extra_arg_reports_path():
    with pytest.raises(SchemaError) as info:
        parse(spec_doc([call("flat", elevation=0.0), call("flat", elevation=0.0, colour="red")]))
    assert info.value.path == "calls[1].args.colour" and info.value.index == 1


def test_out_of_range_is_range_error():
    with pytest.raises(RangeError) as info:
        parse(spec_doc([call("wading", water_level=0.2, drag_coeff=1.5)]))
    assert info.value.path == "calls[0].args.drag_coeff"


def test_wrong_type_is_schema_error():
    with pytest.raises(SchemaError) as info:
        parse(spec_doc([call("stairs", step_height="high", step_depth=0.3, count=3)]))
    assert info.value.path == "calls[0].args.step_height"


def test_malformed_json_offset():
    text = '{"version": "1", "layout": {'
    with pytest.raises(SpecParseError) as info:
        parse_spec(text)
    assert info.value.offset == len(text)
    assert f"byte {len(text)}" in str(info.value)


def test_offset_is_in_bytes():
    text = '{"version": "1", "note": "éé", oops}'
    with pytest.raises(SpecParseError) as info:
        parse_spec(text)
    assert info.value.offset == text.encode().index(b"oops")


def test_target_outside_layout():
    with pytest.raises(RangeError) as info:
        parse(spec_doc([call("flat", {"row": 0, "col": 3}, elevation=0.0)], cols=2))
    assert info.value.path == "calls[0].target"


def test_layout_dependent_checks():
    with pytest.raises(RangeError):  # 0.05 m treads on a 0.1 m grid
        parse(spec_doc([call("stairs", step_height=0.1, step_depth=0.05, count=2)]))
    with pytest.raises(RangeError):  # 3.2 m tile cannot hold 20 x 0.3 m
        parse(spec_doc([call("stairs", step_height=0.1, step_depth=0.3, count=20)]))
    with pytest.raises(RangeError):
        parse(spec_doc([call("compose", {"row": 0, "col": 0}, blend_width=2)]))
    with pytest.raises(RangeError):
        parse(spec_doc([call("rocks", density=1.0, radius_min=0.3, radius_max=0.2)]))


def test_version_and_seed_checked():
    doc = spec_doc([])
    doc["version"] = "2"
    with pytest.raises(SchemaError):
        parse(doc)
    doc = spec_doc([], seed=-1)
    with pytest.raises(SchemaError):
        parse(doc)


# --- roundtrip -------------------------------------------------------------------------

def test_roundtrip_all_tools(all_tools_doc):
    spec = parse(all_tools_doc)
    assert {c.tool for c in spec.calls} == set(TOOLS)
    again = spec_roundtrip(spec)
    assert again == spec
    assert [c.tool for c in again.calls] == [c.tool for c in spec.calls]


def test_roundtrip_beach(beach_doc):
    spec = parse(beach_doc)
    assert spec_roundtrip(spec) == spec
    assert serialize_spec(spec_roundtrip(spec)) == serialize_spec(spec)


tool_call = st.sampled_from([
    call("flat", elevation=0.1),
    call("slope", {"row": 0, "col": 1}, grade=-0.2),
    call("rough", amplitude=0.02, octaves=2),
    call("rocks", {"row": 0, "col": 0}, density=0.2),
    call("wading", water_level=0.3),
    call("deformable", friction_coeff=0.4),
    call("compose", blend_width=3),
])


@settings(max_examples=60, deadline=None)
@given(calls=st.lists(tool_call, max_size=6), seed=st.integers(0, 2 ** 64 - 1))
def test_roundtrip_property(calls, seed):
    spec = parse(spec_doc(copy.deepcopy(calls), seed=seed, cols=2, tile_cells=20))
    assert spec_roundtrip(spec) == spec


# --- validation warnings ---------------------------------------------------------------

def test_warning_dry_wading():
    warnings = validate_spec(parse(spec_doc([call("flat", elevation=0.5), call("wading", water_level=0.2)])))
    assert any("dry wading region" in w for w in warnings)


def test_warning_empty():
    assert validate_spec(parse(spec_doc([]))) == ["empty terrain, flat default"]


def test_no_warnings_for_well_formed_multitile(all_tools_doc, beach_doc):
    assert validate_spec(parse(all_tools_doc)) == []
    assert validate_spec(parse(beach_doc)) == []


def test_warning_overlap_and_unused_tiles():
    w = validate_spec(parse(spec_doc([call("flat", elevation=0.0), call("rough", amplitude=0.01),
                                      call("flat", elevation=0.2)])))
    assert any("overlapping whole-map calls" in x for x in w)
    w = validate_spec(parse(spec_doc([call("flat", {"row": 0, "col": 0}, elevation=0.0)], cols=2)))
    assert w == ["unused tile (0, 1): stays flat at 0.0"]


# --- compilation -----------------------------------------------------------------------

def test_compile_whole_map_wading():
    t = compile_spec(parse(spec_doc([call("flat", elevation=0.0), call("wading", water_level=0.2)])))
    assert np.all(t.attributes.wading == 1)
    assert np.all(t.attributes.water_level == 0.2)
    assert np.all(t.attributes.deformable == 0)


def test_compile_geometry_only_has_no_flags(all_tools_doc):
    doc = copy.deepcopy(all_tools_doc)
    doc["calls"] = [c for c in doc["calls"] if c["tool"] not in ("wading", "deformable")]
    t = compile_spec(parse(doc))
    assert not t.attributes.wading.any() and not t.attributes.deformable.any()


def test_compile_deterministic(all_tools_doc):
    a = compile_spec(parse(all_tools_doc))
    b = compile_spec(parse(all_tools_doc))
    assert a == b
    assert a.heightmap.data.tobytes() == b.heightmap.data.tobytes()


def test_empty_spec_compiles_flat():
    t = compile_spec(parse(spec_doc([])))
    assert np.all(t.heightmap.data == 0.0)
    assert t.warnings == ("empty terrain, flat default",)


def test_wading_invariant_enforced_with_warning():
    t = compile_spec(parse(spec_doc([call("wading", water_level=0.2),
                                     call("flat", {"row": 0, "col": 1}, elevation=0.5)], cols=2)))
    a, h = t.attributes, t.heightmap.data
    assert np.all(a.water_level[a.wading == 1] > h[a.wading == 1])
    assert not a.wading[:, 32:].any() and a.wading[:, :32].all()
    assert any("clipped" in w for w in t.warnings)


def test_soil_regions_exist_for_every_cell(beach_doc):
    t = compile_spec(parse(beach_doc))
    ids = set(np.unique(t.attributes.soil_region)) - {0}
    assert ids and ids <= set(t.soil_regions)
    assert np.array_equal(t.attributes.deformable == 1, t.attributes.soil_region > 0)


def test_both_flags_allowed_on_one_cell(beach_doc):
    t = compile_spec(parse(beach_doc))
    assert ((t.attributes.wading == 1) & (t.attributes.deformable == 1)).any()


def test_later_calls_overwrite():
    t = compile_spec(parse(spec_doc([call("flat", elevation=1.0), call("flat", {"row": 0, "col": 0}, elevation=0.0)],
                                    cols=2)))
    assert np.all(t.heightmap.data[:, :32] == 0.0) and np.all(t.heightmap.data[:, 32:] == 1.0)


def test_seed_split_only_perturbs_downstream():
    base = [call("flat", elevation=0.0), call("rough", {"row": 0, "col": 0}, amplitude=0.05),
            call("rough", {"row": 0, "col": 1}, amplitude=0.05)]
    a = compile_spec(parse(spec_doc(base, seed=9, cols=2)))
    inserted = base[:2] + [call("rocks", {"row": 0, "col": 0}, density=0.0)] + base[2:]
    b = compile_spec(parse(spec_doc(inserted, seed=9, cols=2)))
    assert np.array_equal(a.heightmap.data[:, :32], b.heightmap.data[:, :32])
    assert not np.array_equal(a.heightmap.data[:, 32:], b.heightmap.data[:, 32:])
    assert child_seed(9, 1) != child_seed(9, 2) and child_seed(9, 1) == child_seed(9, 1)


def test_param_jitter_is_seeded():
    doc = spec_doc([call("wading", water_level=0.3, param_jitter=0.1), call("deformable", param_jitter=0.1)], seed=4)
    a, b = compile_spec(parse(doc)), compile_spec(parse(doc))
    assert a.fluid == b.fluid and a.soil_regions == b.soil_regions
    assert a.fluid.rho != 1025.0
    assert 0.82 <= a.fluid.drag_coeff <= 1.0


def test_spec_from_dict_rejects_non_object():
    with pytest.raises(SchemaError):
        spec_from_dict([1, 2])
