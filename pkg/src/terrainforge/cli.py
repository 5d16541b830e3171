"""Command line front end.

Exit codes: 0 success, 1 validation/generation error, 2 I/O, config or network error.
Machine-readable output goes to stdout (JSON/CSV); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import base64
import json
import mimetypes
import sys
from pathlib import Path

from . import io as tio
from .errors import GenerationFailed, InvalidArgument, NetworkError, SpecError, TerrainError
from .harness import PRESETS, SimConfig, make_trajectory, run
from .physics import NoiseSpec
from .spec import Layout, compile_spec, parse_spec, serialize_spec, spec_from_dict, spec_to_dict, validate_spec
from .tools import export_function_schemas
from .vlm import EndpointConfig, GenerationRequest, request_terrain

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _err(*parts):
    print(*parts, file=sys.stderr)


def _formats(value: str) -> tuple:
    formats = tuple(f.strip() for f in value.split(",") if f.strip())
    bad = [f for f in formats if f not in tio.FORMATS]
    if bad or not formats:
        raise argparse.ArgumentTypeError(f"formats must be a comma list of {', '.join(tio.FORMATS)}")
    return formats


def _read_spec(path: Path):
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_IO) from exc
    try:
        return parse_spec(data)
    except SpecError as exc:
        raise CliError(json.dumps(exc.to_dict()), EXIT_INVALID) from exc


def _override(spec, seed=None, cell_size=None):
    """Apply --seed/--cell-size and re-validate, since cell size changes what fits."""
    if seed is None and cell_size is None:
        return spec
    doc = spec_to_dict(spec)
    if seed is not None:
        doc["global_seed"] = seed
    if cell_size is not None:
        doc["layout"]["cell_size"] = cell_size
    try:
        return spec_from_dict(doc)
    except SpecError as exc:
        raise CliError(json.dumps(exc.to_dict()), EXIT_INVALID) from exc


def _build(spec, out_dir: Path, formats) -> dict:
    for w in validate_spec(spec):
        _err(f"warning: {w}")
    terrain = compile_spec(spec)
    try:
        written = tio.write_terrain(terrain, out_dir, formats)
    except OSError as exc:
        raise CliError(f"cannot write to {out_dir}: {exc}", EXIT_IO) from exc
    return {k: str(v) for k, v in written.items()}


def cmd_gen(args) -> int:
    spec = _override(_read_spec(Path(args.spec)), args.seed, args.cell_size)
    written = _build(spec, Path(args.out), args.formats)
    print(json.dumps(written, indent=2))
    return EXIT_OK


def cmd_schemas(args) -> int:
    print(json.dumps(export_function_schemas(), indent=2))
    return EXIT_OK


def cmd_prompt(args) -> int:
    try:
        cfg = EndpointConfig.from_env(args.api_url, args.api_key, args.model,
                                      max_retries=args.max_retries, timeout=args.timeout)
    except InvalidArgument as exc:
        raise CliError(str(exc), EXIT_IO) from exc
    if args.image:
        try:
            payload = base64.b64encode(Path(args.image).read_bytes()).decode("ascii")
        except OSError as exc:
            raise CliError(f"cannot read image {args.image}: {exc.strerror}", EXIT_IO) from exc
        media = mimetypes.guess_type(args.image)[0] or "image/png"
        request = GenerationRequest("image", image_payload=payload, media_type=media)
    else:
        if not args.text or not args.text.strip():
            raise CliError("give a text prompt or --image PATH", EXIT_INVALID)
        request = GenerationRequest("text", text_prompt=args.text)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    layout = Layout(args.rows, args.cols, args.tile_cells, args.cell_size or 0.1)
    trace_path = out / "trace.json"
    try:
        spec, trace = request_terrain(request, cfg, layout=layout, global_seed=args.seed or 0)
    except GenerationFailed as exc:
        trace_path.write_text(json.dumps(exc.trace.to_dict(cfg.api_key), indent=2))
        raise CliError(f"generation failed: {exc}; trace written to {trace_path}", EXIT_INVALID) from exc
    except NetworkError as exc:
        raise CliError(f"network error: {exc}", EXIT_IO) from exc
    trace_path.write_text(json.dumps(trace.to_dict(cfg.api_key), indent=2))
    (out / "spec.json").write_text(serialize_spec(spec))
    written = _build(spec, out, args.formats)
    written["spec"] = str(out / "spec.json")
    written["trace"] = str(trace_path)
    print(json.dumps(written, indent=2))
    return EXIT_OK


def cmd_atlas(args) -> int:
    spec_dir, out = Path(args.spec_dir), Path(args.out)
    if not spec_dir.is_dir():
        raise CliError(f"{spec_dir} is not a directory", EXIT_IO)
    paths = sorted(spec_dir.glob("*.json"))
    if not paths:
        raise CliError(f"no *.json specs in {spec_dir}", EXIT_INVALID)
    entries = []
    for path in paths:
        entry = {"spec": str(path), "name": path.stem}
        try:
            spec = parse_spec(path.read_bytes())
            terrain = compile_spec(spec)
            target = out / path.stem
            tio.write_terrain(terrain, target, ("raw", "png"))
            entry.update({
                "status": "ok",
                "seed": spec.global_seed,
                "hashes": {
                    "heightmap_raw": tio.sha256_bytes((target / "heightmap.raw").read_bytes()),
                    "attributes_raw": tio.sha256_bytes((target / "attributes.raw").read_bytes()),
                    "heightmap_png": tio.sha256_bytes((target / "heightmap.png").read_bytes()),
                },
                "warnings": list(terrain.warnings),
            })
        except (TerrainError, OSError) as exc:
            entry.update({"status": "failed", "error": str(exc)})
            _err(f"{path.name}: {exc}")
        entries.append(entry)
    manifest = {"hash": "sha256", "entries": entries,
                "failures": sum(e["status"] == "failed" for e in entries)}
    out.mkdir(parents=True, exist_ok=True)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(json.dumps({"manifest": str(out / "manifest.json"), "entries": len(entries),
                      "failures": manifest["failures"]}))
    return EXIT_INVALID if manifest["failures"] else EXIT_OK


def cmd_harness(args) -> int:
    if args.preset not in PRESETS:
        raise CliError(f"unknown preset {args.preset!r}; available: {', '.join(PRESETS)}", EXIT_INVALID)
    try:
        terrain = tio.load_terrain(args.terrain_dir)
    except (OSError, KeyError, ValueError) as exc:
        raise CliError(f"cannot load terrain from {args.terrain_dir}: {exc}", EXIT_IO) from exc
    noise = NoiseSpec(std_dev=args.noise_std)
    config = SimConfig(dt=args.dt, duration=args.duration, seed=args.seed or 0, body_mass=args.body_mass,
                       lever_arm=args.lever_arm, noise=noise)
    traj = make_trajectory(args.preset, terrain, config, speed=args.speed)
    report = run(terrain, config, traj)
    csv_text = report.to_csv()
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(csv_text)
        _err(f"wrote {len(report)} rows to {args.out}")
    else:
        sys.stdout.write(csv_text)
    return EXIT_OK


def cmd_render(args) -> int:
    try:
        heightmap = tio.read_heightmap(args.heightmap)
    except (OSError, KeyError, ValueError) as exc:
        raise CliError(f"cannot read {args.heightmap}: {exc}", EXIT_IO) from exc
    meta = tio.render_preview(heightmap, args.out)
    print(json.dumps(meta))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="terrainforge", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="compile a spec file and export the terrain")
    g.add_argument("spec")
    g.add_argument("--out", required=True)
    g.add_argument("--formats", type=_formats, default=("raw", "png"))
    g.add_argument("--seed", type=int)
    g.add_argument("--cell-size", type=float)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("schemas", help="print the tool schemas as a chat-completions tools array")
    s.set_defaults(func=cmd_schemas)

    pr = sub.add_parser("prompt", help="ask a VLM endpoint for a spec, then compile it")
    pr.add_argument("text", nargs="?")
    pr.add_argument("--image")
    pr.add_argument("--out", required=True)
    pr.add_argument("--api-url")
    pr.add_argument("--api-key")
    pr.add_argument("--model")
    pr.add_argument("--max-retries", type=int, default=2)
    pr.add_argument("--timeout", type=float, default=60.0)
    pr.add_argument("--rows", type=int, default=1)
    pr.add_argument("--cols", type=int, default=1)
    pr.add_argument("--tile-cells", type=int, default=64)
    pr.add_argument("--cell-size", type=float)
    pr.add_argument("--seed", type=int)
    pr.add_argument("--formats", type=_formats, default=("raw", "png"))
    pr.set_defaults(func=cmd_prompt)

    a = sub.add_parser("atlas", help="compile every spec in a directory and write a manifest")
    a.add_argument("spec_dir")
    a.add_argument("--out", required=True)
    a.set_defaults(func=cmd_atlas)

    h = sub.add_parser("harness", help="run a trajectory preset over a compiled terrain")
    h.add_argument("terrain_dir")
    h.add_argument("--preset", default="straight-walk")
    h.add_argument("--out")
    h.add_argument("--dt", type=float, default=0.01)
    h.add_argument("--duration", type=float, default=5.0)
    h.add_argument("--seed", type=int)
    h.add_argument("--speed", type=float, default=1.0)
    h.add_argument("--body-mass", type=float, default=30.0)
    h.add_argument("--lever-arm", type=float, default=0.5)
    h.add_argument("--noise-std", type=float, default=0.1)
    h.set_defaults(func=cmd_harness)

    r = sub.add_parser("render", help="inverted grayscale preview (dark = high) of a heightmap.raw")
    r.add_argument("heightmap")
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        _err(f"error: {exc}")
        return exc.code
    except SpecError as exc:
        _err(f"error: {json.dumps(exc.to_dict())}")
        return EXIT_INVALID
    except (InvalidArgument, TerrainError) as exc:
        _err(f"error: {exc}")
        return EXIT_INVALID
    except OSError as exc:
        _err(f"error: {exc}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
