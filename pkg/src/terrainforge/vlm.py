"""Chat-completions client that turns text or image prompts into terrain specs.

The exchange is: build a request carrying the tool schemas, parse the tool
calls of the reply into a spec, and re-prompt with the validator's message
when the reply does not parse.
"""

from __future__ import annotations

import copy
import json
import os
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Callable, Optional

import httpx

from .errors import EmptyResponseError, GenerationFailed, InvalidArgument, NetworkError, SchemaError, SpecError
from .spec import Layout, TerrainSpec, spec_from_dict, spec_to_dict, validate_spec
from .tools import TOOLS, export_function_schemas

ENV_URL = "GENTE_API_URL"
ENV_KEY = "GENTE_API_KEY"
ENV_MODEL = "GENTE_MODEL"
DEFAULT_MAX_RETRIES = 2
REDACTED = "***"

Transport = Callable[[str, dict, dict, float], dict]


@dataclass(frozen=True)
class EndpointConfig:
    base_url: str
    api_key: str = field(repr=False)
    model_name: str
    timeout: float = 60.0
    max_retries: int = DEFAULT_MAX_RETRIES

    def __post_init__(self):
        if not self.timeout > 0:
            raise InvalidArgument(f"timeout must be positive, got {self.timeout}")
        if self.max_retries < 0:
            raise InvalidArgument(f"max_retries must be >= 0, got {self.max_retries}")

    @classmethod
    def from_env(cls, base_url=None, api_key=None, model_name=None, env=None, **kwargs) -> "EndpointConfig":
        """Explicit values win over GENTE_API_URL / GENTE_API_KEY / GENTE_MODEL."""
        env = os.environ if env is None else env
        base_url = base_url or env.get(ENV_URL)
        api_key = api_key or env.get(ENV_KEY)
        model_name = model_name or env.get(ENV_MODEL)
        missing = [name for name, v in ((ENV_URL, base_url), (ENV_KEY, api_key), (ENV_MODEL, model_name)) if not v]
        if missing:
            raise InvalidArgument(f"endpoint not configured: set {', '.join(missing)} or pass the matching flag")
        return cls(base_url, api_key, model_name, **kwargs)

    @property
    def url(self) -> str:
        return self.base_url.rstrip("/") + "/chat/completions"


@dataclass(frozen=True)
class GenerationRequest:
    input_kind: str
    text_prompt: Optional[str] = None
    image_payload: Optional[str] = None  # base64
    media_type: str = "image/png"
    system_prompt: Optional[str] = None

    def __post_init__(self):
        if self.input_kind not in ("text", "image"):
            raise InvalidArgument(f"input_kind must be 'text' or 'image', got {self.input_kind!r}")
        has_text = bool(self.text_prompt and self.text_prompt.strip())
        has_image = bool(self.image_payload)
        if has_text == has_image:
            raise InvalidArgument("exactly one of text_prompt / image_payload must be provided")
        if (self.input_kind == "text") != has_text:
            raise InvalidArgument(f"input_kind {self.input_kind!r} does not match the populated payload")


@dataclass
class Attempt:
    request: dict
    response: Any
    error: Optional[str] = None


@dataclass
class GenerationTrace:
    attempts: list = field(default_factory=list)
    final: Optional[TerrainSpec] = None
    failure: Optional[str] = None
    warnings: list = field(default_factory=list)

    def to_dict(self, secret: Optional[str] = None) -> dict:
        out = {
            "attempts": [{"request": a.request, "response": a.response, "error": a.error} for a in self.attempts],
            "final": spec_to_dict(self.final) if self.final is not None else None,
            "failure": self.failure,
            "warnings": list(self.warnings),
        }
        return _redact(out, secret) if secret else out


def _redact(obj, secret: str):
    if isinstance(obj, dict):
        return {k: _redact(v, secret) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_redact(v, secret) for v in obj]
    if isinstance(obj, str) and secret in obj:
        return obj.replace(secret, REDACTED)
    return obj


def default_system_prompt(layout: Layout) -> str:
    template = resources.files("terrainforge").joinpath("assets/system_prompt.txt").read_text(encoding="utf-8")
    tile_m = layout.tile_cells * layout.cell_size
    return template.format(rows=layout.rows, cols=layout.cols, tile_cells=layout.tile_cells,
                           cell_size=layout.cell_size, tile_meters=f"{tile_m:g}",
                           map_x=f"{tile_m * layout.cols:g}", map_y=f"{tile_m * layout.rows:g}",
                           tool_names=", ".join(TOOLS))


def build_prompt(request: GenerationRequest, schemas: list, model: str = "",
                 layout: Optional[Layout] = None) -> dict:
    system = request.system_prompt or default_system_prompt(layout or Layout())
    if request.input_kind == "text":
        user_content: Any = request.text_prompt
    else:
        user_content = [
            {"type": "text", "text": "Build a terrain matching this image."},
            {"type": "image_url",
             "image_url": {"url": f"data:{request.media_type};base64,{request.image_payload}"}},
        ]
    return {
        "model": model,
        "messages": [{"role": "system", "content": system}, {"role": "user", "content": user_content}],
        "tools": copy.deepcopy(schemas),
        "tool_choice": "required",
        "temperature": 0,
    }


def parse_tool_calls(raw, layout: Optional[Layout] = None, global_seed: int = 0) -> TerrainSpec:
    """Map the tool calls of a chat-completions response onto a validated spec."""
    if isinstance(raw, (str, bytes)):
        try:
            raw = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise EmptyResponseError(f"response is not JSON: {exc.msg}") from exc
    try:
        message = raw["choices"][0]["message"]
    except (KeyError, IndexError, TypeError) as exc:
        raise EmptyResponseError("response has no choices[0].message") from exc
    tool_calls = message.get("tool_calls") or []
    if not tool_calls:
        raise EmptyResponseError("response contains no tool calls")

    calls = []
    for i, tc in enumerate(tool_calls):
        fn = (tc or {}).get("function") or {}
        name = fn.get("name")
        arguments = fn.get("arguments", {})
        if isinstance(arguments, str):
            try:
                arguments = json.loads(arguments) if arguments.strip() else {}
            except json.JSONDecodeError as exc:
                raise SchemaError(f"arguments are not valid JSON: {exc.msg}", path=f"calls[{i}].args",
                                  index=i) from exc
        if not isinstance(arguments, dict):
            raise SchemaError("arguments must be an object", path=f"calls[{i}].args", index=i)
        arguments = dict(arguments)
        target = arguments.pop("target", "all")
        calls.append({"tool": name, "target": target, "args": arguments})

    layout = layout or Layout()
    doc = {"version": "1", "layout": spec_to_dict(TerrainSpec(layout))["layout"],
           "global_seed": global_seed, "calls": calls}
    return spec_from_dict(doc)


def httpx_transport(url: str, headers: dict, body: dict, timeout: float) -> dict:
    try:
        resp = httpx.post(url, headers=headers, json=body, timeout=timeout)
    except httpx.HTTPError as exc:
        raise NetworkError(f"request to {url} failed: {exc}") from exc
    if resp.status_code >= 400:
        raise NetworkError(f"{url} returned HTTP {resp.status_code}: {resp.text[:200]}")
    try:
        return resp.json()
    except ValueError as exc:
        raise NetworkError(f"{url} returned a non-JSON body") from exc


def correction_message(error: str) -> dict:
    return {"role": "user",
            "content": f"Your previous reply was rejected by the terrain validator: {error}\n"
                       "Reply again using only valid tool calls."}


def request_terrain(request: GenerationRequest, cfg: EndpointConfig, transport: Transport = httpx_transport,
                    layout: Optional[Layout] = None, global_seed: int = 0) -> tuple[TerrainSpec, GenerationTrace]:
    """Ask the endpoint for a spec, re-prompting up to ``cfg.max_retries`` times.

    Raises NetworkError on transport failure and GenerationFailed (carrying
    the trace) when no attempt yields a valid spec.
    """
    layout = layout or Layout()
    body = build_prompt(request, export_function_schemas(), cfg.model_name, layout)
    headers = {"Authorization": f"Bearer {cfg.api_key}", "Content-Type": "application/json"}
    trace = GenerationTrace()
    for _ in range(cfg.max_retries + 1):
        sent = copy.deepcopy(body)
        response = transport(cfg.url, headers, sent, cfg.timeout)
        try:
            spec = parse_tool_calls(response, layout, global_seed)
        except (SpecError, EmptyResponseError) as exc:
            error = f"{type(exc).__name__}: {exc}"
            trace.attempts.append(Attempt(sent, response, error))
            body["messages"].append(correction_message(error))
            continue
        trace.attempts.append(Attempt(sent, response))
        trace.final = spec
        trace.warnings = validate_spec(spec)
        return spec, trace
    trace.failure = f"no valid spec after {len(trace.attempts)} attempts; last error: {trace.attempts[-1].error}"
    raise GenerationFailed(trace.failure, trace)
