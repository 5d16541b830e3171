"""Offline walk through the prompt pipeline against a scripted local endpoint.

The mock first answers with a call missing a required argument, then with a
valid set, so the trace shows one correction round.

    python3 scripts/mock_prompt_demo.py --out runs/prompt_demo
"""

import argparse
import json

from terrainforge.cli import main as cli_main
from terrainforge.mockserver import MockChatServer, tool_call_response

SCRIPT = [
    tool_call_response([("stairs", {"step_depth": 0.3, "count": 4})]),
    tool_call_response([
        ("flat", {"elevation": 0.0}),
        ("stairs", {"step_height": 0.12, "step_depth": 0.3, "count": 4, "target": {"row": 0, "col": 0}}),
        ("deformable", {"target": {"row": 0, "col": 1}}),
        ("wading", {"water_level": 0.2, "flow_kind": "current", "current_amplitude": 4.0,
                    "target": {"row": 0, "col": 1}}),
    ]),
]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="runs/prompt_demo")
    args = parser.parse_args()
    with MockChatServer(SCRIPT) as server:
        code = cli_main(["prompt", "stairs down into a muddy stream", "--out", args.out,
                         "--api-url", server.base_url, "--api-key", "demo-key", "--model", "scripted",
                         "--cols", "2", "--tile-cells", "48", "--seed", "3"])
    trace = json.loads(open(f"{args.out}/trace.json").read())
    for i, attempt in enumerate(trace["attempts"]):
        print(f"attempt {i}: {'ok' if attempt['error'] is None else attempt['error']}")
    raise SystemExit(code)


if __name__ == "__main__":
    main()
