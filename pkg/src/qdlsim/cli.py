"""Command-line client for the simulator service.

All computation happens behind the HTTP API: by default the commands talk to
an in-process instance of the service app, and --server points them at a
running deployment instead. Exit codes distinguish success (0), usage or
configuration errors (2), and tamper detection or protocol failure (3);
detection is the protocol working as designed, but scripts need to see it.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from pathlib import Path

import httpx

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_TAMPER = 3

FIDELITY_FLOOR = 1.0 - 1e-9

_EPILOG = """\
exit codes:
  0  success
  2  usage or configuration error
  3  tamper detected or protocol failure
"""


class ServiceClient:
    """Minimal HTTP client; in-process app unless a server URL is given."""

    def __init__(self, server: str | None = None):
        self._server = server
        if server is None:
            from .service import create_app

            self._app = create_app()

    def request(self, method: str, path: str, params=None, json_body=None):
        async def go():
            if self._server is None:
                transport = httpx.ASGITransport(app=self._app)
                base_url = "http://qdlsim.internal"
            else:
                transport = None
                base_url = self._server
            async with httpx.AsyncClient(
                transport=transport, base_url=base_url, timeout=600.0
            ) as client:
                return await client.request(method, path, params=params, json=json_body)

        return asyncio.run(go())


def _fail(message: str, code: int = EXIT_USAGE) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _service_error(resp) -> int:
    try:
        detail = resp.json().get("detail", resp.text)
    except ValueError:
        detail = resp.text
    return _fail(f"service rejected the request ({resp.status_code}): {detail}")


def _write_json(path: str, payload) -> None:
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def parse_amplitude_pair(text: str) -> list[list[float]]:
    """Parse "a,b" where each part is a real or complex literal ("0.5+0.5i")."""
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected two comma-separated amplitudes, got {text!r}")
    amps = []
    for part in parts:
        try:
            value = complex(part.strip().replace("i", "j"))
        except ValueError:
            raise ValueError(f"cannot parse amplitude {part.strip()!r}") from None
        amps.append([value.real, value.imag])
    return amps


def _format_amplitude(pair: list[float]) -> str:
    return f"{pair[0]:+.6f}{pair[1]:+.6f}j"


def _format_ket(model: dict) -> str:
    return "[" + ", ".join(_format_amplitude(a) for a in model["amplitudes"]) + "]"


def cmd_teleport_demo(args) -> int:
    if args.random:
        body = {"random_state": True, "seed": args.seed}
    else:
        try:
            amps = parse_amplitude_pair(args.state)
        except ValueError as exc:
            return _fail(str(exc))
        norm = sum(re * re + im * im for re, im in amps) ** 0.5
        if norm == 0.0:
            return _fail("state must be non-zero")
        if abs(norm - 1.0) > 1e-6:
            print(f"warning: normalizing input state (norm was {norm:.6f})",
                  file=sys.stderr)
            amps = [[re / norm, im / norm] for re, im in amps]
        body = {"state": amps, "seed": args.seed}
    client = ServiceClient(args.server)
    resp = client.request("POST", "/teleport", json_body=body)
    if resp.status_code != 200:
        return _service_error(resp)
    data = resp.json()
    print(f"input state: {_format_ket(data['input_state'])}")
    for i, stage in enumerate(data["trace"]["stages"], start=1):
        print(f"stage {i:2d}: {_format_ket(stage)}")
    meas = data["measurement"]
    m1, m2 = meas["outcomes"]
    print(f"measured slots {meas['measured_qubits']}: m1={m1} m2={m2} "
          f"(probability {meas['probability']:.6f})")
    corrections = ",".join(data["corrections"]) or "none"
    print(f"corrections: {corrections}")
    print(f"output state: {_format_ket(data['output_state'])}")
    print(f"fidelity: {data['fidelity']:.12f}")
    if args.json:
        _write_json(args.json, data["trace"])
    if data["fidelity"] >= FIDELITY_FLOOR:
        return EXIT_OK
    print("teleportation failed to reproduce the input state", file=sys.stderr)
    return EXIT_TAMPER


def cmd_ledger_run(args) -> int:
    try:
        raw = json.loads(Path(args.config).read_text())
    except OSError as exc:
        return _fail(f"cannot read config: {exc}")
    except ValueError as exc:
        return _fail(f"config is not valid JSON: {exc}")
    # validate up front so config mistakes are reported with exact field names
    from .network import ConfigError, parse_scenario_config

    try:
        parse_scenario_config(raw)
    except ConfigError as exc:
        return _fail(str(exc))
    client = ServiceClient(args.server)
    resp = client.request("POST", "/scenario", json_body=raw)
    if resp.status_code != 200:
        return _service_error(resp)
    data = resp.json()
    stats = data["check_statistics"]
    print(f"nodes: {data['nodes'][0]} -> {data['nodes'][1]}")
    print(f"check pairs tested: {stats['pairs_tested']}, "
          f"mismatches: {stats['mismatches']}, detected: {stats['detected']}")
    for t in data["transfers"]:
        verdict = "accepted" if t["accepted"] else f"rejected ({t['reason']})"
        print(f"block {t['block_index']}: {t['qubit_count']} qubits, "
              f"min fidelity {t['min_fidelity']:.6f}, {verdict}")
    chain_len = len(data["final_chains"][data["nodes"][1]])
    print(f"receiver chain: {chain_len} blocks, "
          f"valid: {data['receiver_chain_valid']}, "
          f"chains equal: {data['chains_equal']}")
    if args.out:
        _write_json(args.out, data)
    if args.events:
        lines = [json.dumps(e, separators=(",", ":")) for e in data["events"]]
        Path(args.events).write_text("\n".join(lines) + "\n")
    if data["tamper_detected"]:
        print("tamper detected: transfer aborted", file=sys.stderr)
        return EXIT_TAMPER
    if not (data["receiver_chain_valid"] and data["chains_equal"]):
        print("chains diverged without detection", file=sys.stderr)
        return EXIT_TAMPER
    return EXIT_OK


def cmd_attack_run(args) -> int:
    client = ServiceClient(args.server)
    body = {"check_pairs": args.pairs, "runs": args.runs,
            "basis": args.basis, "seed": args.seed}
    resp = client.request("POST", "/attack-study", json_body=body)
    if resp.status_code != 200:
        return _service_error(resp)
    data = resp.json()
    print(f"intercept basis: {data['intercept_basis']}")
    print(f"per-pair detection probability (exact): "
          f"{data['per_pair_detection_exact']:.12f}")
    print(f"expected detection rate at k={data['check_pairs']}: "
          f"{data['expected_detection_rate']:.12f}")
    print(f"empirical detection rate over {data['runs']} runs: "
          f"{data['empirical_detection_rate']:.6f} "
          f"({data['detected_runs']} detections)")
    if args.json:
        _write_json(args.json, data)
    return EXIT_OK


def cmd_stats(args) -> int:
    client = ServiceClient(args.server)
    resp = client.request("GET", "/stats")
    if resp.status_code != 200:
        return _service_error(resp)
    data = resp.json()
    print(f"stages: {data['stages']}")
    print(f"factor matrices: {data['factor_matrices']}")
    print(f"intermediate vectors: {data['intermediate_vectors']}")
    print(f"total matrices: {data['total_matrices']}")
    print(f"qubits to index {data['terabyte_bits']} classical bits: "
          f"{data['terabyte_qubits']}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdlsim",
        description="Quantum distributed ledger simulator (thin client over "
                    "the qdlsim HTTP service).",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_server(p):
        p.add_argument("--server", default=None,
                       help="URL of a running service (default: in-process)")

    p = sub.add_parser("teleport-demo", epilog=_EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter,
                       help="teleport one qubit and print every pipeline stage")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--state", help='amplitudes "a,b" (complex as re+imi)')
    src.add_argument("--random", action="store_true",
                     help="use a seeded random normalized state")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", help="write the stage trace as JSON to this path")
    add_server(p)
    p.set_defaults(func=cmd_teleport_demo)

    p = sub.add_parser("ledger-run", epilog=_EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter,
                       help="run a two-node transfer scenario from a config file")
    p.add_argument("--config", required=True, help="scenario JSON path")
    p.add_argument("--out", help="write the full scenario result JSON here")
    p.add_argument("--events", help="write the event log as JSON lines here")
    add_server(p)
    p.set_defaults(func=cmd_ledger_run)

    p = sub.add_parser("attack-run", epilog=_EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter,
                       help="measure intercept-resend detection rates")
    p.add_argument("--pairs", type=int, default=16,
                   help="verification pairs per run (default 16)")
    p.add_argument("--runs", type=int, default=1000,
                   help="number of seeded runs (default 1000)")
    p.add_argument("--basis", choices=["Z", "X"], default="Z")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", help="write the study report as JSON to this path")
    add_server(p)
    p.set_defaults(func=cmd_attack_run)

    p = sub.add_parser("stats", epilog=_EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter,
                       help="print pipeline accounting and sizing figures")
    add_server(p)
    p.set_defaults(func=cmd_stats)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage/help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except httpx.HTTPError as exc:
        return _fail(f"cannot reach the service: {exc}")


if __name__ == "__main__":
    sys.exit(main())
