"""Command-line interface.

Subcommands: ``simulate``, ``sweep``, ``feasibility``, ``selftest`` and
``serve``.  Everything runs in-process by default; passing ``--server URL``
turns the first four into thin clients of a running service, shipping the
configuration text over HTTP and writing the returned artifacts locally,
so scripts behave identically either way.

Exit codes: 0 success, 2 bad configuration or parameters, 3 grids unable
to resolve the requested run, 4 verify-mode residual above tolerance (with
``--strict``) or self-test failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .acceptance import run_all
from .config import parse_config
from .errors import (
    ConfigError,
    CribsimError,
    DomainError,
    KindError,
    NormalizationError,
    RangeError,
    SeparationError,
)
from .feasibility import feasibility_report
from .runner import default_threads, simulate_run, sweep_run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RESOLUTION = 3
EXIT_RESIDUAL = 4

_CONFIG_ERRORS = (
    ConfigError,
    DomainError,
    NormalizationError,
    SeparationError,
    KindError,
    RangeError,
)


def _exit_code_for(exc: CribsimError) -> int:
    return EXIT_CONFIG if isinstance(exc, _CONFIG_ERRORS) else EXIT_RESOLUTION


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _load_config_text(path_str: str) -> tuple[str, object]:
    path = Path(path_str)
    if not path.exists():
        raise ConfigError(f"no such config file: {path}")
    text = path.read_text(encoding="utf-8")
    return text, parse_config(text)


def _resolve_out(args_out: str | None, config) -> Path:
    return Path(args_out) if args_out else Path(config.output.path)


def _write_remote_files(out_dir: Path, files: dict[str, str]) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, content in files.items():
        (out_dir / name).write_text(content, encoding="utf-8")
        print(f"wrote {out_dir / name}")


def _post(server: str, route: str, payload: dict):
    import httpx

    response = httpx.post(server.rstrip("/") + route, json=payload, timeout=600.0)
    if response.status_code in (409, 422):
        detail = response.json().get("detail", {})
        message = detail.get("message", response.text)
        code = EXIT_CONFIG if response.status_code == 422 else EXIT_RESOLUTION
        raise _RemoteError(message, code)
    response.raise_for_status()
    return response.json()


class _RemoteError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _cmd_simulate(args) -> int:
    text, config = _load_config_text(args.config)
    out_dir = _resolve_out(args.out, config)
    if args.server:
        body = _post(args.server, "/simulate", {"config": text})
        _write_remote_files(out_dir, body["files"])
        metrics = body["metrics"]
    else:
        artifacts = simulate_run(config, out_dir=out_dir)
        for path in artifacts.files.values():
            print(f"wrote {path}")
        metrics = artifacts.metrics
    print(
        "efficiency {efficiency:.6f}  gain {gain:.6f}  fidelity {fidelity:.6f}  "
        "echo at t={echo_peak_time:.4f} (predicted {predicted_echo_time:.4f})".format(
            **metrics
        )
    )
    return EXIT_OK


def _cmd_sweep(args) -> int:
    text, config = _load_config_text(args.config)
    out_dir = _resolve_out(args.out, config)
    if args.server:
        body = _post(
            args.server,
            "/sweep",
            {"config": text, "mode": args.mode, "threads": args.threads},
        )
        _write_remote_files(out_dir, body["files"])
        rows, max_rel = body["rows"], body["max_rel_residual"]
    else:
        artifacts = sweep_run(
            config, mode=args.mode, threads=args.threads, out_dir=out_dir
        )
        for path in artifacts.files.values():
            print(f"wrote {path}")
        rows, max_rel = artifacts.rows, artifacts.max_rel_residual
    print(f"{rows} rows ({args.mode} mode)")
    if max_rel is not None:
        print(f"max relative residual {max_rel:.3e}")
        if args.strict and max_rel > args.tol:
            return _fail(
                f"residual {max_rel:.3e} exceeds tolerance {args.tol:.3e}",
                EXIT_RESIDUAL,
            )
    return EXIT_OK


def _cmd_feasibility(args) -> int:
    if args.server:
        body = _post(
            args.server,
            "/feasibility",
            {
                "linewidth_Hz": args.linewidth_hz,
                "max_broadening_Hz": args.max_broadening_hz,
                "stark_coeff_Hz_per_Vcm": args.stark_coeff_hz_per_vcm,
                "field_V_per_cm": args.field_v_per_cm,
                "demonstrated_efficiency": args.demonstrated_efficiency,
                "bandwidth_multiple": args.bandwidth_multiple,
            },
        )
        report = body["report"]
    else:
        report = feasibility_report(
            linewidth_Hz=args.linewidth_hz,
            max_broadening_Hz=args.max_broadening_hz,
            stark_coeff_Hz_per_Vcm=args.stark_coeff_hz_per_vcm,
            field_V_per_cm=args.field_v_per_cm,
            demonstrated_efficiency=args.demonstrated_efficiency,
            bandwidth_multiple=args.bandwidth_multiple,
        )
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
        return EXIT_OK
    print(f"usable broadening      {report['broadening_Hz']:.6g} Hz")
    print(
        f"narrowest wavepacket   {report['min_bandwidth_Hz']:.6g} Hz "
        f"({report['bandwidth_multiple']:g} x linewidth)"
    )
    print(f"max compression        eta_max = {report['eta_max']:.4g}")
    sens = ", ".join(
        f"x{m}: {v:.4g}" for m, v in sorted(report["eta_max_sensitivity"].items())
    )
    print(f"  sensitivity to the bandwidth multiple -> {sens}")
    if "gain_estimate" in report:
        print(
            f"rate gain estimate     {report['gain_estimate']:.4g} at demonstrated "
            f"efficiency {report['demonstrated_efficiency']:g}"
        )
        print(
            f"gain > 10 needs        eta >= {report['eta_for_gain_10']:g} "
            "at that efficiency"
        )
    return EXIT_OK


def _cmd_selftest(args) -> int:
    numbers = None
    if args.criteria:
        numbers = sorted({int(tok) for tok in args.criteria.split(",") if tok.strip()})
    if args.server:
        body = _post(args.server, "/selftest", {"criteria": numbers})
        for entry in body["results"]:
            print(entry["line"])
        return EXIT_OK if body["passed"] else EXIT_RESIDUAL
    try:
        results = run_all(numbers, out_dir=args.out)
    except ValueError as exc:
        return _fail(str(exc), EXIT_CONFIG)
    for result in results:
        print(result.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_RESIDUAL


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cribsim",
        description=(
            "Photon-echo quantum-memory simulator: store a time-bin qubit in a "
            "reversibly broadened line, recall it compressed or stretched."
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="integrate one run and write envelopes")
    sim.add_argument("config", help="run configuration file")
    sim.add_argument("--out", help="output directory (default: config [output] path)")
    sim.add_argument("--server", help="delegate to a running service at this URL")
    sim.set_defaults(handler=_cmd_simulate)

    swp = sub.add_parser("sweep", help="evaluate a metric over a parameter grid")
    swp.add_argument("config", help="run configuration file with a [sweep] section")
    swp.add_argument(
        "--mode",
        choices=("fast", "verify"),
        default="fast",
        help="fast: closed forms only; verify: also integrate every point",
    )
    swp.add_argument(
        "--strict",
        action="store_true",
        help="exit 4 when the verify-mode residual exceeds --tol",
    )
    swp.add_argument(
        "--tol",
        type=float,
        default=0.05,
        help="relative residual tolerance for --strict (default 0.05)",
    )
    swp.add_argument(
        "--threads",
        type=int,
        default=default_threads(),
        help="verify-mode worker bound; no effect on results",
    )
    swp.add_argument("--out", help="output directory (default: config [output] path)")
    swp.add_argument("--server", help="delegate to a running service at this URL")
    swp.set_defaults(handler=_cmd_sweep)

    fea = sub.add_parser(
        "feasibility", help="compression headroom for a candidate material"
    )
    fea.add_argument("--linewidth-hz", type=float, required=True)
    fea.add_argument("--max-broadening-hz", type=float)
    fea.add_argument("--stark-coeff-hz-per-vcm", type=float)
    fea.add_argument("--field-v-per-cm", type=float)
    fea.add_argument("--demonstrated-efficiency", type=float)
    fea.add_argument("--bandwidth-multiple", type=float, default=3.0)
    fea.add_argument("--json", action="store_true", help="print the raw report")
    fea.add_argument("--server", help="delegate to a running service at this URL")
    fea.set_defaults(handler=_cmd_feasibility)

    self_p = sub.add_parser("selftest", help="run the acceptance checks")
    self_p.add_argument(
        "--criteria", help="comma-separated criterion numbers (default: all)"
    )
    self_p.add_argument("--out", help="directory for emitted artifacts")
    self_p.add_argument("--server", help="delegate to a running service at this URL")
    self_p.set_defaults(handler=_cmd_selftest)

    srv = sub.add_parser("serve", help="run the HTTP service")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8000)
    srv.set_defaults(handler=_cmd_serve)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except _RemoteError as exc:
        return _fail(str(exc), exc.code)
    except CribsimError as exc:
        return _fail(str(exc), _exit_code_for(exc))


if __name__ == "__main__":
    sys.exit(main())
