"""Command-line client for the solver service.

Subcommands: solve, sweep, synth, compare, serve. Every compute command
builds a request model, obtains the response either in-process or from a
running service (--server URL), and writes the result files locally.

Exit codes: 0 success (all rows feasible), 1 usage or configuration error,
2 completed with infeasible rows.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from . import __version__, reports
from .service import api
from .service.schemas import (
    CompareRequest,
    CompareResponse,
    PlantSpec,
    RunConfig,
    SolveRequest,
    SolveResponse,
    SweepRequest,
    SweepResponse,
    SynthRequest,
    SynthResponse,
)
from .strategy import ComparisonRow, Method, SweepTable

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems with exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _comma_floats(text: str) -> list[float]:
    items = [t for t in text.split(",") if t.strip()]
    return [float(t) for t in items]


def _comma_ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--cells", type=int, default=None, help="series H-bridge cells")
    p.add_argument("--vdc", type=float, default=None, help="per-cell DC voltage [V]")
    p.add_argument("--base", type=float, default=None, help="per-unit base voltage [V]")
    p.add_argument("--seed", type=int, default=None, help="solver base seed")
    p.add_argument("--swarm", type=int, default=None, help="swarm size")
    p.add_argument("--iters", type=int, default=None, help="max iterations per round")
    p.add_argument("--eliminate", type=str, default=None,
                   help="comma list of harmonic orders to eliminate, e.g. 3,5")
    p.add_argument("--thd-max-order", type=int, default=None,
                   help="highest harmonic order in the spectral THD window")
    p.add_argument("--threshold", type=float, default=None,
                   help="per-unit level at or below which the proposed method halves the DC link")
    p.add_argument("--config", type=str, default=None, help="JSON run-config file")
    p.add_argument("--out", type=str, default=".", help="output directory")
    p.add_argument("--server", type=str, default=None,
                   help="base URL of a running service; default is in-process execution")


def _load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    with open(path) as handle:
        return RunConfig.model_validate(json.load(handle))


def _apply_overrides(config: RunConfig, args) -> RunConfig:
    """Explicit flags win over config-file values."""
    data = config.model_dump()
    if args.cells is not None:
        data["plant"]["cells"] = args.cells
    if args.vdc is not None:
        data["plant"]["vdc"] = args.vdc
    if args.base is not None:
        data["plant"]["base_voltage"] = args.base
    if args.seed is not None:
        data["pso"]["seed"] = args.seed
    if args.swarm is not None:
        data["pso"]["swarm_size"] = args.swarm
    if args.iters is not None:
        data["pso"]["max_iterations"] = args.iters
    if args.eliminate is not None:
        data["she"]["eliminate_orders"] = _comma_ints(args.eliminate)
    if args.thd_max_order is not None:
        data["she"]["thd_max_order"] = args.thd_max_order
    if args.threshold is not None:
        data["threshold"] = args.threshold
    if getattr(args, "out", None) is not None:
        data["output_dir"] = args.out
    if getattr(args, "format", None) is not None:
        data["formats"] = [f.strip() for f in args.format.split(",") if f.strip()]
    return RunConfig.model_validate(data)


def _post(server: str, path: str, request, response_cls):
    import httpx

    url = server.rstrip("/") + path
    reply = httpx.post(url, json=request.model_dump(mode="json"), timeout=600.0)
    if reply.status_code >= 400:
        try:
            detail = reply.json().get("detail", reply.text)
        except ValueError:
            detail = reply.text
        raise ValueError(f"{url} -> HTTP {reply.status_code}: {detail}")
    return response_cls.model_validate(reply.json())


def _dispatch_solve(req: SolveRequest, server: str | None) -> SolveResponse:
    if server:
        return _post(server, "/solve", req, SolveResponse)
    return api.run_solve(req)


def _dispatch_sweep(req: SweepRequest, server: str | None) -> SweepResponse:
    if server:
        return _post(server, "/sweep", SweepRequest.model_validate(req.model_dump()), SweepResponse)
    return api.run_sweep(SweepRequest.model_validate(req.model_dump()))


def _dispatch_compare(req: CompareRequest, server: str | None) -> CompareResponse:
    if server:
        return _post(server, "/compare", req, CompareResponse)
    return api.run_compare(req)


def _dispatch_synth(req: SynthRequest, server: str | None) -> SynthResponse:
    if server:
        return _post(server, "/synth", req, SynthResponse)
    return api.run_synth(req)


def _solve_record(req: SolveRequest, resp: SolveResponse) -> dict:
    return {
        "plant": req.plant.model_dump(),
        "operating_point": {
            "v_out_pu": req.v_out_pu,
            "method": req.method.value,
            "threshold": req.threshold,
        },
        "effective": {
            "vdc_V": resp.effective_vdc_V,
            "target_pu": resp.effective_target_pu,
        },
        "angles_deg": resp.angles_deg,
        "angles_rad": resp.angles_rad,
        "achieved_v1_V": resp.achieved_v1_V,
        "residuals": {
            "fundamental_error_V": resp.fundamental_error_V,
            "harmonics": [h.model_dump() for h in resp.harmonics],
        },
        "thd": {
            "spectral_pct": resp.thd_spectral_pct,
            "total_pct": resp.thd_total_pct,
            "max_order": req.she.thd_max_order,
        },
        "she": req.she.model_dump(),
        "feasible": resp.feasible,
        "best_cost": resp.best_cost,
        "iterations_used": resp.iterations_used,
        "seed": resp.seed,
        "pso_params": req.pso.model_dump(),
    }


def _cmd_solve(args) -> int:
    config = _apply_overrides(_load_config(args.config), args)
    req = SolveRequest(
        plant=config.plant,
        v_out_pu=args.pu,
        method=Method(args.method),
        threshold=config.threshold,
        pso=config.pso,
        she=config.she,
    )
    resp = _dispatch_solve(req, args.server)
    out = Path(config.output_dir)
    record_path = out / f"solve_{req.method.value}_pu{req.v_out_pu:g}.json"
    reports.write_json(record_path, _solve_record(req, resp))
    print(f"wrote {record_path}")
    print(f"feasible={resp.feasible} achieved_v1={resp.achieved_v1_V:.3f} V "
          f"thd_total={resp.thd_total_pct:.2f}%")
    return EXIT_OK if resp.feasible else EXIT_INFEASIBLE


def _write_sweep_files(config: RunConfig, resp: SweepResponse,
                       comparison: CompareResponse | None) -> None:
    out = Path(config.output_dir)
    cells = config.plant.cells
    rows = sorted((api.model_to_row(m) for m in resp.rows),
                  key=lambda r: (r.v_out_pu, r.method.value))
    table = SweepTable(tuple(rows))
    cfg = config.plant.to_config()
    if "csv" in config.formats:
        reports.write_text_atomic(out / "sweep.csv", reports.sweep_csv(table, cells))
        reports.write_text_atomic(out / "tracking.csv", reports.tracking_csv(table, cfg))
        for method in config.methods:
            name = f"angles_{method.value}.csv"
            reports.write_text_atomic(out / name, reports.angles_csv(table, method, cells))
        if comparison is not None:
            core = tuple(ComparisonRow(**r.model_dump()) for r in comparison.rows)
            reports.write_text_atomic(out / "comparison.csv", reports.comparison_csv(core))
    if "json" in config.formats:
        payload = {
            "rows": [r.model_dump(mode="json") for r in resp.rows],
            "comparison": None if comparison is None
            else [r.model_dump() for r in comparison.rows],
        }
        reports.write_json(out / "sweep.json", payload)


def _cmd_sweep(args) -> int:
    config = _apply_overrides(_load_config(args.config), args)
    if args.pu is not None:
        config = RunConfig.model_validate({**config.model_dump(), "pu_grid": _comma_floats(args.pu)})
    if args.method:
        methods = [Method(m) for m in args.method]
        config = RunConfig.model_validate({**config.model_dump(), "methods": [m.value for m in methods]})
    resp = _dispatch_sweep(config, args.server)
    comparison = None
    if {Method.CLASSIC, Method.PROPOSED} <= set(config.methods):
        comparison = _dispatch_compare(CompareRequest(rows=resp.rows), args.server)
    _write_sweep_files(config, resp, comparison)
    n_infeasible = sum(1 for r in resp.rows if not r.feasible)
    print(f"wrote sweep outputs to {config.output_dir} "
          f"({len(resp.rows)} rows, {n_infeasible} infeasible)")
    return EXIT_OK if n_infeasible == 0 else EXIT_INFEASIBLE


def _cmd_synth(args) -> int:
    config = _apply_overrides(_load_config(args.config), args)
    plant = config.plant
    angles_deg = None
    if args.record is not None:
        record = reports.load_solve_record(args.record)
        angles_deg = record["angles_deg"]
        plant = PlantSpec(
            cells=record["plant"]["cells"],
            vdc=record["effective"]["vdc_V"],
            dc_sources=record["plant"].get("dc_sources"),
        )
        if args.cells is not None or args.vdc is not None:
            plant = PlantSpec(
                cells=args.cells if args.cells is not None else plant.cells,
                vdc=args.vdc if args.vdc is not None else plant.vdc,
                dc_sources=plant.dc_sources,
            )
    if args.angles_deg is not None:
        angles_deg = _comma_floats(args.angles_deg)
    if angles_deg is None:
        raise ValueError("synth needs --angles-deg or --record")
    req = SynthRequest(
        plant=plant,
        angles_deg=angles_deg,
        samples=args.samples,
        frequency_hz=args.freq,
        max_order=config.she.thd_max_order,
    )
    resp = _dispatch_synth(req, args.server)
    out = Path(config.output_dir)
    reports.write_text_atomic(
        out / "waveform.csv",
        reports.waveform_csv(np.asarray(resp.time_s), np.asarray(resp.voltage_V)),
    )
    header = ["harmonic_order", "amplitude_V", "amplitude_pct_of_fundamental"]
    lines = [",".join(header)]
    for line in resp.spectrum:
        lines.append(",".join([
            reports.fmt_number(line.harmonic_order),
            reports.fmt_number(line.amplitude_V),
            reports.fmt_number(line.amplitude_pct_of_fundamental),
        ]))
    reports.write_text_atomic(out / "spectrum.csv", "\n".join(lines) + "\n")
    print(f"wrote waveform.csv and spectrum.csv to {out} "
          f"(thd_total={resp.thd_total_pct:.2f}%)")
    return EXIT_OK


def _cmd_compare(args) -> int:
    rows = []
    for path in args.sweeps:
        rows.extend(api.row_to_model(r) for r in reports.parse_sweep_csv(path))
    resp = _dispatch_compare(CompareRequest(rows=rows), args.server)
    core = tuple(ComparisonRow(**r.model_dump()) for r in resp.rows)
    out = Path(args.out)
    reports.write_text_atomic(out / "comparison.csv", reports.comparison_csv(core))
    print(f"wrote {out / 'comparison.csv'} ({len(core)} rows)")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="shepso", description=__doc__)
    parser.add_argument("--version", action="version", version=f"shepso {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_solve = sub.add_parser("solve", help="solve one operating point")
    p_solve.add_argument("--pu", type=float, required=True, help="per-unit output voltage")
    p_solve.add_argument("--method", choices=[m.value for m in Method], default="classic")
    _add_common_flags(p_solve)
    p_solve.set_defaults(func=_cmd_solve)

    p_sweep = sub.add_parser("sweep", help="solve a grid of operating points")
    p_sweep.add_argument("--pu", type=str, default=None,
                         help="comma list of per-unit points (default 0.1..0.5)")
    p_sweep.add_argument("--method", action="append",
                         choices=[m.value for m in Method], default=None,
                         help="repeatable; default both methods")
    p_sweep.add_argument("--format", type=str, default=None, help="csv, json or csv,json")
    _add_common_flags(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_synth = sub.add_parser("synth", help="synthesize waveform and spectrum")
    p_synth.add_argument("--angles-deg", type=str, default=None,
                         help="comma list of switching angles in degrees")
    p_synth.add_argument("--record", type=str, default=None,
                         help="solve record JSON to take angles and plant from")
    p_synth.add_argument("--samples", type=int, default=4096)
    p_synth.add_argument("--freq", type=float, default=50.0, help="fundamental frequency [Hz]")
    _add_common_flags(p_synth)
    p_synth.set_defaults(func=_cmd_synth)

    p_cmp = sub.add_parser("compare", help="improvement table from sweep CSVs")
    p_cmp.add_argument("sweeps", nargs=2, help="two sweep CSV files")
    p_cmp.add_argument("--out", type=str, default=".")
    p_cmp.add_argument("--server", type=str, default=None)
    p_cmp.set_defaults(func=_cmd_compare)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", type=str, default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except (ValueError, ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
