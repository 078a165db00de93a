"""Command-line interface.

Subcommands map 1:1 onto the library: ``forward`` (responses and
sweeps), ``diag`` (skin depth, induction numbers, sensitivity,
cumulative response, DOI), ``synth`` (noisy synthetic datasets),
``invert``, ``devices`` (catalog management), ``figures`` (regenerate
the example datasets) and ``serve`` (HTTP service).  Outputs are CSV or
canonical JSON; errored runs exit non-zero with a machine-readable JSON
object on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import devicedb, diagnostics, figures, forward, inversion, reporting
from .earthmodel import (LayeredEarth, ModelError, load_geometry, load_model)
from .forward import DeviceScale
from .hankel import QuadratureError

DEFAULT_SWEEP_POINTS = 61


class CliError(ValueError):
    pass


def _parse_floats(text: str) -> tuple:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise CliError(f"expected comma-separated numbers, got {text!r}") \
            from exc


def _parse_linear_sweep(text: str) -> np.ndarray:
    """start:step:stop sweep specification."""
    parts = text.split(":")
    if len(parts) != 3:
        raise CliError(f"sweep must be start:step:stop, got {text!r}")
    start, step, stop = (float(p) for p in parts)
    if step <= 0 or stop <= start:
        raise CliError(f"empty sweep range {text!r}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(n), 12)


def _parse_log_sweep(text: str, points: int) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3 or parts[1] != "log":
        raise CliError(f"log sweep must be min:log:max, got {text!r}")
    lo, hi = float(parts[0]), float(parts[2])
    if lo <= 0 or hi <= lo:
        raise CliError(f"empty sweep range {text!r}")
    if points < 2:
        raise CliError("log sweep needs at least 2 points")
    grid = np.logspace(math.log10(lo), math.log10(hi), points)
    grid[0], grid[-1] = lo, hi  # exact endpoints despite log rounding
    return grid


def _elements_for(args, catalog) -> tuple:
    """Measurement elements plus device scale from --device/--geometry."""
    if getattr(args, "device", None):
        entry = catalog.lookup(args.device)
        heights = _parse_floats(args.heights) if args.heights else None
        if getattr(args, "height", None) is not None:
            heights = (args.height,)
        if heights is None:
            raise CliError("--device requires --height or --heights")
        freqs = _parse_floats(args.freqs) if getattr(args, "freqs", None) \
            else None
        return entry.elements(heights, frequencies=freqs), entry.scale
    if getattr(args, "geometry", None):
        geometry = load_geometry(args.geometry)
        return geometry.elements(), DeviceScale()
    raise CliError("one of --device or --geometry is required")


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------

def cmd_forward(args, catalog) -> int:
    model = load_model(args.model)
    if args.height_sweep and not (args.height is not None or args.heights):
        args.heights = "0.0"  # placeholder, replaced by the sweep
    elements, scale = _elements_for(args, catalog)
    if args.height_sweep:
        heights = _parse_linear_sweep(args.height_sweep)
        swept = []
        for h in heights:
            swept.extend(el._replace(height=float(h)) for el in elements)
        elements = tuple(dict.fromkeys(swept))
    elif args.freq_sweep:
        freqs = _parse_log_sweep(args.freq_sweep, args.points)
        swept = []
        for el in elements:
            for f in freqs:
                swept.append(el._replace(frequency=float(f)))
        elements = tuple(dict.fromkeys(swept))
    values = [forward.response_element(model, el).m_value for el in elements]
    if args.format == "json":
        text = reporting.canonical_json(
            reporting.response_payload(elements, values, scale))
    else:
        text = reporting.response_csv(elements, values, scale)
    _emit(text, args.out)
    return 0


def cmd_diag(args, catalog) -> int:
    model = load_model(args.model)
    if args.diag_command == "skin":
        _emit(reporting.canonical_json(
            reporting.skin_depth_payload(model, args.freq)), args.out)
        return 0

    elements, _ = _elements_for(args, catalog)
    if args.diag_command == "beta":
        if args.format == "json":
            text = reporting.canonical_json(
                reporting.skin_beta_payload(model, elements))
        else:
            text = reporting.skin_beta_csv(model, elements)
        _emit(text, args.out)
        return 0

    grid = diagnostics.DepthGrid(args.dz, args.zmax)
    if args.diag_command in ("sens", "cum"):
        el = elements[args.element]
        profile = diagnostics.sensitivity_analytic(model, el, grid)
        if args.diag_command == "sens":
            _emit(reporting.sensitivity_csv(profile), args.out)
        else:
            depths, cum = diagnostics.cumulative_response(profile)
            _emit(reporting.csv_text(("depth_m", "cumulative"),
                                     zip(depths, cum)), args.out)
        return 0
    if args.diag_command == "doi":
        estimates = [diagnostics.depth_of_investigation(
            model, el, args.tau, grid) for el in elements]
        if args.format == "json":
            text = reporting.canonical_json(reporting.doi_payload(estimates))
        else:
            text = reporting.doi_csv(estimates)
        _emit(text, args.out)
        return 0
    raise CliError(f"unknown diag subcommand {args.diag_command!r}")


def cmd_synth(args, catalog) -> int:
    model = load_model(args.model)
    elements, scale = _elements_for(args, catalog)
    clean = forward.response_batch(model, elements)
    noisy = inversion.add_noise(clean, args.noise, args.seed)
    _emit(reporting.response_csv(noisy.elements, noisy.values, scale),
          args.out)
    return 0


def _grid_model(args, elements) -> LayeredEarth:
    if args.grid:
        return load_model(args.grid)
    if args.cells:
        thick = [args.dz] * (args.cells - 1)
        return LayeredEarth([1e-3] * args.cells, [1.0] * args.cells, thick)
    raise CliError("provide --grid model.json or --cells N [--dz D]")


def cmd_invert(args, catalog) -> int:
    text = Path(args.data).read_text()
    elements, values = reporting.parse_response_csv(text)
    grid_model = _grid_model(args, elements)
    opts = inversion.InversionOptions(
        method=args.method,
        component=args.component,
        mode=args.mode,
        regularizer=inversion.Regularizer(args.reg),
        rank=args.rank,
        noise_level=args.discrepancy or 0.0,
        max_iterations=args.max_iter,
        x_bar=args.x_bar,
    )
    problem = inversion.InversionProblem(elements, values, grid_model, opts)
    x0 = None
    if args.grid:
        x0 = np.array(grid_model.sigma if args.mode == "sigma"
                      else grid_model.mu_r, dtype=float)
    result = inversion.iterate(problem, x0)
    report = reporting.inversion_report(result, problem, grid_model)
    _emit(reporting.canonical_json(report), args.out)
    return 0


def cmd_devices(args, catalog) -> int:
    if args.devices_command == "list":
        payload = {"devices": [devicedb.entry_to_dict(e)
                               for e in catalog.list()]}
        _emit(reporting.canonical_json(payload), args.out)
        return 0
    if args.devices_command == "show":
        entry = catalog.lookup(args.name)
        _emit(reporting.canonical_json(devicedb.entry_to_dict(entry)),
              args.out)
        return 0
    if args.devices_command == "add":
        data = json.loads(Path(args.file).read_text())
        entry = devicedb.entry_from_dict(data)
        catalog.upsert(entry)
        _emit(reporting.canonical_json({"added": entry.name}), args.out)
        return 0
    if args.devices_command == "remove":
        catalog.remove(args.name, force=args.force)
        _emit(reporting.canonical_json({"removed": args.name}), args.out)
        return 0
    raise CliError(f"unknown devices subcommand {args.devices_command!r}")


def cmd_figures(args, catalog) -> int:
    names = figures.write_all(args.outdir)
    _emit(reporting.canonical_json({"written": names,
                                    "outdir": str(args.outdir)}), None)
    return 0


def cmd_serve(args, catalog) -> int:  # pragma: no cover - network loop
    import uvicorn

    from .service import create_app
    uvicorn.run(create_app(catalog=catalog), host=args.host, port=args.port,
                log_level="warning")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdem1d",
        description="Loop-loop EMI forward modelling, survey diagnostics "
                    "and regularized inversion over layered half-spaces.")
    parser.add_argument("--catalog", help="device catalog JSON path")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_geometry_flags(p):
        p.add_argument("--device", help="device name from the catalog")
        p.add_argument("--geometry", help="geometry JSON file")
        p.add_argument("--height", type=float, help="single probe height, m")
        p.add_argument("--heights", help="comma-separated heights, m")
        p.add_argument("--freqs",
                       help="comma-separated frequencies, Hz "
                            "(multi-frequency devices)")

    p = sub.add_parser("forward", help="compute responses or sweeps")
    p.add_argument("--model", required=True)
    add_geometry_flags(p)
    p.add_argument("--height-sweep", help="start:step:stop heights, m")
    p.add_argument("--freq-sweep", help="min:log:max frequencies, Hz")
    p.add_argument("--points", type=int, default=DEFAULT_SWEEP_POINTS,
                   help="points in a log sweep")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_forward)

    p = sub.add_parser("diag", help="survey-design diagnostics")
    dsub = p.add_subparsers(dest="diag_command", required=True)
    for name, helptext in (("skin", "layered skin depth"),
                           ("beta", "skin depth + induction numbers"),
                           ("sens", "sensitivity profile CSV"),
                           ("cum", "cumulative sensitivity CSV"),
                           ("doi", "depth of investigation")):
        d = dsub.add_parser(name, help=helptext)
        d.add_argument("--model", required=True)
        if name == "skin":
            d.add_argument("--freq", type=float, required=True)
        else:
            add_geometry_flags(d)
        if name in ("sens", "cum", "doi"):
            d.add_argument("--dz", type=float, default=0.1)
            d.add_argument("--zmax", type=float, default=15.0)
        if name in ("sens", "cum"):
            d.add_argument("--element", type=int, default=0,
                           help="element index within the geometry")
        if name == "doi":
            d.add_argument("--tau", type=float,
                           default=diagnostics.DOI_TAU)
        d.add_argument("--format", choices=("csv", "json"), default="csv")
        d.add_argument("--out")
        d.set_defaults(func=cmd_diag)

    p = sub.add_parser("synth", help="seeded noisy synthetic dataset")
    p.add_argument("--model", required=True)
    add_geometry_flags(p)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("invert", help="invert a response dataset")
    p.add_argument("--data", required=True, help="response CSV")
    p.add_argument("--mode", choices=("sigma", "mu"), default="sigma")
    p.add_argument("--method", choices=inversion.METHODS, default="GN")
    p.add_argument("--component", choices=inversion.COMPONENTS,
                   default="complex")
    p.add_argument("--reg", choices=("identity", "d1", "d2"),
                   default="identity")
    p.add_argument("--rank", type=int)
    p.add_argument("--discrepancy", type=float,
                   help="relative noise level for the discrepancy rule")
    p.add_argument("--max-iter", type=int, default=30)
    p.add_argument("--x-bar", type=float)
    p.add_argument("--grid", help="layered model JSON fixing the grid")
    p.add_argument("--cells", type=int, help="uniform grid cell count")
    p.add_argument("--dz", type=float, default=0.1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("devices", help="device catalog management")
    dsub = p.add_subparsers(dest="devices_command", required=True)
    d = dsub.add_parser("list")
    d.add_argument("--out")
    d.set_defaults(func=cmd_devices)
    d = dsub.add_parser("show")
    d.add_argument("name")
    d.add_argument("--out")
    d.set_defaults(func=cmd_devices)
    d = dsub.add_parser("add")
    d.add_argument("file", help="device entry JSON")
    d.add_argument("--out")
    d.set_defaults(func=cmd_devices)
    d = dsub.add_parser("remove")
    d.add_argument("name")
    d.add_argument("--force", action="store_true")
    d.add_argument("--out")
    d.set_defaults(func=cmd_devices)

    p = sub.add_parser("figures", help="regenerate the example datasets")
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_figures)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8781)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        catalog = devicedb.DeviceCatalog(path=args.catalog) \
            if args.catalog else devicedb.DeviceCatalog()
        return args.func(args, catalog)
    except (CliError, ModelError, QuadratureError, devicedb.DeviceError,
            inversion.InversionError, diagnostics.DiagnosticsError,
            ValueError, OSError) as exc:
        sys.stderr.write(json.dumps(
            {"error": {"type": type(exc).__name__, "message": str(exc)}})
            + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
