"""Command-line front end.

Exit codes: 0 success (no-coupling included), 2 config/usage error,
3 I/O error, 4 comparison-domain error.
"""

from __future__ import annotations

import argparse
import math
import sys

from . import campaign, engine
from .config import ConfigError, builtin_configs, resolve_config
from .geometry import SPEED_OF_LIGHT
from .units import dbm_to_watts

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_DOMAIN = 4

PATHLOSS_MODELS = ("refined", "legacy") + engine.CLOSED_FORMS


def _power_line(name: str, result: engine.PowerResult) -> str:
    if result.no_coupling:
        return f"{name:<10s} no-coupling"
    return f"{name:<10s} Pr = {result.pr_dbm:12.6f} dBm   PL = {result.pl_db:12.6f} dB"


def _model_result(s: engine.Scenario, name: str, legacy_gain: float, workers: int) -> engine.PowerResult:
    if name == "refined":
        return engine.received_power_general_refined(s, workers)
    if name == "legacy":
        return engine.received_power_general_legacy(s, legacy_gain, workers)
    return engine.closed_form_power(s, name)


def cmd_pathloss(args) -> int:
    s = resolve_config(args.config).build()
    models = PATHLOSS_MODELS if args.model == "all" else (args.model,)
    for name in models:
        try:
            print(_power_line(name, _model_result(s, name, args.legacy_gain, args.workers)))
        except ValueError as exc:
            # closed forms that need a uniform |gamma|
            if args.model != "all":
                raise ConfigError(f"coding: {exc}") from None
            print(f"{name:<10s} n/a ({exc})")
    return EXIT_OK


def cmd_sweep(args) -> int:
    if not args.step > 0:
        raise _UsageError("--step must be positive")
    s = resolve_config(args.config).build()
    models = ["refined"]
    if args.legacy:
        models.append("legacy")
    if args.closed_form:
        models.append(args.closed_form)
    try:
        if args.kind == "angle":
            table = engine.sweep_angle(
                s, args.start, args.stop, args.step, models, args.legacy_gain, workers=args.workers
            )
        else:
            table = engine.sweep_distance(
                s, args.start, args.stop, args.step, models=models, legacy_gain=args.legacy_gain, workers=args.workers
            )
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    # rename the closed-form column to its on-disk name
    if args.closed_form:
        table.columns["closedform"] = table.columns.pop(args.closed_form)
    campaign.write_sweep_csv(args.out, table)
    print(f"wrote {table.x.size} rows to {args.out}")
    return EXIT_OK


def cmd_compare(args) -> int:
    model = campaign.read_sweep_csv(args.model, args.kind)
    meas = campaign.load_measurements(args.measurements, args.kind)
    if args.column not in model.columns:
        raise _UsageError(f"model file has no column {args.column}_dbm")
    result = campaign.compare(model, meas, args.column)
    print(f"rmse = {result['rmse_db']:.2f} dB   bias = {result['bias_db']:+.2f} dB   n = {result['n']}")
    if args.residuals:
        campaign.write_residuals(args.residuals, result)
    return EXIT_OK


def cmd_spa(args) -> int:
    pu = args.pu_mw * 1e-3
    if args.compare:
        f1, f2 = (f * 1e9 for f in args.compare)
        res = campaign.spa_compare(f1, f2, pu, tuple(args.cell_wavelengths))
        for key in ("low", "high"):
            r = res[key]
            print(
                f"{key:<5s} area = {r.area:.6e} m^2   energy efficiency = {r.energy_efficiency:.6e} m^2/W   "
                f"power density = {r.power_density:.6e} W/m^2"
            )
        print(f"energy efficiency ratio = {res['energy_efficiency_ratio']:.4f}")
        print(f"power density ratio = {res['power_density_ratio']:.4f}")
        print(f"area efficiency ratio = {res['area_efficiency_ratio']:.4f}")
        return EXIT_OK
    if None in (args.dx_mm, args.dy_mm, args.f_ghz):
        raise _UsageError("spa needs --dx-mm, --dy-mm and --f-ghz (or --compare F1 F2)")
    r = campaign.spa_metrics(args.dx_mm * 1e-3, args.dy_mm * 1e-3, args.f_ghz * 1e9, pu)
    print(f"scattering performance = {r.scattering:.6e} m^2")
    print(f"unit-cell power = {r.power:.6e} W")
    print(f"area = {r.area:.6e} m^2")
    print(f"energy efficiency = {r.energy_efficiency:.6e} m^2/W")
    print(f"area efficiency = {r.area_efficiency:.6f}")
    print(f"power density = {r.power_density:.6e} W/m^2")
    return EXIT_OK


def cmd_calibrate(args) -> int:
    lam = SPEED_OF_LIGHT / (args.f_ghz * 1e9)
    gain = campaign.calibration_gain(dbm_to_watts(args.pt_dbm), dbm_to_watts(args.pr_dbm), args.d_m, lam)
    print(f"GtGrGline = {gain:.2f} dB")
    if gain > args.budget_db:
        print(
            f"warning: measured gain exceeds the nominal antenna budget of {args.budget_db:.2f} dB "
            f"(implies Gline > 0 dB)",
            file=sys.stderr,
        )
    return EXIT_OK


def cmd_design(args) -> int:
    cfg = resolve_config(args.config)
    rmap = cfg.reflection()
    out = sys.stdout if args.out == "-" else open(args.out, "w", newline="", encoding="utf-8")
    try:
        out.write("n,m,amp,phase_deg\n")
        amp = rmap.amplitude
        phase = rmap.phase
        for n in range(rmap.grid.rows):
            for m in range(rmap.grid.cols):
                out.write(f"{n + 1},{m + 1},{amp[n, m]:.6f},{math.degrees(phase[n, m]):.6f}\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rispl", description="RIS free-space path-loss models")
    sub = parser.add_subparsers(dest="command", required=True)
    config_help = f"scenario JSON file or a shipped config name ({', '.join(builtin_configs())})"

    p = sub.add_parser("pathloss", help="received power and path loss of one scenario")
    p.add_argument("--config", required=True, help=config_help)
    p.add_argument("--model", default="refined", choices=PATHLOSS_MODELS + ("all",))
    p.add_argument("--legacy-gain", type=float, default=engine.LEGACY_SCATTERING_GAIN)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_pathloss)

    p = sub.add_parser("sweep", help="angle or distance sweep to CSV")
    p.add_argument("--config", required=True, help=config_help)
    p.add_argument("--kind", required=True, choices=("angle", "distance"))
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--legacy", action="store_true", help="add the legacy_dbm column")
    p.add_argument("--closed-form", choices=engine.CLOSED_FORMS, help="add a closedform_dbm column")
    p.add_argument("--legacy-gain", type=float, default=engine.LEGACY_SCATTERING_GAIN)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", help="RMSE/bias of a measurement file against a sweep CSV")
    p.add_argument("--model", required=True, help="sweep CSV written by 'rispl sweep'")
    p.add_argument("--measurements", required=True, help="CSV with header x,power_dbm")
    p.add_argument("--kind", required=True, choices=("angle", "distance"))
    p.add_argument("--column", default="refined", help="model column to compare (default: refined)")
    p.add_argument("--residuals", help="write per-point residuals CSV here")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("spa", help="unit-cell scattering/power/area metrics")
    p.add_argument("--dx-mm", type=float)
    p.add_argument("--dy-mm", type=float)
    p.add_argument("--f-ghz", type=float)
    p.add_argument("--pu-mw", type=float, required=True)
    p.add_argument("--compare", type=float, nargs=2, metavar=("F1_GHZ", "F2_GHZ"))
    p.add_argument("--cell-wavelengths", type=float, nargs=2, default=(0.5, 0.5), metavar=("DX", "DY"))
    p.set_defaults(func=cmd_spa)

    p = sub.add_parser("calibrate", help="G_t G_r G_line from an aligned free-space measurement")
    p.add_argument("--pt-dbm", type=float, required=True)
    p.add_argument("--pr-dbm", type=float, required=True)
    p.add_argument("--d-m", type=float, required=True)
    p.add_argument("--f-ghz", type=float, required=True)
    p.add_argument(
        "--budget-db", type=float, default=0.0, help="nominal G_t G_r in dB; warn when the result exceeds it"
    )
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("design", help="emit the reflection map as CSV n,m,amp,phase_deg")
    p.add_argument("--config", required=True, help=config_help)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_design)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        parser.error(str(exc))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except campaign.ComparisonDomainError as exc:
        print(f"comparison error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (OSError, campaign.MeasurementFormatError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
