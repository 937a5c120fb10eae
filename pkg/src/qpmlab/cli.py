"""Command-line front end: turns the solvers into CSV/JSON data files.

Every command writes its data to ``--out`` (or stdout) and, when writing a
file, a ``<out>.manifest.json`` next to it recording parameters, crystal file
checksum, tool version and caveats. Exit codes: 0 success, 1 solver failure,
2 usage error.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import io
import json
import math
import sys
from decimal import Decimal
from pathlib import Path

import numpy as np

from . import __version__
from .dispersion import load_crystal
from .errors import QpmError
from .qpm import (
    ProcessType,
    QpmProcess,
    effective_nonlinearity,
    find_crossings,
    period_curve,
)
from .spectra import (
    auto_half_window,
    jsi,
    linewidth_to_nm,
    spectrum,
    tuning_curve,
)

NARROW_LINEWIDTH_HZ = 10e6
UV_CAVEAT = "uv-edge-dispersion"


def _odd_order(text):
    try:
        m = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"order must be an integer, got {text!r}") from None
    if m < 1 or m % 2 == 0:
        raise argparse.ArgumentTypeError(
            f"order {m} is not an odd positive integer (even orders have G_m = 0)"
        )
    return m


def _order_list(text):
    return [_odd_order(part) for part in text.split(",") if part.strip()]


def _process_type(text):
    try:
        return ProcessType.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _pair(text):
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO,HI, got {text!r}") from None
    if not lo < hi:
        raise argparse.ArgumentTypeError(f"expected LO < HI, got {text!r}")
    return lo, hi


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def _fmt(v, digits=6):
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    return f"{v:.{digits}f}"


class Output:
    """Collects one data file plus its manifest."""

    def __init__(self, args, crystal):
        self.args = args
        self.crystal = crystal
        self.caveats = set()
        self.results = {}
        self.sidecars = {}

    def flag_uv(self, *wavelengths_um):
        for model in (self.crystal.model_y, self.crystal.model_z):
            lam = [w for w in wavelengths_um if w is not None and not math.isnan(w)]
            if lam and model.beyond_uv_edge(lam):
                self.caveats.add(UV_CAVEAT)

    def manifest_name(self):
        return Path(self.args.out).name + ".manifest.json"

    def write_csv(self, columns, rows):
        buf = io.StringIO()
        if self.args.out:
            buf.write(f"# manifest: {self.manifest_name()}\n")
        buf.write("# " + ",".join(columns) + "\n")
        for row in rows:
            buf.write(",".join(row) + "\n")
        self._emit(buf.getvalue())

    def write_json(self, payload):
        if self.args.out:
            payload = {"manifest": self.manifest_name(), **payload}
        self._emit(json.dumps(payload, indent=2, sort_keys=True) + "\n")

    def _emit(self, text):
        if self.args.out:
            Path(self.args.out).write_text(text, encoding="utf-8", newline="\n")
        else:
            sys.stdout.write(text)

    def add_sidecar(self, suffix, payload):
        self.sidecars[suffix] = payload

    def finish(self):
        for suffix, payload in self.sidecars.items():
            path = Path(str(self.args.out) + suffix) if self.args.out else None
            text = json.dumps(
                {"manifest": self.manifest_name() if path else None, **payload},
                indent=2,
                sort_keys=True,
            ) + "\n"
            if path:
                path.write_text(text, encoding="utf-8", newline="\n")
            else:
                sys.stdout.write(text)
        if UV_CAVEAT in self.caveats:
            print(
                "warning: wavelengths below the UV edge of the dispersion data; "
                "results there carry extra model uncertainty",
                file=sys.stderr,
            )
        if not self.args.out:
            return
        params = {
            k: (v.label if isinstance(v, ProcessType) else v)
            for k, v in sorted(vars(self.args).items())
            if k not in ("func", "out")
        }
        manifest = {
            "command": self.args.command,
            "parameters": params,
            "crystal": {
                "name": self.crystal.name,
                "file": Path(self.crystal.path).name,
                "sha256": self.crystal.checksum,
                "length_mm": self.crystal.length,
                "poling_period_um": self.crystal.poling_period,
            },
            "tool_version": __version__,
            "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
            "caveats": sorted(self.caveats),
            "outputs": [Path(self.args.out).name]
            + [Path(str(self.args.out) + s).name for s in self.sidecars],
            "results": self.results,
        }
        path = Path(self.args.out).with_name(self.manifest_name())
        path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _crystal(args):
    return load_crystal(
        args.crystal,
        length=getattr(args, "length", None),
        poling_period=getattr(args, "period", None),
    )


def cmd_crossings(args, out):
    crystal = out.crystal
    rows = []
    for m in args.orders:
        for kind in ProcessType:
            proc = QpmProcess(kind, m)
            nl = effective_nonlinearity(proc, crystal)
            for c in find_crossings(crystal, proc, args.temp):
                out.flag_uv(c.pump)
                pump_nm = _fmt(c.pump * 1e3, 4)
                # degenerate arms are exactly twice the printed pump
                arm_nm = str(2 * Decimal(pump_nm)) if pump_nm else ""
                rows.append(
                    [
                        str(m),
                        kind.label,
                        kind.lab_polarizations,
                        pump_nm,
                        arm_nm,
                        arm_nm,
                        _fmt(nl.d_z_magnitude, 4),
                        _fmt(nl.g_m, 6),
                        _fmt(crystal.poling_period, 4),
                        "1" if c.feasible else "0",
                    ]
                )
    out.write_csv(
        [
            "order", "type", "polarization", "pump_nm", "signal_nm", "idler_nm",
            "d_z_pm_per_V", "g_m", "period_um", "feasible",
        ],
        rows,
    )


def cmd_period_scan(args, out):
    proc = QpmProcess(args.type, args.order)
    lo, hi = args.pump_range
    pts = period_curve(out.crystal, proc, (lo * 1e-3, hi * 1e-3), args.temp, args.samples)
    out.flag_uv(lo * 1e-3)
    out.write_csv(
        ["pump_nm", "period_um", "feasible"],
        [[_fmt(p.pump * 1e3, 6), _fmt(p.period, 6), "1" if p.feasible else "0"] for p in pts],
    )


def cmd_tuning_curve(args, out):
    proc = QpmProcess(args.type, args.order)
    pump = args.pump * 1e-3
    out.flag_uv(pump)
    curve = tuning_curve(out.crystal, proc, pump, args.temp_range, args.step)
    by_t = {p.temperature: p for p in curve.points}
    rows = []
    for t in np.arange(args.temp_range[0], args.temp_range[1] + args.step / 2, args.step):
        p = by_t.get(float(t))
        if p is None:
            rows.append([_fmt(float(t), 3), "", "", "", "", "", "0"])
        else:
            rows.append(
                [
                    _fmt(p.temperature, 3), _fmt(p.signal * 1e3, 4), _fmt(p.idler * 1e3, 4),
                    p.signal_axis, p.idler_axis, "1" if p.degenerate else "0", "1",
                ]
            )
    out.results["degenerate_temperature_c"] = (
        None if curve.degenerate_temperature is None else round(curve.degenerate_temperature, 4)
    )
    out.results["points_in_range"] = len(curve.points)
    out.write_csv(
        ["temperature_c", "signal_nm", "idler_nm", "signal_axis", "idler_axis",
         "degenerate", "in_range"],
        rows,
    )


def cmd_spectrum(args, out):
    proc = QpmProcess(args.type, args.order)
    pump = args.pump * 1e-3
    out.flag_uv(pump)
    if args.window:
        window = (args.window[0] * 1e-3, args.window[1] * 1e-3)
    else:
        half = auto_half_window(out.crystal, proc, pump, args.temp)
        window = (2 * pump - half, 2 * pump + half)
    sp = spectrum(out.crystal, proc, pump, args.temp, window, args.samples)
    out.results["arms"] = [
        {"arm": a.name, "axis": a.axis, "peak_nm": round(a.peak * 1e3, 6),
         "fwhm_nm": round(a.fwhm * 1e3, 6)}
        for a in sp.arms
    ]
    out.results["window_nm"] = [round(window[0] * 1e3, 6), round(window[1] * 1e3, 6)]
    out.write_csv(
        ["signal_nm", "intensity"],
        [[_fmt(x * 1e3, 6), f"{y:.8e}"] for x, y in zip(sp.wavelengths, sp.intensity)],
    )


def cmd_jsi(args, out):
    proc = QpmProcess(args.type, args.order)
    pump = args.pump * 1e-3
    out.flag_uv(pump)
    bandwidth = args.bandwidth
    if bandwidth is None:
        bandwidth = linewidth_to_nm(NARROW_LINEWIDTH_HZ, pump)
    half = args.half_window * 1e-3 if args.half_window else None
    grid = jsi(out.crystal, proc, pump, bandwidth, args.temp, n=args.grid, half_window=half)
    out.results["bandwidth_nm"] = bandwidth
    out.results["principal_axis_slope"] = round(grid.principal_axis_slope(), 6)
    out.write_csv(
        [f"intensity[signal_index][idler_index] ({args.grid}x{args.grid}, rows=signal)"],
        [[f"{v:.6e}" for v in row] for row in grid.values],
    )
    out.add_sidecar(
        ".axes.json",
        {
            "signal_nm": [round(v * 1e3, 6) for v in grid.signal_wavelengths],
            "idler_nm": [round(v * 1e3, 6) for v in grid.idler_wavelengths],
            "pump_nm": args.pump,
            "bandwidth_nm": bandwidth,
            "temperature_c": args.temp,
            "process": str(proc),
        },
    )


def cmd_nonlinearity(args, out):
    proc = QpmProcess(args.type, args.order)
    nl = effective_nonlinearity(proc, out.crystal)
    out.write_json(
        {
            "type": args.type.label,
            "order": args.order,
            "polarization": args.type.lab_polarizations,
            "d_coefficient": nl.d_key,
            "d_eff_pm_per_V": nl.d_eff,
            "g_m": nl.g_m,
            "d_z_magnitude_pm_per_V": round(nl.d_z_magnitude, 6),
            "k_m_rad_per_um": nl.k_m,
        }
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qpmlab",
        description="Quasi-phase-matching calculations for periodically poled KTP.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--crystal", default="ktp.json",
                        help="crystal data file (path, or name on QPMLAB_CRYSTAL_DIR)")
    common.add_argument("-o", "--out", help="output file; a .manifest.json is written beside it")
    proc_args = argparse.ArgumentParser(add_help=False)
    proc_args.add_argument("--type", type=_process_type, required=True, help="0, I or II")
    proc_args.add_argument("--order", type=_odd_order, required=True, help="odd poling order")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("crossings", parents=[common], help="degenerate cross points at a period")
    p.add_argument("--period", type=_positive, default=None, help="poling period, um")
    p.add_argument("--temp", type=float, default=25.0, help="temperature, C")
    p.add_argument("--orders", type=_order_list, default=[1, 3, 5], help="e.g. 1,3,5")
    p.set_defaults(func=cmd_crossings)

    p = sub.add_parser("period-scan", parents=[common, proc_args], help="period vs pump")
    p.add_argument("--pump-range", type=_pair, required=True, help="LO,HI in nm")
    p.add_argument("--temp", type=float, default=25.0)
    p.add_argument("--samples", type=int, default=201)
    p.add_argument("--period", type=_positive, default=None, help="poling period, um")
    p.set_defaults(func=cmd_period_scan)

    p = sub.add_parser("tuning-curve", parents=[common, proc_args], help="signal/idler vs T")
    p.add_argument("--pump", type=_positive, required=True, help="pump wavelength, nm")
    p.add_argument("--temp-range", type=_pair, required=True, help="LO,HI in C")
    p.add_argument("--step", type=_positive, default=1.0, help="temperature step, C")
    p.add_argument("--period", type=_positive, default=None)
    p.set_defaults(func=cmd_tuning_curve)

    p = sub.add_parser("spectrum", parents=[common, proc_args], help="sinc^2 spectrum")
    p.add_argument("--pump", type=_positive, required=True, help="pump wavelength, nm")
    p.add_argument("--temp", type=float, required=True)
    p.add_argument("--window", type=_pair, default=None,
                   help="signal window LO,HI in nm (default: automatic)")
    p.add_argument("--samples", type=int, default=2001)
    p.add_argument("--period", type=_positive, default=None)
    p.add_argument("--length", type=_positive, default=None, help="crystal length, mm")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("jsi", parents=[common, proc_args], help="joint spectral intensity")
    p.add_argument("--pump", type=_positive, required=True, help="pump center, nm")
    p.add_argument("--bandwidth", type=_positive, default=None,
                   help="pump FWHM in nm (default: 10 MHz linewidth)")
    p.add_argument("--temp", type=float, required=True)
    p.add_argument("--grid", type=int, default=256, help="points per axis")
    p.add_argument("--half-window", type=_positive, default=None,
                   help="half width around 2*pump, nm (default: automatic)")
    p.add_argument("--period", type=_positive, default=None)
    p.add_argument("--length", type=_positive, default=None, help="crystal length, mm")
    p.set_defaults(func=cmd_jsi)

    p = sub.add_parser("nonlinearity", parents=[common, proc_args], help="d_eff and G_m")
    p.add_argument("--period", type=_positive, default=None)
    p.set_defaults(func=cmd_nonlinearity)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "samples", 2) < 2 or getattr(args, "grid", 3) < 3:
        parser.error("--samples must be >= 2 and --grid >= 3")
    try:
        crystal = _crystal(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: cannot load crystal file: {exc}", file=sys.stderr)
        return 2
    out = Output(args, crystal)
    try:
        args.func(args, out)
    except (QpmError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out.finish()
    return 0


if __name__ == "__main__":
    sys.exit(main())
