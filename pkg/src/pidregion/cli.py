"""Command-line entry point: ``pidregion <command> <plant-file> [options]``."""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .errors import PidRegionError, PlantFileError
from .io import export_region, parse_family, parse_plant_file
from .kp_analysis import kp_plot, merge_intervals, stability_peaks
from .plant import PlantModel
from .region import _slice_dict, build_region
from .robust import PlantFamily, member_stable, robust_intervals, robust_slice_record
from .slicing import compute_slice, verify_point
from .svg import kp_plot_svg, slice_svg

USAGE_ERROR, DIAGNOSTIC = 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _g(v) -> str:
    return f"{v:.6g}" if isinstance(v, float) else str(v)


def _table(rows: list[list], header: list[str]) -> str:
    cells = [header] + [[_g(v) for v in r] for r in rows]
    widths = [max(len(r[k]) for r in cells) for k in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells)


def _family(args) -> PlantFamily:
    if args.from_tf:
        num, den = ([float(x) for x in s.split(",")] for s in args.from_tf)
        entry = {"num": num, "den": den, "domain": args.domain, "delay": args.delay}
        return parse_family({"plant": entry}, "--from-tf")
    if not args.file:
        raise UsageError("a plant file or --from-tf num den is required")
    return parse_plant_file(args.file)


def _omega_max(plant: PlantModel):
    if plant.is_delay and plant.delay > 0:
        from .delay import z_cutoff
        return z_cutoff(plant)
    return None


def _emit(text: str, out_file: str | None):
    if out_file:
        Path(out_file).write_text(text)
    else:
        sys.stdout.write(text)


# --- commands -----------------------------------------------------------------------

def cmd_kp_plot(args, fam: PlantFamily) -> int:
    if not 0 <= args.member < len(fam):
        raise UsageError(f"--member must be in 0..{len(fam) - 1}")
    plant = fam.members[args.member]
    plot = kp_plot(plant, fam.region, tuple(args.range) if args.range else None,
                   samples=args.samples, omega_max=_omega_max(plant))
    if args.out == "svg":
        _emit(kp_plot_svg(plot, fam.region), args.output)
        return 0
    sink = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        w = csv.writer(sink, lineterminator="\n")
        w.writerow(["param", "r3"])
        for x, y in plot.samples:
            w.writerow([repr(float(x)), repr(float(y))])
    finally:
        if args.output:
            sink.close()
    return 0


def cmd_intervals(args, fam: PlantFamily) -> int:
    cells = robust_intervals(fam, tuple(args.range) if args.range else None)
    if args.json:
        print(json.dumps({"intervals": [c.to_dict() for c in cells],
                          "union": [list(u) for u in merge_intervals(cells)]}, indent=1))
        return 0
    if len(fam) > 1:
        print(f"robust intervals over {len(fam)} plants")
    rows = [[c.lo, c.hi, c.Z, c.required_Z, "yes" if c.admissible else "no", c.sufficiency]
            for c in cells]
    print(_table(rows, ["lo", "hi", "Z", "required_Z", "admissible", "sufficiency"]))
    union = merge_intervals(cells)
    if union:
        print("admissible union: " + " U ".join(f"({_g(a)}, {_g(b)})" for a, b in union))
    else:
        print("admissible union: empty")
    return 0


def cmd_slice(args, fam: PlantFamily) -> int:
    sl = robust_slice_record(fam, args.r3) if len(fam) > 1 else compute_slice(fam.members[0], fam.region, args.r3)
    if args.out == "json":
        d = _slice_dict(sl)
        d["stable_polygon_count"] = len(sl.stable_polygons)
        _emit(json.dumps(d, indent=1) + "\n", args.output)
        return 0
    if args.out == "svg":
        _emit(slice_svg(sl, fam.region), args.output)
        return 0
    print(f"r3 = {_g(sl.r3)}")
    print("singular frequencies: " + ", ".join(_g(f.param) for f in sl.frequencies))
    rows = [[ln.source.param, ln.h1, ln.h2, ln.h0, ln.e1, ln.e2,
             "?" if ln.gain is None else ln.gain] for ln in sl.lines]
    print(_table(rows, ["param", "h1", "h2", "h0", "e1", "e2", "gain"]))
    print(f"stable polygons: {len(sl.stable_polygons)}")
    for k, f in enumerate(sl.stable_polygons):
        vs = ", ".join(f"({_g(x)}, {_g(y)})" for x, y in f.vertices)
        print(f"  [{k}]{' truncated' if f.truncated else ''} {vs}")
    return 0


def cmd_region(args, fam: PlantFamily) -> int:
    reg = build_region(fam, per_interval_count=args.grid, refine_depth=args.refine,
                       workers=args.workers, peaks=not args.no_peaks)
    if args.out:
        paths = export_region(reg, args.out, "json") + export_region(reg, args.out, "svg-slices")
        print(f"wrote {len(paths)} files to {args.out} ({len(reg.slices)} slices, "
              f"{len(reg.failures)} failed)")
    else:
        sys.stdout.write(reg.to_json())
    return 0


def cmd_check(args, fam: PlantFamily) -> int:
    verdicts = []
    for m in fam.members:
        label = m.name or f"plant {fam.members.index(m)}"
        if m.is_delay and m.delay > 0:
            from .delay import quasi_stability_check
            q = quasi_stability_check(m, args.ki, args.kp, args.kd)
            ok = member_stable(m, fam.region, args.ki, args.kd, args.kp)
            detail = f"roots in closed right half-plane: {q.unstable_roots}"
        else:
            c = verify_point(m, fam.region, args.ki, args.kd, args.kp)
            ok = c.inside == m.order
            detail = f"inside {c.inside}, on boundary {c.on_boundary}, outside {c.outside}"
        verdicts.append(ok)
        prefix = f"{label}: " if len(fam) > 1 else ""
        print(f"{prefix}{'stable' if ok else 'unstable'} ({detail})")
    if len(fam) > 1:
        print("robust: " + ("stable" if all(verdicts) else "unstable"))
    return 0


def cmd_peaks(args, fam: PlantFamily) -> int:
    if len(fam) > 1:
        raise UsageError("peaks needs a single plant")
    plant = fam.members[0]
    rows = []
    for c in robust_intervals(fam):
        for p in stability_peaks(plant, c, fam.region):
            rows.append([p.kP, p.kI, p.kD, p.omegas[0], p.omegas[1], p.omegas[2],
                         "yes" if p.remainder_stable else "no", "yes" if p.collapsing else "no",
                         "yes" if p.is_peak else "no"])
    if not rows:
        print("no triple line concurrencies in the admissible intervals")
        return 0
    print(_table(rows, ["kP", "kI", "kD", "w1", "w2", "w3", "rest_stable", "collapsing", "peak"]))
    return 0


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="pidregion", description="Stabilizing PID gain sets from (A, B) plant files.")
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("file", nargs="?", help="plant JSON file")
        p.add_argument("--from-tf", nargs=2, metavar=("NUM", "DEN"),
                       help="comma-separated ascending coefficients of the plant numerator and denominator")
        p.add_argument("--domain", default="continuous", choices=["continuous", "discrete", "delay"])
        p.add_argument("--delay", type=float, default=0.0)
        p.set_defaults(fn=fn)
        return p

    p = add("kp-plot", cmd_kp_plot, "sample the r3-plot")
    p.add_argument("--range", nargs=2, type=float, metavar=("A", "B"))
    p.add_argument("--out", choices=["svg", "csv"], default="csv")
    p.add_argument("--output", "-o")
    p.add_argument("--samples", type=int, default=400)
    p.add_argument("--member", type=int, default=0)

    p = add("intervals", cmd_intervals, "admissible r3 intervals")
    p.add_argument("--range", nargs=2, type=float, metavar=("A", "B"))
    p.add_argument("--json", action="store_true")

    p = add("slice", cmd_slice, "stable polygons at fixed r3")
    p.add_argument("--r3", "--kp", dest="r3", type=float, required=True)
    p.add_argument("--out", choices=["svg", "json", "text"], default="text")
    p.add_argument("--output", "-o")

    p = add("region", cmd_region, "slice stack over all admissible intervals")
    p.add_argument("--grid", type=int, default=30)
    p.add_argument("--refine", type=int, default=2)
    p.add_argument("--out", help="output directory (region.json and one svg per slice)")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--no-peaks", action="store_true")

    p = add("check", cmd_check, "stability of one gain triple")
    p.add_argument("--kp", type=float, required=True)
    p.add_argument("--ki", type=float, required=True)
    p.add_argument("--kd", type=float, required=True)

    add("peaks", cmd_peaks, "triple line concurrencies (stability peaks)")
    return top


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        fam = _family(args)
        return args.fn(args, fam)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"pidregion: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except PlantFileError as exc:
        print(f"pidregion: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except PidRegionError as exc:
        print(f"pidregion: {type(exc).__name__}: {exc}", file=sys.stderr)
        return DIAGNOSTIC


if __name__ == "__main__":
    sys.exit(main())
