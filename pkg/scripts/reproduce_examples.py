"""Print the headline numbers for the seven bundled example plants.

Usage: python3 scripts/reproduce_examples.py [plants-dir]
"""
import sys
import time
from pathlib import Path

from pidregion import compute_slice, singular_frequencies
from pidregion.delay import delay_admissible_intervals, delay_required_Z
from pidregion.io import parse_plant_file
from pidregion.kp_analysis import admissible_intervals, merge_intervals, required_Z, stability_peaks
from pidregion.errors import NotApplicable

PROBES = {1: [-0.26118], 2: [-20.0, -2.0, 5.0], 3: [-1.7, 0.4], 4: [0.0], 5: [0.0],
          6: [-9.0, -10.0], 7: [-2.0, 0.0, 4.0]}


def fmt_cells(cells):
    return ", ".join(f"({c.lo:.6g}, {c.hi:.6g}) Z={c.Z}" for c in cells) or "none"


def main(root: Path):
    for k in range(1, 8):
        fam = parse_plant_file(root / f"example{k}.json")
        p, region = fam.members[0], fam.region
        t = time.perf_counter()
        print(f"== example {k}: {region.kind}, order {p.order}"
              + (f", delay {p.delay}" if p.is_delay else ""))
        if p.is_delay:
            cells = delay_admissible_intervals(p)
            print(f"   required Z {delay_required_Z(p)}")
        else:
            cells = admissible_intervals(p, region)
            z, census = required_Z(p, region)
            print(f"   required Z {z} {census}")
        print(f"   admissible cells: {fmt_cells(cells)}")
        print(f"   union: {[(round(a, 6), round(b, 6)) for a, b in merge_intervals(cells)]}")
        for r3 in PROBES[k]:
            sl = compute_slice(p, region, r3)
            finite = [f.param for f in singular_frequencies(p, region, r3, None if not p.is_delay
                                                            else 40.0) if f.param != float("inf")]
            print(f"   r3 = {r3:g}: {len(sl.stable_polygons)} stable polygon(s); "
                  f"frequencies {[round(w, 4) for w in finite[:8]]}")
        if not p.is_delay and not region.is_circle:
            try:
                for c in cells:
                    for pk in stability_peaks(p, c, region):
                        print(f"   concurrency at kP {pk.kP:.6f}: (kI, kD) = ({pk.kI:.5f}, {pk.kD:.5f}) "
                              f"omegas {tuple(round(w, 5) for w in pk.omegas)} peak={pk.is_peak}")
            except NotApplicable as exc:
                print(f"   peaks: {exc}")
        print(f"   [{time.perf_counter() - t:.2f} s]")


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "plants")
