"""Random-plant study of the interval count test and the transition-sign slope rule.

For each corpus it reports how many admissible-cell midpoints hold a stable
polygon, whether a dense grid finds any stable point where none was found,
and how often sign(e_I) equals -sign(dkP/dw).

Usage: python3 scripts/corpus_study.py [plants-per-corpus] [seed]
"""
import sys

import numpy as np

from pidregion import GammaRegion, PlantModel, compute_slice, singular_frequencies, verify_point
from pidregion._curve import r3_curve
from pidregion.kp_analysis import admissible_intervals, default_search_range, interval_cells
from pidregion.slicing import transition_signs

H = GammaRegion.hurwitz()


def generic(rng):
    while True:
        m, nb = int(rng.integers(0, 5)), int(rng.integers(1, 7))
        if max(m + 2, nb) <= 6:
            return PlantModel(rng.uniform(-5, 5, m + 1), rng.uniform(-5, 5, nb + 1))


def strictly_proper(rng):
    """Unity-feedback PID around a strictly proper plant of order <= 4."""
    nd = int(rng.integers(1, 5))
    nn = int(rng.integers(0, nd))
    return PlantModel.from_tf(rng.uniform(-5, 5, nn + 1), rng.uniform(-5, 5, nd + 1))


def stabilizable(p) -> bool:
    lo, hi = default_search_range(p, H)
    for r3 in np.linspace(lo, hi, 41)[1:-1]:
        for f in compute_slice(p, H, r3).stable_polygons:
            if verify_point(p, H, *f.point, r3).inside == p.order:
                return True
    return False


def grid_has_stable(p, r3, n=121) -> bool:
    box = compute_slice(p, H, r3).box
    for x in np.linspace(box[0], box[1], n):
        for y in np.linspace(box[2], box[3], n):
            if verify_point(p, H, x, y, r3).inside == p.order:
                return True
    return False


def study(name, plants):
    mids = [(p, c.mid) for p in plants for c in admissible_intervals(p, H)]
    empty = [(p, r3) for p, r3 in mids if not compute_slice(p, H, r3).stable_polygons]
    missed = sum(grid_has_stable(p, r3) for p, r3 in empty)
    match = total = 0
    for p in plants:
        curve = r3_curve(p, H)
        for c in interval_cells(p, H, default_search_range(p, H)):
            for f in singular_frequencies(p, H, c.mid):
                if 0 < f.param < np.inf and not f.tangent:
                    w = f.param
                    slope = (curve.value(w + 1e-6) - curve.value(w - 1e-6)) / 2e-6
                    match += transition_signs(p, H, c.mid, f)[0] == -np.sign(slope)
                    total += 1
    print(f"{name}: {len(plants)} plants, {len(mids)} admissible midpoints, "
          f"{len(mids) - len(empty)} with a stable polygon, {missed} of the rest stable on a grid; "
          f"slope rule holds at {match} of {total} frequencies")
    for p, r3 in empty[:3]:
        print(f"   no polygon at r3 = {r3:.6g}: a = {np.round(p.a.coeffs, 3).tolist()}, "
              f"b = {np.round(p.b.coeffs, 3).tolist()}")


def main(n=25, seed=20240611):
    rng = np.random.default_rng(seed)
    gen = [generic(rng) for _ in range(n)]
    study("generic", gen)
    study("generic, stabilizable only", [p for p in gen if stabilizable(p)])
    study("strictly proper loops", [strictly_proper(rng) for _ in range(n)])


if __name__ == "__main__":
    args = [int(a) for a in sys.argv[1:3]]
    main(*args)
