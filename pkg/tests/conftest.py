from pathlib import Path

import numpy as np
import pytest

from pidregion import GammaRegion, PlantModel, compute_slice
from pidregion.io import parse_plant_file

from oracles import routh_stable

PLANTS = Path(__file__).resolve().parent.parent / "plants"


def load(k: int) -> PlantModel:
    return parse_plant_file(PLANTS / f"example{k}.json").members[0]


@pytest.fixture(scope="session")
def plants():
    return {k: load(k) for k in range(1, 8)}


@pytest.fixture(scope="session")
def plant_dir():
    return PLANTS


def _feasible(p: PlantModel) -> bool:
    """Some slice over a coarse r3 sweep holds a polygon whose point passes the Routh test."""
    from pidregion.kp_analysis import default_search_range
    H = GammaRegion.hurwitz()
    lo, hi = default_search_range(p, H)
    for r3 in np.linspace(lo, hi, 41)[1:-1]:
        for f in compute_slice(p, H, r3).stable_polygons:
            x, y = f.point
            if routh_stable(p.char_poly(H, x, y, r3).coeffs):
                return True
    return False


def random_corpus(n: int = 25, seed: int = 20240611, feasible_only: bool = False) -> list[PlantModel]:
    """Random loops with N <= 6 and coefficients in [-5, 5].

    ``feasible_only`` keeps plants with a verified stable point somewhere on a
    coarse r3 sweep.
    """
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        m = int(rng.integers(0, 5))
        nb = int(rng.integers(1, 7))
        if max(m + 2, nb) > 6:
            continue
        p = PlantModel(rng.uniform(-5, 5, m + 1), rng.uniform(-5, 5, nb + 1))
        if not feasible_only or _feasible(p):
            out.append(p)
    return out


@pytest.fixture(scope="session")
def corpus():
    return random_corpus()


ACCEPTANCE: list[str] = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line for the acceptance summary."""
    def _report(label: str, ok: bool, detail: str = ""):
        line = f"{label}: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else "")
        ACCEPTANCE.append(line)
        print(line)
        return ok
    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
