"""Plant-file parsing and region export."""
from __future__ import annotations

import json
import math
from pathlib import Path

from .errors import PidRegionError, PlantFileError
from .gamma import GammaRegion
from .plant import DOMAINS, PlantModel, QuasiPlant
from .region import Region3D
from .robust import PlantFamily
from .svg import slice_svg

CONTROLLERS = ("PID", "three-term")


def _coeffs(entry: dict, key: str, ctx: str) -> list[float]:
    if key not in entry:
        raise PlantFileError(f"{ctx}.{key}: missing coefficient list")
    val = entry[key]
    if not isinstance(val, list) or not val:
        raise PlantFileError(f"{ctx}.{key}: expected a nonempty list of numbers")
    out = []
    for i, v in enumerate(val):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise PlantFileError(f"{ctx}.{key}[{i}]: expected a finite number, got {v!r}")
        out.append(float(v))
    return out


def parse_plant(entry, ctx: str = "plant") -> PlantModel:
    """One plant entry: either ``a``/``b`` or ``num``/``den`` (unity-feedback PID)."""
    if not isinstance(entry, dict):
        raise PlantFileError(f"{ctx}: expected an object")
    domain = entry.get("domain", "continuous")
    if domain not in DOMAINS:
        raise PlantFileError(f"{ctx}.domain: expected one of {', '.join(DOMAINS)}, got {domain!r}")
    delay = entry.get("delay", 0.0)
    if isinstance(delay, bool) or not isinstance(delay, (int, float)) or delay < 0:
        raise PlantFileError(f"{ctx}.delay: expected a nonnegative number")
    if delay > 0 and domain != "delay":
        raise PlantFileError(f"{ctx}.delay: a positive delay requires domain 'delay'")
    controller = entry.get("controller", "PID")
    if controller not in CONTROLLERS:
        raise PlantFileError(f"{ctx}.controller: expected one of {', '.join(CONTROLLERS)}")
    name = str(entry.get("name", ""))
    try:
        if "num" in entry or "den" in entry:
            z1 = float(entry.get("z1", 0.0))
            p = PlantModel.from_tf(_coeffs(entry, "num", ctx), _coeffs(entry, "den", ctx),
                                   domain=domain, z1=z1, delay=float(delay))
        else:
            a, b = _coeffs(entry, "a", ctx), _coeffs(entry, "b", ctx)
            if domain == "delay":
                p = QuasiPlant(a, b, delay=float(delay))
            else:
                p = PlantModel(a, b, domain=domain)
    except PlantFileError:
        raise
    except (PidRegionError, ValueError) as exc:
        raise PlantFileError(f"{ctx}: {exc}") from exc
    if name:
        object.__setattr__(p, "name", name)
    return p


def parse_family(data, source: str = "<input>") -> PlantFamily:
    if not isinstance(data, dict):
        raise PlantFileError(f"{source}: top level must be an object")
    if "plants" in data:
        entries = data["plants"]
        if not isinstance(entries, list):
            raise PlantFileError(f"{source}: plants: expected a list")
        members = [parse_plant(e, f"plants[{i}]") for i, e in enumerate(entries)]
    elif "plant" in data:
        members = [parse_plant(data["plant"], "plant")]
    else:
        raise PlantFileError(f"{source}: expected a 'plant' or 'plants' entry")
    if not members:
        raise PlantFileError(f"{source}: plants: the family is empty")
    region = None
    if "region" in data:
        try:
            region = GammaRegion.from_dict(data["region"])
        except (PidRegionError, ValueError, TypeError, AttributeError) as exc:
            raise PlantFileError(f"{source}: region: {exc}") from exc
    try:
        return PlantFamily(members, region)
    except PidRegionError as exc:
        raise PlantFileError(f"{source}: {exc}") from exc


def parse_plant_file(path) -> PlantFamily:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise PlantFileError(f"{path}: cannot read ({exc.strerror})") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PlantFileError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return parse_family(data, str(path))


def export_region(region: Region3D, out_dir, fmt: str = "json") -> list[Path]:
    """Write ``region.json`` or one ``slice_NNNN.svg`` per slice into ``out_dir``."""
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        if fmt == "json":
            p = out_dir / "region.json"
            p.write_text(region.to_json())
            return [p]
        if fmt == "svg-slices":
            gamma = region.family.region if region.family else None
            paths = []
            for i, s in enumerate(region.slices):
                p = out_dir / f"slice_{i:04d}.svg"
                p.write_text(slice_svg(s, gamma))
                paths.append(p)
            return paths
    except OSError as exc:
        raise PidRegionError(f"{exc.filename or out_dir}: {exc.strerror}") from exc
    raise ValueError(f"unknown export format {fmt!r}")
