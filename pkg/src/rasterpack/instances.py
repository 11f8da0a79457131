"""Instance files: parsing, validation, and problem assembly.

The native format is a JSON document:

    {
      "name": "fu",
      "container_width": 38.0,
      "shapes": [
        {"id": "s1", "count": 2, "orientations": [0, 90, 180, 270],
         "polygon": [[0,0], [8,0], [8,8], [0,8]],
         "holes": [{"polygon": [...]}]},
        {"id": "s2", "count": 1, "orientations": [0],
         "segments": [
            {"kind": "line", "to": [12, 0]},
            {"kind": "arc", "center": [12, 6], "radius": 6,
             "start_deg": -90, "end_deg": 90, "ccw": true},
            {"kind": "line", "to": [0, 12]},
            {"kind": "line", "to": [0, 0]}]}
      ]
    }

"polygon" is sugar for a closed chain of line segments.  Converting foreign
benchmark files into this format is a one-time manual step; see README.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import EmptyRaster, ParseError, ValidationError
from .raster import ArcTo, LineTo, Outline, polygon_outline, rotate_and_rasterize
from .solver import Problem, make_problem


@dataclass
class ShapeDef:
    id: str
    outline: Outline
    count: int
    orientations: list[int]


@dataclass
class InstanceFile:
    name: str
    container_width: float
    shapes: list[ShapeDef]

    @property
    def n_pieces(self) -> int:
        return sum(s.count for s in self.shapes)


def _outline_from_json(obj, where: str) -> Outline:
    holes = [_outline_from_json(h, f"{where}.holes[{i}]")
             for i, h in enumerate(obj.get("holes", []))]
    if "polygon" in obj:
        pts = obj["polygon"]
        if not isinstance(pts, list) or len(pts) < 3:
            raise ValidationError(f"{where}: polygon needs at least 3 points")
        pts = [tuple(map(float, p)) for p in pts]
        if pts[0] == pts[-1]:
            pts = pts[:-1]
        return Outline(polygon_outline(pts).segments, holes)
    if "segments" in obj:
        segs = []
        for i, s in enumerate(obj["segments"]):
            kind = s.get("kind")
            if kind == "line":
                segs.append(LineTo(tuple(map(float, s["to"]))))
            elif kind == "arc":
                segs.append(ArcTo(tuple(map(float, s["center"])), float(s["radius"]),
                                  float(s["start_deg"]), float(s["end_deg"]),
                                  bool(s.get("ccw", True))))
            else:
                raise ValidationError(f"{where}.segments[{i}]: unknown kind {kind!r}")
        return Outline(segs, holes)
    raise ValidationError(f"{where}: needs either 'polygon' or 'segments'")


def parse_instance(path) -> InstanceFile:
    """Load and validate an instance file.

    Raises ParseError with line context on malformed JSON, ValidationError
    naming the violated invariant otherwise.
    """
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as e:
        raise ParseError(f"{path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: top level must be an object")
    for key in ("name", "container_width", "shapes"):
        if key not in doc:
            raise ValidationError(f"{path}: missing field {key!r}")
    try:
        width = float(doc["container_width"])
    except (TypeError, ValueError):
        raise ValidationError(f"{path}: container_width must be a number") from None
    if width <= 0:
        raise ValidationError(f"{path}: container_width must be positive")
    if not isinstance(doc["shapes"], list):
        raise ValidationError(f"{path}: shapes must be a list")
    shapes = []
    seen = set()
    for i, s in enumerate(doc["shapes"]):
        where = f"{path}: shapes[{i}]"
        if not isinstance(s, dict):
            raise ValidationError(f"{where}: must be an object")
        for key in ("id", "count", "orientations"):
            if key not in s:
                raise ValidationError(f"{where}: missing field {key!r}")
        sid = str(s["id"])
        if sid in seen:
            raise ValidationError(f"{where}: duplicate shape id {sid!r}")
        seen.add(sid)
        count = s["count"]
        if not isinstance(count, int) or count < 1:
            raise ValidationError(f"{where}: count must be an integer >= 1")
        orients = s["orientations"]
        if not orients or not all(isinstance(o, int) for o in orients):
            raise ValidationError(f"{where}: orientations must be a non-empty list of integers")
        if 0 not in orients:
            raise ValidationError(f"{where}: orientations must contain 0")
        if len(set(orients)) != len(orients):
            raise ValidationError(f"{where}: orientations must be distinct")
        outline = _outline_from_json(s, where)
        outline.validate()
        shapes.append(ShapeDef(sid, outline, count, list(orients)))
    if not shapes:
        raise ValidationError(f"{path}: no shapes")
    return InstanceFile(str(doc["name"]), width, shapes)


def build_problem(inst: InstanceFile, width_px: int) -> Problem:
    """Rasterize every shape at every orientation and build the NFP table.

    The raster scale is width_px / container_width, so the container width
    is exactly width_px pixels.
    """
    if width_px < 1:
        raise ValueError("width_px must be at least 1")
    scale = width_px / inst.container_width
    specs = []
    for s in inst.shapes:
        rasters = []
        for deg in s.orientations:
            try:
                rasters.append(rotate_and_rasterize(s.outline, deg, scale))
            except EmptyRaster as e:
                raise EmptyRaster(
                    f"shape {s.id!r} at {deg} degrees: {e}") from e
        specs.append((s.id, s.count, s.orientations, rasters))
    return make_problem(width_px, specs)
