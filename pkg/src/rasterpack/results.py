"""Result files: serialization, reloading and re-verification.

The file body splits into a deterministic "result" section (identical bytes
for identical flags and seed on runs that terminate deterministically) and a
"meta" section holding wall-clock data: timings, the event log and the
creation timestamp.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .errors import ParseError, ValidationError
from .instances import InstanceFile
from .oracle import layout_feasible
from .raster import rotate_and_rasterize

FORMAT = "rasterpack-result-v1"


@dataclass
class ResultFile:
    instance: str
    width_px: int
    length_px: int
    density_percent: float
    total_area_px: int
    config: dict
    pieces: list  # {"piece", "shape", "orientation", "x", "y"}
    cdh_calls: int
    meta: dict = field(default_factory=dict)

    def result_section(self) -> dict:
        return {
            "instance": self.instance,
            "width_px": self.width_px,
            "length_px": self.length_px,
            "density_percent": self.density_percent,
            "total_area_px": self.total_area_px,
            "config": self.config,
            "pieces": self.pieces,
            "cdh_calls": self.cdh_calls,
        }

    def result_bytes(self) -> bytes:
        return json.dumps(self.result_section(), indent=1, sort_keys=True).encode()

    def save(self, path) -> None:
        doc = {"format": FORMAT, "result": self.result_section(), "meta": self.meta}
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=1, sort_keys=True)
            fh.write("\n")


def load_result(path) -> ResultFile:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as e:
        raise ParseError(f"{path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from e
    if doc.get("format") != FORMAT:
        raise ValidationError(f"{path}: unknown result format {doc.get('format')!r}")
    r = doc["result"]
    return ResultFile(
        instance=r["instance"], width_px=r["width_px"], length_px=r["length_px"],
        density_percent=r["density_percent"], total_area_px=r["total_area_px"],
        config=r["config"], pieces=r["pieces"], cdh_calls=r["cdh_calls"],
        meta=doc.get("meta", {}))


def result_from_run(inst_name: str, problem, layout, record, config: dict,
                    shape_ids, orientations) -> ResultFile:
    pieces = []
    for i in range(problem.n):
        pieces.append({
            "piece": i + 1,
            "shape": shape_ids[i],
            "orientation": orientations[i],
            "x": int(layout.xs[i]),
            "y": int(layout.ys[i]),
        })
    return ResultFile(
        instance=inst_name,
        width_px=problem.W,
        length_px=record.best_length,
        density_percent=record.density_percent,
        total_area_px=record.total_area,
        config=config,
        pieces=pieces,
        cdh_calls=record.cdh_calls,
        meta={
            "created": datetime.now(timezone.utc).isoformat(),
            "time_to_best_s": record.time_to_best,
            "preprocess_s": record.preprocess_seconds,
            "search_s": record.search_seconds,
            "events": [[t, L, bool(f)] for t, L, f in record.events],
        },
    )


def verify_result(result: ResultFile, inst: InstanceFile) -> dict:
    """Re-rasterize and brute-force check a stored result.

    Returns {"feasible": bool, "density_matches": bool, "density": float}.
    """
    scale = result.width_px / inst.container_width
    by_id = {s.id: s for s in inst.shapes}
    cache = {}
    placed = []
    area = 0
    for p in result.pieces:
        key = (p["shape"], p["orientation"])
        if key not in cache:
            if p["shape"] not in by_id:
                raise ValidationError(f"result references unknown shape {p['shape']!r}")
            cache[key] = rotate_and_rasterize(by_id[p["shape"]].outline,
                                              p["orientation"], scale)
        shape = cache[key]
        area += shape.area
        placed.append((shape.cell_set(), (p["x"], p["y"])))
    feasible = layout_feasible(placed, result.width_px, result.length_px)
    density = 100.0 * area / (result.width_px * result.length_px)
    return {
        "feasible": feasible,
        "density_matches": (density == result.density_percent
                            and area == result.total_area_px),
        "density": density,
    }
