"""Scenario files for the intersection simulator.

A scenario is a TOML document::

    [scenario]            # name, seed, tick (s), duration (s)
    [protocol]            # comm_range, phase_min, phase_max,
                          # pedestrian_phase_fixed, pedestrian_phase_max,
                          # detection_range, window, samples_per_tick,
                          # min_confidence
    [intersection]        # stopline_offset, lane_offset, exit_distance
    [ranging]             # baseline, sigma_e, bias
    [[vehicles]]          # id, spawn, direction, distance, speed
    [[pedestrians]]       # id, spawn, start = [x, y], target = [x, y],
                          # speed, tag_id

Every table is optional; missing keys take the
:class:`~uwb_vptl.protocol.ProtocolParams` defaults.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .geometry import AnchorLayout, GeometryError
from .protocol import ApproachDirection, ProtocolParams
from .ranging import NoiseModel


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class VehicleSpec:
    id: int
    direction: ApproachDirection
    distance: float
    speed: float
    spawn: float = 0.0


@dataclass(frozen=True)
class PedestrianSpec:
    id: int
    start: tuple[float, float]
    target: tuple[float, float]
    spawn: float = 0.0
    speed: float = 1.4
    tag_id: int | None = None


@dataclass
class IntersectionScenario:
    name: str = "scenario"
    seed: int = 0
    duration: float = 120.0
    params: ProtocolParams = field(default_factory=ProtocolParams)
    vehicles: list[VehicleSpec] = field(default_factory=list)
    pedestrians: list[PedestrianSpec] = field(default_factory=list)

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        p = self.params
        if not p.tick > 0:
            raise ConfigError("tick must be > 0")
        if not self.duration > 0:
            raise ConfigError("duration must be > 0")
        if not 0 < p.phase_min <= p.phase_max:
            raise ConfigError("need 0 < phase_min <= phase_max")
        if not (p.pedestrian_phase_fixed > 0 and p.pedestrian_phase_max > 0):
            raise ConfigError("pedestrian phase lengths must be > 0")
        if p.window < 2 or p.samples_per_tick < 1:
            raise ConfigError("need window >= 2 and samples_per_tick >= 1")
        if not 0.5 < p.min_confidence < 1:
            raise ConfigError("min_confidence must lie in (0.5, 1)")
        if min(p.comm_range, p.detection_range, p.stopline_offset, p.exit_distance) <= 0:
            raise ConfigError("ranges and offsets must be > 0")
        ids = [v.id for v in self.vehicles]
        if len(set(ids)) != len(ids):
            raise ConfigError("duplicate vehicle id")
        for v in self.vehicles:
            if not v.speed > 0 or v.distance < 0 or not 0 <= v.spawn <= self.duration:
                raise ConfigError(f"vehicle {v.id}: need speed > 0, distance >= 0, spawn in run")
        pids = [q.id for q in self.pedestrians]
        if len(set(pids)) != len(pids):
            raise ConfigError("duplicate pedestrian id")
        for q in self.pedestrians:
            if not q.speed > 0 or not 0 <= q.spawn <= self.duration:
                raise ConfigError(f"pedestrian {q.id}: need speed > 0 and spawn in run")
            if math.dist(q.start, q.target) == 0:
                raise ConfigError(f"pedestrian {q.id}: start and target coincide")


_PROTOCOL_KEYS = ("comm_range", "phase_min", "phase_max", "pedestrian_phase_fixed",
                  "pedestrian_phase_max", "detection_range", "window", "samples_per_tick",
                  "min_confidence")
_INTERSECTION_KEYS = ("stopline_offset", "lane_offset", "exit_distance")


def _take(table: dict, keys, where: str) -> dict:
    unknown = set(table) - set(keys)
    if unknown:
        raise ConfigError(f"[{where}] unknown keys: {', '.join(sorted(unknown))}")
    return dict(table)


def _point(value, what: str) -> tuple[float, float]:
    try:
        x, y = value
        return (float(x), float(y))
    except (TypeError, ValueError):
        raise ConfigError(f"{what} must be a two-element [x, y] array") from None


def from_dict(doc: dict) -> IntersectionScenario:
    try:
        meta = _take(doc.get("scenario", {}), ("name", "seed", "tick", "duration"), "scenario")
        kw = _take(doc.get("protocol", {}), _PROTOCOL_KEYS, "protocol")
        kw.update(_take(doc.get("intersection", {}), _INTERSECTION_KEYS, "intersection"))
        ranging = _take(doc.get("ranging", {}), ("baseline", "sigma_e", "bias"), "ranging")
        if "tick" in meta:
            kw["tick"] = float(meta["tick"])
        kw["layout"] = AnchorLayout.from_baseline(float(ranging.get("baseline", 1.85)))
        kw["noise"] = NoiseModel(float(ranging.get("sigma_e", 0.0185)),
                                 float(ranging.get("bias", 0.0)))
        params = ProtocolParams(**kw)
        vehicles = []
        for row in doc.get("vehicles", []):
            row = _take(row, ("id", "spawn", "direction", "distance", "speed"), "vehicles")
            try:
                direction = ApproachDirection(row["direction"])
            except ValueError:
                raise ConfigError(f"unknown direction {row['direction']!r}") from None
            vehicles.append(VehicleSpec(int(row["id"]), direction, float(row["distance"]),
                                        float(row["speed"]), float(row.get("spawn", 0.0))))
        pedestrians = []
        for row in doc.get("pedestrians", []):
            row = _take(row, ("id", "spawn", "start", "target", "speed", "tag_id"), "pedestrians")
            pedestrians.append(PedestrianSpec(
                int(row["id"]), _point(row["start"], "start"), _point(row["target"], "target"),
                float(row.get("spawn", 0.0)), float(row.get("speed", 1.4)), row.get("tag_id")))
        return IntersectionScenario(str(meta.get("name", "scenario")), int(meta.get("seed", 0)),
                                    float(meta.get("duration", 120.0)), params, vehicles,
                                    pedestrians)
    except KeyError as exc:
        raise ConfigError(f"missing key {exc}") from None
    except (GeometryError, TypeError) as exc:
        raise ConfigError(str(exc)) from None
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


def loads(text: str) -> IntersectionScenario:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed scenario file: {exc}") from None
    return from_dict(doc)


def load_scenario(path) -> IntersectionScenario:
    return loads(Path(path).read_text(encoding="utf-8"))


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (tuple, list)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    return repr(v)


def dumps(sc: IntersectionScenario) -> str:
    """Serialize a scenario back to the TOML schema read by :func:`loads`."""
    p = sc.params
    out = ["[scenario]", f"name = {_toml_value(sc.name)}", f"seed = {sc.seed}",
           f"tick = {p.tick!r}", f"duration = {sc.duration!r}", "", "[protocol]"]
    out += [f"{k} = {_toml_value(getattr(p, k))}" for k in _PROTOCOL_KEYS]
    out += ["", "[intersection]"]
    out += [f"{k} = {_toml_value(getattr(p, k))}" for k in _INTERSECTION_KEYS]
    out += ["", "[ranging]", f"baseline = {p.layout.baseline!r}",
            f"sigma_e = {p.noise.sigma_e!r}", f"bias = {p.noise.bias!r}"]
    for v in sc.vehicles:
        out += ["", "[[vehicles]]", f"id = {v.id}", f"spawn = {v.spawn!r}",
                f'direction = "{v.direction.value}"', f"distance = {v.distance!r}",
                f"speed = {v.speed!r}"]
    for q in sc.pedestrians:
        out += ["", "[[pedestrians]]", f"id = {q.id}", f"spawn = {q.spawn!r}",
                f"start = {_toml_value(q.start)}", f"target = {_toml_value(q.target)}",
                f"speed = {q.speed!r}"]
        if q.tag_id is not None:
            out.append(f"tag_id = {q.tag_id}")
    return "\n".join(out) + "\n"


def with_params(sc: IntersectionScenario, **overrides) -> IntersectionScenario:
    names = {f.name for f in fields(ProtocolParams)}
    params = replace(sc.params, **{k: v for k, v in overrides.items() if k in names})
    rest = {k: v for k, v in overrides.items() if k not in names}
    return replace(sc, params=params, **rest)
