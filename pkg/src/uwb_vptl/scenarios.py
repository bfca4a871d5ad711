"""Scripted intersection scenarios used for protocol regression.

``uwb-vptl`` reads scenarios from TOML; :func:`write_suite` dumps this set
into a directory so every case can also be run from the command line.
"""

from __future__ import annotations

from pathlib import Path

from .protocol import ApproachDirection, ProtocolParams
from .scenario import IntersectionScenario, PedestrianSpec, VehicleSpec, dumps

N, S, E, W = (ApproachDirection.NORTH, ApproachDirection.SOUTH,
              ApproachDirection.EAST, ApproachDirection.WEST)


def crosswalk(leg: ApproachDirection, offset: float = 10.0, half_width: float = 6.0,
              reverse: bool = False) -> tuple[tuple[float, float], tuple[float, float]]:
    """Endpoints of the crosswalk across ``leg``, ``offset`` m from the centre."""
    if leg is N:
        a, b = (-half_width, offset), (half_width, offset)
    elif leg is S:
        a, b = (half_width, -offset), (-half_width, -offset)
    elif leg is E:
        a, b = (offset, half_width), (offset, -half_width)
    else:
        a, b = (-offset, -half_width), (-offset, half_width)
    return (b, a) if reverse else (a, b)


def ped(pid: int, leg: ApproachDirection, spawn: float = 0.0, reverse: bool = False,
        speed: float = 1.4, **kw) -> PedestrianSpec:
    start, target = crosswalk(leg, reverse=reverse, **kw)
    return PedestrianSpec(pid, start, target, spawn, speed)


def car(vid: int, direction: ApproachDirection, distance: float, speed: float = 10.0,
        spawn: float = 0.0) -> VehicleSpec:
    return VehicleSpec(vid, direction, float(distance), float(speed), float(spawn))


def two_vehicles(seed: int = 1) -> IntersectionScenario:
    return IntersectionScenario("two-vehicles", seed, 60.0,
                                vehicles=[car(1, N, 100), car(2, E, 120)])


def vehicle_and_pedestrian(seed: int = 1) -> IntersectionScenario:
    return IntersectionScenario("vehicle-pedestrian", seed, 90.0,
                                vehicles=[car(1, N, 40)], pedestrians=[ped(1, N)])


def pedestrian_outside_coverage(seed: int = 1) -> IntersectionScenario:
    """The leader waits at the north stop line while a pedestrian crosses
    behind it, where neither anchor has line of sight."""
    return IntersectionScenario(
        "pedestrian-outside-coverage", seed, 120.0,
        vehicles=[car(1, N, 30), car(2, E, 80)],
        pedestrians=[PedestrianSpec(1, (-6.0, 30.0), (6.0, 30.0), 4.0)])


def rush(seed: int = 1) -> IntersectionScenario:
    vehicles = [car(1, N, 120, 12), car(2, E, 90, 11), car(3, S, 150, 13), car(4, W, 60, 9),
                car(5, N, 200, 12, 4), car(6, E, 180, 10, 6), car(7, S, 100, 8, 9),
                car(8, W, 250, 14, 12), car(9, N, 80, 10, 20), car(10, E, 140, 12, 25)]
    pedestrians = [ped(1, N, 3.0), ped(2, E, 11.0, reverse=True), ped(3, W, 30.0)]
    name = "rush" if seed == 1 else f"rush-seed{seed}"
    return IntersectionScenario(name, seed, 300.0, vehicles=vehicles, pedestrians=pedestrians)


def scripted_suite() -> list[IntersectionScenario]:
    sc = IntersectionScenario
    fast = ProtocolParams(phase_min=3.0, phase_max=10.0, pedestrian_phase_fixed=8.0)
    fine = ProtocolParams(tick=0.05)
    suite = [
        sc("empty", 1, 10.0),
        sc("single-ns", 1, 60.0, vehicles=[car(1, N, 100)]),
        sc("single-ew", 1, 60.0, vehicles=[car(1, W, 150, 15)]),
        two_vehicles(),
        sc("two-vehicles-south-west", 2, 60.0, vehicles=[car(1, S, 200, 15), car(2, W, 50, 8)]),
        sc("same-axis-pair", 1, 60.0, vehicles=[car(1, N, 100), car(2, S, 90)]),
        vehicle_and_pedestrian(),
        sc("pedestrian-side-leg", 3, 90.0, vehicles=[car(1, N, 40), car(2, E, 100)],
           pedestrians=[ped(1, W, 3.0)]),
        pedestrian_outside_coverage(),
        rush(),
        rush(seed=7),
        sc("pedestrian-mid-green", 4, 120.0, vehicles=[car(1, N, 60), car(2, E, 250, 10)],
           pedestrians=[ped(1, N, 8.0, reverse=True)]),
        sc("two-pedestrians-opposed", 5, 120.0, vehicles=[car(1, S, 45)],
           pedestrians=[ped(1, S), ped(2, S, 0.5, reverse=True)]),
        sc("pedestrian-and-cross-traffic", 6, 120.0,
           vehicles=[car(1, E, 70), car(2, N, 110), car(3, S, 130)], pedestrians=[ped(1, E, 5.0)]),
        sc("long-ew-stream", 7, 200.0,
           vehicles=[car(1, N, 40)] + [car(10 + i, E, 290, 10, 3.0 * i) for i in range(15)]),
        sc("late-entry", 8, 120.0, vehicles=[car(1, N, 80, 5), car(2, W, 500, 20)]),
        sc("two-waves", 9, 150.0, vehicles=[car(1, N, 60), car(2, E, 70),
                                            car(3, S, 60, 10, 60), car(4, W, 90, 10, 62)]),
        sc("pedestrian-alone", 10, 30.0, pedestrians=[ped(1, N)]),
        sc("slow-vehicles", 11, 200.0, vehicles=[car(1, N, 60, 3), car(2, E, 80, 4)]),
        sc("fine-tick", 12, 90.0, params=fine, vehicles=[car(1, N, 40), car(2, E, 90)],
           pedestrians=[ped(1, N)]),
        sc("fast-timing", 13, 150.0, params=fast,
           vehicles=[car(1, N, 30), car(2, E, 80), car(3, W, 200)],
           pedestrians=[PedestrianSpec(1, (-6.0, 30.0), (6.0, 30.0), 4.0), ped(2, N, 6.0)]),
        sc("four-legs", 14, 240.0,
           vehicles=[car(1, N, 50), car(2, E, 60), car(3, S, 70), car(4, W, 80)],
           pedestrians=[ped(1, N), ped(2, E, 1.0), ped(3, S, 2.0), ped(4, W, 3.0)]),
        sc("mixed-coverage", 15, 150.0, vehicles=[car(1, N, 30), car(2, E, 80)],
           pedestrians=[PedestrianSpec(1, (-6.0, 30.0), (6.0, 30.0), 4.0), ped(2, N, 4.0)]),
        sc("stationary-queue", 16, 150.0,
           vehicles=[car(1, N, 20), car(2, N, 35), car(3, N, 50), car(4, E, 40), car(5, E, 55)]),
    ]
    return suite


def write_suite(directory) -> list[Path]:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for scenario in scripted_suite():
        path = out / f"{scenario.name}.toml"
        path.write_text(dumps(scenario), encoding="utf-8")
        paths.append(path)
    return paths
