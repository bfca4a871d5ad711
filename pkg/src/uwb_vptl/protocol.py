"""Virtual traffic light protocol with the pedestrian extension.

The intersection frame has ``+X`` east and ``+Y`` north, with the junction
centre at the origin. Vehicles drive on the right and stop with their anchor
midpoint ``stopline_offset`` metres from the centre.

All decisions are pure functions of the world snapshot, so every vehicle
running them on the same beacons reaches the same result.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .geometry import AnchorLayout, CoverageStatus, TagPosition, coverage
from .ranging import NoiseModel, simulate_batch
from .tracking import CrossingDetector, EmptyResult, SideLabel, localize_batch


class ProtocolError(RuntimeError):
    pass


class NoCandidates(ProtocolError):
    pass


class NotLeader(ProtocolError):
    pass


class Axis(enum.Enum):
    NS = "NS"
    EW = "EW"

    @property
    def other(self) -> "Axis":
        return Axis.EW if self is Axis.NS else Axis.NS


class ApproachDirection(enum.Enum):
    """Side of the junction a vehicle arrives from."""

    NORTH = "North"
    SOUTH = "South"
    EAST = "East"
    WEST = "West"

    @property
    def axis(self) -> Axis:
        return Axis.NS if self in (ApproachDirection.NORTH, ApproachDirection.SOUTH) else Axis.EW

    @property
    def heading(self) -> tuple[float, float]:
        return _HEADING[self]

    @property
    def right(self) -> tuple[float, float]:
        fx, fy = self.heading
        return (fy, -fx)


_HEADING = {
    ApproachDirection.NORTH: (0.0, -1.0),
    ApproachDirection.SOUTH: (0.0, 1.0),
    ApproachDirection.EAST: (-1.0, 0.0),
    ApproachDirection.WEST: (1.0, 0.0),
}


class Signal(enum.Enum):
    RED = "Red"
    GREEN = "Green"


class PedestrianSignal(enum.Enum):
    ACTIVE = "Active"
    INACTIVE = "Inactive"


class Role(enum.Enum):
    NORMAL = "Normal"
    VTL_LEADER = "VtlLeader"
    VPTL_LEADER = "VptlLeader"


class Intent(enum.Enum):
    WAITING = "WaitingToCross"
    CROSSING = "Crossing"
    DONE = "Done"


@dataclass(frozen=True)
class PhaseState:
    ns: Signal
    ew: Signal
    pedestrian: PedestrianSignal = PedestrianSignal.INACTIVE

    def __post_init__(self):
        if self.ns is Signal.GREEN and self.ew is Signal.GREEN:
            raise ValueError("both axes green")
        if self.pedestrian is PedestrianSignal.ACTIVE and Signal.GREEN in (self.ns, self.ew):
            raise ValueError("pedestrian phase with a green vehicle axis")

    @classmethod
    def serving(cls, axis: Axis) -> "PhaseState":
        if axis is Axis.NS:
            return cls(Signal.GREEN, Signal.RED)
        return cls(Signal.RED, Signal.GREEN)

    @classmethod
    def pedestrian_phase(cls) -> "PhaseState":
        return cls(Signal.RED, Signal.RED, PedestrianSignal.ACTIVE)

    def signal(self, axis: Axis) -> Signal:
        return self.ns if axis is Axis.NS else self.ew


# Messages -------------------------------------------------------------------

@dataclass(frozen=True)
class Detect:
    sender: int
    direction: ApproachDirection
    position: tuple[float, float]


@dataclass(frozen=True)
class Elect:
    leader_id: int


@dataclass(frozen=True)
class PhaseBroadcast:
    sender: int
    phase: PhaseState
    remaining: float


@dataclass(frozen=True)
class Handover:
    from_id: int
    to_id: int
    to_role: Role


@dataclass(frozen=True)
class Release:
    leader_id: int


# Agents and world -----------------------------------------------------------

@dataclass
class ProtocolParams:
    tick: float = 0.1
    comm_range: float = 300.0
    phase_min: float = 5.0
    phase_max: float = 30.0
    pedestrian_phase_fixed: float = 15.0
    # Watchdog for a tracked pedestrian phase whose crossings are never seen.
    pedestrian_phase_max: float = 60.0
    detection_range: float = 50.0
    stopline_offset: float = 20.0
    lane_offset: float = 1.75
    exit_distance: float = 40.0
    window: int = 10
    samples_per_tick: int = 1
    min_confidence: float = 0.999
    noise: NoiseModel = field(default_factory=NoiseModel)
    layout: AnchorLayout = field(default_factory=AnchorLayout)

    def ticks(self, seconds: float) -> int:
        return int(round(seconds / self.tick))


@dataclass
class VehicleAgent:
    id: int
    direction: ApproachDirection
    distance_to_stopline: float
    speed: float
    layout: AnchorLayout = field(default_factory=AnchorLayout)
    role: Role = Role.NORMAL
    known_phase: PhaseState | None = None
    stopped: bool = False
    in_range: bool = False

    @property
    def axis(self) -> Axis:
        return self.direction.axis

    @property
    def approaching(self) -> bool:
        return self.distance_to_stopline >= 0


@dataclass
class PedestrianAgent:
    id: int
    position: tuple[float, float]
    target: tuple[float, float]
    speed: float = 1.4
    intent: Intent = Intent.WAITING
    tag_id: int | None = None

    def __post_init__(self):
        if self.tag_id is None:
            self.tag_id = self.id
        self.origin = tuple(self.position)

    def advance(self, intent: Intent) -> None:
        order = list(Intent)
        if order.index(intent) < order.index(self.intent):
            raise ValueError(f"pedestrian {self.id}: {self.intent.value} -> {intent.value}")
        self.intent = intent


@dataclass
class World:
    params: ProtocolParams = field(default_factory=ProtocolParams)
    seed: int = 0
    tick_index: int = 0
    vehicles: dict[int, VehicleAgent] = field(default_factory=dict)
    pedestrians: dict[int, PedestrianAgent] = field(default_factory=dict)
    leader: "LeaderState | None" = None

    def position(self, v: VehicleAgent) -> tuple[float, float]:
        hx, hy = v.direction.heading
        rx, ry = v.direction.right
        back = self.params.stopline_offset + v.distance_to_stopline
        off = self.params.lane_offset
        return (-hx * back + rx * off, -hy * back + ry * off)

    def to_vehicle_frame(self, v: VehicleAgent, point) -> tuple[float, float]:
        px, py = self.position(v)
        dx, dy = point[0] - px, point[1] - py
        hx, hy = v.direction.heading
        rx, ry = v.direction.right
        return (dx * rx + dy * ry, dx * hx + dy * hy)

    def from_vehicle_frame(self, v: VehicleAgent, point) -> tuple[float, float]:
        px, py = self.position(v)
        hx, hy = v.direction.heading
        rx, ry = v.direction.right
        return (px + point[0] * rx + point[1] * hx, py + point[0] * ry + point[1] * hy)

    def approaching(self, axis: Axis | None = None) -> list[VehicleAgent]:
        cr = self.params.comm_range
        return [v for v in self.vehicles.values()
                if v.approaching and v.distance_to_stopline <= cr
                and (axis is None or v.axis is axis)]

    def waiting_pedestrians_in_range(self) -> list[PedestrianAgent]:
        vehicles = self.approaching()
        dr = self.params.detection_range
        out = []
        for p in self.pedestrians.values():
            if p.intent is not Intent.WAITING:
                continue
            if any(math.dist(self.position(v), p.position) <= dr for v in vehicles):
                out.append(p)
        return out


@dataclass(frozen=True)
class ConflictReport:
    vehicle_vehicle: bool = False
    vehicle_pedestrian: bool = False
    vehicles: frozenset = frozenset()
    pedestrians: frozenset = frozenset()

    def __bool__(self) -> bool:
        return self.vehicle_vehicle or self.vehicle_pedestrian


def sense_conflict(world: World) -> ConflictReport:
    """Vehicle-vehicle conflict needs approaching traffic on both axes within
    comm range; vehicle-pedestrian conflict needs a waiting pedestrian within
    detection range of an approaching vehicle."""
    ns, ew = world.approaching(Axis.NS), world.approaching(Axis.EW)
    vv = bool(ns and ew)
    ids = {v.id for v in ns + ew} if vv else set()
    peds = world.waiting_pedestrians_in_range()
    if peds:
        dr = world.params.detection_range
        for v in world.approaching():
            if any(math.dist(world.position(v), p.position) <= dr for p in peds):
                ids.add(v.id)
    return ConflictReport(vv, bool(peds), frozenset(ids), frozenset(p.id for p in peds))


def elect_leader(report: ConflictReport, candidates) -> int:
    """Nearest vehicle to its stop line wins; lowest id breaks ties."""
    if not report:
        raise ValueError("no conflict to elect a leader for")
    pool = [v for v in candidates if not report.vehicles or v.id in report.vehicles]
    if not pool:
        raise NoCandidates("no vehicle can take the leader role")
    return min(pool, key=lambda v: (v.distance_to_stopline, v.id)).id


# Leader behaviour -----------------------------------------------------------

@dataclass
class PedestrianTrack:
    detector: CrossingDetector
    crossed: bool = False
    untrackable: bool = False


@dataclass
class LeaderState:
    leader_id: int
    role: Role
    axis: Axis
    timer_ticks: int = 0
    elapsed: int = 0
    releasing: bool = False
    tracks: dict[int, PedestrianTrack] = field(default_factory=dict)
    any_untrackable: bool = False


@dataclass
class StepResult:
    broadcast: PhaseBroadcast | None = None
    control: Handover | Release | None = None
    notes: list[tuple[str, dict]] = field(default_factory=list)


def green_ticks(world: World, served: Axis) -> int:
    """Time the served axis needs for its approaching vehicles to clear the
    stop line, clamped to [phase_min, phase_max]."""
    p = world.params
    need = 0
    for v in world.approaching(served):
        need = max(need, math.ceil(v.distance_to_stopline / v.speed / p.tick) + 2)
    return min(max(need, p.ticks(p.phase_min)), p.ticks(p.phase_max))


def start_term(world: World, leader_id: int, role: Role) -> LeaderState:
    v = world.vehicles[leader_id]
    timer = green_ticks(world, v.axis.other) if role is Role.VTL_LEADER else 0
    return LeaderState(leader_id, role, v.axis, timer_ticks=timer)


def _check(state: LeaderState, world: World, role: Role) -> None:
    if world.leader is not state or state.role is not role:
        raise NotLeader(f"vehicle {state.leader_id} does not hold the {role.value} role")


def _broadcast(state: LeaderState, phase: PhaseState, remaining_ticks: int, world: World):
    return PhaseBroadcast(state.leader_id, phase, max(remaining_ticks, 0) * world.params.tick)


def _handover_or_release(state: LeaderState, world: World, result: StepResult) -> StepResult:
    """Hand the light to the served axis if it still has traffic, otherwise
    turn the own lane green and release on the following tick."""
    served = world.approaching(state.axis.other)
    if served:
        nxt = min(served, key=lambda v: (v.distance_to_stopline, v.id))
        result.control = Handover(state.leader_id, nxt.id, Role.VTL_LEADER)
    else:
        state.releasing = True
        result.broadcast = _broadcast(state, PhaseState.serving(state.axis), 0, world)
    return result


def leader_step(state: LeaderState, world: World) -> StepResult:
    _check(state, world, Role.VTL_LEADER)
    result = StepResult()
    if state.releasing:
        result.control = Release(state.leader_id)
        return result
    if state.elapsed < state.timer_ticks:
        result.broadcast = _broadcast(state, PhaseState.serving(state.axis.other),
                                      state.timer_ticks - state.elapsed, world)
        state.elapsed += 1
        return result
    if sense_conflict(world).vehicle_pedestrian:
        result.control = Handover(state.leader_id, state.leader_id, Role.VPTL_LEADER)
        return result
    return _handover_or_release(state, world, result)


def _track(state: LeaderState, world: World, ped: PedestrianAgent, result: StepResult) -> None:
    p = world.params
    track = state.tracks[ped.id]
    if track.crossed:
        return
    leader = world.vehicles[state.leader_id]
    local = world.to_vehicle_frame(leader, ped.position)
    status = coverage(leader.layout, local)
    if status is not CoverageStatus.BOTH_ANCHORS or local[1] == 0.0:
        if not track.untrackable:
            track.untrackable = True
            state.any_untrackable = True
            result.notes.append(("Untrackable", {"id": ped.id, "coverage": status.value}))
        return
    batch = simulate_batch(leader.layout, local, p.noise, p.samples_per_tick,
                           (world.seed, world.tick_index, ped.tag_id))
    try:
        loc = localize_batch(leader.layout, batch)
    except EmptyResult:
        return
    # Side test runs on the offset along the pedestrian's crossing line,
    # measured from the crosswalk midpoint.
    (ox, oy), (tx, ty) = ped.origin, ped.target
    length = math.hypot(tx - ox, ty - oy)
    ux, uy = (tx - ox) / length, (ty - oy) / length
    mx, my = (ox + tx) / 2, (oy + ty) / 2
    for est in loc.points:
        gx, gy = world.from_vehicle_frame(leader, est.as_tuple())
        along = (gx - mx) * ux + (gy - my) * uy
        across = -(gx - mx) * uy + (gy - my) * ux
        event = track.detector.update(TagPosition(along, across))
        # Right is the target side of the crossing line.
        if track.detector.side is SideLabel.RIGHT:
            track.crossed = True
            origin = event.from_side if event is not None else SideLabel.UNDECIDED
            result.notes.append(("PedestrianCrossed", {
                "id": ped.id, "from": origin.value, "to": SideLabel.RIGHT.value,
                "sample": track.detector.index}))
            break


def vptl_leader_step(state: LeaderState, world: World) -> StepResult:
    """Serve the pedestrian phase until every tracked pedestrian is seen on
    the far side, or for the fixed period if any of them cannot be ranged."""
    _check(state, world, Role.VPTL_LEADER)
    p = world.params
    result = StepResult()
    if state.releasing:
        result.control = Release(state.leader_id)
        return result
    for ped in world.pedestrians.values():
        if ped.intent in (Intent.WAITING, Intent.CROSSING) and ped.id not in state.tracks:
            state.tracks[ped.id] = PedestrianTrack(CrossingDetector(p.window, p.min_confidence))
    for pid in sorted(state.tracks):
        if pid in world.pedestrians:
            _track(state, world, world.pedestrians[pid], result)

    if state.any_untrackable:
        limit = p.ticks(p.pedestrian_phase_fixed)
        done = state.elapsed >= limit
    else:
        limit = p.ticks(p.pedestrian_phase_max)
        done = all(t.crossed for t in state.tracks.values()) or state.elapsed >= limit
    if done:
        return _handover_or_release(state, world, result)
    result.broadcast = _broadcast(state, PhaseState.pedestrian_phase(), limit - state.elapsed, world)
    state.elapsed += 1
    return result
