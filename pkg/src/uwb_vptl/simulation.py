"""Deterministic tick loop around the protocol.

Messages emitted on tick ``k`` reach the other agents on tick ``k + 1``.
The leader vehicle obeys its own broadcast immediately.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass, field
from decimal import Decimal

from . import protocol as P
from .scenario import IntersectionScenario


@dataclass(frozen=True)
class Event:
    tick: int
    kind: str
    fields: tuple[tuple[str, object], ...] = ()

    def get(self, key, default=None):
        for k, v in self.fields:
            if k == key:
                return v
        return default

    def format(self, tick_seconds: float, decimals: int) -> str:
        parts = [f"t={self.tick * tick_seconds:.{decimals}f}", self.kind]
        parts += [f"{k}={_fmt(v)}" for k, v in self.fields]
        return " ".join(parts)


def _fmt(v) -> str:
    if isinstance(v, enum.Enum):
        return str(v.value)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.3f}"
    if isinstance(v, tuple):
        return ",".join(_fmt(x) for x in v)
    return str(v)


def _decimals(tick: float) -> int:
    exp = Decimal(repr(tick)).normalize().as_tuple().exponent
    return max(1, -int(exp))


@dataclass
class SimResult:
    scenario: IntersectionScenario
    events: list[Event] = field(default_factory=list)
    timeline: list[tuple[int, P.PhaseState]] = field(default_factory=list)

    @property
    def tick(self) -> float:
        return self.scenario.params.tick

    def log_text(self) -> str:
        d = _decimals(self.tick)
        return "".join(e.format(self.tick, d) + "\n" for e in self.events)

    def timeline_csv(self) -> str:
        d = _decimals(self.tick)
        buf = io.StringIO()
        buf.write("t,ns,ew,pedestrian\n")
        for k, ph in self.timeline:
            buf.write(f"{k * self.tick:.{d}f},{ph.ns.value},{ph.ew.value},{ph.pedestrian.value}\n")
        return buf.getvalue()

    def kinds(self, kind: str) -> list[Event]:
        return [e for e in self.events if e.kind == kind]


class Simulation:
    # Leadership may change hands at most this often within one tick.
    MAX_TRANSFERS_PER_TICK = 4

    def __init__(self, scenario: IntersectionScenario):
        self.scenario = scenario
        self.params = scenario.params
        self.world = P.World(params=self.params, seed=scenario.seed)
        self.result = SimResult(scenario)
        self.inbox: list = []
        self.outbox: list = []
        self.ped_phase: P.PhaseState | None = None
        self.last_phase: P.PhaseState | None = None
        self._vehicle_spawns = sorted(scenario.vehicles, key=lambda s: (self.params.ticks(s.spawn), s.id))
        self._ped_spawns = sorted(scenario.pedestrians, key=lambda s: (self.params.ticks(s.spawn), s.id))

    def emit(self, kind: str, **fields) -> None:
        self.result.events.append(Event(self.world.tick_index, kind, tuple(fields.items())))

    def send(self, msg) -> None:
        self.outbox.append(msg)
        if isinstance(msg, P.Detect):
            self.emit("Detect", sender=msg.sender, direction=msg.direction, position=msg.position)
        elif isinstance(msg, P.Elect):
            self.emit("Elect", leader_id=msg.leader_id)
        elif isinstance(msg, P.PhaseBroadcast):
            ph = msg.phase
            self.emit("PhaseBroadcast", sender=msg.sender, ns=ph.ns, ew=ph.ew,
                      pedestrian=ph.pedestrian, remaining=msg.remaining)
        elif isinstance(msg, P.Handover):
            self.emit("Handover", from_id=msg.from_id, to_id=msg.to_id, to_role=msg.to_role)
        elif isinstance(msg, P.Release):
            self.emit("Release", leader_id=msg.leader_id)

    # -- per-tick phases -----------------------------------------------------

    def deliver(self) -> None:
        self.inbox, self.outbox = self.outbox, []
        for msg in self.inbox:
            if isinstance(msg, P.PhaseBroadcast):
                phase = msg.phase
            elif isinstance(msg, P.Release):
                phase = None
            else:
                continue
            self.ped_phase = phase
            for v in self.world.vehicles.values():
                if v.in_range:
                    v.known_phase = phase

    def spawn(self) -> None:
        k = self.world.tick_index
        while self._vehicle_spawns and self.params.ticks(self._vehicle_spawns[0].spawn) <= k:
            s = self._vehicle_spawns.pop(0)
            v = P.VehicleAgent(s.id, s.direction, s.distance, s.speed, layout=self.params.layout)
            self.world.vehicles[v.id] = v
            self.emit("Spawn", agent="vehicle", id=v.id, direction=v.direction,
                      distance=v.distance_to_stopline, speed=v.speed)
        while self._ped_spawns and self.params.ticks(self._ped_spawns[0].spawn) <= k:
            s = self._ped_spawns.pop(0)
            p = P.PedestrianAgent(s.id, tuple(s.start), tuple(s.target), s.speed, tag_id=s.tag_id)
            self.world.pedestrians[p.id] = p
            self.emit("Spawn", agent="pedestrian", id=p.id, position=p.position, target=p.target)
        for v in self.world.vehicles.values():
            if not v.in_range and abs(v.distance_to_stopline) <= self.params.comm_range:
                v.in_range = True
                v.known_phase = self.last_phase if self.world.leader else None
                self.send(P.Detect(v.id, v.direction, self.world.position(v)))

    def _set_role(self, vid: int, role: P.Role) -> None:
        v = self.world.vehicles[vid]
        if v.role is not role:
            v.role = role
            self.emit("RoleChange", id=vid, role=role)

    def govern(self) -> None:
        w = self.world
        if w.leader is None:
            report = P.sense_conflict(w)
            if not report:
                return
            leader_id = P.elect_leader(report, w.approaching())
            self.send(P.Elect(leader_id))
            self._set_role(leader_id, P.Role.VTL_LEADER)
            w.leader = P.start_term(w, leader_id, P.Role.VTL_LEADER)
            self._log_term(w.leader)

        for _ in range(self.MAX_TRANSFERS_PER_TICK):
            state = w.leader
            step = P.leader_step if state.role is P.Role.VTL_LEADER else P.vptl_leader_step
            res = step(state, w)
            for kind, fields in res.notes:
                self.emit(kind, **fields)
            if res.broadcast is not None:
                self.send(res.broadcast)
                self._record_phase(res.broadcast.phase)
            ctl = res.control
            if ctl is None:
                return
            self.send(ctl)
            if isinstance(ctl, P.Release):
                self._set_role(ctl.leader_id, P.Role.NORMAL)
                w.leader = None
                self.last_phase = None
                return
            if ctl.from_id != ctl.to_id:
                self._set_role(ctl.from_id, P.Role.NORMAL)
            self._set_role(ctl.to_id, ctl.to_role)
            w.leader = P.start_term(w, ctl.to_id, ctl.to_role)
            self._log_term(w.leader)
        raise P.ProtocolError(f"leadership changed hands too often at tick {w.tick_index}")

    def _log_term(self, state: P.LeaderState) -> None:
        if state.role is P.Role.VTL_LEADER:
            self.emit("Term", leader_id=state.leader_id, role=state.role,
                      green=state.timer_ticks * self.params.tick)
        else:
            self.emit("Term", leader_id=state.leader_id, role=state.role)

    def _record_phase(self, phase: P.PhaseState) -> None:
        if phase != self.last_phase:
            self.emit("PhaseChange", ns=phase.ns, ew=phase.ew, pedestrian=phase.pedestrian)
        self.last_phase = phase
        self.result.timeline.append((self.world.tick_index, phase))

    def move_vehicles(self) -> None:
        w, dt = self.world, self.params.tick
        leader_id = w.leader.leader_id if w.leader else None
        for v in list(w.vehicles.values()):
            phase = self.last_phase if v.id == leader_id else v.known_phase
            step = v.speed * dt
            d = v.distance_to_stopline
            red = phase is not None and phase.signal(v.axis) is P.Signal.RED
            new_d = max(0.0, d - step) if red and d >= 0 else d - step
            halted = new_d == d
            if halted and not v.stopped:
                v.stopped = True
                self.emit("Stop", id=v.id)
            elif not halted and v.stopped:
                v.stopped = False
                self.emit("Go", id=v.id)
            v.distance_to_stopline = new_d
            if new_d < -self.params.exit_distance:
                del w.vehicles[v.id]
                self.emit("Exit", id=v.id)

    def move_pedestrians(self) -> None:
        w, dt = self.world, self.params.tick
        dr = self.params.detection_range
        for p in w.pedestrians.values():
            if p.intent is P.Intent.WAITING:
                active = (self.ped_phase is not None
                          and self.ped_phase.pedestrian is P.PedestrianSignal.ACTIVE)
                clear = not any(math.dist(w.position(v), p.position) <= dr for v in w.approaching())
                if active or clear:
                    p.advance(P.Intent.CROSSING)
                    self.emit("PedestrianState", id=p.id, intent=p.intent,
                              reason="phase" if active else "clear")
            elif p.intent is P.Intent.CROSSING:
                (x, y), (tx, ty) = p.position, p.target
                rem = math.hypot(tx - x, ty - y)
                step = p.speed * dt
                if rem <= step:
                    p.position = (tx, ty)
                    p.advance(P.Intent.DONE)
                    self.emit("PedestrianState", id=p.id, intent=p.intent)
                else:
                    p.position = (x + (tx - x) * step / rem, y + (ty - y) * step / rem)

    def run(self) -> SimResult:
        sc = self.scenario
        self.emit("SimStart", scenario=sc.name, seed=sc.seed, tick=self.params.tick,
                  duration=sc.duration)
        for k in range(self.params.ticks(sc.duration)):
            self.world.tick_index = k
            self.deliver()
            self.spawn()
            self.govern()
            self.move_vehicles()
            self.move_pedestrians()
        self.world.tick_index = self.params.ticks(sc.duration)
        self.emit("SimEnd", vehicles_left=len(self.world.vehicles),
                  pedestrians_waiting=sum(p.intent is not P.Intent.DONE
                                          for p in self.world.pedestrians.values()))
        return self.result


def run_scenario(scenario: IntersectionScenario) -> SimResult:
    return Simulation(scenario).run()
