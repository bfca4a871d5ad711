"""Safety and liveness checks over a simulation event log.

The checks read only the log, so they apply equally to an in-memory
:class:`~uwb_vptl.simulation.SimResult` and to a log file parsed with
:func:`parse_log`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .scenario import IntersectionScenario
from .simulation import Event

_LINE = re.compile(r"^t=(?P<t>\S+) (?P<kind>\S+)(?P<rest>.*)$")


def parse_log(text: str, tick: float) -> list[Event]:
    events = []
    for n, line in enumerate(text.splitlines(), 1):
        m = _LINE.match(line)
        if not m:
            raise ValueError(f"line {n}: not an event record: {line!r}")
        kv = tuple(tuple(tok.split("=", 1)) for tok in m["rest"].split())
        events.append(Event(int(round(float(m["t"]) / tick)), m["kind"], kv))
    return events


def _s(v) -> str:
    return str(getattr(v, "value", v))


@dataclass
class Bounds:
    vehicle_wait: int
    pedestrian_wait: int

    @classmethod
    def for_scenario(cls, sc: IntersectionScenario) -> "Bounds":
        p = sc.params
        ped = max(p.pedestrian_phase_fixed, p.pedestrian_phase_max)
        return cls(p.ticks(2 * p.phase_max + ped + 1.0), p.ticks(2 * p.phase_max + 1.0))


def check_phase_safety(events: list[Event]) -> list[str]:
    bad = []
    for e in events:
        if e.kind not in ("PhaseBroadcast", "PhaseChange"):
            continue
        ns, ew, ped = _s(e.get("ns")), _s(e.get("ew")), _s(e.get("pedestrian"))
        if ns == "Green" and ew == "Green":
            bad.append(f"tick {e.tick}: both axes green")
        if ped == "Active" and "Green" in (ns, ew):
            bad.append(f"tick {e.tick}: pedestrian phase with a green axis")
    return bad


def check_leadership(events: list[Event]) -> list[str]:
    """At most one leader; it changes only through Elect, Handover or Release,
    and only the leader broadcasts phases."""
    bad = []
    leader = None
    for e in events:
        if e.kind == "Elect":
            if leader is not None:
                bad.append(f"tick {e.tick}: election while {leader} leads")
            leader = _s(e.get("leader_id"))
        elif e.kind == "Handover":
            if _s(e.get("from_id")) != leader:
                bad.append(f"tick {e.tick}: handover from non-leader {e.get('from_id')}")
            leader = _s(e.get("to_id"))
        elif e.kind == "Release":
            if _s(e.get("leader_id")) != leader:
                bad.append(f"tick {e.tick}: release by non-leader {e.get('leader_id')}")
            leader = None
        elif e.kind == "PhaseBroadcast":
            if _s(e.get("sender")) != leader:
                bad.append(f"tick {e.tick}: broadcast by non-leader {e.get('sender')}")
    leaders_now: dict[str, str] = {}
    for e in events:
        if e.kind == "RoleChange":
            if _s(e.get("role")) == "Normal":
                leaders_now.pop(_s(e.get("id")), None)
            else:
                leaders_now[_s(e.get("id"))] = _s(e.get("role"))
            if len(leaders_now) > 1:
                bad.append(f"tick {e.tick}: {len(leaders_now)} leaders at once")
    return bad


def check_liveness(events: list[Event], bounds: Bounds) -> list[str]:
    """Every stopped vehicle moves again and every vehicle leaves; every
    pedestrian starts crossing and finishes, all within the bounds."""
    bad = []
    stopped_at: dict[str, int] = {}
    vehicles, exited = set(), set()
    ped_spawn: dict[str, int] = {}
    ped_done = set()
    end = events[-1].tick if events else 0
    for e in events:
        vid = _s(e.get("id"))
        if e.kind == "Spawn" and _s(e.get("agent")) == "vehicle":
            vehicles.add(vid)
        elif e.kind == "Spawn" and _s(e.get("agent")) == "pedestrian":
            ped_spawn[vid] = e.tick
        elif e.kind == "Stop":
            stopped_at[vid] = e.tick
        elif e.kind == "Go":
            waited = e.tick - stopped_at.pop(vid)
            if waited > bounds.vehicle_wait:
                bad.append(f"vehicle {vid} waited {waited} ticks at red")
        elif e.kind == "Exit":
            exited.add(vid)
        elif e.kind == "PedestrianState" and _s(e.get("intent")) == "Crossing":
            waited = e.tick - ped_spawn[vid]
            if waited > bounds.pedestrian_wait:
                bad.append(f"pedestrian {vid} waited {waited} ticks to cross")
        elif e.kind == "PedestrianState" and _s(e.get("intent")) == "Done":
            ped_done.add(vid)
    for vid, t0 in stopped_at.items():
        if end - t0 > bounds.vehicle_wait:
            bad.append(f"vehicle {vid} still stopped after {end - t0} ticks")
    bad += [f"vehicle {vid} never left" for vid in sorted(vehicles - exited)]
    bad += [f"pedestrian {pid} never finished crossing" for pid in sorted(set(ped_spawn) - ped_done)]
    return bad


def pedestrian_phase_runs(events: list[Event]) -> list[int]:
    """Lengths, in ticks, of each contiguous run of pedestrian-phase broadcasts."""
    runs, current, last = [], 0, None
    for e in events:
        if e.kind != "PhaseBroadcast":
            continue
        if _s(e.get("pedestrian")) == "Active":
            if current and last is not None and e.tick != last + 1:
                runs.append(current)
                current = 0
            current += 1
            last = e.tick
        elif current:
            runs.append(current)
            current = 0
    if current:
        runs.append(current)
    return runs


def check_all(events: list[Event], scenario: IntersectionScenario) -> list[str]:
    return (check_phase_safety(events) + check_leadership(events)
            + check_liveness(events, Bounds.for_scenario(scenario)))
