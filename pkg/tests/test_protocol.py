import itertools

import pytest

from uwb_vptl.protocol import (
    ApproachDirection, Axis, Handover, Intent, NoCandidates, NotLeader, PedestrianAgent,
    PedestrianSignal, PhaseState, ProtocolParams, Release, Role, Signal, VehicleAgent, World,
    elect_leader, green_ticks, leader_step, sense_conflict, start_term, vptl_leader_step,
)

N, S, E, W = ApproachDirection.NORTH, ApproachDirection.SOUTH, ApproachDirection.EAST, ApproachDirection.WEST


def world(*vehicles, peds=(), **params):
    w = World(params=ProtocolParams(**params))
    for v in vehicles:
        w.vehicles[v.id] = v
    for p in peds:
        w.pedestrians[p.id] = p
    return w


def veh(vid, direction, d, speed=10.0):
    return VehicleAgent(vid, direction, float(d), speed)


def lead(w, vid, role=Role.VTL_LEADER):
    w.vehicles[vid].role = role
    w.leader = start_term(w, vid, role)
    return w.leader


def test_phase_state_invariants():
    with pytest.raises(ValueError):
        PhaseState(Signal.GREEN, Signal.GREEN, PedestrianSignal.INACTIVE)
    with pytest.raises(ValueError):
        PhaseState(Signal.GREEN, Signal.RED, PedestrianSignal.ACTIVE)
    assert PhaseState.serving(Axis.NS).signal(Axis.EW) is Signal.RED
    ped = PhaseState.pedestrian_phase()
    assert ped.ns is ped.ew is Signal.RED


def test_frames_round_trip():
    w = world(veh(1, N, 30), veh(2, E, 10))
    for v in w.vehicles.values():
        # the stop line is straight ahead of the vehicle
        fx, fy = w.to_vehicle_frame(v, (0.0, 0.0))
        assert fy > 0
        back = w.from_vehicle_frame(v, (fx, fy))
        assert back == pytest.approx((0.0, 0.0), abs=1e-12)
    # northbound-from-north traffic keeps to its right, the -x side
    assert w.position(w.vehicles[1]) == pytest.approx((-1.75, 50.0))


def test_sense_conflict_examples():
    assert not sense_conflict(world(veh(1, N, 50)))
    r = sense_conflict(world(veh(1, N, 50), veh(2, E, 80)))
    assert r.vehicle_vehicle and not r.vehicle_pedestrian
    assert r.vehicles == {1, 2}
    p = PedestrianAgent(9, (-6.0, 10.0), (6.0, 10.0))
    r = sense_conflict(world(veh(1, N, 20), peds=[p]))
    assert r.vehicle_pedestrian and not r.vehicle_vehicle
    assert r.pedestrians == {9}


def test_sense_conflict_ranges():
    assert not sense_conflict(world(veh(1, N, 50), veh(2, E, 301)))
    far = PedestrianAgent(9, (-6.0, 10.0), (6.0, 10.0))
    assert not sense_conflict(world(veh(1, N, 200), peds=[far]))
    crossing = PedestrianAgent(9, (-6.0, 10.0), (6.0, 10.0), intent=Intent.CROSSING)
    assert not sense_conflict(world(veh(1, N, 20), peds=[crossing]))
    # vehicles past the stop line no longer conflict
    assert not sense_conflict(world(veh(1, N, -1), veh(2, E, 30)))


def test_elect_examples():
    vs = [veh(7, N, 40), veh(3, E, 40), veh(12, S, 60)]
    rep = sense_conflict(world(*vs))
    for perm in itertools.permutations(vs):
        assert elect_leader(rep, perm) == 3
    single = [veh(5, N, 20)]
    p = PedestrianAgent(1, (-6.0, 10.0), (6.0, 10.0))
    assert elect_leader(sense_conflict(world(*single, peds=[p])), single) == 5
    with pytest.raises(NoCandidates):
        elect_leader(rep, [])
    with pytest.raises(ValueError):
        elect_leader(sense_conflict(world(veh(1, N, 5))), [veh(1, N, 5)])


def test_elect_nearest_wins():
    vs = [veh(1, N, 80), veh(9, E, 12)]
    assert elect_leader(sense_conflict(world(*vs)), vs) == 9


def test_green_ticks_clamped():
    w = world(veh(1, N, 40), veh(2, E, 30))
    assert green_ticks(w, Axis.EW) == 50          # 3 s of travel, below phase_min
    w.vehicles[2].distance_to_stopline = 200.0
    assert green_ticks(w, Axis.EW) == 202
    w.vehicles[2].distance_to_stopline = 299.0
    assert green_ticks(w, Axis.EW) == 300         # phase_max
    assert green_ticks(world(), Axis.NS) == 50


def test_leader_serves_other_axis_then_releases():
    w = world(veh(1, N, 5), veh(2, E, 30))
    st = lead(w, 1)
    res = leader_step(st, w)
    assert res.broadcast.phase == PhaseState.serving(Axis.EW)
    assert res.broadcast.remaining == pytest.approx(5.0)
    assert res.control is None
    # traffic on the served axis clears; own lane goes green, then release
    del w.vehicles[2]
    st.elapsed = st.timer_ticks
    res = leader_step(st, w)
    assert res.control is None
    assert res.broadcast.phase == PhaseState.serving(Axis.NS)
    res = leader_step(st, w)
    assert res.control == Release(1)


def test_leader_hands_over_when_conflict_persists():
    w = world(veh(1, N, 5), veh(2, E, 30), veh(3, W, 20))
    st = lead(w, 1)
    st.elapsed = st.timer_ticks
    res = leader_step(st, w)
    assert res.control == Handover(1, 3, Role.VTL_LEADER)


def test_leader_hands_to_vptl_when_pedestrian_waits():
    p = PedestrianAgent(1, (-6.0, 10.0), (6.0, 10.0))
    w = world(veh(1, N, 5), veh(2, E, 30), peds=[p])
    st = lead(w, 1)
    st.elapsed = st.timer_ticks
    res = leader_step(st, w)
    assert res.control == Handover(1, 1, Role.VPTL_LEADER)


def test_not_leader():
    w = world(veh(1, N, 5), veh(2, E, 30))
    st = start_term(w, 1, Role.VTL_LEADER)
    with pytest.raises(NotLeader):
        leader_step(st, w)
    w.leader = st
    with pytest.raises(NotLeader):
        vptl_leader_step(st, w)


def test_vptl_zero_pedestrians_hands_over_immediately():
    w = world(veh(1, N, 5), veh(2, E, 30))
    st = lead(w, 1, Role.VPTL_LEADER)
    res = vptl_leader_step(st, w)
    assert res.broadcast is None
    assert res.control == Handover(1, 2, Role.VTL_LEADER)


def run_vptl(w, st, limit=2000):
    """Step the VPTL leader, walking pedestrians across, until it gives up the phase."""
    ticks = 0
    while ticks < limit:
        w.tick_index += 1
        res = vptl_leader_step(st, w)
        if res.broadcast is None or res.broadcast.phase != PhaseState.pedestrian_phase():
            return ticks, res
        ticks += 1
        for p in w.pedestrians.values():
            if p.intent is Intent.WAITING:
                p.advance(Intent.CROSSING)
            (x, y), (tx, ty) = p.position, p.target
            step = min(1.0, p.speed * w.params.tick / max(abs(tx - x), 1e-12))
            p.position = (x + (tx - x) * step, y)
            if p.position == p.target:
                p.advance(Intent.DONE)
    raise AssertionError("pedestrian phase never ended")


def test_vptl_ends_when_tracked_pedestrian_crosses():
    p = PedestrianAgent(1, (-6.0, 10.0), (6.0, 10.0))
    w = world(veh(1, N, 0), veh(2, E, 30), peds=[p])
    st = lead(w, 1, Role.VPTL_LEADER)
    ticks, res = run_vptl(w, st)
    fixed = w.params.ticks(w.params.pedestrian_phase_fixed)
    assert not st.any_untrackable
    assert st.tracks[1].crossed
    # halfway is 6 m at 1.4 m/s, about 43 ticks, plus the detector window
    assert 43 <= ticks < fixed
    assert res.control == Handover(1, 2, Role.VTL_LEADER)


def test_vptl_untrackable_holds_fixed_period():
    # behind the leader's anchors, outside coverage
    p = PedestrianAgent(1, (-6.0, 30.0), (6.0, 30.0))
    w = world(veh(1, N, 0), veh(2, E, 30), peds=[p])
    st = lead(w, 1, Role.VPTL_LEADER)
    ticks, res = run_vptl(w, st)
    assert st.any_untrackable
    assert ticks == w.params.ticks(w.params.pedestrian_phase_fixed)
