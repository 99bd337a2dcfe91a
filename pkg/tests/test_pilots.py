import math

import pytest

from dream_teleop.config import DreamPilotConfig, JoystickPilotConfig, ScenarioConfig
from dream_teleop.errors import ConfigurationError
from dream_teleop.geometry import Pose, wrap_angle
from dream_teleop.metrics import TaskGeometry, aggregate, reference_yaw, segment_journeys
from dream_teleop.pilots import (
    HandKeyframe,
    HandScript,
    JoystickPilot,
    build_shuttle_script,
    hand_at,
    run_scenario,
)
from dream_teleop.uav import Limits, UavState
from dream_teleop.world import World

GEOM = TaskGeometry()


def kf(t, x, y, yaw=0.0, take=False):
    return HandKeyframe(t, Pose(x, y, 1.0, yaw), take)


def test_hand_at_keyframe_exact():
    script = HandScript((kf(0, 0, 0), kf(1, 2, 0, take=True), kf(2, 4, 0)))
    pose, take = hand_at(script, 1.0)
    assert (pose.x, pose.y) == (2.0, 0.0)
    assert take is True


def test_hand_at_midpoint():
    script = HandScript((kf(0, 0, 0), kf(2, 2, 1)))
    pose, _ = hand_at(script, 1.0)
    assert pose.x == pytest.approx(1.0)
    assert pose.y == pytest.approx(0.5)


def test_hand_at_clamps_at_ends():
    script = HandScript((kf(1, 1, 1), kf(2, 3, 3)))
    pose, _ = hand_at(script, 0.0)
    assert (pose.x, pose.y) == (1.0, 1.0)
    pose, _ = hand_at(script, 99.0)
    assert (pose.x, pose.y) == (3.0, 3.0)


def test_hand_at_button_from_governing_interval():
    script = HandScript((kf(0, 0, 0, take=False), kf(1, 0, 0, take=True), kf(2, 0, 0, take=False)))
    assert hand_at(script, 0.5)[1] is False
    assert hand_at(script, 1.0)[1] is True
    assert hand_at(script, 1.5)[1] is True
    assert hand_at(script, 2.0)[1] is False


def test_hand_at_yaw_shortest_arc_across_pi():
    # Yaw 3 -> -3 should pass through +-pi, never near zero.
    script = HandScript((kf(0, 0, 0, yaw=3.0), kf(1, 0, 0, yaw=-3.0)))
    for i in range(1, 20):
        t = i / 20
        pose, _ = hand_at(script, t)
        assert abs(pose.yaw) >= 3.0 - 1e-9
        expected = wrap_angle(3.0 + t * wrap_angle(-3.0 - 3.0))
        assert abs(wrap_angle(pose.yaw - expected)) < 1e-12


def test_hand_script_validation():
    with pytest.raises(ConfigurationError):
        HandScript(())
    with pytest.raises(ConfigurationError):
        HandScript((kf(1, 0, 0), kf(1, 1, 1)))


def test_shuttle_script_grabs_on_the_leader():
    script = build_shuttle_script(GEOM, DreamPilotConfig(), 30.0)
    pose0, take0 = hand_at(script, 0.0)
    assert take0 is False
    assert (pose0.x, pose0.y) == GEOM.start[:2]
    # Press edge happens while still on the leader.
    t_press = next(k.t for k in script.keyframes if k.take_pressed)
    pose, take = hand_at(script, t_press)
    assert take is True
    assert (pose.x, pose.y) == GEOM.start[:2]


def test_joystick_pilot_zero_sticks_at_waypoint():
    cfg = JoystickPilotConfig(reaction_delay_s=0.0, hold_s=0.5)
    pilot = JoystickPilot(cfg, GEOM, Limits())
    pilot.holding_until = None
    pilot.active = 1
    wx, wy = GEOM.arrival[:2]
    yaw = reference_yaw((wx, wy), GEOM.target[:2])
    state = UavState.hovering(Pose(wx, wy, 1.0, yaw))
    sticks = pilot.sticks_at(10.0, state)
    assert (sticks.lx, sticks.ly, sticks.ryaw) == (0.0, 0.0, 0.0)


def test_joystick_pilot_yaw_stick_clamped():
    cfg = JoystickPilotConfig(reaction_delay_s=0.0, yaw_gain=2.0, hold_s=0.5)
    pilot = JoystickPilot(cfg, GEOM, Limits())
    pilot.holding_until = None
    pilot.active = 1
    pos = (0.0, 0.0)
    bearing = reference_yaw(pos, GEOM.target[:2])
    state = UavState.hovering(Pose(pos[0], pos[1], 1.0, wrap_angle(bearing - 0.7)))
    sticks = pilot.sticks_at(5.0, state)
    assert sticks.ryaw == 1.0  # 2.0 * 0.7 clamped


def test_joystick_pilot_reaction_delay_uses_stale_state():
    cfg = JoystickPilotConfig(reaction_delay_s=0.5, hold_s=0.1)
    pilot = JoystickPilot(cfg, GEOM, Limits())
    pilot.holding_until = None
    pilot.active = 1
    near = UavState.hovering(Pose(0.0, 1.99, 1.0, 0.0))
    far = UavState.hovering(Pose(0.0, -2.0, 1.0, 0.0))
    # Feed "far" at t=0, then "near" at t=0.6; at t=0.6 the pilot sees t<=0.1 state.
    pilot.sticks_at(0.0, far)
    sticks = pilot.sticks_at(0.6, near)
    mag = math.hypot(sticks.lx, sticks.ly)
    assert mag == pytest.approx(cfg.cruise_speed / Limits().max_horizontal_speed, abs=1e-9)


def test_dream_scenario_produces_journeys():
    cfg = ScenarioConfig(mode="dream", geometry=GEOM, duration_s=60.0, seed=3)
    log = run_scenario(cfg)
    journeys = segment_journeys(log, GEOM, cfg.stop)
    assert len(journeys) >= 3
    kinds = [e.event for e in log.events]
    assert "grab" in kinds and "release" in kinds


def test_joystick_scenario_produces_journeys():
    cfg = ScenarioConfig(mode="joystick", geometry=GEOM, duration_s=60.0, seed=3)
    log = run_scenario(cfg)
    journeys = segment_journeys(log, GEOM, cfg.stop)
    assert len(journeys) >= 3


def test_scenario_replay_determinism():
    cfg = ScenarioConfig(mode="joystick", geometry=GEOM, duration_s=10.0, seed=12)
    a = run_scenario(cfg)
    b = run_scenario(cfg)
    assert a.samples == b.samples
    assert a.events == b.events


def test_seed_override_changes_manifest():
    cfg = ScenarioConfig(mode="dream", geometry=GEOM, duration_s=5.0, seed=1)
    log = run_scenario(cfg, seed=77)
    assert log.header.manifest["seed"] == 77
    assert log.header.manifest["config"]["seed"] == 77


def test_reaction_delay_increases_lateral_error():
    base = ScenarioConfig(
        mode="joystick", geometry=GEOM, duration_s=45.0, seed=5,
        joystick_pilot=JoystickPilotConfig(reaction_delay_s=0.0),
    )
    slow = ScenarioConfig(
        mode="joystick", geometry=GEOM, duration_s=45.0, seed=5,
        joystick_pilot=JoystickPilotConfig(reaction_delay_s=0.6),
    )
    rep_base = aggregate(segment_journeys(run_scenario(base), GEOM, base.stop))
    rep_slow = aggregate(segment_journeys(run_scenario(slow), GEOM, slow.stop))
    assert rep_slow.mle_m > rep_base.mle_m


def test_dream_pilot_cannot_move_leader_without_grabbing():
    # A hand sweeping through the scene with the button up never moves the
    # leader, hence the follower holds its setpoint: no automaton bypass.
    cfg = ScenarioConfig(mode="dream", geometry=GEOM, duration_s=3.0, seed=2)
    world = World(cfg)
    for k in range(300):
        t = world.time
        hand = Pose(math.sin(t) * 2.0, -2.0 + t, 1.0, 0.0)
        world.step(hand=hand, take_pressed=False)
    assert world.interaction.vuav == world.start_pose
    assert math.hypot(world.uav.pose.x - GEOM.start[0], world.uav.pose.y - GEOM.start[1]) < 1e-6
