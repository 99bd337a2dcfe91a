import itertools
import math
import random

import pytest

from dream_teleop.errors import ConfigurationError
from dream_teleop.geometry import Pose
from dream_teleop.metaphor import (
    HitBox,
    InteractionState,
    Mode,
    VisualState,
    hit_test,
    speed_feedback,
    step_interaction,
    visual_state,
)

BOX = HitBox(0.15, 0.15, 0.15)
VUAV = Pose(0.0, 0.0, 1.0, 0.3)


def free_state():
    return InteractionState.initial(VUAV, BOX)


def hand_inside():
    return Pose(0.05, -0.05, 1.02, 0.0)


def hand_outside():
    return Pose(1.0, 1.0, 1.0, 0.0)


def test_hit_test_center_true():
    assert hit_test(VUAV, VUAV, BOX)


def test_hit_test_face_inclusive():
    on_face = Pose(VUAV.x + BOX.hx, VUAV.y, VUAV.z, 0)
    assert hit_test(on_face, VUAV, BOX)


def test_hit_test_just_outside_false():
    outside = Pose(VUAV.x + BOX.hx + 1e-6, VUAV.y, VUAV.z, 0)
    assert not hit_test(outside, VUAV, BOX)


def test_hitbox_rejects_non_positive_extent():
    with pytest.raises(ConfigurationError):
        HitBox(0.0, 0.1, 0.1)


def test_grab_keeps_pose_continuous():
    s = step_interaction(free_state(), hand_inside(), True)
    assert s.mode is Mode.TAKEN
    assert s.vuav == VUAV  # no teleport at the grab instant


def test_taken_follows_hand_rigidly():
    s = step_interaction(free_state(), hand_inside(), True)
    hand2 = Pose(hand_inside().x + 1.0, hand_inside().y, hand_inside().z, hand_inside().yaw)
    s = step_interaction(s, hand2, True)
    assert s.vuav.x == pytest.approx(VUAV.x + 1.0, abs=1e-12)
    assert s.vuav.y == pytest.approx(VUAV.y, abs=1e-12)


def test_release_freezes_pose():
    s = step_interaction(free_state(), hand_inside(), True)
    s = step_interaction(s, hand_inside(), False)
    assert s.mode is Mode.FREE
    pose_after_release = s.vuav
    for dx in (0.3, 0.9, 2.0):
        far = Pose(dx, dx, 1.0, 0.0)
        s = step_interaction(s, far, False)
        assert s.vuav == pose_after_release


def test_press_outside_box_does_not_grab():
    s = step_interaction(free_state(), hand_outside(), True)
    assert s.mode is Mode.FREE
    assert s.vuav == VUAV


def test_held_press_sweeping_into_box_does_not_grab():
    # Button went down outside; hand then enters the box still pressed.
    s = step_interaction(free_state(), hand_outside(), True)
    s = step_interaction(s, hand_inside(), True)
    assert s.mode is Mode.FREE
    # Releasing and pressing again inside does grab.
    s = step_interaction(s, hand_inside(), False)
    s = step_interaction(s, hand_inside(), True)
    assert s.mode is Mode.TAKEN


def test_visual_state_examples():
    assert visual_state(free_state(), hand_inside()) is VisualState.CAN_BE_TAKEN
    assert visual_state(free_state(), hand_outside()) is VisualState.CANNOT_BE_TAKEN
    taken = step_interaction(free_state(), hand_inside(), True)
    assert visual_state(taken, hand_outside()) is VisualState.IS_TAKEN


def test_transition_table_is_total():
    # Every (mode, hand-in-box, button) combination has a defined outcome.
    for mode, inside, pressed in itertools.product((Mode.FREE, Mode.TAKEN), (True, False), (True, False)):
        hand = hand_inside() if inside else hand_outside()
        if mode is Mode.FREE:
            state = free_state()
        else:
            state = step_interaction(free_state(), hand_inside(), True)
        out = step_interaction(state, hand, pressed)
        if mode is Mode.FREE:
            expect_taken = inside and pressed  # fresh edge in these fixtures
            assert (out.mode is Mode.TAKEN) == expect_taken
            if not expect_taken:
                assert out.vuav == state.vuav
        else:
            assert (out.mode is Mode.TAKEN) == pressed
        # Mode/grip invariant holds everywhere.
        assert (out.mode is Mode.TAKEN) == (out.grip is not None)


def test_random_fuzz_no_teleport_no_free_motion():
    rng = random.Random(99)
    state = free_state()
    pressed = False
    hand = hand_outside()
    for _ in range(1000):
        if rng.random() < 0.3:
            pressed = not pressed
        hand = Pose(
            hand.x + rng.uniform(-0.2, 0.2),
            hand.y + rng.uniform(-0.2, 0.2),
            min(max(hand.z + rng.uniform(-0.1, 0.1), 0.5), 1.5),
            hand.yaw + rng.uniform(-0.3, 0.3),
        )
        before = state
        state = step_interaction(state, hand, pressed)
        if before.mode is Mode.FREE and state.mode is Mode.TAKEN:
            assert state.vuav == before.vuav  # grab never teleports
        if before.mode is Mode.FREE and state.mode is Mode.FREE:
            assert state.vuav == before.vuav  # free leader never moves
        assert (state.mode is Mode.TAKEN) == (state.grip is not None)


def test_speed_feedback_clamped_linear():
    assert speed_feedback(0.0, 1.0) == 0.0
    assert speed_feedback(1.0, 1.0) == 1.0
    assert speed_feedback(0.5, 1.0) == 0.5
    assert speed_feedback(3.0, 1.0) == 1.0


def test_speed_feedback_monotone():
    speeds = [i * 0.02 for i in range(100)]
    values = [speed_feedback(s, 1.3) for s in speeds]
    assert all(b >= a for a, b in zip(values, values[1:]))


def test_speed_feedback_errors():
    with pytest.raises(ConfigurationError):
        speed_feedback(0.5, 0.0)
    with pytest.raises(ConfigurationError):
        speed_feedback(0.5, -1.0)
    with pytest.raises(ValueError):
        speed_feedback(-0.1, 1.0)
    with pytest.raises(ValueError):
        speed_feedback(math.nan, 1.0)
