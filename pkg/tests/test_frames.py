import numpy as np
import pytest

from gvfsim.errors import EulerSingularityError
from gvfsim.frames import (
    AircraftTarget,
    PlanarTargetTransform,
    StaticTransform,
    TimeProfile,
    UnicycleTarget,
    euler_xyz_matrix,
    rot2,
    se2_transform,
    se3_euler_transform,
    step_aircraft,
    step_unicycle,
    verify_transform,
)


def sample_unicycle(heading=np.pi / 2, speed=2.0, turn=0.3):
    return UnicycleTarget(
        position=np.zeros(2),
        heading=heading,
        speed=TimeProfile.constant(speed),
        turn_rate=TimeProfile.constant(turn),
    )


def sample_aircraft(pitch=0.0, yaw=np.pi / 2):
    return AircraftTarget(
        position=np.array([0.0, 0.0, 1.0]),
        euler=np.array([0.0, pitch, yaw]),
        body_velocity=(
            TimeProfile.constant(1.0),
            TimeProfile.sinusoid(0.1, 1.0, kind="cos"),
            TimeProfile.sinusoid(0.1, 1.0),
        ),
        body_rates=(
            TimeProfile.sinusoid(0.01, 1.0),
            TimeProfile.sinusoid(0.01, 1.0),
            TimeProfile.sinusoid(0.01, 1.0),
        ),
    )


def test_profile_evaluation_and_derivative():
    p = TimeProfile.sinusoid(0.5, 2.0, phase=0.3)
    t = np.linspace(0.0, 3.0, 7)
    np.testing.assert_allclose(p(t), 0.5 * np.sin(2.0 * t + 0.3), rtol=1e-14)
    np.testing.assert_allclose(p.derivative()(t), 1.0 * np.cos(2.0 * t + 0.3), rtol=1e-13)

    c = TimeProfile.sinusoid(0.5, 2.0, kind="cos")
    np.testing.assert_allclose(c.derivative()(t), -1.0 * np.sin(2.0 * t), rtol=1e-13, atol=1e-15)

    const = TimeProfile.constant(2.5)
    assert const(17.0) == 2.5
    assert const.derivative()(17.0) == 0.0


def test_rot2_and_euler_matrix():
    r = rot2(np.pi / 2)
    np.testing.assert_allclose(r, [[0.0, -1.0], [1.0, 0.0]], atol=1e-15)
    # frame-to-inertial: the frame x-axis maps to inertial +y
    np.testing.assert_allclose(r @ [1.0, 0.0], [0.0, 1.0], atol=1e-15)

    c = euler_xyz_matrix(np.array([0.0, 0.0, np.pi / 2]))
    np.testing.assert_allclose(c @ [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], atol=1e-15)
    # proper rotation for random attitudes
    rng = np.random.default_rng(2)
    for _ in range(10):
        eul = rng.uniform(-1.2, 1.2, size=3)
        m = euler_xyz_matrix(eul)
        np.testing.assert_allclose(m @ m.T, np.eye(3), atol=1e-13)
        assert np.linalg.det(m) == pytest.approx(1.0, abs=1e-12)


def test_unicycle_kinematics_and_step():
    tgt = sample_unicycle()
    np.testing.assert_allclose(tgt.kinematics(0.0), [0.0, 2.0, 0.3], atol=1e-15)

    straight = sample_unicycle(heading=0.0, speed=1.0, turn=0.0)
    stepped = step_unicycle(straight, 0.0, 0.25)
    np.testing.assert_allclose(stepped.position, [0.25, 0.0], atol=1e-14)
    assert stepped.heading == pytest.approx(0.0, abs=1e-15)


def test_aircraft_kinematics_hand_case():
    tgt = sample_aircraft()
    rates = tgt.kinematics(0.0)
    # yaw 90 deg: body +x points along inertial +y; v(0)=(1, 0.1, 0)
    np.testing.assert_allclose(rates[:3], [-0.1, 1.0, 0.0], atol=1e-14)
    # level flight: euler rates reduce to (p, q, r)
    np.testing.assert_allclose(rates[3:], [0.0, 0.0, 0.0], atol=1e-14)


def test_aircraft_guard_on_construction_and_in_flight():
    with pytest.raises(EulerSingularityError):
        sample_aircraft(pitch=1.48)
    # pitch-up flight hits the guard band during stepping
    climbing = AircraftTarget(
        position=np.zeros(3),
        euler=np.array([0.0, 1.35, 0.0]),
        body_velocity=(TimeProfile.constant(1.0), TimeProfile.constant(0.0), TimeProfile.constant(0.0)),
        body_rates=(TimeProfile.constant(0.0), TimeProfile.constant(1.0), TimeProfile.constant(0.0)),
    )
    with pytest.raises(EulerSingularityError):
        t, tgt = 0.0, climbing
        for _ in range(1000):
            tgt = step_aircraft(tgt, t, 1e-3)
            t += 1e-3


def test_static_transform_identity():
    tf = StaticTransform(2)
    x = np.array([1.5, -0.5])
    np.testing.assert_array_equal(tf.apply(x, 3.0), x)
    np.testing.assert_array_equal(tf.jacobian(x, 3.0), np.eye(2))
    np.testing.assert_array_equal(tf.drift(x, 3.0), np.zeros(2))
    np.testing.assert_array_equal(tf.inverse_apply(x, 3.0), x)


def test_se2_apply_hand_case():
    target = sample_unicycle()
    tf = se2_transform(target)
    np.testing.assert_allclose(tf.apply(np.array([1.0, 0.0]), target), [0.0, -1.0], atol=1e-15)
    round_trip = tf.inverse_apply(tf.apply(np.array([0.7, 1.3]), target), target)
    np.testing.assert_allclose(round_trip, [0.7, 1.3], atol=1e-14)


def test_se2_drift_hand_case():
    # x_I=(1,0) sits at x_P=(0,-1); drift = skew2(0.3) @ x_P - R^T xdot_d
    #                                      = (-0.3, 0) - (2, 0)
    target = sample_unicycle()
    tf = se2_transform(target)
    np.testing.assert_allclose(tf.drift(np.array([1.0, 0.0]), target, 0.0), [-2.3, 0.0], atol=1e-14)


def test_se3_apply_hand_case():
    target = sample_aircraft()
    tf = se3_euler_transform(target)
    x_p = tf.apply(np.array([1.0, 0.0, 1.0]), target)
    np.testing.assert_allclose(x_p, [0.0, -1.0, 0.0], atol=1e-14)


def test_verify_transform_catches_wrong_drift():
    target = sample_unicycle()

    class NoDrift(PlanarTargetTransform):
        def drift(self, x_inertial, target, t):
            return np.zeros(2)

    with pytest.raises(ValueError):
        verify_transform(NoDrift(), target, step_unicycle)


def test_constructors_self_check():
    # the factory helpers run the finite-difference verification and pass
    se2_transform(sample_unicycle())
    se3_euler_transform(sample_aircraft())
