import math

import numpy as np
import pytest

from frameq import (
    Chart,
    Coordinate,
    FirstOrderOperator,
    ReferenceFrame,
    adapted_flow,
    frame_from_trivialization,
    lift_vector_field,
    relative_velocity,
)
from frameq.errors import (
    FlowEscape,
    NonInvertibleMap,
    NonPolynomialResult,
    NotProjectable,
    StiffFlow,
)
from frameq.frames import _classify_failure

CH = Chart(("x", "y"))
CH1 = Chart(("q",))


def test_component_validation():
    with pytest.raises(ValueError):
        ReferenceFrame(CH, (CH.var("x"),))  # wrong arity
    with pytest.raises(ValueError):
        ReferenceFrame(CH, (CH.var("p_x"), CH.var("y")))
    from frameq.scalars import GaussianRational

    imag = GaussianRational(0, 1) * CH.var("x")
    with pytest.raises(ValueError):
        ReferenceFrame(CH, (imag, CH.var("y")))


def test_constructors_and_velocity():
    zero = ReferenceFrame.zero(CH)
    assert all(g.is_zero() for g in zero.components)
    const = ReferenceFrame.constant(CH, (2, -1))
    assert np.allclose(const.velocity(0.0, (5.0, 5.0)), [2.0, -1.0])
    lin = ReferenceFrame(CH, (CH.var("t") * 3, CH.var("x")))
    assert np.allclose(lin.velocity(2.0, (4.0, 0.0)), [6.0, 4.0])


def test_as_vector_field_is_the_connection():
    frame = ReferenceFrame(CH, (CH.var("y"), CH.var("x") * 0))
    op = frame.as_vector_field()
    f = CH.var("t") * CH.var("x")
    # (d_t + y d_x) (t x) = x + y t
    assert op.apply(f) == CH.var("x") + CH.var("y") * CH.var("t")


def test_frame_difference():
    a = ReferenceFrame.constant(CH, (1, 2))
    b = ReferenceFrame.constant(CH, (3, 5))
    d = b - a
    assert d.components[0].constant_value() == 2
    assert d.components[1].constant_value() == 3


def test_trivialization_translation():
    t = CH1.var("t")
    q = CH1.var("q")
    frame = frame_from_trivialization(CH1, (q + t * t,))
    assert frame.components[0] == 2 * t


def test_trivialization_shear():
    t, x, y = CH.var("t"), CH.var("x"), CH.var("y")
    # x = xbar + t*ybar, y = ybar  =>  Gamma = (y, 0)
    frame = frame_from_trivialization(CH, (x + t * y, y))
    assert frame.components[0] == y
    assert frame.components[1].is_zero()


def test_trivialization_rejections():
    t = CH1.var("t")
    q = CH1.var("q")
    with pytest.raises(NonInvertibleMap):
        frame_from_trivialization(CH1, (t * 0 + 1,))
    with pytest.raises(NonPolynomialResult):
        frame_from_trivialization(CH1, ((1 + t) * q,))
    with pytest.raises(ValueError):
        frame_from_trivialization(CH1, (q * q,))


def test_flow_constant_frame():
    frame = ReferenceFrame.constant(CH, (0.5, -0.25))
    flow = adapted_flow(frame, 0.0, 4.0, [(1.0, 1.0), (0.0, 2.0)])
    end = flow.forward(4.0)
    assert np.allclose(end, [[3.0, 0.0], [2.0, 1.0]], atol=1e-9)
    back = flow.backward(4.0, (3.0, 0.0))
    assert np.allclose(back, [1.0, 1.0], atol=1e-8)
    assert flow.max_residual() < 1e-6


def test_flow_linear_frame_matches_exponential():
    frame = ReferenceFrame(CH1, (CH1.var("q"),))
    flow = adapted_flow(frame, 0.0, 2.0, [(1.0,)], tolerance=1e-12)
    for t in (0.5, 1.0, 2.0):
        assert abs(flow.forward(t, 0)[0] - math.exp(t)) < 1e-9


def test_flow_wraps_circles():
    ch = Chart((Coordinate("phi", 2 * math.pi),))
    frame = ReferenceFrame.constant(ch, (1.0,))
    flow = adapted_flow(frame, 0.0, 10.0, [(0.0,)])
    wrapped = flow.forward(10.0, 0)[0]
    assert abs(wrapped - math.fmod(10.0, 2 * math.pi)) < 1e-8
    unwrapped = flow.forward(10.0, 0, wrap=False)[0]
    assert abs(unwrapped - 10.0) < 1e-8


def test_flow_escape_on_finite_time_blowup():
    # dq/dt = q^2 from q= 1 blows up at t = 1
    frame = ReferenceFrame(CH1, (CH1.var("q") ** 2,))
    with pytest.raises(FlowEscape):
        adapted_flow(frame, 0.0, 2.0, [(1.0,)])


def test_flow_domain_guard():
    frame = ReferenceFrame.constant(CH1, (1.0,))
    with pytest.raises(FlowEscape):
        adapted_flow(frame, 0.0, 1.0, [(0.0,)], domain=[(None, 0.5)])
    # staying inside the same domain is fine
    adapted_flow(frame, 0.0, 0.25, [(0.0,)], domain=[(None, 0.5)])


def test_failure_classifier():
    assert isinstance(_classify_failure([float("nan")], None), FlowEscape)
    assert isinstance(_classify_failure([1e13], None), FlowEscape)
    assert isinstance(_classify_failure([0.7], [(0.0, 0.5)]), FlowEscape)
    assert isinstance(_classify_failure([0.3], [(0.0, 0.5)]), StiffFlow)


def test_relative_velocity():
    frame = ReferenceFrame.constant(CH, (1.0, 0.0))
    rel = relative_velocity(frame, 0.0, (0.0, 0.0), (3.0, 4.0))
    assert np.allclose(rel, [2.0, 4.0])


def test_lift_vector_field():
    x, y = CH.var("x"), CH.var("y")
    u = FirstOrderOperator.vector_field(CH, {"x": x * y})
    lifted = lift_vector_field(u)
    assert lifted.part("x") == x * y
    assert lifted.part("p_x") == -y * CH.var("p_x")
    assert lifted.part("p_y") == -x * CH.var("p_x")
    with pytest.raises(NotProjectable):
        lift_vector_field(FirstOrderOperator.vector_field(CH, {"x": CH.var("p_x")}))
    with pytest.raises(NotProjectable):
        lift_vector_field(FirstOrderOperator.multiplication(x))
