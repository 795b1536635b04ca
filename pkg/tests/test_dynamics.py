"""Integration, return maps, orbit refinement and Floquet data on closed-form fields."""

import numpy as np
import pytest

from knotflows import presets
from knotflows.charts import TubeChart
from knotflows.curves import FourierCurve, resample_arclength
from knotflows.dynamics import (NewtonFailure, OrbitEscape, PeriodicOrbit,
                                Section, TransversalityError, TubeModelField,
                                integrate, monodromy, poincare_return,
                                refine_orbit)
from knotflows.field import BeltramiExpansion
from knotflows.framing import frame_transport


class _ConstantField:
    def __init__(self, v):
        self.v = np.asarray(v, dtype=float)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(self.v, x.shape).copy()

    def jacobian(self, x):
        return np.zeros((3, 3))


class _DoubledField:
    """Time reparametrization v = 2u: same orbits, half the period."""

    def __init__(self, base):
        self.base = base

    def __call__(self, x):
        return 2.0 * self.base(x)

    def jacobian(self, x):
        return 2.0 * self.base.jacobian(x)


def _circle_chart(n=96, radius=0.5, w_half=0.1):
    arc = resample_arclength(presets.circle(1.0)[0], n)
    return TubeChart(frame_transport(arc), radius, w_half)


def _core_orbit(chart):
    """The periodic orbit of the tube model is exactly the chart core."""
    pts = chart.frame.arc.points
    return PeriodicOrbit(points=pts, period=chart.length, anchor=pts[0],
                         section=None, closure_residual=0.0,
                         newton_iterations=0)


@pytest.fixture(scope="module")
def model():
    chart = _circle_chart()
    return chart, TubeModelField(chart)


def test_integrate_constant_field_is_linear():
    field = _ConstantField([0.5, -1.0, 2.0])
    traj = integrate(field, np.zeros(3), 3.0, n_samples=7)
    expect = np.linspace(0.0, 3.0, 7)[:, None] * field.v
    assert np.max(np.abs(traj.x - expect)) < 1e-12
    assert np.max(np.abs(traj.at(np.array([0.3, 2.1])) -
                         np.array([0.3, 2.1])[:, None] * field.v)) < 1e-10


def test_integrate_single_wave_stays_on_straight_line():
    # u = (cos z, -sin z, 0): z is conserved, so each stream line is straight
    u = BeltramiExpansion(1.0, [[0.0, 0.0, 1.0]], [[1.0, 0.0, 0.0]], [1.0], [0.0])
    z0 = 0.7
    traj = integrate(u, np.array([0.0, 0.0, z0]), 5.0, n_samples=11)
    t = np.linspace(0.0, 5.0, 11)
    expect = np.column_stack([t * np.cos(z0), -t * np.sin(z0),
                              np.full_like(t, z0)])
    assert np.max(np.abs(traj.x - expect)) < 1e-9


def test_section_frame_and_round_trip():
    sec = Section.at(np.array([1.0, 2.0, 3.0]), np.array([0.0, 3.0, 4.0]))
    for a, b in ((sec.normal, sec.q1), (sec.normal, sec.q2), (sec.q1, sec.q2)):
        assert abs(np.dot(a, b)) < 1e-14
        assert abs(np.linalg.norm(a) - 1.0) < 1e-14
    xi = np.array([0.3, -0.8])
    assert np.max(np.abs(sec.coords(sec.embed(xi)) - xi)) < 1e-14


def test_poincare_return_contracts_ruling_offset(model):
    chart, field = model
    anchor = chart.strip_point(0.0, np.array(0.0))
    sec = Section.at(anchor, field(anchor))
    x0 = chart.strip_point(0.0, np.array(0.002))
    y, t = poincare_return(field, sec, x0, t_max=20.0)
    assert abs(t - 2.0 * np.pi) < 1e-6
    # the ruling coordinate is multiplied by e^{-T} after one turn
    off = np.linalg.norm(sec.coords(y))
    assert abs(off - 0.002 * np.exp(-2.0 * np.pi)) < 1e-4 * 0.002


def test_poincare_return_fixed_point_on_core(model):
    chart, field = model
    anchor = chart.strip_point(0.0, np.array(0.0))
    sec = Section.at(anchor, field(anchor))
    y, t = poincare_return(field, sec, anchor, t_max=20.0)
    assert np.linalg.norm(y - anchor) < 1e-8
    assert abs(t - 2.0 * np.pi) < 1e-8


def test_poincare_transversality_guard(model):
    chart, field = model
    anchor = chart.strip_point(0.0, np.array(0.0))
    sec = Section.at(anchor, np.array([0.0, 0.0, 1.0]))  # normal orthogonal to u
    with pytest.raises(TransversalityError):
        poincare_return(field, sec, anchor, t_max=20.0)


def test_poincare_no_return_raises_escape():
    field = _ConstantField([0.0, 0.0, 1.0])
    sec = Section.at(np.zeros(3), np.array([0.0, 0.0, 1.0]))
    with pytest.raises(OrbitEscape, match="no return"):
        poincare_return(field, sec, np.zeros(3), t_max=5.0)


def test_model_field_outside_chart_raises(model):
    chart, field = model
    with pytest.raises(OrbitEscape):
        field(np.array([10.0, 10.0, 10.0]))
    with pytest.raises(OrbitEscape):
        integrate(field, chart.from_tube(np.array(0.3), np.array(0.0),
                                         np.array(0.0)), 2.0)


def test_refine_orbit_finds_core_from_wobbled_seeds(model):
    _, field = model
    # seeds come from a chart whose core is 1e-3 off the true periodic orbit
    wobbled = FourierCurve(
        np.array([[0, 0, 0], [1, 0, 0], [0, 0, 0], [0, 0, 1e-3]], dtype=float),
        np.array([[0, 0, 0], [0, 1, 0], [0, 0, 0], [0, 0, 0]], dtype=float))
    arc = resample_arclength(wobbled, 96)
    chart_b = TubeChart(frame_transport(arc), 0.5, 0.05)
    # the oracle jacobian is finite-difference, so 1e-9 is its useful rtol floor
    orbit = refine_orbit(field, chart_b, rtol=1e-9, atol=1e-11,
                         closure_tol=1e-8)
    assert orbit.newton_iterations >= 1
    assert orbit.closure_residual < 1e-8
    radii = np.linalg.norm(orbit.points[:, :2], axis=1)
    assert np.max(np.abs(radii - 1.0)) < 1e-7
    assert np.max(np.abs(orbit.points[:, 2])) < 1e-7
    assert abs(orbit.period - 2.0 * np.pi) < 1e-7


def test_refine_orbit_newton_budget_exhausted(model):
    _, field = model
    wobbled = FourierCurve(
        np.array([[0, 0, 0], [1, 0, 0], [0, 0, 0], [0, 0, 1e-3]], dtype=float),
        np.array([[0, 0, 0], [0, 1, 0], [0, 0, 0], [0, 0, 0]], dtype=float))
    chart_b = TubeChart(frame_transport(resample_arclength(wobbled, 96)), 0.5, 0.05)
    with pytest.raises(NewtonFailure, match="not closed"):
        refine_orbit(field, chart_b, rtol=1e-7, atol=1e-9, max_iter=0)


def test_monodromy_multipliers_of_tube_model(model):
    chart, field = model
    orbit = _core_orbit(chart)
    flo = monodromy(field, orbit, rtol=1e-9, atol=1e-11)
    mu_u, mu_s = flo.multipliers
    assert abs(mu_u - np.exp(2.0 * np.pi)) < 1e-4 * np.exp(2.0 * np.pi)
    assert abs(mu_s - np.exp(-2.0 * np.pi)) < 1e-4 * np.exp(-2.0 * np.pi)
    assert abs(mu_u * mu_s - 1.0) < 1e-4
    assert abs(flo.det - 1.0) < 1e-6
    assert flo.classification == "hyperbolic_saddle"
    assert flo.margin > 0.9
    assert flo.flow_eigen_residual < 1e-6
    # the segment count must not change the assembled multipliers
    flo16 = monodromy(field, orbit, rtol=1e-9, atol=1e-11, n_segments=16)
    assert abs(flo16.multipliers[0] - mu_u) < 1e-6 * abs(mu_u)
    assert abs(flo16.multipliers[1] - mu_s) < 1e-6 * abs(mu_s)


def test_time_rescaled_field_keeps_multipliers(model):
    chart, field = model
    fast = _DoubledField(field)
    orbit = _core_orbit(chart)
    orbit.period = np.pi  # same closed curve traversed twice as fast
    flo = monodromy(fast, orbit, rtol=1e-9, atol=1e-11)
    assert abs(flo.multipliers[0] - np.exp(2.0 * np.pi)) < 1e-4 * np.exp(2.0 * np.pi)
    assert abs(flo.multipliers[1] - np.exp(-2.0 * np.pi)) < 1e-4 * np.exp(-2.0 * np.pi)


def test_monodromy_of_rigid_rotation_is_identity():
    class Rotation:
        def __call__(self, x):
            x = np.asarray(x, dtype=float)
            return np.stack([-x[..., 1], x[..., 0], np.zeros_like(x[..., 0])],
                            axis=-1)

        def jacobian(self, x):
            return np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])

    theta = 2.0 * np.pi * np.arange(64) / 64
    pts = np.column_stack([np.cos(theta), np.sin(theta), np.zeros_like(theta)])
    orbit = PeriodicOrbit(points=pts, period=2.0 * np.pi,
                          anchor=pts[0], section=None,
                          closure_residual=0.0, newton_iterations=0)
    flo = monodromy(Rotation(), orbit)
    assert np.max(np.abs(flo.monodromy - np.eye(3))) < 1e-8
    assert abs(flo.det - 1.0) < 1e-10
    assert flo.classification == "indeterminate"
    assert flo.margin < 1e-8
