"""Strip metric, Cauchy data, closedness, and the in-strip core multiplier."""

import numpy as np

from knotflows import presets
from knotflows.charts import TubeChart
from knotflows.config import RunConfig
from knotflows.curves import resample_arclength
from knotflows.framing import frame_transport
from knotflows.strip import (build_cauchy_data, cauchy_field, closedness_check,
                             closedness_residual, lyapunov_values, strip_metric,
                             strip_monodromy)


def _chart(curve, radius=0.5, w_half=0.1, n=1024):
    arc = resample_arclength(curve, n)
    return TubeChart(frame_transport(arc), radius, w_half)


def test_cauchy_field_on_core_is_unit_tangent():
    chart = _chart(presets.trefoil()[0], radius=0.1, w_half=0.03)
    s = np.linspace(0.0, chart.length, 32, endpoint=False)
    w = cauchy_field(chart, s, np.zeros_like(s))
    assert np.max(np.linalg.norm(w - chart.frame.tangent(s), axis=1)) < 1e-8


def test_cauchy_field_explicit_value_on_circle():
    chart = _chart(presets.circle(1.0)[0])
    w = cauchy_field(chart, np.array(0.0), np.array(0.1))
    # S = (1+t)(cos s, sin s, 0): w = (-sin s, cos s, 0)/(1+t) - t (cos s, sin s, 0)
    assert np.max(np.abs(w - np.array([-0.1, 1.0 / 1.1, 0.0]))) < 1e-8


def test_strip_metric_of_circle():
    chart = _chart(presets.circle(1.0)[0])
    s = np.array([0.2, 1.0, 3.0, 5.5])
    t = np.array([-0.08, 0.0, 0.05, 0.1])
    met = strip_metric(chart, s, t)
    assert np.max(np.abs(met.h_ss - (1.0 + t) ** 2)) < 1e-6
    assert np.max(np.abs(met.h_st)) < 1e-8
    assert np.max(np.abs(met.h_tt - 1.0)) < 1e-12
    assert np.max(np.abs(met.det - (1.0 + t) ** 2)) < 1e-6
    assert np.max(np.abs(met.g - (1.0 + t) ** -2)) < 1e-6


def test_cauchy_data_grid_and_closedness():
    chart = _chart(presets.trefoil()[0], radius=0.1, w_half=0.02)
    cfg = RunConfig(strip_s_per_2pi=64, strip_t_nodes=17)
    data = build_cauchy_data(chart, cfg)
    ns = max(64, int(round(64 * chart.length / (2.0 * np.pi))))
    assert data.points.shape == (ns, 17, 3)
    assert data.w.shape == data.points.shape
    # gamma = ds - t dt for any chart: both components are exact here
    assert np.max(np.abs(data.gamma_s - 1.0)) < 1e-9
    assert np.max(np.abs(data.gamma_t + data.t_nodes[None, :])) < 1e-9
    assert closedness_check(data) < 1e-8
    # unit normals orthogonal to the ruling
    assert np.max(np.abs(np.linalg.norm(data.normals, axis=-1) - 1.0)) < 1e-12
    assert np.max(np.abs(np.sum(data.normals * data.w, axis=-1))) < 1e-8


def test_closedness_residual_detects_injected_term():
    s = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
    t = np.linspace(-0.1, 0.1, 17)
    ss, tt = np.meshgrid(s, t, indexing="ij")
    ds, dt = s[1] - s[0], t[1] - t[0]
    # gamma = t ds has d(gamma) = -dt ^ ds, so |residual| = 1
    res = closedness_residual(tt, np.zeros_like(tt), ds, dt)
    assert abs(res - 1.0) < 1e-10
    # and gamma = sin(s) dt is detected through the s-derivative
    res = closedness_residual(np.zeros_like(tt), np.sin(ss), ds, dt)
    assert res > 0.9


def test_lyapunov_values_identity():
    chart = _chart(presets.trefoil()[0], radius=0.1, w_half=0.02)
    data = build_cauchy_data(chart, RunConfig(strip_s_per_2pi=64, strip_t_nodes=9))
    vals = lyapunov_values(data)
    expect = -2.0 * np.broadcast_to(data.t_nodes[None, :] ** 2, vals.shape)
    assert np.max(np.abs(vals - expect)) < 1e-9
    assert np.all(vals <= 1e-12)


def test_strip_monodromy_circle_is_exp_minus_2pi():
    chart = _chart(presets.circle(1.0)[0])
    mu, period = strip_monodromy(chart)
    assert abs(period - 2.0 * np.pi) < 1e-8
    assert abs(mu - np.exp(-2.0 * np.pi)) < 1e-6


def test_strip_monodromy_trefoil_is_exp_minus_length():
    chart = _chart(presets.trefoil()[0], radius=0.1, w_half=0.02)
    mu, period = strip_monodromy(chart)
    assert abs(period - chart.length) < 1e-6
    assert abs(mu - np.exp(-chart.length)) < 1e-6


def test_strip_monodromy_scales_with_length():
    # a circle of circumference 1: the return time is 1, the multiplier e^{-1}
    chart = _chart(presets.circle(1.0 / (2.0 * np.pi))[0],
                   radius=0.05, w_half=0.01)
    mu, period = strip_monodromy(chart)
    assert abs(period - 1.0) < 1e-8
    assert abs(mu - np.exp(-1.0)) < 1e-8
