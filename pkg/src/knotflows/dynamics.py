"""Stream-line integration, Poincare return maps, periodic orbits, monodromy.

The periodic orbits of interest are saddles: one Floquet multiplier inside the
unit circle, one outside, product one. Orbits are located by damped Newton on
the planar Poincare return map and certified through a segmented monodromy
product whose determinant and stable multiplier stay resolvable even when
e^{T} is large.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.integrate import solve_ivp

from .charts import TubeChart


class IntegrationError(RuntimeError):
    def __init__(self, msg, last_state=None):
        super().__init__(msg)
        self.last_state = last_state


class OrbitEscape(RuntimeError):
    """An iterate left the tube or never returned to the section."""


class NewtonFailure(RuntimeError):
    def __init__(self, msg, residual: float, iterate=None):
        super().__init__(msg)
        self.residual = residual
        self.iterate = iterate


class TransversalityError(ValueError):
    """Field nearly tangent to the section at the anchor."""


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    sol: object = dc_field(repr=False, default=None)  # dense-output interpolant
    nfev: int = 0

    def at(self, t):
        return np.asarray(self.sol(t)).T


def integrate(field, x0, t_end: float, rtol: float = 1e-10, atol: float = 1e-12,
              method: str = "DOP853", n_samples: int = 0) -> Trajectory:
    """Flow x' = u(x) from x0 over [0, t_end] with dense output."""

    def rhs(t, y):
        return field(y)

    sol = solve_ivp(rhs, (0.0, t_end), np.asarray(x0, dtype=float), method=method,
                    rtol=rtol, atol=atol, dense_output=True)
    if not sol.success:
        raise IntegrationError(f"integration failed: {sol.message}",
                               last_state=sol.y[:, -1] if sol.y.size else None)
    if n_samples:
        ts = np.linspace(0.0, t_end, n_samples)
        xs = sol.sol(ts).T
    else:
        ts, xs = sol.t, sol.y.T
    return Trajectory(ts, xs, sol=sol.sol, nfev=sol.nfev)


@dataclass(frozen=True)
class Section:
    """Oriented planar Poincare section through `anchor` with unit `normal`."""

    anchor: np.ndarray
    normal: np.ndarray
    q1: np.ndarray
    q2: np.ndarray

    @classmethod
    def at(cls, anchor, normal):
        anchor = np.asarray(anchor, dtype=float)
        normal = np.asarray(normal, dtype=float)
        normal = normal / np.linalg.norm(normal)
        axis = np.zeros(3)
        axis[np.argmin(np.abs(normal))] = 1.0
        q1 = np.cross(normal, axis)
        q1 /= np.linalg.norm(q1)
        return cls(anchor, normal, q1, np.cross(normal, q1))

    def embed(self, xi) -> np.ndarray:
        return self.anchor + xi[0] * self.q1 + xi[1] * self.q2

    def coords(self, x) -> np.ndarray:
        d = np.asarray(x) - self.anchor
        return np.array([np.dot(d, self.q1), np.dot(d, self.q2)])


def poincare_return(field, section: Section, x, t_max: float,
                    rtol: float = 1e-10, atol: float = 1e-12,
                    method: str = "DOP853"):
    """First return of the forward orbit of x to the section (positive crossing).

    Returns (point, time). Raises TransversalityError when the field is nearly
    tangent to the section at x, OrbitEscape when no return occurs by t_max.
    """
    x = np.asarray(x, dtype=float)
    u0 = field(x)
    if abs(np.dot(u0, section.normal)) < 1e-8 * np.linalg.norm(u0):
        raise TransversalityError("field is tangent to the section at the start point")

    def rhs(t, y):
        return field(y)

    def crossing(t, y):
        return np.dot(y - section.anchor, section.normal)

    crossing.terminal = True
    crossing.direction = 1.0

    # skip the trivial crossing at t = 0 by flowing a short grace interval first
    t_skip = 1e-6 * t_max
    pre = solve_ivp(rhs, (0.0, t_skip), x, method=method, rtol=rtol, atol=atol)
    if not pre.success:
        raise IntegrationError(f"integration failed: {pre.message}")
    sol = solve_ivp(rhs, (t_skip, t_max), pre.y[:, -1], method=method,
                    rtol=rtol, atol=atol, events=crossing, dense_output=True)
    if not sol.success:
        raise IntegrationError(f"integration failed: {sol.message}")
    if sol.t_events[0].size == 0:
        raise OrbitEscape(f"no return to the section within t_max = {t_max:g}")
    t_ev = float(sol.t_events[0][0])
    y_ev = sol.y_events[0][0]
    # one Newton step on the dense output tightens the event location
    u = field(y_ev)
    g = np.dot(y_ev - section.anchor, section.normal)
    gdot = np.dot(u, section.normal)
    if gdot != 0.0:
        dt = -g / gdot
        t_ev, y_ev = t_ev + dt, np.asarray(sol.sol(t_ev + dt))
    return y_ev, float(t_ev)


@dataclass
class PeriodicOrbit:
    points: np.ndarray          # (n, 3) samples over one period, x(0) first
    period: float
    anchor: np.ndarray
    section: Section
    closure_residual: float
    newton_iterations: int


@dataclass
class FloquetData:
    monodromy: np.ndarray       # assembled M(T)
    det: float                  # from the segmented product, = 1 for div-free fields
    multipliers: tuple          # (mu_unstable, mu_stable) after flow deflation
    flow_eigen_residual: float  # |M u(x0) - u(x0)| / |u(x0)|
    classification: str         # hyperbolic_saddle | elliptic | indeterminate
    margin: float               # min distance of the multipliers from |mu| = 1


def refine_orbit(field, chart: TubeChart, rtol: float = 1e-10, atol: float = 1e-12,
                 method: str = "DOP853", closure_tol: float = 1e-9,
                 max_iter: int = 30, t_max_factor: float = 4.0,
                 n_samples: int = 1024, n_segments: int | None = None) -> PeriodicOrbit:
    """Newton-refine the periodic orbit of `field` near the core of `chart`.

    Newton acts on the multiple-shooting closure of the Poincare fixed-point
    equation: the period is split into segments short enough that each transfer
    matrix stays O(e), which keeps the system solvable when e^{T} dwarfs the
    closure tolerance (a single return map amplifies seed error by the unstable
    multiplier, kicking the first return out of the fitted neighborhood).
    Segment Jacobians come from the analytic variational equation. Iterates
    that leave the tube raise OrbitEscape.
    """
    arc = chart.frame.arc
    speeds = np.linalg.norm(field(arc.points), axis=1)
    anchor_idx = int(np.argmax(speeds))
    anchor = arc.points[anchor_idx]
    u_anchor = field(anchor)
    section = Section.at(anchor, u_anchor)

    # keep per-segment stretching e^{T/m} modest even for cores hundreds long
    m = n_segments or int(np.clip(np.ceil(0.5 * chart.length), 8, 64))
    # shooting nodes: core points at equal arc distances starting at the anchor
    n_core = arc.points.shape[0]
    idx = (anchor_idx + (np.arange(m) * n_core) // m) % n_core
    nodes = arc.points[idx].copy()
    d = (arc.s_nodes[idx] - arc.s_nodes[anchor_idx]) % chart.length
    seg_arc = np.diff(np.append(d, chart.length))
    period = float(np.sum(seg_arc / speeds[idx]))
    t_cap = t_max_factor * chart.length / max(np.min(speeds), 1e-12)

    jacobian = field.jacobian
    n_unk = 3 * m + 1

    def shoot(nodes, period):
        ys = np.empty((m, 3))
        mats = np.empty((m, 3, 3))
        for i in range(m):
            ys[i], mats[i] = _fundamental_segment(
                field, jacobian, nodes[i], 0.0, period / m, rtol, atol, method)
        f = np.empty(n_unk)
        f[:3 * m] = (ys - np.roll(nodes, -1, axis=0)).ravel()
        f[3 * m] = np.dot(u_anchor, nodes[0] - anchor)
        return f, ys, mats

    f, ys, mats = shoot(nodes, period)
    res = float(np.max(np.abs(f)))
    for it in range(max_iter):
        if res < closure_tol:
            break
        jac = np.zeros((n_unk, n_unk))
        for i in range(m):
            r = slice(3 * i, 3 * i + 3)
            jac[r, r] = mats[i]
            jac[r, 3 * ((i + 1) % m):3 * ((i + 1) % m) + 3] -= np.eye(3)
            jac[r, 3 * m] = field(ys[i]) / m
        jac[3 * m, 0:3] = u_anchor
        try:
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError as exc:
            raise NewtonFailure(f"singular shooting Jacobian: {exc}", res,
                                iterate=nodes[0])
        # clip oversized steps to a fraction of the tube radius
        biggest = np.max(np.linalg.norm(step[:3 * m].reshape(m, 3), axis=1))
        if biggest > 0.25 * chart.radius:
            step *= 0.25 * chart.radius / biggest
        scale = 1.0
        for _ in range(4):
            new_nodes = nodes + scale * step[:3 * m].reshape(m, 3)
            new_period = period + scale * step[3 * m]
            if not 0.0 < new_period < t_cap:
                scale *= 0.5
                continue
            f_new, ys_new, mats_new = shoot(new_nodes, new_period)
            res_new = float(np.max(np.abs(f_new)))
            if res_new < res or res < closure_tol:
                break
            scale *= 0.5
        else:
            raise NewtonFailure(
                f"shooting Newton stalled at iteration {it}", res, iterate=nodes[0])
        nodes, period = new_nodes, new_period
        f, ys, mats = f_new, ys_new, mats_new
        res = res_new
        for i in range(m):
            if chart.to_tube(nodes[i]) is None:
                raise OrbitEscape(f"Newton iterate left the tube at iteration {it}")
    else:
        raise NewtonFailure(
            f"shooting system not closed after {max_iter} iterations", res,
            iterate=nodes[0])

    # sample the orbit segment by segment; a single full-period integration
    # would amplify the seed error by e^{T} and cannot close for large T
    x0 = nodes[0]
    seg_t = period / m
    per = max(1, n_samples // m)
    ts = seg_t * np.arange(per) / per
    pts = np.empty((m * per, 3))
    for i in range(m):
        seg = integrate(field, nodes[i], seg_t, rtol, atol, method)
        pts[i * per:(i + 1) * per] = seg.at(ts)
    return PeriodicOrbit(points=pts, period=period, anchor=x0,
                         section=section, closure_residual=res,
                         newton_iterations=it)


def _fundamental_segment(field, jacobian, x0, t0, t1, rtol, atol, method):
    """Integrate state + 3x3 variational matrix over [t0, t1] from (x0, I)."""

    def rhs(t, y):
        x, m = y[:3], y[3:].reshape(3, 3)
        return np.concatenate([field(x), (jacobian(x) @ m).ravel()])

    y0 = np.concatenate([np.asarray(x0, dtype=float), np.eye(3).ravel()])
    sol = solve_ivp(rhs, (t0, t1), y0, method=method, rtol=rtol, atol=atol)
    if not sol.success:
        raise IntegrationError(f"variational integration failed: {sol.message}")
    return sol.y[:3, -1], sol.y[3:, -1].reshape(3, 3)


def monodromy(field, orbit: PeriodicOrbit, rtol: float = 1e-11,
              atol: float = 1e-13, method: str = "DOP853",
              n_segments: int | None = None) -> FloquetData:
    """Floquet data of a periodic orbit via a segmented fundamental-matrix product.

    M(T) is assembled as M_n ... M_1 with every factor integrated from the
    stored orbit sample at its segment start, so trajectory error never
    compounds along the period. The determinant is the product of the
    per-segment determinants and the stable multiplier is read from the
    inverse-factor product, which keeps both quantities accurate when e^{T}
    exceeds 1/rtol. The flow direction u(x0) is an exact eigenvector with
    eigenvalue 1 and is deflated from the multiplier pair.
    """
    jacobian = field.jacobian
    T = orbit.period
    n = orbit.points.shape[0]
    if n_segments is None:
        n_segments = max(8, int(np.ceil(0.5 * T)))
    n_segments = min(n_segments, n)
    bounds = np.round(np.linspace(0, n, n_segments + 1)).astype(int)
    factors = []
    det = 1.0
    for k in range(n_segments):
        i0, i1 = int(bounds[k]), int(bounds[k + 1])
        _, mk = _fundamental_segment(field, jacobian, orbit.points[i0 % n],
                                     0.0, T * (i1 - i0) / n, rtol, atol, method)
        factors.append(mk)
        det *= float(np.linalg.det(mk))

    m_total = np.eye(3)
    m_inv = np.eye(3)
    for mk in factors:
        m_total = mk @ m_total
    for mk in factors:
        m_inv = m_inv @ np.linalg.inv(mk)

    u0 = field(orbit.points[0])
    flow_res = float(np.linalg.norm(m_total @ u0 - u0) / np.linalg.norm(u0))

    eig = np.linalg.eigvals(m_total)
    order = np.argsort(np.abs(eig - 1.0))
    mu_unstable = eig[order[-1]] if np.abs(eig[order[-1]]) > np.abs(eig[order[-2]]) \
        else eig[order[-2]]
    # the two non-flow eigenvalues of M are the reciprocals of the two
    # dominant-deflated eigenvalues of M^{-1}; take its dominant one
    eig_inv = np.linalg.eigvals(m_inv)
    mu_stable = 1.0 / eig_inv[np.argmax(np.abs(eig_inv))]

    mus = sorted([complex(mu_unstable), complex(mu_stable)],
                 key=lambda z: -abs(z))
    moduli = np.array([abs(m) for m in mus])
    margin = float(np.min(np.abs(moduli - 1.0)))
    if np.all(np.abs(moduli - 1.0) < 1e-6):
        cls = "indeterminate" if np.abs(mus[0] - mus[1]) < 1e-6 else "elliptic"
    elif moduli[0] > 1.0 and moduli[1] < 1.0:
        cls = "hyperbolic_saddle"
    elif np.max(np.abs(moduli - 1.0)) < 1e-3:
        cls = "elliptic"
    else:
        cls = "indeterminate"
    mu_clean = tuple(m.real if abs(m.imag) < 1e-9 * abs(m) else m for m in mus)
    return FloquetData(monodromy=m_total, det=det, multipliers=mu_clean,
                       flow_eigen_residual=flow_res, classification=cls,
                       margin=margin)


class TubeModelField:
    """Pushforward of the model field d/dtheta - z d/dz + rho d/drho of a chart.

    Exact saddle dynamics around the core: period = core length, multipliers
    {e^{-T}, e^{+T}}. Serves as the closed-form oracle for the orbit pipeline.
    """

    def __init__(self, chart: TubeChart, fd_step: float = 1e-6):
        self.chart = chart
        self.fd_step = fd_step

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 2:
            return np.array([self(xi) for xi in x])
        coords = self.chart.to_tube(x)
        if coords is None:
            raise OrbitEscape("tube-model field evaluated outside its chart")
        rho, z, theta = coords
        x_rho, x_z, x_th = self.chart.chart_jacobian(
            np.array(rho), np.array(z), theta)
        return x_th - z * x_z + rho * x_rho

    def jacobian(self, x):
        h = self.fd_step
        jac = np.empty((3, 3))
        for j in range(3):
            dx = np.zeros(3)
            dx[j] = h
            jac[:, j] = (self(x + dx) - self(x - dx)) / (2.0 * h)
        return jac
