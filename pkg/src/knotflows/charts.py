"""Ruled strips and tube charts: adapted coordinates (rho, z, theta) around each component.

The strip of a component is S(s, t) = c(s) + t e1(s) with |t| <= w_half; the
chart extends it along the strip normal, X(rho, z, theta) = S(theta, z) + rho n.
theta is arc length along the core and z the ruling parameter, so the strip is
exactly {rho = 0} and the core exactly {rho = 0, z = 0}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import RunConfig
from .curves import ArcLengthCurve, EmbeddingError, LinkSpec, resample_arclength
from .framing import FrameModel, frame_transport


class TubeChart:
    """Adapted tube coordinates around one link component."""

    def __init__(self, frame: FrameModel, radius: float, w_half: float,
                 component_id: int = 0):
        if not 0.0 < w_half <= radius:
            raise ValueError("need 0 < w_half <= radius")
        self.frame = frame
        self.radius = float(radius)
        self.w_half = float(w_half)
        self.component_id = int(component_id)
        self.length = frame.length

    # strip embedding and derivatives -------------------------------------

    def strip_point(self, s, t):
        t = np.asarray(t, dtype=float)
        return self.frame.position(s) + t[..., None] * self.frame.e1(s)

    def strip_jet(self, s, t):
        """First and second derivatives of the strip embedding at (s, t)."""
        t = np.asarray(t, dtype=float)[..., None]
        pos1 = self.frame.position(s, 1)
        pos2 = self.frame.position(s, 2)
        e1 = self.frame.e1(s)
        de1 = self.frame.e1(s, 1)
        d2e1 = self.frame.e1(s, 2)
        S = self.frame.position(s) + t * e1
        S_s = pos1 + t * de1
        S_ss = pos2 + t * d2e1
        return {"S": S, "S_s": S_s, "S_ss": S_ss, "S_t": e1, "S_st": de1,
                "e1": e1, "de1": de1, "d2e1": d2e1}

    def normal(self, s, t):
        jet = self.strip_jet(s, t)
        raw = np.cross(jet["S_s"], jet["e1"])
        return raw / np.linalg.norm(raw, axis=-1, keepdims=True)

    def normal_jet(self, s, t):
        """Unit strip normal n with its s- and t-derivatives."""
        jet = self.strip_jet(s, t)
        raw = np.cross(jet["S_s"], jet["e1"])
        raw_t = np.cross(jet["S_st"], jet["e1"])
        raw_s = np.cross(jet["S_ss"], jet["e1"]) + np.cross(jet["S_s"], jet["de1"])
        norm = np.linalg.norm(raw, axis=-1, keepdims=True)
        n = raw / norm
        def dunit(draw):
            return draw / norm - n * np.sum(n * draw, axis=-1, keepdims=True) / norm
        return {"n": n, "n_s": dunit(raw_s), "n_t": dunit(raw_t), **jet}

    # chart map -------------------------------------------------------------

    def from_tube(self, rho, z, theta):
        """Ambient point of adapted coordinates (rho, z, theta)."""
        rho = np.asarray(rho, dtype=float)
        return self.strip_point(theta, z) + rho[..., None] * self.normal(theta, z)

    def chart_jacobian(self, rho, z, theta):
        """Columns (X_rho, X_z, X_theta) of the chart differential."""
        nj = self.normal_jet(theta, z)
        rho = np.asarray(rho, dtype=float)[..., None]
        x_rho = nj["n"]
        x_z = nj["S_t"] + rho * nj["n_t"]
        x_th = nj["S_s"] + rho * nj["n_s"]
        return x_rho, x_z, x_th

    def _project(self, x, s0, t0, max_iter=40):
        """Newton for the closest strip point; returns (s, t, ok)."""
        s, t = float(s0), float(t0)
        scale = max(1.0, float(np.linalg.norm(x)))
        tol = 1e-13 * scale
        f_old = None
        for _ in range(max_iter):
            jet = self.strip_jet(s, np.array(t))
            d = x - jet["S"]
            f = np.array([np.dot(d, jet["S_s"]), np.dot(d, jet["e1"])])
            if np.linalg.norm(f) < tol:
                return s % self.length, t, True
            j11 = -np.dot(jet["S_s"], jet["S_s"]) + np.dot(d, jet["S_ss"])
            j12 = np.dot(d, jet["de1"])
            jac = np.array([[j11, j12], [j12, -1.0]])
            try:
                step = np.linalg.solve(jac, -f)
            except np.linalg.LinAlgError:
                return s % self.length, t, False
            lam = 1.0
            for _ in range(8):
                s_new, t_new = s + lam * step[0], t + lam * step[1]
                t_new = float(np.clip(t_new, -4.0 * self.w_half, 4.0 * self.w_half))
                jn = self.strip_jet(s_new, np.array(t_new))
                dn = x - jn["S"]
                fn = np.array([np.dot(dn, jn["S_s"]), np.dot(dn, jn["e1"])])
                if f_old is None or np.linalg.norm(fn) <= np.linalg.norm(f):
                    break
                lam *= 0.5
            s, t, f_old = s_new, t_new, fn
        return s % self.length, t, bool(np.linalg.norm(f_old) < 1e3 * tol)

    def to_tube(self, x):
        """Adapted coordinates (rho, z, theta) of an ambient point.

        Returns None when the point is out of chart: the closest-point
        projection leaves the declared strip, the normal offset exceeds the
        tube radius, or two distant sheet candidates are equally near.
        """
        x = np.asarray(x, dtype=float)
        pts = self.frame.arc.points
        d2 = np.sum((pts - x) ** 2, axis=1)
        is_min = (d2 <= np.roll(d2, 1)) & (d2 <= np.roll(d2, -1))
        cand = np.flatnonzero(is_min)
        cand = cand[np.argsort(d2[cand])][:4]
        sols = []
        for i in cand:
            s0 = self.frame.arc.s_nodes[i]
            t0 = float(np.clip(np.dot(x - pts[i], self.frame.e1(s0)),
                               -self.w_half, self.w_half))
            s, t, ok = self._project(x, s0, t0)
            if not ok:
                continue
            dist = float(np.linalg.norm(x - self.strip_point(s, np.array(t))))
            sols.append((dist, s, t))
        if not sols:
            return None
        sols.sort()
        dist, s, t = sols[0]
        for d2_, s2, t2 in sols[1:]:
            same = (min(abs(s2 - s), self.length - abs(s2 - s)) < 1e-6 * self.length
                    and abs(t2 - t) < 1e-6 * max(self.w_half, 1.0))
            if not same and d2_ <= dist * (1.0 + 1e-9) + 1e-12:
                return None  # ambiguous: two equally near sheets
        if abs(t) > self.w_half:
            return None
        jet = self.strip_jet(s, np.array(t))
        raw = np.cross(jet["S_s"], jet["e1"])
        n = raw / np.linalg.norm(raw)
        rho = float(np.dot(x - jet["S"], n))
        if abs(rho) >= self.radius:
            return None
        return rho, float(t), float(s)

    def to_tube_many(self, xs):
        """Vector version of to_tube: (n,3) -> (n,3) array with nan rows when out of chart."""
        out = np.full((len(xs), 3), np.nan)
        for i, x in enumerate(xs):
            r = self.to_tube(x)
            if r is not None:
                out[i] = r
        return out


def component_gaps(arcs: list[ArcLengthCurve]):
    """Pairwise minimal distances between sampled components; diagonal is inf."""
    a = len(arcs)
    gaps = np.full((a, a), np.inf)
    for i in range(a):
        for j in range(i + 1, a):
            d = np.sqrt(np.min(np.sum(
                (arcs[i].points[:, None, :] - arcs[j].points[None, :, :]) ** 2, axis=-1)))
            gaps[i, j] = gaps[j, i] = d
    return gaps


def tube_radius(arcs: list[ArcLengthCurve], safety: float = 0.5):
    """Per-component tube radii r_a = safety * min(reach_a, half inter-component gap).

    Raises EmbeddingError when two components come closer than the sampling
    resolution can certify.
    """
    if not 0.0 < safety < 1.0:
        raise ValueError("safety must lie in (0, 1)")
    gaps = component_gaps(arcs)
    radii = []
    for i, arc in enumerate(arcs):
        gap = float(np.min(gaps[i]))
        h = arc.length / arc.n
        if gap < 8.0 * h:
            raise EmbeddingError(
                f"components too close to certify disjoint tubes: gap = {gap:.3e}")
        radii.append(safety * min(arc.reach(), 0.5 * gap))
    radii = np.asarray(radii)
    # sampled certificate that the closed tubes are pairwise disjoint
    for i in range(len(arcs)):
        for j in range(i + 1, len(arcs)):
            if gaps[i, j] <= radii[i] + radii[j]:
                raise EmbeddingError(
                    f"tubes of components {i} and {j} overlap: "
                    f"gap {gaps[i, j]:.3e} <= r_i + r_j = {radii[i] + radii[j]:.3e}")
    return radii


def build_charts(link: LinkSpec, config: RunConfig | None = None) -> list[TubeChart]:
    """Arc-length models, frames, radii and charts for every component of a link."""
    config = config or RunConfig()
    arcs = [resample_arclength(c, config.frame_samples) for c in link.components]
    radii = tube_radius(arcs, config.safety)
    charts = []
    for i, arc in enumerate(arcs):
        frame = frame_transport(arc)
        charts.append(TubeChart(frame, radii[i], config.w_half_factor * radii[i],
                                component_id=i))
    return charts
