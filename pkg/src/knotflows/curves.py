"""Closed analytic space curves: trigonometric coefficients, arc length, spectral models."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class EmbeddingError(ValueError):
    """Raised when a curve fails an embedding check (degenerate speed or near self-contact)."""


@dataclass(frozen=True)
class FourierCurve:
    """Closed curve c(t) = sum_k A[k] cos(k t) + B[k] sin(k t), t in [0, 2pi).

    cos_coeffs: (K+1, 3), row k holds the cos(k t) coefficients; row 0 is the constant term.
    sin_coeffs: (K+1, 3), row k holds the sin(k t) coefficients; row 0 must be zero.
    """

    cos_coeffs: np.ndarray
    sin_coeffs: np.ndarray

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.cos_coeffs, dtype=float))
        b = np.atleast_2d(np.asarray(self.sin_coeffs, dtype=float))
        if a.shape[1] != 3 or b.shape[1] != 3:
            raise ValueError("coefficient arrays must have shape (K+1, 3)")
        k = max(a.shape[0], b.shape[0])
        a = np.vstack([a, np.zeros((k - a.shape[0], 3))])
        b = np.vstack([b, np.zeros((k - b.shape[0], 3))])
        if np.any(b[0] != 0.0):
            raise ValueError("sin_coeffs[0] (the sin(0*t) row) must be zero")
        object.__setattr__(self, "cos_coeffs", a)
        object.__setattr__(self, "sin_coeffs", b)

    @property
    def degree(self) -> int:
        return self.cos_coeffs.shape[0] - 1

    def _trig(self, t, deriv: int):
        t = np.asarray(t, dtype=float)
        k = np.arange(self.degree + 1, dtype=float)
        ang = np.multiply.outer(t, k)
        c, s = np.cos(ang), np.sin(ang)
        kp = k**deriv
        # d/dt cycles (cos, sin) -> (-sin, cos) -> (-cos, -sin) -> (sin, -cos)
        if deriv % 4 == 0:
            cc, ss = c * kp, s * kp
        elif deriv % 4 == 1:
            cc, ss = -s * kp, c * kp
        elif deriv % 4 == 2:
            cc, ss = -c * kp, -s * kp
        else:
            cc, ss = s * kp, -c * kp
        return cc @ self.cos_coeffs + ss @ self.sin_coeffs

    def point(self, t) -> np.ndarray:
        return self._trig(t, 0)

    def velocity(self, t) -> np.ndarray:
        return self._trig(t, 1)

    def acceleration(self, t) -> np.ndarray:
        return self._trig(t, 2)

    def speed(self, t) -> np.ndarray:
        return np.linalg.norm(self.velocity(t), axis=-1)

    def scale(self) -> float:
        """Coefficient-based size estimate of the curve."""
        return float(np.sum(np.abs(self.cos_coeffs)) + np.sum(np.abs(self.sin_coeffs)))

    def max_curvature(self, n: int = 4096) -> float:
        t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
        v, a = self.velocity(t), self.acceleration(t)
        num = np.linalg.norm(np.cross(v, a), axis=-1)
        den = np.linalg.norm(v, axis=-1) ** 3
        return float(np.max(num / den))


class SpectralSeries:
    """Trigonometric interpolant of periodic samples, with exact derivatives.

    Built from n uniform samples over one period; evaluates the interpolant and
    its derivatives at arbitrary parameter values.
    """

    def __init__(self, samples: np.ndarray, period: float):
        samples = np.asarray(samples, dtype=float)
        if samples.ndim == 1:
            samples = samples[:, None]
        self.n = samples.shape[0]
        self.period = float(period)
        self.omega = 2.0 * np.pi / self.period
        self.coeffs = np.fft.rfft(samples, axis=0)  # (n//2+1, d)
        self._weights = np.full(self.coeffs.shape[0], 2.0)
        self._weights[0] = 1.0
        if self.n % 2 == 0:
            self._weights[-1] = 1.0

    def __call__(self, s, deriv: int = 0) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        scalar = s.ndim == 0
        s = np.atleast_1d(s)
        m = np.arange(self.coeffs.shape[0], dtype=float)
        phase = np.exp(1j * np.multiply.outer(s, m * self.omega))
        fac = (1j * m * self.omega) ** deriv if deriv else np.ones_like(m)
        w = self._weights.copy()
        if deriv and self.n % 2 == 0:
            w[-1] = 0.0  # drop the Nyquist mode when differentiating
        out = np.real(phase @ (self.coeffs * (fac * w)[:, None])) / self.n
        return out[0] if scalar else out


class ArcLengthCurve:
    """Arc-length model of a closed FourierCurve.

    Provides the total length, the inverse parameter map t(s), uniform
    arc-length samples, and spectrally interpolated position derivatives.
    """

    def __init__(self, curve: FourierCurve, n: int = 1024):
        self.curve = curve
        self.n = int(n)
        # speed is an analytic periodic function; its FFT antiderivative gives
        # the arc-length function to machine precision
        m = max(4096, 8 * (curve.degree + 1))
        tg = np.linspace(0.0, 2.0 * np.pi, m, endpoint=False)
        sp = curve.speed(tg)
        if np.min(sp) < 1e-8 * max(curve.scale(), 1e-30):
            bad = tg[int(np.argmin(sp))]
            raise EmbeddingError(f"degenerate speed |c'(t)| ~ 0 at t = {bad:.6f}")
        coeffs = np.fft.rfft(sp)
        self.length = float(2.0 * np.pi * coeffs[0].real / m)
        mm = np.arange(1, coeffs.shape[0], dtype=float)
        self._anti = coeffs[1:] / (1j * mm)  # periodic part of the antiderivative
        self._anti_n = m
        self._mean_speed = coeffs[0].real / m
        self.s_nodes = self.length * np.arange(self.n) / self.n
        self.t_nodes = self.t_at(self.s_nodes)
        self.points = curve.point(self.t_nodes)
        self.position = SpectralSeries(self.points, self.length)

    def arclen(self, t) -> np.ndarray:
        """Arc length from parameter 0 to t."""
        t = np.asarray(t, dtype=float)
        m = np.arange(1, self._anti.shape[0] + 1, dtype=float)
        phase = np.exp(1j * np.multiply.outer(t, m))
        periodic = 2.0 * np.real(phase @ self._anti) / self._anti_n
        periodic0 = 2.0 * np.real(np.sum(self._anti)) / self._anti_n
        return self._mean_speed * t + periodic - periodic0

    def t_at(self, s) -> np.ndarray:
        """Invert the arc-length function by Newton iteration."""
        s = np.asarray(s, dtype=float)
        t = s / self._mean_speed
        for _ in range(60):
            f = self.arclen(t) - s
            step = f / self.curve.speed(t)
            t = t - step
            if np.max(np.abs(step)) < 1e-14 * (1.0 + np.max(np.abs(t))):
                break
        return t

    def point(self, s) -> np.ndarray:
        return self.curve.point(self.t_at(s))

    def tangent(self, s) -> np.ndarray:
        v = self.curve.velocity(self.t_at(s))
        return v / np.linalg.norm(v, axis=-1, keepdims=True)

    def self_distance(self, kappa_max: float | None = None):
        """Minimal distance between points separated by more than the local window.

        Pairs closer in arc length than min(pi/kappa_max, L/4) cannot come nearer
        than the curvature bound allows, so the window excludes only trivial
        neighbors. Returns (distance, s_i, s_j).
        """
        if kappa_max is None:
            kappa_max = self.curve.max_curvature()
        window = min(np.pi / kappa_max, self.length / 4.0)
        h = self.length / self.n
        kmin = max(1, int(np.ceil(window / h)))
        p = self.points
        d2 = np.sum((p[:, None, :] - p[None, :, :]) ** 2, axis=-1)
        idx = np.arange(self.n)
        sep = np.abs(idx[:, None] - idx[None, :])
        sep = np.minimum(sep, self.n - sep)
        d2 = np.where(sep >= kmin, d2, np.inf)
        i, j = np.unravel_index(np.argmin(d2), d2.shape)
        return float(np.sqrt(d2[i, j])), float(self.s_nodes[i]), float(self.s_nodes[j])

    def reach(self) -> float:
        """min(1/max curvature, half the closest bottleneck distance).

        Bottleneck pairs are discrete local minima of the chord distance in
        both indices, at arc separation beyond the curvature window. Window
        edge minima are not local minima of the unmasked distance (the chord
        keeps shrinking into the window), and convex curves, which never
        double back, contribute no bottleneck at all: their reach is 1/kappa.
        Inside the window the chord is Schur-bounded below by the kappa
        circle, so no excluded pair can undercut 1/kappa.
        """
        kappa = self.curve.max_curvature()
        window = min(np.pi / kappa, self.length / 4.0)
        h = self.length / self.n
        kmin = max(2, int(np.ceil(window / h)))
        p = self.points
        d2 = np.sum((p[:, None, :] - p[None, :, :]) ** 2, axis=-1)
        idx = np.arange(self.n)
        sep = np.abs(idx[:, None] - idx[None, :])
        sep = np.minimum(sep, self.n - sep)
        local = np.ones_like(d2, dtype=bool)
        for ax in (0, 1):
            for shift in (1, -1):
                local &= d2 <= np.roll(d2, shift, axis=ax)
        cand = local & (sep >= kmin)
        if np.any(cand):
            return float(min(1.0 / kappa, 0.5 * np.sqrt(np.min(d2[cand]))))
        return float(1.0 / kappa)


def resample_arclength(curve: FourierCurve, n: int, min_gap: float | None = None) -> ArcLengthCurve:
    """Arc-length parametrization with n uniform samples; rejects non-embedded curves.

    The returned model satisfies |dc/ds| = 1 at the samples to the accuracy of
    the Newton inversion (~1e-12 relative).
    """
    arc = ArcLengthCurve(curve, n)
    if min_gap is None:
        min_gap = 1e-6 * max(arc.length, 1.0)
    dmin, si, sj = arc.self_distance()
    if dmin < min_gap:
        ti, tj = arc.t_at(np.array([si, sj]))
        raise EmbeddingError(
            f"curve nearly self-intersects: |c(t1)-c(t2)| = {dmin:.3e} "
            f"for t1 = {ti:.6f}, t2 = {tj:.6f}"
        )
    return arc


@dataclass(frozen=True)
class LinkSpec:
    """A finite link: Beltrami eigenvalue plus one FourierCurve per component."""

    lam: float
    components: tuple

    def __post_init__(self):
        if not self.lam > 0.0:
            if self.lam == 0.0:
                raise ValueError("lambda must be nonzero (lambda > 0 required)")
            raise ValueError("lambda must be positive (negative lambda reduces to "
                             "positive under the reflection x -> -x)")
        comps = tuple(self.components)
        if len(comps) < 1:
            raise ValueError("link needs at least one component")
        for c in comps:
            if not isinstance(c, FourierCurve):
                raise TypeError("components must be FourierCurve instances")
        object.__setattr__(self, "components", comps)

    def __len__(self) -> int:
        return len(self.components)
