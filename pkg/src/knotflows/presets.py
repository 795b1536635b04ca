"""Built-in link presets with exact trigonometric coefficients."""

from __future__ import annotations

from math import gcd

import numpy as np

from .curves import FourierCurve


def _curve(terms: dict, degree: int) -> FourierCurve:
    """Assemble a FourierCurve from {('cos'|'sin', k, axis): value} terms."""
    cos = np.zeros((degree + 1, 3))
    sin = np.zeros((degree + 1, 3))
    for (kind, k, axis), val in terms.items():
        (cos if kind == "cos" else sin)[k, axis] += val
    return FourierCurve(cos, sin)


def circle(radius: float = 1.0) -> list[FourierCurve]:
    """Round unknot of given radius in the xy-plane."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    return [_curve({("cos", 1, 0): radius, ("sin", 1, 1): radius}, 1)]


def torus_knot(p: int = 2, q: int = 3, major: float = 0.5,
               minor: float = 0.25) -> list[FourierCurve]:
    """(p, q) torus knot on the torus of radii (major, minor).

    x = (major + minor cos(q t)) cos(p t), y likewise with sin, z = minor sin(q t).
    Products expand exactly into harmonics p, q, p-q, p+q.
    """
    if p < 1 or q < 1 or gcd(p, q) != 1:
        raise ValueError("p, q must be positive coprime integers")
    if not major > minor > 0:
        raise ValueError("need major > minor > 0")
    terms: dict = {}

    def add(kind, k, axis, val):
        # cos(-k) = cos(k), sin(-k) = -sin(k)
        if k < 0:
            k, val = -k, (val if kind == "cos" else -val)
        if k == 0 and kind == "sin":
            return
        terms[(kind, k, axis)] = terms.get((kind, k, axis), 0.0) + val

    add("cos", p, 0, major)
    add("cos", p + q, 0, 0.5 * minor)
    add("cos", p - q, 0, 0.5 * minor)
    add("sin", p, 1, major)
    add("sin", p + q, 1, 0.5 * minor)
    add("sin", p - q, 1, 0.5 * minor)
    add("sin", q, 2, minor)
    return [_curve(terms, p + q)]


def trefoil(scale: float = 1.0) -> list[FourierCurve]:
    """(2, 3) torus knot on the torus of radii (0.5, 0.25), uniformly scaled."""
    if scale <= 0:
        raise ValueError("scale must be positive")
    return torus_knot(2, 3, 0.5 * scale, 0.25 * scale)


def figure_eight(scale: float = 0.5) -> list[FourierCurve]:
    """Figure-eight knot ((2+cos 2t) cos 3t, (2+cos 2t) sin 3t, sin 4t), scaled."""
    if scale <= 0:
        raise ValueError("scale must be positive")
    terms = {
        ("cos", 3, 0): 2.0 * scale, ("cos", 5, 0): 0.5 * scale,
        ("cos", 1, 0): 0.5 * scale,
        ("sin", 3, 1): 2.0 * scale, ("sin", 5, 1): 0.5 * scale,
        ("sin", 1, 1): 0.5 * scale,
        ("sin", 4, 2): scale,
    }
    return [_curve(terms, 5)]


def hopf(radius: float = 1.0) -> list[FourierCurve]:
    """Canonical Hopf pair: a circle in the xy-plane and one in the xz-plane
    centered at (radius, 0, 0), both of the given radius."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    c1 = _curve({("cos", 1, 0): radius, ("sin", 1, 1): radius}, 1)
    c2 = _curve({("cos", 0, 0): radius, ("cos", 1, 0): radius,
                 ("sin", 1, 2): radius}, 1)
    return [c1, c2]


def borromean(major: float = 1.0) -> list[FourierCurve]:
    """Borromean rings: three mutually orthogonal 2:1 ellipses (pairwise unlinked)."""
    if major <= 0:
        raise ValueError("major must be positive")
    minor = 0.5 * major
    e1 = _curve({("cos", 1, 1): major, ("sin", 1, 2): minor}, 1)
    e2 = _curve({("cos", 1, 2): major, ("sin", 1, 0): minor}, 1)
    e3 = _curve({("cos", 1, 0): major, ("sin", 1, 1): minor}, 1)
    return [e1, e2, e3]


CATALOG = {
    "circle": circle,
    "torus_knot": torus_knot,
    "trefoil": trefoil,
    "figure_eight": figure_eight,
    "hopf": hopf,
    "borromean": borromean,
}


def generate(name: str, params: dict | None = None) -> list[FourierCurve]:
    """Components of a named preset; multi-component presets return several curves."""
    if name not in CATALOG:
        raise KeyError(f"unknown preset {name!r}; available: {sorted(CATALOG)}")
    return CATALOG[name](**(params or {}))
