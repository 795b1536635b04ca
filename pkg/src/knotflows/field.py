"""Global Beltrami fields as finite plane-wave expansions.

Each member N(x) = (e + i k x e) exp(i lam k.x) with |k| = |e| = 1, k.e = 0
satisfies curl N = lam N exactly, so any real combination of real and
imaginary parts is an exact divergence-free Beltrami field on all of R^3.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


def direction_set(n: int, rng: np.random.Generator | None = None) -> np.ndarray:
    """n quasi-uniform unit vectors (Fibonacci sphere), optionally jittered by
    one seeded random rotation of the whole set."""
    if n < 1:
        raise ValueError("need n >= 1 directions")
    i = np.arange(n, dtype=float)
    z = 1.0 - (2.0 * i + 1.0) / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = GOLDEN_ANGLE * i
    dirs = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    if rng is not None:
        # QR of a random matrix gives a Haar-ish rotation; fix det = +1
        q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        if np.linalg.det(q) < 0:
            q[:, 0] = -q[:, 0]
        dirs = dirs @ q.T
    return dirs


def polarization_pair(k: np.ndarray):
    """Two orthonormal vectors spanning the plane orthogonal to unit vector k."""
    k = np.asarray(k, dtype=float)
    axis = np.zeros(3)
    axis[np.argmin(np.abs(k))] = 1.0
    e1 = np.cross(k, axis)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(k, e1)


def make_basis(n_directions: int, rng: np.random.Generator | None = None):
    """(k, e) member arrays: two polarizations per direction, 2n members,
    hence 4n real basis fields (alpha and beta coefficients per member)."""
    dirs = direction_set(n_directions, rng)
    ks, es = [], []
    for k in dirs:
        e1, e2 = polarization_pair(k)
        ks.extend([k, k])
        es.extend([e1, e2])
    return np.array(ks), np.array(es)


def _check_members(k, e, tol=1e-12):
    if np.max(np.abs(np.linalg.norm(k, axis=1) - 1.0)) > tol:
        raise ValueError("wave vectors k must be unit")
    if np.max(np.abs(np.linalg.norm(e, axis=1) - 1.0)) > tol:
        raise ValueError("polarizations e must be unit")
    if np.max(np.abs(np.sum(k * e, axis=1))) > tol:
        raise ValueError("polarizations must satisfy k . e = 0")


@dataclass(frozen=True)
class BeltramiExpansion:
    """u(x) = sum_j alpha_j Re N_j(x) + beta_j Im N_j(x); curl u = lam u exactly."""

    lam: float
    k: np.ndarray       # (m, 3) unit wave directions
    e: np.ndarray       # (m, 3) unit polarizations, orthogonal to k
    alpha: np.ndarray   # (m,)
    beta: np.ndarray    # (m,)
    f: np.ndarray = dc_field(init=False, repr=False)

    def __post_init__(self):
        if self.lam == 0.0:
            raise ValueError("lambda must be nonzero")
        k = np.atleast_2d(np.asarray(self.k, dtype=float))
        e = np.atleast_2d(np.asarray(self.e, dtype=float))
        _check_members(k, e)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "alpha", np.asarray(self.alpha, dtype=float))
        object.__setattr__(self, "beta", np.asarray(self.beta, dtype=float))
        object.__setattr__(self, "f", np.cross(k, e))

    @property
    def n_members(self) -> int:
        return self.k.shape[0]

    def __call__(self, x) -> np.ndarray:
        """Field values; x is (3,) or (n, 3)."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        pts = np.atleast_2d(x)
        phase = self.lam * (pts @ self.k.T)          # (n, m)
        c, s = np.cos(phase), np.sin(phase)
        u = (c * self.alpha + s * self.beta) @ self.e \
            + (c * self.beta - s * self.alpha) @ self.f
        return u[0] if single else u

    def jacobian(self, x) -> np.ndarray:
        """Analytic Jacobian d u_i / d x_j; traceless (div u = 0 exactly)."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        pts = np.atleast_2d(x)
        phase = self.lam * (pts @ self.k.T)
        c, s = np.cos(phase), np.sin(phase)
        # d Re N = -lam (Im N) k^T, d Im N = +lam (Re N) k^T per member
        re_n = c[..., None] * self.e - s[..., None] * self.f    # (n, m, 3)
        im_n = s[..., None] * self.e + c[..., None] * self.f
        amp = (self.beta[:, None] * re_n - self.alpha[:, None] * im_n)
        jac = self.lam * np.einsum("nmi,mj->nij", amp, self.k)
        return jac[0] if single else jac

    def curl_residual(self, x) -> float:
        """Max |curl u - lam u| from the analytic Jacobian (round-off check)."""
        pts = np.atleast_2d(np.asarray(x, dtype=float))
        jac = self.jacobian(pts)
        curl = np.stack([jac[..., 2, 1] - jac[..., 1, 2],
                         jac[..., 0, 2] - jac[..., 2, 0],
                         jac[..., 1, 0] - jac[..., 0, 1]], axis=-1)
        return float(np.max(np.abs(curl - self.lam * self(pts))))


@dataclass(frozen=True)
class HelmholtzScalarExpansion:
    """Scalar w(x) = sum_j Re(c_j exp(i lam k_j.x)); solves (Laplace + lam^2) w = 0."""

    lam: float
    k: np.ndarray            # (m, 3) unit directions
    c: np.ndarray            # (m,) complex amplitudes

    def __post_init__(self):
        k = np.atleast_2d(np.asarray(self.k, dtype=float))
        if np.max(np.abs(np.linalg.norm(k, axis=1) - 1.0)) > 1e-12:
            raise ValueError("wave vectors k must be unit")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "c", np.asarray(self.c, dtype=complex))

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        pts = np.atleast_2d(x)
        ph = np.exp(1j * self.lam * (pts @ self.k.T))
        out = np.real(ph @ self.c)
        return out[0] if single else out


def beltramize(w1: HelmholtzScalarExpansion, w2: HelmholtzScalarExpansion,
               w3: HelmholtzScalarExpansion) -> BeltramiExpansion:
    """The lift v = (curl + lam)(curl w) / (2 lam^2) as exact amplitude algebra.

    The input components must share lam and direction set. On amplitudes the
    lift acts as p -> (-k x (k x p) + i k x p) / 2, a projection: Beltrami
    inputs are fixed, anti-Beltrami inputs are annihilated.
    """
    if not (w1.lam == w2.lam == w3.lam):
        raise ValueError("components must share lambda")
    if w1.k.shape != w2.k.shape or w1.k.shape != w3.k.shape \
            or np.max(np.abs(w1.k - w2.k)) > 0 or np.max(np.abs(w1.k - w3.k)) > 0:
        raise ValueError("components must share the direction set")
    lam = w1.lam
    k = w1.k
    p = np.stack([w1.c, w2.c, w3.c], axis=1)       # (m, 3) complex amplitudes
    kxp = np.cross(np.broadcast_to(k, p.shape).astype(complex), p)
    q = 0.5 * (-np.cross(k.astype(complex), kxp) + 1j * kxp)
    # q satisfies i k x q = q; decompose q = (alpha - i beta)(e + i k x e)
    ks, es, alphas, betas = [], [], [], []
    for j in range(k.shape[0]):
        e1, f1 = polarization_pair(k[j])
        qr = q[j].real
        alphas.append(np.dot(qr, e1))
        betas.append(np.dot(qr, f1))
        ks.append(k[j])
        es.append(e1)
    return BeltramiExpansion(lam, np.array(ks), np.array(es),
                             np.array(alphas), np.array(betas))


def to_scalar_components(u: BeltramiExpansion):
    """Cartesian components of a BeltramiExpansion as three scalar expansions."""
    p = (u.alpha - 1j * u.beta)[:, None] * (u.e + 1j * u.f)
    return tuple(HelmholtzScalarExpansion(u.lam, u.k, p[:, i]) for i in range(3))
