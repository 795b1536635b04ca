"""Run configuration shared by the synthesis/verification pipeline and the CLI."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class RunConfig:
    """Numeric knobs for a synthesis/verification run.

    All defaults are the values used by the acceptance suite; every field can
    be overridden from the CLI or by constructing a replaced copy.
    """

    lam: float = 1.0                 # Beltrami eigenvalue, must be > 0
    safety: float = 0.5              # tube radius = safety * min(reach, half gap)
    w_half_factor: float = 0.014     # strip half-width = w_half_factor * tube radius
    frame_samples: int = 1024        # arc-length samples for curve/frame models
    strip_s_per_2pi: int = 256       # strip grid: s nodes per 2*pi of arc length
    strip_t_nodes: int = 33          # strip grid: nodes across [-w_half, w_half]
    fit_stride_s: int = 1            # fit uses every stride-th strip node in s
    fit_stride_t: int = 1            # fit uses every stride-th strip node in t
    directions: int = 200            # quasi-uniform wave directions (2 polarizations each)
    ridge: float = 1e-10             # Tikhonov weight on the expansion coefficients
    budget_order: int = 1            # derivative order s in the error budget count
    eps_tilde: float = 1e-3          # per-tube strip residual tolerance
    rtol: float = 1e-10              # integrator relative tolerance
    atol: float = 1e-12              # integrator absolute tolerance
    method: str = "DOP853"           # embedded Runge-Kutta pair with dense output
    orbit_samples: int = 1024        # polyline samples per recovered orbit
    closure_tol: float = 1e-9        # |x(T) - x(0)| required of a refined orbit
    newton_max_iter: int = 30
    t_max_factor: float = 4.0        # Poincare return budget, multiples of core period
    march_theta_nodes: int = 128
    march_z_nodes: int = 33
    march_steps: int = 24            # rho steps over the trusted range
    march_rho_frac: float = 0.2      # trusted range = march_rho_frac * strip half-width
    march_m_max: int = 32            # hard Fourier cutoff in theta during marching
    march_growth_cap: float = 10.0   # abort marching when level norm grows past this
    defect_tol: float = 0.1          # max pre-rounding defect accepted for linking numbers
    hausdorff_tol: float = 1e-2      # orbit-to-core Hausdorff distance gate
    closedness_tol: float = 1e-8     # max d(pullback gamma) residual on the strip
    curl_check_points: int = 100     # random points for the eigen-relation spot check
    curl_tol: float = 1e-6           # relative FD curl error gate
    div_tol: float = 1e-8            # FD divergence gate
    cross_validate: bool = True      # measure C0/C1 distance to the marched local field
    seed: int = 0                    # seed for direction jitter

    def replace(self, **kw) -> "RunConfig":
        return dataclasses.replace(self, **kw)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def config_from_dict(d: dict) -> RunConfig:
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = set(d) - known
    if unknown:
        raise ValueError(f"unknown config fields: {sorted(unknown)}")
    return RunConfig(**d)
