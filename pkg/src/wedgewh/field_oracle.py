"""Wave-field synthesis on grids and the dense direct solver used as the
in-repo ground truth.

The direct solver assembles the full interaction system for a truncated
wedge of 2N+1 point scatterers,

    A_m H0(ka) + sum_{n != m} A_n H0(k |R_m - R_n|) = -Phi_inc(R_m),

and solves it densely.  It uses the same isotropic point-scatterer model as
the factorization/iteration pipeline, so a field comparison isolates the
Wiener-Hopf and iteration machinery (it is NOT an independent check of the
isotropic approximation itself).
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import ConfigError, DomainError
from .specfun import hankel0

SINGULAR_RADIUS_FACTOR = 1e-12  # points closer than this * s to a centre are masked
MASK_RADIUS_FACTOR = 2.0        # grid mask radius, in units of the cylinder radius
DENSE_BUDGET = 4000


@dataclass
class ScattererSet:
    """Scatterer centres (n, 2) and their monopole amplitudes."""

    centers: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        self.centers = np.asarray(self.centers, dtype=float).reshape(-1, 2)
        self.coeffs = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        if len(self.centers) != len(self.coeffs):
            raise ConfigError("centers and coeffs must have equal length")


@dataclass
class FieldGrid:
    """Rectangular sample grid; values row-major with x varying fastest."""

    x0: float
    x1: float
    y0: float
    y1: float
    nx: int
    ny: int
    values: np.ndarray  # (ny, nx) complex
    mask: np.ndarray    # (ny, nx) bool, True inside a scatterer disc

    def axes(self):
        return np.linspace(self.x0, self.x1, self.nx), np.linspace(self.y0, self.y1, self.ny)


def incident(cfg, point):
    """Unit plane wave e^{-i k r cos(theta - theta_inc)} at one or many points."""
    p = np.asarray(point, dtype=float)
    x = p[..., 0]
    y = p[..., 1]
    return np.exp(-1j * cfg.k * (x * np.cos(cfg.theta_inc) + y * np.sin(cfg.theta_inc)))


def scattered(cfg, scatterers, point):
    """Sum of monopole fields. Raises for points on top of a scatterer."""
    p = np.asarray(point, dtype=float)
    scalar = p.ndim == 1
    pts = p.reshape(-1, 2)
    d = np.linalg.norm(pts[:, None, :] - scatterers.centers[None, :, :], axis=2)
    if np.any(d < SINGULAR_RADIUS_FACTOR * cfg.s):
        raise DomainError("evaluation point coincides with a scatterer centre")
    out = np.sum(scatterers.coeffs[None, :] * hankel0(cfg.k * d), axis=1)
    return complex(out[0]) if scalar else out.reshape(p.shape[:-1])


def wedge_positions(cfg, n_per_face):
    """Scatterer centres: index 0 at the wedge tip, 1..N up the top face,
    then 1..N down the bottom face."""
    n = np.arange(1, n_per_face + 1, dtype=float)
    top = np.stack([n * cfg.s * np.cos(cfg.alpha), n * cfg.s * np.sin(cfg.alpha)], axis=1)
    bottom = np.stack([n * cfg.s * np.cos(cfg.alpha), -n * cfg.s * np.sin(cfg.alpha)], axis=1)
    centers = np.vstack([[[0.0, 0.0]], top, bottom])
    return ScattererSet(centers=centers, coeffs=np.zeros(len(centers), dtype=complex))


def wedge_scatterers(cfg, top_coeffs, bottom_coeffs):
    """ScattererSet for wedge faces from A_0..A_M and B_{-1}..B_{-M}."""
    top = np.asarray(top_coeffs, dtype=complex)
    bottom = np.asarray(bottom_coeffs, dtype=complex)
    ss = wedge_positions(cfg, max(len(top) - 1, len(bottom)))
    n_face = max(len(top) - 1, len(bottom))
    coeffs = np.zeros(2 * n_face + 1, dtype=complex)
    coeffs[0] = top[0]
    coeffs[1:len(top)] = top[1:]
    coeffs[n_face + 1:n_face + 1 + len(bottom)] = bottom
    return ScattererSet(centers=ss.centers, coeffs=coeffs)


def direct_oracle(cfg, n_per_face):
    """Dense Foldy solve over the truncated wedge (2N+1 scatterers)."""
    n_tot = 2 * n_per_face + 1
    if n_tot > DENSE_BUDGET:
        raise ConfigError(f"{n_tot} scatterers exceed the dense-solve budget {DENSE_BUDGET}")
    ss = wedge_positions(cfg, n_per_face)
    d = np.linalg.norm(ss.centers[:, None, :] - ss.centers[None, :, :], axis=2)
    np.fill_diagonal(d, 1.0)
    A = hankel0(cfg.k * d)
    np.fill_diagonal(A, hankel0(cfg.ka))
    rhs = -incident(cfg, ss.centers)
    coeffs = linalg.lu_solve(A, rhs)
    return ScattererSet(centers=ss.centers, coeffs=coeffs)


def evaluate_grid(cfg, scatterers, window, nx, ny, include_incident=False,
                  mask_radius=None, chunk=8192):
    """Scattered (or total) field over a rectangular window.

    window = (x0, x1, y0, y1); points within mask_radius (default 2a) of any
    centre are masked and carry NaN values.
    """
    x0, x1, y0, y1 = window
    if nx < 2 or ny < 2:
        raise ConfigError("grid needs nx, ny >= 2")
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    X, Y = np.meshgrid(xs, ys)
    pts = np.stack([X.ravel(), Y.ravel()], axis=1)
    if mask_radius is None:
        mask_radius = MASK_RADIUS_FACTOR * cfg.a
    values = np.empty(len(pts), dtype=complex)
    mask = np.zeros(len(pts), dtype=bool)
    for lo in range(0, len(pts), chunk):
        sl = slice(lo, min(lo + chunk, len(pts)))
        d = np.linalg.norm(pts[sl, None, :] - scatterers.centers[None, :, :], axis=2)
        m = np.any(d <= mask_radius, axis=1)
        d = np.maximum(d, SINGULAR_RADIUS_FACTOR * cfg.s)
        v = np.sum(scatterers.coeffs[None, :] * hankel0(cfg.k * d), axis=1)
        values[sl] = v
        mask[sl] = m
    if include_incident:
        values = values + incident(cfg, pts)
    values[mask] = np.nan
    return FieldGrid(x0=x0, x1=x1, y0=y0, y1=y1, nx=nx, ny=ny,
                     values=values.reshape(ny, nx), mask=mask.reshape(ny, nx))


def compare(cfg, grid_a, grid_b):
    """(relative L2, max abs) difference over the common unmasked points."""
    for attr in ("x0", "x1", "y0", "y1", "nx", "ny"):
        if getattr(grid_a, attr) != getattr(grid_b, attr):
            raise DomainError(f"grid geometry mismatch on {attr}")
    if grid_a.mask.shape != grid_b.mask.shape or np.any(grid_a.mask != grid_b.mask):
        raise DomainError("grid masks differ")
    keep = ~grid_a.mask
    diff = grid_a.values[keep] - grid_b.values[keep]
    ref = np.linalg.norm(grid_a.values[keep])
    rel_l2 = float(np.linalg.norm(diff) / ref) if ref > 0 else 0.0
    return rel_l2, float(np.max(np.abs(diff)))
