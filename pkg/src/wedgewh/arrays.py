"""Scattering coefficients for the infinite array, the semi-infinite array,
and the isolated initial guess for the two wedge faces.

The semi-infinite coefficients follow the recurrence

    A_0 = -lambda_0 / K+(e^{-i beta}),
    A_m = e^{-i beta} A_{m-1} + (lambda_m / lambda_0) A_0,

with beta = ks cos(theta_inc - alpha) for the top face and
ks cos(theta_inc + alpha) for the bottom face.  The bottom-face guess runs
the same recurrence shifted by one (its m-th coefficient carries the partial
lambda-sum up to m-1 only), seeded with B_{-1} = -lambda_0 e^{-i beta}/K+.
"""

from dataclasses import dataclass

import numpy as np

from . import wedge as _wedge
from .errors import BranchPointError, DomainError, ResonanceError
from .kernel import BRANCH_EXCLUSION, kernel_fast

K_PLUS_RADIUS = 1.0 - 1e-9  # evaluate K+ just inside the circle


@dataclass
class ArrayCoeffs:
    """A run of scattering coefficients for one array face."""

    values: np.ndarray
    kind: str    # "infinite" | "semi_infinite" | "isolated_top" | "isolated_bottom"
    beta: float  # effective phase ks cos(theta_inc -+ alpha)

    def __len__(self):
        return len(self.values)


def _beta(cfg, branch):
    if branch == "top":
        return cfg.ks * np.cos(cfg.theta_inc - cfg.alpha)
    if branch == "bottom":
        return cfg.ks * np.cos(cfg.theta_inc + cfg.alpha)
    raise DomainError(f"branch must be 'top' or 'bottom', got {branch!r}")


def _check_branch_collision(cfg, beta):
    # e^{-i beta} colliding with e^{+-i ks} is exactly an array resonance
    d = min(abs(np.remainder(beta - cfg.ks, 2 * np.pi)),
            abs(np.remainder(beta - cfg.ks, 2 * np.pi) - 2 * np.pi),
            abs(np.remainder(beta + cfg.ks, 2 * np.pi)),
            abs(np.remainder(beta + cfg.ks, 2 * np.pi) - 2 * np.pi))
    if d <= BRANCH_EXCLUSION:
        raise BranchPointError(
            f"forcing phase e^(-i beta) sits on a kernel branch point (distance {d:.2e})")


def infinite_coeff(cfg):
    """Quasi-periodic amplitude of the doubly infinite array:
    A_0 = -1/K(e^{-i ks cos(theta_inc - alpha)})."""
    report = _wedge.resonance_check(cfg)
    if report.hits:
        raise ResonanceError("infinite array is resonant", report)
    beta = _beta(cfg, "top")
    _check_branch_collision(cfg, beta)
    return -1.0 / kernel_fast(cfg, -beta, corrections=2, L=500)


def semi_coeffs(cfg, lam, M, branch="top"):
    """Semi-infinite array coefficients A_0..A_M (or the isolated bottom-face
    guess B_{-1}..B_{-M}) from the recurrence."""
    if len(lam.values) < M + 1:
        raise DomainError(f"need at least M+1 = {M + 1} lambda coefficients, have {len(lam.values)}")
    lam0 = lam.values[0]
    if abs(lam0) < 1e-14:
        raise DomainError("lambda_0 ~ 0: kernel factor degenerate")
    if lam.kplus is None:
        raise DomainError(
            "semi_coeffs needs the rational-route factor; build lam with lambda_from_rational")
    beta = _beta(cfg, branch)
    _check_branch_collision(cfg, beta)
    kp = complex(lam.kplus(K_PLUS_RADIUS * np.exp(-1j * beta)))
    phase = np.exp(-1j * beta)
    lv = lam.values
    if branch == "top":
        out = np.empty(M + 1, dtype=complex)
        out[0] = -lam0 / kp
        for m in range(1, M + 1):
            out[m] = phase * out[m - 1] + (lv[m] / lam0) * out[0]
        return ArrayCoeffs(out, "semi_infinite", float(beta))
    out = np.empty(M, dtype=complex)
    out[0] = -lam0 * phase / kp                      # B_{-1}
    for m in range(1, M):
        out[m] = phase * out[m - 1] + (lv[m] / lam0) * out[0]
    return ArrayCoeffs(out, "isolated_bottom", float(beta))


def isolated_guess(cfg, lam, M):
    """Initial guess with the two faces treated as isolated semi-infinite
    arrays: M+1 top coefficients A_0..A_M and M bottom ones B_{-1}..B_{-M}."""
    top = semi_coeffs(cfg, lam, M, "top")
    top = ArrayCoeffs(top.values, "isolated_top", top.beta)
    bottom = semi_coeffs(cfg, lam, M, "bottom")
    return top, bottom
