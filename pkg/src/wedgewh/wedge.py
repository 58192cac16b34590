"""Coupled-face machinery for the point-scatterer wedge: the interaction
matrices between the two semi-infinite faces, the alternating iteration

    A^(j) = A^(0) - MB @ B^(j-1),
    B^(j) = B^(0) - MA @ A^(j),

its spectral-radius convergence analysis, and the resonance guard.

Matrix entries (truncations M on the coefficient index, P on the inner
lambda sum):

    MA[m, q] = sum_{p=0}^{P} sum_{n=1}^{m} lam_{m-n} lam_p H0(ks L_alpha(q, p+n)),
               m = 1..M, q = 0..M                  (M x (M+1))
    MB[m, q] = same with n starting at 0,
               m = 0..M, q = 1..M                  ((M+1) x M)

with L_alpha(m, n) = sqrt(m^2 + n^2 - 2 m n cos(2 alpha)), the scatterer
separation across the wedge in units of s.  Both are assembled from the
radial Hankel table H[q, r] = H0(ks L_alpha(q, r)) by two banded-Toeplitz
multiplications (the entries depend on p+n only through r = p+n).
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import arrays as _arrays
from . import linalg
from .errors import DivergenceError, DomainError
from .specfun import hankel0

RESONANCE_TOL = 1e-9
LAMBDA_CUTOFF = 1e-14


@dataclass
class IterationMatrices:
    MA: np.ndarray  # (M, M+1)
    MB: np.ndarray  # (M+1, M)
    M: int
    P: int


@dataclass
class ScatteringState:
    """Iterates of the face coefficients A_0..A_M and B_{-1}..B_{-M}."""

    A: np.ndarray
    B: np.ndarray
    iteration: int
    history: list  # (j, errA, errB) infinity-norm deltas per step


@dataclass
class ResonanceReport:
    hits: list    # (face, sign, integer_value)
    margin: float  # distance of the nearest condition value to an integer

    @property
    def resonant(self):
        return bool(self.hits)


def lambda_alpha(m, n, alpha):
    """Scatterer separation across the wedge: sqrt(m^2 + n^2 - 2mn cos 2a)."""
    m = np.asarray(m, dtype=float)
    n = np.asarray(n, dtype=float)
    val = np.sqrt(np.maximum(m * m + n * n - 2.0 * m * n * np.cos(2.0 * alpha), 0.0))
    return val if val.ndim else float(val)


def inner_truncation(lam_values, M):
    """P = index of the last lambda with |lam_p| >= 1e-14 |lam_0|, capped at M."""
    mags = np.abs(lam_values[: M + 1])
    keep = np.nonzero(mags >= LAMBDA_CUTOFF * mags[0])[0]
    return int(keep[-1]) if len(keep) else 0


def build_matrices(cfg, lam, M):
    """Assemble the two face-coupling matrices.

    Cost is dominated by the (M+1) x (M+P+1) Hankel table and two matrix
    products; O(M^2) memory.
    """
    if len(lam.values) < M + 1:
        raise DomainError(f"need M+1 = {M + 1} lambda coefficients")
    lv = lam.values[: M + 1]
    P = inner_truncation(lv, M)
    rmax = P + M
    q = np.arange(M + 1, dtype=float)
    r = np.arange(rmax + 1, dtype=float)
    dist = lambda_alpha(q[:, None], r[None, :], cfg.alpha)
    dist[0, 0] = 1.0  # placeholder; the (q, r) = (0, 0) entry is never used
    H = hankel0(cfg.ks * dist)
    H[0, 0] = 0.0

    # G[q, n] = sum_{p=0}^{P} lam_p H[q, n+p]   (n = 0..M)
    S = np.zeros((rmax + 1, M + 1), dtype=complex)
    rows = np.arange(rmax + 1)[:, None]
    cols = np.arange(M + 1)[None, :]
    band = rows - cols
    inband = (band >= 0) & (band <= P)
    S[inband] = lv[: P + 1][band[inband]]
    G = H @ S

    # MA[m, q] = sum_{n=1}^{m} lam_{m-n} G[q, n],  m = 1..M
    # MB[m, q] = sum_{n=0}^{m} lam_{m-n} G[q, n],  m = 0..M, q = 1..M
    i = np.arange(M + 1)[:, None]
    j = np.arange(M + 1)[None, :]
    T = np.zeros((M + 1, M + 1), dtype=complex)
    low = i - j >= 0
    T[low] = lv[(i - j)[low]]
    full = T @ G.T          # full[m, q] = sum_{n=0}^m lam_{m-n} G[q, n]
    MB = full[:, 1:]
    MA = full[1:, :] - lv[1:, None] * G[:, 0][None, :]  # drop the n = 0 term
    return IterationMatrices(MA=MA, MB=MB, M=M, P=P)


def iterate(cfg, lam, M, mats=None, j_max=50, tol=0.0, check_rho=True):
    """Run the alternating scheme from the isolated guess.

    The B update uses the freshly computed A^(j) (half-step ordering).  A
    growing delta over five consecutive steps with net growth above 10x
    raises DivergenceError carrying the history.
    """
    if mats is None:
        mats = build_matrices(cfg, lam, M)
    if check_rho:
        rho_est = _power_rho_estimate(mats)
        if rho_est >= 1.0:
            warnings.warn(f"estimated spectral radius {rho_est:.3f} >= 1; "
                          "the iteration may diverge", stacklevel=2)
    top, bottom = _arrays.isolated_guess(cfg, lam, M)
    A = top.values.copy()
    B = bottom.values.copy()
    history = []
    errs_a = []
    for j in range(1, j_max + 1):
        A_new = top.values - mats.MB @ B
        B_new = bottom.values - mats.MA @ A_new
        err_a = float(np.max(np.abs(A_new - A)))
        err_b = float(np.max(np.abs(B_new - B)))
        history.append((j, err_a, err_b))
        A, B = A_new, B_new
        errs_a.append(err_a)
        if j >= 6:
            window = errs_a[-6:]
            if all(w2 > w1 for w1, w2 in zip(window, window[1:])) and window[-1] > 10 * window[0]:
                raise DivergenceError(
                    f"deltas grew {window[-1] / window[0]:.1f}x over five steps", history)
        if tol > 0 and err_a < tol and err_b < tol:
            break
    return ScatteringState(A=A, B=B, iteration=history[-1][0], history=history)


def _power_rho_estimate(mats, iters=40, seed=0):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(mats.MA.shape[0]) + 1j * rng.standard_normal(mats.MA.shape[0])
    v /= np.linalg.norm(v)
    rho = 0.0
    for _ in range(iters):
        w = mats.MA @ (mats.MB @ v)
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        rho = nw
        v = w / nw
    return float(rho)


def scheme_spectral_radius(mats):
    """(rho(MA @ MB), rho(MB @ MA), |difference|); the two should agree."""
    rho_ab = linalg.spectral_radius(mats.MA @ mats.MB)
    rho_ba = linalg.spectral_radius(mats.MB @ mats.MA)
    return rho_ab, rho_ba, abs(rho_ab - rho_ba)


def resonance_check(cfg, angles=None):
    """Evaluate the four grating conditions (ks/2pi)(1 -+ cos(psi -+ alpha))
    for each probe angle psi; integer values (within 1e-9) are hits."""
    if angles is None:
        angles = [cfg.theta_inc]
    hits = []
    margin = 0.5
    fac = cfg.ks / (2.0 * np.pi)
    for psi in angles:
        for face, ang in (("top", psi - cfg.alpha), ("bottom", psi + cfg.alpha)):
            for sign, val in (("-", fac * (1.0 - np.cos(ang))), ("+", fac * (1.0 + np.cos(ang)))):
                dist = abs(val - round(val))
                margin = min(margin, dist)
                if dist <= RESONANCE_TOL:
                    hits.append((face, sign, int(round(val))))
    return ResonanceReport(hits=hits, margin=float(margin))
