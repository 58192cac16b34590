"""The discrete Wiener-Hopf kernel

    K(z) = H0^(1)(ka) + sum_{l>=1} (z^l + z^-l) H0^(1)(ks l),

evaluated three ways:

* ``kernel_direct`` -- the Hankel sum truncated at L.  Converges like
  L^(-1/2) and only on the unit circle, so it is kept as a reference.
* ``kernel_tail``   -- truncated sum plus the closed-form asymptotic estimate
  of the discarded tail (one or two correction orders); O(L^-(1/2+N)).
* ``kernel_fast``   -- the lattice-sum identity that trades the Hankel sum
  for inverse square roots, optionally accelerated by subtracting the
  l^-3 / l^-5 asymptotes and adding them back as zeta(3)/zeta(5) constants;
  O(L^-(2N+2)) and convergent for complex t (an annulus about |z|=1).

Branch points sit at t = +-ks + 2 pi l (z = e^{+-i ks}).  Each square root
sqrt((ks)^2 - (2 pi l - t)^2) is split as sqrt(ks - tau) sqrt(ks + tau),
tau = t - 2 pi l, with both factors cut along the negative imaginary axis of
their argument.  That orients the cut from t = 2 pi l + ks towards +i inf and
the one from t = 2 pi l - ks towards -i inf, gives Im sqrt >= 0 on the real
axis and sqrt = ks at t = 2 pi l.
"""

import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import BranchPointError, ConfigError, DomainError
from .specfun import EULER_GAMMA, ZETA3, ZETA5, hankel0

BRANCH_EXCLUSION = 1e-8   # angular distance kept from t = +-ks + 2 pi l
CIRCLE_TOL = 1e-10        # |,|z|-1| tolerance for the unit-circle formulas


@dataclass(frozen=True)
class ProblemConfig:
    """Physical parameters of a run: wavenumber k, spacing s, cylinder radius
    a, wedge half-angle alpha and incidence angle theta_inc (radians).

    Geometry guards: a < s/2 and sin(alpha) > a/s keep cylinders apart; the
    isotropic-scattering assumptions want ka << 2 pi and a << s/2, so ka > 0.5
    or a > s/4 only warn.
    """

    k: float
    s: float
    a: float
    alpha: float
    theta_inc: float

    def __post_init__(self):
        for name in ("k", "s", "a", "alpha", "theta_inc"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise ConfigError(f"{name} must be finite, got {v!r}")
        if self.k < 0:
            raise ConfigError("wavenumber k must be >= 0")
        if self.s <= 0:
            raise ConfigError("spacing s must be > 0")
        if not 0 < self.a < self.s / 2:
            raise ConfigError(f"cylinder radius must satisfy 0 < a < s/2, got a={self.a}, s={self.s}")
        if np.sin(self.alpha) <= self.a / self.s:
            raise ConfigError(
                f"wedge angle must satisfy sin(alpha) > a/s, got alpha={self.alpha}, a/s={self.a / self.s}")
        if self.k * self.a > 0.5:
            warnings.warn(f"ka = {self.k * self.a:.3g} strains the point-scatterer assumption ka << 2 pi",
                          stacklevel=2)
        if self.a > self.s / 4:
            warnings.warn(f"a = {self.a:.3g} strains the wide-spacing assumption a << s/2", stacklevel=2)

    @property
    def ks(self):
        return self.k * self.s

    @property
    def ka(self):
        return self.k * self.a


@dataclass(frozen=True)
class KernelMethod:
    """Evaluation method selector: variant in {'direct', 'tail', 'fast'},
    corrections N (tail: 1..2, fast: 0..2) and truncation L >= 2."""

    variant: str = "fast"
    corrections: int = 2
    L: int = 500

    def __post_init__(self):
        if self.variant not in ("direct", "tail", "fast"):
            raise ConfigError(f"unknown kernel variant {self.variant!r}")
        if self.L < 2:
            raise ConfigError("truncation L must be >= 2")
        if self.variant == "tail" and self.corrections not in (1, 2):
            raise ConfigError("tail corrections limited to the printed orders N in {1, 2}")
        if self.variant == "fast" and self.corrections not in (0, 1, 2):
            raise ConfigError("fast-formula corrections limited to N in {0, 1, 2}")


def _branch_distance_t(t, ks):
    """Distance from (complex) t to the nearest branch point +-ks + 2 pi l."""
    t = np.asarray(t, dtype=complex)
    d = np.inf
    for sign in (+1.0, -1.0):
        # nearest lattice translate of sign*ks
        offs = (t.real - sign * ks) / (2 * np.pi)
        for l in (np.floor(offs), np.ceil(offs)):
            d = np.minimum(d, np.abs(t - (sign * ks + 2 * np.pi * l)))
    return d


def _check_on_circle(z, ks):
    z = complex(z)
    if z == 0 or not np.isfinite(z.real) or not np.isfinite(z.imag):
        raise DomainError("z must be finite and nonzero")
    if abs(abs(z) - 1.0) > CIRCLE_TOL:
        raise DomainError(
            f"|z| = {abs(z):.12f}: the Hankel sum converges only on the unit circle")
    t = np.angle(z)
    if float(_branch_distance_t(t, ks)) <= BRANCH_EXCLUSION:
        raise BranchPointError(f"z = {z} is within {BRANCH_EXCLUSION} of a branch point e^(+-i ks)")
    return t


def kernel_direct(cfg, z, L):
    """Truncated Hankel sum: H0(ka) + sum_{l=1}^{L-1} (z^l + z^-l) H0(ks l)."""
    _check_on_circle(z, cfg.ks)
    z = complex(z)
    ell = np.arange(1, L)
    zp = z ** ell
    terms = (zp + 1.0 / zp) * hankel0(cfg.ks * ell)
    return complex(hankel0(cfg.ka) + np.sum(terms))


def tail_estimate(cfg, z, L, corrections):
    """Asymptotic estimate of sum_{l>=L} (z^l + z^-l) H0(ks l).

    corrections = 1 keeps the leading term, 2 adds the printed 1/(2L) bracket.
    """
    ks = cfg.ks
    pref = (1.0 - 1.0j) / np.sqrt(np.pi * ks * L)

    def T(w):
        base = w ** L / (1.0 - w)
        if corrections >= 2:
            base = base * (1.0 - (w / (1.0 - w) + 1j / (4.0 * ks)) / (2.0 * L))
        return base

    eiks = np.exp(1j * ks)
    return pref * (T(z * eiks) + T(eiks / z))


def kernel_tail(cfg, z, L, corrections=2):
    """Hankel sum to L-1 plus the tail-end estimate; O(L^-(1/2+N))."""
    if corrections not in (1, 2):
        raise ConfigError("tail corrections limited to N in {1, 2}")
    _check_on_circle(z, cfg.ks)
    z = complex(z)
    return kernel_direct(cfg, z, L) + complex(tail_estimate(cfg, z, L, corrections))


def _sqrt_cut_down(w):
    """sqrt with the branch cut along the negative imaginary axis
    (arg in [-pi/2, 3 pi/2))."""
    w = np.asarray(w, dtype=complex)
    theta = np.angle(w)
    theta = np.where(theta < -np.pi / 2, theta + 2 * np.pi, theta)
    return np.sqrt(np.abs(w)) * np.exp(0.5j * theta)


def _branch_sqrt(ks, tau):
    """sqrt((ks)^2 - tau^2) with the cut from tau=+ks up and tau=-ks down."""
    return _sqrt_cut_down(ks - tau) * _sqrt_cut_down(ks + tau)


def kernel_fast(cfg, t, corrections=2, L=500):
    """Fast-convergent kernel value K(e^{it}) for real or complex t.

    corrections 0/1/2 select the plain, zeta(3)- and zeta(5)-accelerated
    forms; the +l and -l square-root terms are paired as printed so their
    cancellation against i/(pi l) stays explicit.
    """
    if corrections not in (0, 1, 2):
        raise ConfigError("fast corrections limited to N in {0, 1, 2}")
    ks, ka = cfg.ks, cfg.ka
    t = np.asarray(t, dtype=complex)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    if np.any(_branch_distance_t(t, ks) <= BRANCH_EXCLUSION):
        raise BranchPointError("t within the exclusion radius of a branch point +-ks + 2 pi l")

    out = hankel0(ka) - 1.0 - (2j / np.pi) * (EULER_GAMMA + np.log(ks / (4 * np.pi)))
    out = out + 2.0 / _branch_sqrt(ks, t)
    if corrections >= 1:
        out = out + (2.0 * t * t + ks * ks) * ZETA3 / (4j * np.pi ** 3)
    if corrections >= 2:
        out = out + (8.0 * t ** 4 + 24.0 * (ks * t) ** 2 + 3.0 * ks ** 4) * ZETA5 / (64j * np.pi ** 5)

    ell = np.arange(1, L + 1, dtype=float)[:, None]
    tl = t[None, :]
    terms = (2.0 / _branch_sqrt(ks, tl - 2 * np.pi * ell)
             + 2.0 / _branch_sqrt(ks, tl + 2 * np.pi * ell)
             + 2j / (np.pi * ell))
    if corrections >= 1:
        terms = terms - (2.0 * tl * tl + ks * ks) / (4j * (np.pi * ell) ** 3)
    if corrections >= 2:
        terms = terms - (8.0 * tl ** 4 + 24.0 * (ks * tl) ** 2 + 3.0 * ks ** 4) / (64j * (np.pi * ell) ** 5)
    out = out + terms.sum(axis=0)
    if not np.all(np.isfinite(out)):
        raise DomainError("kernel_fast produced a non-finite value")
    return complex(out[0]) if scalar else out


def kernel(cfg, z, method=KernelMethod()):
    """Dispatch to the selected evaluation method.

    The fast method accepts z off the unit circle inside the annulus
    e^(-ks/10) < |z| < e^(ks/10) via t = -i log z (principal branch).
    """
    if method.variant == "direct":
        return kernel_direct(cfg, z, method.L)
    if method.variant == "tail":
        return kernel_tail(cfg, z, method.L, method.corrections)
    z = complex(z)
    if z == 0:
        raise DomainError("z must be nonzero")
    r = abs(z)
    lim = np.exp(cfg.ks / 10.0)
    if not (1.0 / lim < r < lim):
        raise DomainError(
            f"|z| = {r:.6g} outside the annulus e^(+-ks/10) where the fast formula converges")
    t = -1j * np.log(z)  # principal log: t = arg(z) - i ln|z|
    return complex(kernel_fast(cfg, complex(t), method.corrections, method.L))
