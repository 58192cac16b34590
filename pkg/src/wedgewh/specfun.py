"""Hankel functions of the first kind (orders 0 and 1) for positive real
arguments, plus the mathematical constants the solver needs.

Implementation notes
--------------------
Small arguments use the ascending Maclaurin/logarithmic series evaluated in
extended precision (80-bit long double) so that the alternating-series
cancellation stays below the double-precision target.  Large arguments use
the complex Hankel asymptotic expansion

    H_nu^(1)(x) ~ sqrt(2/(pi x)) e^{i(x - nu pi/2 - pi/4)} sum_m i^m a_m(nu) / x^m,
    a_m(nu) = (4 nu^2 - 1)(4 nu^2 - 9)...(4 nu^2 - (2m-1)^2) / (m! 8^m),

truncated at the smallest term.  The hand-over point X_SPLIT = 16 is where
both branches deliver ~1e-14 relative accuracy (the asymptotic error floor is
O(e^{-2x}), which only drops below 1e-13 past x ~ 15.5; the series loses
~e^x * eps_80bit to cancellation, which stays below 1e-13 up to x ~ 17).
"""

import numpy as np

from .errors import DomainError

# Euler-Mascheroni constant, first zero of J0, Riemann zeta values.
# 25-digit decimal literals; see scripts/gen_hankel_fixture.py.
EULER_GAMMA = 0.5772156649015328606065121
J0_FIRST_ZERO = 2.404825557695772768621632
ZETA3 = 1.2020569031595942853997
ZETA5 = 1.0369277551433699263314

X_SPLIT = 16.0
_SERIES_TERMS = 80
_ASYMP_TERMS = 40

_LD = np.longdouble


def zeta_odd(n):
    """Riemann zeta at the odd integers used by the accelerated kernel sums."""
    if n == 3:
        return ZETA3
    if n == 5:
        return ZETA5
    raise DomainError(f"zeta_odd supports n in {{3, 5}}, got {n!r}")


def _series_jy(x, order):
    """J_order and Y_order by ascending series, long-double accumulation.

    x: 1-D long-double array with 0 < x <= X_SPLIT.
    """
    q = (x / 2) ** 2
    ln_term = np.log(x / 2) + _LD(EULER_GAMMA)
    if order == 0:
        # J0 = sum (-q)^k / (k!)^2 ; Y0 = (2/pi)[ln_term*J0 + sum (-1)^{k+1} H_k q^k/(k!)^2]
        term = np.ones_like(x)
        j = term.copy()
        s = np.zeros_like(x)
        h = _LD(0)
        for k in range(1, _SERIES_TERMS + 1):
            term = term * (-q) / _LD(k * k)
            h = h + _LD(1) / _LD(k)
            j = j + term
            s = s - term * h
        y = (_LD(2) / np.pi) * (ln_term * j + s)
        return j, y
    # J1 = (x/2) sum (-q)^k / (k!(k+1)!)
    # Y1 = (2/pi) ln_term J1 - 2/(pi x) - (x/(2 pi)) sum (-q)^k (H_k + H_{k+1})/(k!(k+1)!)
    term = np.ones_like(x)
    j = term.copy()
    hk = _LD(0)
    hk1 = _LD(1)
    s = term * (hk + hk1)
    for k in range(1, _SERIES_TERMS + 1):
        term = term * (-q) / _LD(k * (k + 1))
        hk = hk + _LD(1) / _LD(k)
        hk1 = hk1 + _LD(1) / _LD(k + 1)
        j = j + term
        s = s + term * (hk + hk1)
    j = (x / 2) * j
    y = (_LD(2) / np.pi) * ln_term * j - _LD(2) / (np.pi * x) - (x / (_LD(2) * np.pi)) * s
    return j, y


# (lower x bound of band, expansion terms needed there for ~1e-14)
_ASYMP_BANDS = ((90.0, 8), (40.0, 14), (24.0, 22), (16.0, 34))


def _asymptotic_bracket(x, order, terms):
    """Horner evaluation of sum_m i^m a_m(order) / x^m."""
    nu4 = 4.0 * order * order
    inv = 1j / x
    acc = np.ones_like(x, dtype=complex)
    for m in range(terms, 0, -1):
        acc *= (nu4 - (2 * m - 1) ** 2) / (8.0 * m) * inv
        acc += 1.0
    return acc


def _asymptotic_h1(x, order):
    """H_order^(1) by the large-argument expansion (float64, complex)."""
    xd = np.asarray(x, dtype=float)
    bracket = np.empty(xd.shape, dtype=complex)
    done = np.zeros(xd.shape, dtype=bool)
    for lo, terms in _ASYMP_BANDS:
        band = (xd >= lo) & ~done
        if np.any(band):
            bracket[band] = _asymptotic_bracket(xd[band], order, terms)
            done |= band
    if not np.all(done):
        bracket[~done] = _asymptotic_bracket(xd[~done], order, _ASYMP_TERMS)
    phase = xd - (0.5 * order + 0.25) * np.pi
    return np.sqrt(2.0 / (np.pi * xd)) * np.exp(1j * phase) * bracket


def _hankel(x, order):
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise DomainError(f"hankel{order} requires finite x > 0")
    out = np.empty(arr.shape, dtype=complex)
    small = arr <= X_SPLIT
    if np.any(small):
        j, y = _series_jy(arr[small].astype(_LD), order)
        out[small] = j.astype(float) + 1j * y.astype(float)
    if np.any(~small):
        out[~small] = _asymptotic_h1(arr[~small], order)
    return out[0] if scalar else out


def hankel0(x):
    """H_0^(1)(x) = J_0(x) + i Y_0(x) for real x > 0.  Accepts arrays."""
    return _hankel(x, 0)


def hankel1(x):
    """H_1^(1)(x) = J_1(x) + i Y_1(x) for real x > 0.  Accepts arrays."""
    return _hankel(x, 1)
