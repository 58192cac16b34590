#!/usr/bin/env python3
"""Generate the Hankel-function oracle tables used by the test suite.

Runs once, offline, at 50-digit working precision; the library itself never
imports mpmath.  J and Y are summed from their Maclaurin/logarithmic series
directly (not via mpmath.besselj/bessely) so the oracle is independent of any
canned special-function implementation.

Output: tests/data/hankel0_oracle.csv and tests/data/hankel1_oracle.csv,
rows of (x, Re, Im) at 17 significant digits.
"""

import csv
import pathlib
from contextlib import contextmanager

from mpmath import mp, mpf, log, euler, pi, sqrt

mp.dps = 50


@contextmanager
def enough_digits(x):
    """Working precision that covers the ~e^x series cancellation at large x."""
    saved = mp.dps
    mp.dps = 60 + int(0.45 * float(x))
    try:
        yield
    finally:
        mp.dps = saved

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data"


def j0_series(x):
    s = mpf(1)
    term = mpf(1)
    q = (x / 2) ** 2
    k = 0
    while abs(term) > mpf(10) ** (-mp.dps - 10) * (1 + abs(s)):
        k += 1
        term *= -q / k ** 2
        s += term
        if k > 5000:
            raise RuntimeError("j0 series did not converge")
    return s


def y0_series(x):
    # Y0 = (2/pi)[(ln(x/2)+gamma) J0 + sum_{m>=1} (-1)^{m+1} H_m (x/2)^{2m}/(m!)^2]
    q = (x / 2) ** 2
    term = mpf(1)
    h = mpf(0)
    s = mpf(0)
    m = 0
    while True:
        m += 1
        term *= -q / m ** 2
        h += mpf(1) / m
        add = -term * h
        s += add
        if abs(add) < mpf(10) ** (-mp.dps - 10) * (1 + abs(s)) and m > 4:
            break
        if m > 5000:
            raise RuntimeError("y0 series did not converge")
    return (2 / pi) * ((log(x / 2) + euler) * j0_series(x) + s)


def j1_series(x):
    s = mpf(1)
    term = mpf(1)
    q = (x / 2) ** 2
    k = 0
    while abs(term) > mpf(10) ** (-mp.dps - 10) * (1 + abs(s)):
        k += 1
        term *= -q / (k * (k + 1))
        s += term
        if k > 5000:
            raise RuntimeError("j1 series did not converge")
    return (x / 2) * s


def y1_series(x):
    # Y1 = (2/pi)(ln(x/2)+gamma) J1 - 2/(pi x)
    #      - (x/(2 pi)) sum_{k>=0} (-1)^k (H_k + H_{k+1}) (x^2/4)^k / (k!(k+1)!)
    q = (x / 2) ** 2
    term = mpf(1)  # (x^2/4)^k / (k!(k+1)!) at k=0
    hk = mpf(0)
    hk1 = mpf(1)
    s = term * (hk + hk1)
    k = 0
    while True:
        k += 1
        term *= -q / (k * (k + 1))
        hk += mpf(1) / k
        hk1 += mpf(1) / (k + 1)
        add = term * (hk + hk1)
        s += add
        if abs(add) < mpf(10) ** (-mp.dps - 10) * (1 + abs(s)) and k > 4:
            break
        if k > 5000:
            raise RuntimeError("y1 series did not converge")
    return (2 / pi) * (log(x / 2) + euler) * j1_series(x) - 2 / (pi * x) - (x / (2 * pi)) * s


def zeta_em(s_exp, terms=60):
    # Direct summation with Euler-Maclaurin tail correction.
    n = terms
    s = sum(mpf(1) / mpf(j) ** s_exp for j in range(1, n))
    # integral tail + 1/2 f(n) + Bernoulli corrections
    f = lambda x: mpf(x) ** (-s_exp)
    tail = mpf(n) ** (1 - s_exp) / (s_exp - 1) + f(n) / 2
    tail += s_exp * mpf(n) ** (-s_exp - 1) / 12
    tail -= s_exp * (s_exp + 1) * (s_exp + 2) * mpf(n) ** (-s_exp - 3) / 720
    tail += s_exp * (s_exp + 1) * (s_exp + 2) * (s_exp + 3) * (s_exp + 4) * mpf(n) ** (-s_exp - 5) / 30240
    return s + tail


def bisect_j0_zero(lo, hi):
    flo = j0_series(mpf(lo))
    for _ in range(400):
        mid = (mpf(lo) + mpf(hi)) / 2
        fm = j0_series(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return (mpf(lo) + mpf(hi)) / 2


def grid():
    xs = []
    # log grid over the validation range
    lo, hi, n = mpf("1e-6"), mpf(500), 200
    for i in range(n):
        xs.append(lo * (hi / lo) ** (mpf(i) / (n - 1)))
    # anchors used by individual tests
    xs += [mpf("1e-4"), mpf("0.5"), mpf(1), mpf(2), mpf(5), mpf(8), mpf(400)]
    # the series/asymptotics hand-over region
    for v in ("15.5", "15.9", "16.0", "16.1", "16.5", "17.0"):
        xs.append(mpf(v))
    return sorted(set(xs))


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    xs = grid()
    with open(OUT / "hankel0_oracle.csv", "w", newline="\n") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "re", "im"])
        for x in xs:
            with enough_digits(x):
                w.writerow([mp.nstr(x, 17, strip_zeros=False),
                            mp.nstr(j0_series(x), 17, strip_zeros=False),
                            mp.nstr(y0_series(x), 17, strip_zeros=False)])
    with open(OUT / "hankel1_oracle.csv", "w", newline="\n") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "re", "im"])
        for x in xs:
            with enough_digits(x):
                w.writerow([mp.nstr(x, 17, strip_zeros=False),
                            mp.nstr(j1_series(x), 17, strip_zeros=False),
                            mp.nstr(y1_series(x), 17, strip_zeros=False)])

    j0z = bisect_j0_zero(2, 3)
    with open(OUT / "special_values.csv", "w", newline="\n") as fh:
        w = csv.writer(fh)
        w.writerow(["name", "value"])
        w.writerow(["j0_first_zero", mp.nstr(j0z, 25)])
        w.writerow(["zeta3", mp.nstr(zeta_em(3), 25)])
        w.writerow(["zeta5", mp.nstr(zeta_em(5), 25)])
        w.writerow(["euler_gamma", mp.nstr(euler, 25)])
        w.writerow(["sqrt_2_over_pi", mp.nstr(sqrt(2 / pi), 25)])
    print("wrote", OUT)


if __name__ == "__main__":
    main()
