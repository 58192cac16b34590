"""Dense complex linear algebra: LU solve, eigenvalues, spectral radius and a
small least-squares SVD.

Everything here is written against plain ``numpy.ndarray`` (complex128,
row-major), which plays the role of the matrix type used across the package.
The algorithms are the classical dense ones:

* ``lu_solve``      -- partial-pivot LU, one matrix at a time.
* ``eigenvalues``   -- Householder reduction to Hessenberg form followed by
                       explicit single-shift QR with Wilkinson shifts and
                       deflation (complex shifts, so no double-shift needed).
* ``spectral_radius`` -- full QR spectrum for n <= 400; power iteration with
                       an eigensolver fallback above that.
* ``svd_least_squares`` -- Householder QR to square the problem, then
                       one-sided Jacobi on the triangular factor.  Jacobi
                       keeps small singular values accurate, which is what
                       the rational-fit weight vector needs.
"""

from dataclasses import dataclass

import numpy as np

from .errors import IterationFailureError, SingularMatrixError

_EPS = np.finfo(float).eps
_PIVOT_FLOOR = 1e-300


def _as_complex_matrix(a):
    A = np.array(a, dtype=complex, copy=True)
    if A.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    if not np.all(np.isfinite(A.real)) or not np.all(np.isfinite(A.imag)):
        raise ValueError("matrix entries must be finite")
    return A


def lu_solve(a, b):
    """Solve A x = b by LU with partial pivoting.

    Raises SingularMatrixError when a pivot falls below 1e-300.
    """
    A = _as_complex_matrix(a)
    n, m = A.shape
    if n != m:
        raise ValueError("lu_solve needs a square matrix")
    x = np.array(b, dtype=complex, copy=True)
    if x.shape != (n,):
        raise ValueError("right-hand side length must match the matrix")
    for k in range(n):
        p = k + int(np.argmax(np.abs(A[k:, k])))
        if np.abs(A[p, k]) < _PIVOT_FLOOR:
            raise SingularMatrixError(f"pivot {np.abs(A[p, k]):.3e} at column {k}")
        if p != k:
            A[[k, p]] = A[[p, k]]
            x[[k, p]] = x[[p, k]]
        inv = 1.0 / A[k, k]
        if k + 1 < n:
            mult = A[k + 1:, k] * inv
            A[k + 1:, k + 1:] -= np.outer(mult, A[k, k + 1:])
            x[k + 1:] -= mult * x[k]
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - A[k, k + 1:] @ x[k + 1:]) / A[k, k]
    return x


def _householder_hessenberg(A):
    n = A.shape[0]
    H = A.copy()
    for k in range(n - 2):
        x = H[k + 1:, k]
        nx = np.linalg.norm(x)
        if nx == 0.0:
            continue
        v = x.copy()
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v[0] += phase * nx
        nv = np.linalg.norm(v)
        if nv < _PIVOT_FLOOR:
            continue
        v /= nv
        H[k + 1:, k:] -= 2.0 * np.outer(v, v.conj() @ H[k + 1:, k:])
        H[:, k + 1:] -= 2.0 * np.outer(H[:, k + 1:] @ v, v.conj())
        H[k + 2:, k] = 0.0
    return H


def _givens(f, g):
    """(c, s) with c real >= 0 so that [[c, s], [-conj(s), c]] @ (f, g) = (r, 0)."""
    if g == 0:
        return 1.0, 0.0 + 0.0j
    if f == 0:
        return 0.0, np.conj(g) / abs(g)
    d = np.hypot(abs(f), abs(g))
    c = abs(f) / d
    s = (f / abs(f)) * np.conj(g) / d
    return c, s


def _eig2(a, b, c, d):
    """Eigenvalues of [[a, b], [c, d]]."""
    half = 0.5 * (a + d)
    disc = np.sqrt(0.25 * (a - d) ** 2 + b * c + 0j)
    return half + disc, half - disc


def _qr_eigvals(H, sweep_cap):
    n = H.shape[0]
    eig = np.empty(n, dtype=complex)
    hi = n - 1
    sweeps = 0
    stagnant = 0
    while hi >= 0:
        if hi == 0:
            eig[0] = H[0, 0]
            break
        # deflate converged trailing entries
        tol = _EPS * (abs(H[hi - 1, hi - 1]) + abs(H[hi, hi])) + _PIVOT_FLOOR
        if abs(H[hi, hi - 1]) <= tol:
            eig[hi] = H[hi, hi]
            H[hi, hi - 1] = 0.0
            hi -= 1
            stagnant = 0
            continue
        # active block [lo, hi]
        lo = hi
        while lo > 0:
            tol = _EPS * (abs(H[lo - 1, lo - 1]) + abs(H[lo, lo])) + _PIVOT_FLOOR
            if abs(H[lo, lo - 1]) <= tol:
                break
            lo -= 1
        if hi - lo == 1:
            e1, e2 = _eig2(H[lo, lo], H[lo, hi], H[hi, lo], H[hi, hi])
            eig[hi] = e1
            eig[lo] = e2
            hi = lo - 1
            stagnant = 0
            continue
        sweeps += 1
        stagnant += 1
        if sweeps > sweep_cap:
            raise IterationFailureError(
                f"QR iteration exceeded {sweep_cap} sweeps with {hi + 1} eigenvalues left")
        if stagnant % 12 == 0:
            # exceptional shift breaks symmetry-induced cycling
            mu = H[hi, hi] + 0.75 * abs(H[hi, hi - 1])
        else:
            e1, e2 = _eig2(H[hi - 1, hi - 1], H[hi - 1, hi], H[hi, hi - 1], H[hi, hi])
            mu = e1 if abs(e1 - H[hi, hi]) <= abs(e2 - H[hi, hi]) else e2
        W = H[lo:hi + 1, lo:hi + 1]
        m = hi - lo + 1
        W.flat[:: m + 1] -= mu
        rot = []
        for k in range(m - 1):
            c, s = _givens(W[k, k], W[k + 1, k])
            rot.append((c, s))
            top = c * W[k, k:] + s * W[k + 1, k:]
            W[k + 1, k:] = -np.conj(s) * W[k, k:] + c * W[k + 1, k:]
            W[k, k:] = top
        for k in range(m - 1):
            c, s = rot[k]
            r = min(k + 2, m)
            left = c * W[:r, k] + np.conj(s) * W[:r, k + 1]
            W[:r, k + 1] = -s * W[:r, k] + c * W[:r, k + 1]
            W[:r, k] = left
        W.flat[:: m + 1] += mu
    return eig


def eigenvalues(a, sweep_factor=30):
    """All eigenvalues of a square complex matrix (unordered)."""
    A = _as_complex_matrix(a)
    n = A.shape[0]
    if A.shape[1] != n:
        raise ValueError("eigenvalues needs a square matrix")
    if n == 0:
        return np.empty(0, dtype=complex)
    if n == 1:
        return A[0, 0].reshape(1)
    scale = np.max(np.abs(A))
    if scale == 0.0:
        return np.zeros(n, dtype=complex)
    H = _householder_hessenberg(A / scale)
    return _qr_eigvals(H, sweep_factor * n) * scale


def spectral_radius(a, rng=None, tol=1e-10, max_iter=5000, dense_cutoff=400):
    """max |eigenvalue|.

    Full QR spectrum for n <= dense_cutoff; power iteration above, falling
    back to the full spectrum if the iteration stagnates.
    """
    A = _as_complex_matrix(a)
    n = A.shape[0]
    if A.shape[1] != n:
        raise ValueError("spectral_radius needs a square matrix")
    if n <= dense_cutoff:
        ev = eigenvalues(A)
        return float(np.max(np.abs(ev))) if n else 0.0
    if rng is None:
        rng = np.random.default_rng(0)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    rho_prev = np.inf
    stable = 0
    for _ in range(max_iter):
        w = A @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        rho = nw
        v = w / nw
        if abs(rho - rho_prev) <= tol * max(rho, 1e-30):
            stable += 1
            if stable >= 5:
                return float(rho)
        else:
            stable = 0
        rho_prev = rho
    # stagnation: documented fallback to the full spectrum
    ev = eigenvalues(A)
    return float(np.max(np.abs(ev)))


@dataclass
class LstsqResult:
    """Least-squares solution plus the pieces of the SVD callers reuse."""

    x: np.ndarray
    singular_values: np.ndarray  # descending
    v_min: np.ndarray            # right singular vector of the smallest sigma


def _jacobi_pairs(n):
    """Round-robin rounds covering all column pairs once per sweep."""
    idx = list(range(n)) + ([-1] if n % 2 else [])
    m = len(idx)
    rounds = []
    for _ in range(m - 1):
        left = idx[: m // 2]
        right = idx[m // 2:][::-1]
        pairs = [(i, j) for i, j in zip(left, right) if i != -1 and j != -1]
        rounds.append((np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs])))
        idx = [idx[0]] + [idx[-1]] + idx[1:-1]
    return rounds


def _one_sided_jacobi(W, V, max_sweeps=40, tol=1e-15):
    """Orthogonalize the columns of W in place; accumulate rotations in V."""
    n = W.shape[1]
    if n < 2:
        return
    rounds = _jacobi_pairs(n)
    for _ in range(max_sweeps):
        off = 0.0
        for ii, jj in rounds:
            Ci = W[:, ii]
            Cj = W[:, jj]
            aa = np.einsum("ij,ij->j", Ci.conj(), Ci).real
            bb = np.einsum("ij,ij->j", Cj.conj(), Cj).real
            cc = np.einsum("ij,ij->j", Ci.conj(), Cj)
            mag = np.abs(cc)
            denom = np.sqrt(aa * bb) + _PIVOT_FLOOR
            ratio = mag / denom
            off = max(off, float(ratio.max(initial=0.0)))
            act = ratio > tol
            if not np.any(act):
                continue
            ia = ii[act]
            ja = jj[act]
            al = cc[act] / mag[act]
            tau = (bb[act] - aa[act]) / (2.0 * mag[act])
            t = np.sign(tau) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            t = np.where(tau == 0.0, 1.0, t)
            ct = 1.0 / np.sqrt(1.0 + t * t)
            st = t * ct
            for Mx in (W, V):
                Pi = Mx[:, ia]
                Pj = Mx[:, ja]
                Mx[:, ia] = ct * Pi - (st * np.conj(al)) * Pj
                Mx[:, ja] = (st * al) * Pi + ct * Pj
        if off <= tol:
            return
    if off > 1e-9:
        raise IterationFailureError(f"Jacobi SVD stalled with off-diagonal ratio {off:.3e}")


def _qr_reduce(A, b=None):
    """Householder QR; returns (R upper-triangular n x n, Q^H b head)."""
    m, n = A.shape
    R = A.copy()
    c = None if b is None else np.array(b, dtype=complex, copy=True)
    for k in range(min(m - 1, n)):
        x = R[k:, k]
        nx = np.linalg.norm(x)
        if nx == 0.0:
            continue
        v = x.copy()
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v[0] += phase * nx
        nv = np.linalg.norm(v)
        if nv < _PIVOT_FLOOR:
            continue
        v /= nv
        R[k:, k:] -= 2.0 * np.outer(v, v.conj() @ R[k:, k:])
        if c is not None:
            c[k:] -= 2.0 * v * (v.conj() @ c[k:])
    return R[:n, :n], (None if c is None else c[:n])


def svd_least_squares(a, b):
    """Minimum-norm least squares via QR + one-sided Jacobi SVD.

    Returns an LstsqResult; ``v_min`` is the right singular vector belonging
    to the smallest singular value (the rational-fit weight vector).
    """
    A = _as_complex_matrix(a)
    m, n = A.shape
    if m < n:
        raise ValueError("svd_least_squares expects rows >= cols")
    bv = np.array(b, dtype=complex, copy=True)
    if bv.shape != (m,):
        raise ValueError("right-hand side length must match the matrix rows")
    scale = np.max(np.abs(A))
    if scale == 0.0:
        return LstsqResult(np.zeros(n, dtype=complex),
                           np.zeros(n), np.eye(n, dtype=complex)[:, -1])
    R, c = _qr_reduce(A / scale, bv)
    V = np.eye(n, dtype=complex)
    W = R.copy()
    _one_sided_jacobi(W, V)
    sig = np.linalg.norm(W, axis=0)
    order = np.argsort(sig)[::-1]
    sig = sig[order]
    W = W[:, order]
    V = V[:, order]
    U = np.zeros_like(W)
    nonzero = sig > 0
    U[:, nonzero] = W[:, nonzero] / sig[nonzero]
    sig_true = sig * scale
    cutoff = max(m, n) * _EPS * (sig_true[0] if sig_true.size else 0.0)
    coef = U.conj().T @ c
    inv = np.where(sig_true > cutoff, 1.0 / np.where(sig_true > 0, sig_true, 1.0), 0.0)
    x = V @ (coef * inv)
    return LstsqResult(x, sig_true, V[:, -1])


def smallest_right_singular_vector(a):
    """Right singular vector of the smallest singular value of ``a``."""
    A = _as_complex_matrix(a)
    m, n = A.shape
    if m < n:
        raise ValueError("expects rows >= cols")
    scale = np.max(np.abs(A))
    if scale == 0.0:
        return np.eye(n, dtype=complex)[:, -1]
    R, _ = _qr_reduce(A / scale)
    V = np.eye(n, dtype=complex)
    W = R.copy()
    _one_sided_jacobi(W, V)
    sig = np.linalg.norm(W, axis=0)
    return V[:, int(np.argmin(sig))]
