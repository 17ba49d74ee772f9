"""Pure-numpy fallback for the compiled kernels in ``_kernels.pyx``.

Same signatures and semantics; used when the extension is not built or when
``BPB_PURE_PYTHON=1`` is set.
"""

import numpy as np


class KernelNoConvergence(RuntimeError):
    pass


def _offdiag(a):
    off = a - np.diag(np.diag(a))
    return np.sqrt(np.sum(off.real ** 2 + off.imag ** 2))


def _jacobi(a, v, target, max_rotations):
    n = a.shape[0]
    nrot = 0
    # entries this small are dropped instead of rotated (avoids overflow in tau)
    negl = 1e-6 * target / n
    while _offdiag(a) > target:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= negl:
                    a[p, q] = a[q, p] = 0.0
                    continue
                if nrot >= max_rotations:
                    return -1
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * r)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                ebar = np.conj(apq / r)
                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = c * colp - s * ebar * colq
                a[:, q] = s * colp + c * ebar * colq
                a[p, :] = np.conj(a[:, p])
                a[q, :] = np.conj(a[:, q])
                a[p, p] = app - t * r
                a[q, q] = aqq + t * r
                a[p, q] = 0.0
                a[q, p] = 0.0
                if v is not None:
                    vp = v[:, p].copy()
                    vq = v[:, q].copy()
                    v[:, p] = c * vp - s * ebar * vq
                    v[:, q] = s * vp + c * ebar * vq
                nrot += 1
    return nrot


def jacobi_eigh(a_in, want_vectors=True, rel_tol=1e-13, max_rotations=-1):
    a = np.array(a_in, dtype=np.complex128, copy=True)
    n = a.shape[0]
    if max_rotations < 0:
        max_rotations = 30 * n * n
    fro = np.linalg.norm(a)
    v = np.eye(n, dtype=np.complex128) if want_vectors else None
    nrot = _jacobi(a, v, rel_tol * fro, max_rotations)
    if nrot < 0:
        raise KernelNoConvergence(f"Jacobi exceeded {max_rotations} rotations")
    return np.diag(a).real.copy(), v, nrot


def _tridiagonalize(a):
    """Householder reduction of a Hermitian matrix (destroyed) to ``(d, e2)``:
    the diagonal and squared off-diagonal of a real symmetric tridiagonal."""
    n = a.shape[0]
    e2 = np.zeros(max(n - 1, 0))
    for k in range(n - 2):
        x = a[k + 1:, k]
        alpha2 = float(np.sum(x.real ** 2 + x.imag ** 2))
        e2[k] = alpha2
        if alpha2 == 0.0:
            continue
        alpha = np.sqrt(alpha2)
        ax0 = abs(x[0])
        ph = x[0] / ax0 if ax0 > 0.0 else 1.0
        v = x.copy()
        v[0] += ph * alpha
        tau = 1.0 / (alpha * (alpha + ax0))
        sub = a[k + 1:, k + 1:]
        p = tau * (sub @ v)
        kk = 0.5 * tau * float(np.vdot(v, p).real)
        w = p - kk * v
        sub -= np.outer(v, w.conj()) + np.outer(w, v.conj())
    if n > 1:
        e2[n - 2] = abs(a[n - 1, n - 2]) ** 2
    return np.diag(a).real.copy(), e2


def _tridiag_max(D, E2):
    """Largest eigenvalues of a batch of symmetric tridiagonals (rows of D,
    E2) by Sturm bisection, vectorised over the batch."""
    m, n = D.shape
    lo = D.max(axis=1)
    rad = np.zeros((m, n))
    if n > 1:
        e = np.sqrt(E2)
        rad[:, 1:] += e
        rad[:, :-1] += e
    scale = np.maximum(np.abs(D).max(axis=1), np.sqrt(E2.max(axis=1)) if n > 1 else 0.0)
    hi = (D + rad).max(axis=1) + 4.0 * np.finfo(float).eps * scale
    emax = E2.max(axis=1) if n > 1 else np.zeros(m)
    pivmin = np.finfo(float).tiny * np.maximum(emax, 1.0)
    eps = np.finfo(float).eps
    for _ in range(200):
        active = hi - lo > eps * scale
        mid = 0.5 * (lo + hi)
        active &= (mid > lo) & (mid < hi)
        if not active.any():
            break
        q = D[:, 0] - mid
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        cnt = (q < 0).astype(int)
        for i in range(1, n):
            q = (D[:, i] - mid) - E2[:, i - 1] / q
            q = np.where(np.abs(q) < pivmin, -pivmin, q)
            cnt += q < 0
        below = cnt == n
        hi = np.where(active & below, mid, hi)
        lo = np.where(active & ~below, mid, lo)
    return np.where(scale == 0.0, 0.0, 0.5 * (lo + hi))


def lambda_max_sweep(t_in, thetas_in):
    t = np.asarray(t_in, dtype=np.complex128)
    thetas = np.asarray(thetas_in, dtype=float)
    n = t.shape[0]
    if n == 0:
        return np.zeros(len(thetas))
    D = np.empty((len(thetas), n))
    E2 = np.zeros((len(thetas), max(n - 1, 0)))
    for j, theta in enumerate(thetas):
        m = np.exp(1j * theta) * t
        D[j], E2[j] = _tridiagonalize(0.5 * (m + m.conj().T))
    return _tridiag_max(D, E2)


def points_max(t_in, x_in, mode, chunk=65536):
    t = np.asarray(t_in, dtype=np.complex128)
    x = np.asarray(x_in, dtype=np.complex128)
    best, arg = -1.0, -1
    for start in range(0, x.shape[0], chunk):
        xs = x[start:start + chunk]
        tx = xs @ t.T
        if mode == 0:
            vals = np.abs(np.sum(xs.conj() * tx, axis=1))
        else:
            vals = np.linalg.norm(tx, axis=1)
        i = int(np.argmax(vals))
        if vals[i] > best:
            best, arg = float(vals[i]), start + i
    return best, arg
