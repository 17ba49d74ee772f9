# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops: complex Jacobi eigensolver, lambda_max angle sweep
(Householder tridiagonalisation plus Sturm bisection), and maximisation of a
quadratic form over a batch of sphere points."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, cos, sin
from libc.float cimport DBL_EPSILON, DBL_MIN

cnp.import_array()


class KernelNoConvergence(RuntimeError):
    pass


cdef inline double cabs2(double complex z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline double complex cconj(double complex z) noexcept nogil:
    return z.conjugate()


cdef double _offdiag(double complex[:, ::1] a, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t p, q
    cdef double s = 0.0
    for p in range(n):
        for q in range(p + 1, n):
            s += cabs2(a[p, q])
    return sqrt(2.0 * s)


cdef inline void _rotate_cols(double* base, Py_ssize_t n, Py_ssize_t p, Py_ssize_t q,
                              double c, double s, double er, double ei,
                              bint skip_pq) noexcept nogil:
    # columns p, q of a row-major complex matrix stored as interleaved doubles:
    # col_p <- c*col_p - s*conj(e)*col_q ; col_q <- s*col_p + c*conj(e)*col_q
    cdef Py_ssize_t k
    cdef double* row
    cdef double xr, xi, yr, yi, zr, zi
    for k in range(n):
        if skip_pq and (k == p or k == q):
            continue
        row = base + 2 * k * n
        xr = row[2 * p]
        xi = row[2 * p + 1]
        yr = row[2 * q]
        yi = row[2 * q + 1]
        # z = conj(e) * y
        zr = er * yr + ei * yi
        zi = er * yi - ei * yr
        row[2 * p] = c * xr - s * zr
        row[2 * p + 1] = c * xi - s * zi
        row[2 * q] = s * xr + c * zr
        row[2 * q + 1] = s * xi + c * zi


cdef long _jacobi(double complex[:, ::1] a, double complex[:, ::1] v,
                  bint want_vectors, double target, long max_rotations) noexcept nogil:
    """In-place cyclic Jacobi on a Hermitian matrix. Returns the rotation
    count, or -1 when the rotation budget is exhausted."""
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, k
    cdef long nrot = 0
    cdef double r, app, aqq, tau, t, c, s, er, ei
    # entries this small are dropped instead of rotated (avoids overflow in tau)
    cdef double negl = 1e-6 * target / n
    cdef double* ab = <double*> &a[0, 0]
    cdef double* vb = <double*> &v[0, 0]
    cdef double* rp
    cdef double* rq
    while _offdiag(a, n) > target:
        for p in range(n - 1):
            for q in range(p + 1, n):
                er = ab[2 * (p * n + q)]
                ei = ab[2 * (p * n + q) + 1]
                r = sqrt(er * er + ei * ei)
                if r <= negl:
                    ab[2 * (p * n + q)] = 0.0
                    ab[2 * (p * n + q) + 1] = 0.0
                    ab[2 * (q * n + p)] = 0.0
                    ab[2 * (q * n + p) + 1] = 0.0
                    continue
                if nrot >= max_rotations:
                    return -1
                er = er / r
                ei = ei / r
                app = ab[2 * (p * n + p)]
                aqq = ab[2 * (q * n + q)]
                tau = (aqq - app) / (2.0 * r)
                if tau >= 0.0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                _rotate_cols(ab, n, p, q, c, s, er, ei, True)
                # Hermitian: rows p, q are the conjugates of the new columns
                rp = ab + 2 * p * n
                rq = ab + 2 * q * n
                for k in range(n):
                    if k == p or k == q:
                        continue
                    rp[2 * k] = ab[2 * (k * n + p)]
                    rp[2 * k + 1] = -ab[2 * (k * n + p) + 1]
                    rq[2 * k] = ab[2 * (k * n + q)]
                    rq[2 * k + 1] = -ab[2 * (k * n + q) + 1]
                rp[2 * p] = app - t * r
                rp[2 * p + 1] = 0.0
                rq[2 * q] = aqq + t * r
                rq[2 * q + 1] = 0.0
                rp[2 * q] = 0.0
                rp[2 * q + 1] = 0.0
                rq[2 * p] = 0.0
                rq[2 * p + 1] = 0.0
                if want_vectors:
                    _rotate_cols(vb, n, p, q, c, s, er, ei, False)
                nrot += 1
    return nrot


def jacobi_eigh(a_in, bint want_vectors=True, double rel_tol=1e-13, long max_rotations=-1):
    """Eigen-decomposition of a Hermitian matrix (unsorted).

    Returns ``(w, V, nrot)``; ``V`` is ``None`` when vectors are not wanted.
    """
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] a = np.array(a_in, dtype=np.complex128, order="C", copy=True)
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i
    if max_rotations < 0:
        max_rotations = 30 * n * n
    cdef double fro = np.sqrt(np.sum(a.real ** 2 + a.imag ** 2))
    cdef double complex[:, ::1] av = a
    vmat = np.eye(n, dtype=np.complex128) if want_vectors else np.zeros((1, 1), dtype=np.complex128)
    cdef double complex[:, ::1] vv = vmat
    cdef long nrot
    with nogil:
        nrot = _jacobi(av, vv, want_vectors, rel_tol * fro, max_rotations)
    if nrot < 0:
        raise KernelNoConvergence(f"Jacobi exceeded {max_rotations} rotations")
    w = np.empty(n, dtype=np.float64)
    for i in range(n):
        w[i] = av[i, i].real
    return w, (vmat if want_vectors else None), nrot


cdef void _tridiagonalize(double* a, Py_ssize_t n, double* d, double* e2,
                          double* v, double* pw) noexcept nogil:
    """Householder reduction of a Hermitian matrix (row-major, interleaved
    re/im, destroyed) to a real symmetric tridiagonal with diagonal d and
    squared off-diagonal e2. Real arithmetic throughout: C complex products
    go through the slow NaN-safe library path."""
    cdef Py_ssize_t k, i, j, m, o
    cdef double alpha2, alpha, ax0, tau, kk, phr, phi, accr, acci, ar, ai
    cdef double vr, vi, wr, wi
    cdef double* row
    for k in range(n - 2):
        o = k + 1
        m = n - o
        alpha2 = 0.0
        for i in range(m):
            ar = a[2 * ((o + i) * n + k)]
            ai = a[2 * ((o + i) * n + k) + 1]
            v[2 * i] = ar
            v[2 * i + 1] = ai
            alpha2 += ar * ar + ai * ai
        e2[k] = alpha2
        if alpha2 == 0.0:
            continue
        alpha = sqrt(alpha2)
        ax0 = sqrt(v[0] * v[0] + v[1] * v[1])
        if ax0 > 0.0:
            phr = v[0] / ax0
            phi = v[1] / ax0
        else:
            phr = 1.0
            phi = 0.0
        v[0] += phr * alpha
        v[1] += phi * alpha
        tau = 1.0 / (alpha * (alpha + ax0))  # 2 / ||v||^2
        # p = tau A v ; K = (tau / 2) v* p ; w = p - K v
        kk = 0.0
        for i in range(m):
            row = a + 2 * ((o + i) * n + o)
            accr = 0.0
            acci = 0.0
            for j in range(m):
                ar = row[2 * j]
                ai = row[2 * j + 1]
                accr += ar * v[2 * j] - ai * v[2 * j + 1]
                acci += ar * v[2 * j + 1] + ai * v[2 * j]
            pw[2 * i] = tau * accr
            pw[2 * i + 1] = tau * acci
            kk += v[2 * i] * pw[2 * i] + v[2 * i + 1] * pw[2 * i + 1]
        kk *= 0.5 * tau
        for i in range(m):
            pw[2 * i] -= kk * v[2 * i]
            pw[2 * i + 1] -= kk * v[2 * i + 1]
        # A <- A - v w* - w v*
        for i in range(m):
            row = a + 2 * ((o + i) * n + o)
            vr = v[2 * i]
            vi = v[2 * i + 1]
            wr = pw[2 * i]
            wi = pw[2 * i + 1]
            for j in range(m):
                row[2 * j] -= (vr * pw[2 * j] + vi * pw[2 * j + 1]) + (wr * v[2 * j] + wi * v[2 * j + 1])
                row[2 * j + 1] -= (vi * pw[2 * j] - vr * pw[2 * j + 1]) + (wi * v[2 * j] - wr * v[2 * j + 1])
    for k in range(n):
        d[k] = a[2 * (k * n + k)]
    if n > 1:
        ar = a[2 * ((n - 1) * n + n - 2)]
        ai = a[2 * ((n - 1) * n + n - 2) + 1]
        e2[n - 2] = ar * ar + ai * ai


cdef inline Py_ssize_t _count_below(double* d, double* e2, Py_ssize_t n, double x,
                                     double pivmin) noexcept nogil:
    # Sturm count: number of eigenvalues < x
    cdef Py_ssize_t i, cnt = 0
    cdef double q = d[0] - x
    if fabs(q) < pivmin:
        q = -pivmin
    if q < 0.0:
        cnt += 1
    for i in range(1, n):
        q = (d[i] - x) - e2[i - 1] / q
        if fabs(q) < pivmin:
            q = -pivmin
        if q < 0.0:
            cnt += 1
    return cnt


cdef double _tridiag_max(double* d, double* e2, Py_ssize_t n) noexcept nogil:
    """Largest eigenvalue of a symmetric tridiagonal by bisection, to
    machine precision relative to the matrix scale."""
    cdef Py_ssize_t i
    cdef double lo = d[0], hi, r, scale = 0.0, emax = 0.0, mid, pivmin
    for i in range(n):
        if d[i] > lo:
            lo = d[i]
        if fabs(d[i]) > scale:
            scale = fabs(d[i])
    for i in range(n - 1):
        if e2[i] > emax:
            emax = e2[i]
    if sqrt(emax) > scale:
        scale = sqrt(emax)
    if scale == 0.0:
        return 0.0
    hi = lo
    for i in range(n):
        r = 0.0
        if i > 0:
            r += sqrt(e2[i - 1])
        if i < n - 1:
            r += sqrt(e2[i])
        if d[i] + r > hi:
            hi = d[i] + r
    hi += 4.0 * DBL_EPSILON * scale
    pivmin = DBL_MIN * (emax if emax > 1.0 else 1.0)
    while hi - lo > DBL_EPSILON * scale:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _count_below(d, e2, n, mid, pivmin) == n:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def lambda_max_sweep(t_in, thetas_in):
    """lambda_max of the Hermitian part of exp(i*theta)*T for every theta,
    by Householder tridiagonalisation and Sturm bisection."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] t = np.ascontiguousarray(t_in, dtype=np.complex128)
    cdef double[::1] thetas = np.ascontiguousarray(thetas_in, dtype=np.float64)
    cdef Py_ssize_t n = t.shape[0]
    cdef Py_ssize_t m = thetas.shape[0]
    cdef Py_ssize_t j, p, q
    cdef double complex[:, ::1] tv = t
    work = np.empty((n, n), dtype=np.complex128)
    cdef double complex[:, ::1] wv = work
    cdef double[::1] d = np.empty(n, dtype=np.float64)
    cdef double[::1] e2 = np.zeros(max(n, 1), dtype=np.float64)
    cdef double[::1] v = np.empty(2 * max(n, 1), dtype=np.float64)
    cdef double[::1] pw = np.empty(2 * max(n, 1), dtype=np.float64)
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double c, sn, xr, xi, yr, yi
    cdef double* tb
    cdef double* wb
    if n == 0:
        out[:] = 0.0
        return out
    tb = <double*> &tv[0, 0]
    wb = <double*> &wv[0, 0]
    with nogil:
        for j in range(m):
            c = cos(thetas[j])
            sn = sin(thetas[j])
            # W = (e T + conj(e T)^T) / 2 with e = c + i sn
            for p in range(n):
                for q in range(n):
                    xr = tb[2 * (p * n + q)]
                    xi = tb[2 * (p * n + q) + 1]
                    yr = tb[2 * (q * n + p)]
                    yi = tb[2 * (q * n + p) + 1]
                    wb[2 * (p * n + q)] = 0.5 * ((c * xr - sn * xi) + (c * yr - sn * yi))
                    wb[2 * (p * n + q) + 1] = 0.5 * ((c * xi + sn * xr) - (c * yi + sn * yr))
            _tridiagonalize(wb, n, &d[0], &e2[0], &v[0], &pw[0])
            ov[j] = _tridiag_max(&d[0], &e2[0], n)
    return out


def points_max(t_in, x_in, int mode):
    """Max over the rows x of X of |<Tx, x>| (mode 0) or ||Tx|| (mode 1).

    Returns ``(value, row_index)``. Rows are assumed normalised.
    """
    cdef double complex[:, ::1] t = np.ascontiguousarray(t_in, dtype=np.complex128)
    cdef double complex[:, ::1] x = np.ascontiguousarray(x_in, dtype=np.complex128)
    cdef Py_ssize_t n = t.shape[0]
    cdef Py_ssize_t m = x.shape[0]
    cdef Py_ssize_t i, r, c
    cdef double complex acc, q
    cdef double val, nrm2, best = -1.0
    cdef Py_ssize_t arg = -1
    with nogil:
        for i in range(m):
            q = 0.0
            nrm2 = 0.0
            for r in range(n):
                acc = 0.0
                for c in range(n):
                    acc = acc + t[r, c] * x[i, c]
                if mode == 0:
                    q = q + cconj(x[i, r]) * acc
                else:
                    nrm2 += cabs2(acc)
            if mode == 0:
                val = sqrt(cabs2(q))
            else:
                val = sqrt(nrm2)
            if val > best:
                best = val
                arg = i
    return best, arg
