# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
# cython: initializedcheck=False
# cython: cdivision=True
"""Compiled backend for the fused sum-rate kernels.

Same contract as ``_kernels_np``: weighted sum rate with MMSE receive
filters folded in, evaluated per candidate precoder set. All matrices
involved are tiny (antennas/streams per user), so the factorizations are
hand-rolled on flat scratch buffers instead of calling LAPACK per user.
"""

import numpy as np

from libc.math cimport log, sqrt

cdef double _LN2 = 0.6931471805599453094172321215


cdef int _chol(double complex* a, int n) noexcept nogil:
    """In-place lower Cholesky of a Hermitian matrix stored row-major.

    Only the lower triangle (including the diagonal) is referenced or
    written. Returns 0 on success, j+1 when the pivot in row j is not
    positive (matrix not positive definite).
    """
    cdef int i, j, k
    cdef double piv
    cdef double complex acc
    for j in range(n):
        piv = a[j * n + j].real
        for k in range(j):
            acc = a[j * n + k]
            piv -= acc.real * acc.real + acc.imag * acc.imag
        if not piv > 0.0:
            return j + 1
        piv = sqrt(piv)
        a[j * n + j] = piv
        for i in range(j + 1, n):
            acc = a[i * n + j]
            for k in range(j):
                acc = acc - a[i * n + k] * a[j * n + k].conjugate()
            a[i * n + j] = acc / piv
    return 0


cdef void _chol_solve(const double complex* l, double complex* b, int n, int m) noexcept nogil:
    """Solve (L L^H) X = B in place on b (n x m), given lower-triangular L."""
    cdef int i, j, c
    cdef double complex acc
    for c in range(m):
        for i in range(n):
            acc = b[i * m + c]
            for j in range(i):
                acc = acc - l[i * n + j] * b[j * m + c]
            b[i * m + c] = acc / l[i * n + i].real
        for i in range(n - 1, -1, -1):
            acc = b[i * m + c]
            for j in range(i + 1, n):
                acc = acc - l[j * n + i].conjugate() * b[j * m + c]
            b[i * m + c] = acc / l[i * n + i].real
    return


cdef int _wsr_one(const double complex* h, const double complex* f,
                  int users, int nr, int nt, int d,
                  double noise, const double* weights,
                  double complex* cov, double complex* g,
                  double complex* own, double complex* m,
                  double* out, double complex* filt_out) noexcept nogil:
    """Weighted sum rate of one precoder set.

    h: users*nr*nt, f: users*nt*d, scratch cov: nr*nr, g/own: nr*d,
    m: d*d. filt_out (users*nr*d) receives the MMSE filters when not
    NULL. Returns 0 on success; 1000+k / 2000+k flag a factorization
    failure at user k (covariance / error matrix respectively).
    """
    cdef int k, l, r, c, t, i, j, code
    cdef double complex acc
    cdef double wsr = 0.0, ld
    for k in range(users):
        for i in range(nr * nr):
            cov[i] = 0
        for i in range(nr):
            cov[i * nr + i] = noise
        for l in range(users):
            # g = H_k @ F_l
            for r in range(nr):
                for c in range(d):
                    acc = 0
                    for t in range(nt):
                        acc = acc + h[(k * nr + r) * nt + t] * f[(l * nt + t) * d + c]
                    g[r * d + c] = acc
            # cov += g @ g^H (lower triangle is enough for the Cholesky)
            for r in range(nr):
                for i in range(r + 1):
                    acc = 0
                    for c in range(d):
                        acc = acc + g[r * d + c] * g[i * d + c].conjugate()
                    cov[r * nr + i] = cov[r * nr + i] + acc
            if l == k:
                for i in range(nr * d):
                    own[i] = g[i]
        code = _chol(cov, nr)
        if code != 0:
            return 1000 + k
        # g := A^-1 own (MMSE filter)
        for i in range(nr * d):
            g[i] = own[i]
        _chol_solve(cov, g, nr, d)
        if filt_out != NULL:
            for i in range(nr * d):
                filt_out[k * nr * d + i] = g[i]
        # m = own^H @ g  (d x d), lower triangle hermitized in place
        for i in range(d):
            for j in range(i + 1):
                acc = 0
                for r in range(nr):
                    acc = acc + own[r * d + i].conjugate() * g[r * d + j]
                m[i * d + j] = acc
        # error matrix E = I - M on the lower triangle
        for i in range(d):
            for j in range(i):
                m[i * d + j] = -m[i * d + j]
            m[i * d + i] = 1.0 - m[i * d + i].real
        code = _chol(m, d)
        if code != 0:
            return 2000 + k
        ld = 0.0
        for i in range(d):
            ld += log(m[i * d + i].real)
        wsr += weights[k] * (-2.0 * ld / _LN2)
    out[0] = wsr
    return 0


cdef _raise_for(int code, Py_ssize_t element):
    cdef int user
    if code >= 2000:
        user = code - 2000
        raise ArithmeticError(
            "rate evaluation failed for batch element %d, user %d: error "
            "matrix not positive definite" % (element, user)
        )
    user = code - 1000
    raise ArithmeticError(
        "interference-plus-noise covariance not positive definite for "
        "batch element %d, user %d (noise power must be positive)"
        % (element, user)
    )


def batch_wsr(double complex[:, :, ::1] channels,
              double complex[:, :, :, ::1] f_batch,
              double noise_power,
              double[::1] weights):
    """Weighted sum rate for each precoder set in a batch.

    Same contract as the numpy backend: channels (users, nr, nt), batch
    (batch, users, nt, streams), returns a (batch,) float array.
    """
    cdef Py_ssize_t batch = f_batch.shape[0]
    cdef int users = <int> channels.shape[0]
    cdef int nr = <int> channels.shape[1]
    cdef int nt = <int> channels.shape[2]
    cdef int d = <int> f_batch.shape[3]
    if f_batch.shape[1] != users or f_batch.shape[2] != nt:
        raise ValueError("precoder batch shape does not match the channels")
    if weights.shape[0] != users:
        raise ValueError("weights length does not match the user count")

    out = np.empty(batch, dtype=np.float64)
    cdef double[::1] out_view = out
    scratch = np.empty(nr * nr + 2 * nr * d + d * d, dtype=np.complex128)
    cdef double complex[::1] buf = scratch
    cdef double complex* cov = &buf[0]
    cdef double complex* g = cov + nr * nr
    cdef double complex* own = g + nr * d
    cdef double complex* m = own + nr * d
    cdef Py_ssize_t s
    cdef int code = 0
    cdef Py_ssize_t bad = -1
    if batch == 0:
        return out
    with nogil:
        for s in range(batch):
            code = _wsr_one(&channels[0, 0, 0], &f_batch[s, 0, 0, 0],
                            users, nr, nt, d, noise_power, &weights[0],
                            cov, g, own, m, &out_view[s], NULL)
            if code != 0:
                bad = s
                break
    if code != 0:
        _raise_for(code, bad)
    return out


def wsr_and_decoders(double complex[:, :, ::1] channels,
                     double complex[:, :, ::1] f,
                     double noise_power,
                     double[::1] weights):
    """Weighted sum rate and MMSE filters for one precoder set."""
    cdef int users = <int> channels.shape[0]
    cdef int nr = <int> channels.shape[1]
    cdef int nt = <int> channels.shape[2]
    cdef int d = <int> f.shape[2]
    if f.shape[0] != users or f.shape[1] != nt:
        raise ValueError("precoder shape does not match the channels")
    if weights.shape[0] != users:
        raise ValueError("weights length does not match the user count")

    filt = np.empty((users, nr, d), dtype=np.complex128)
    cdef double complex[:, :, ::1] filt_view = filt
    scratch = np.empty(nr * nr + 2 * nr * d + d * d, dtype=np.complex128)
    cdef double complex[::1] buf = scratch
    cdef double complex* cov = &buf[0]
    cdef double complex* g = cov + nr * nr
    cdef double complex* own = g + nr * d
    cdef double complex* m = own + nr * d
    cdef double value = 0.0
    cdef int code
    with nogil:
        code = _wsr_one(&channels[0, 0, 0], &f[0, 0, 0],
                        users, nr, nt, d, noise_power, &weights[0],
                        cov, g, own, m, &value, &filt_view[0, 0, 0])
    if code != 0:
        _raise_for(code, 0)
    return value, filt
