# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled gain-table kernel: all 2^n channel gains in one Gray-code sweep.

Walking configurations in Gray-code order changes one load per step, so the
resolvent state can be carried along with rank-1 updates.  Tracking
``s = W^T a`` and ``q = Gamma W`` (with ``W`` the current resolvent inverse)
is enough: a flip of element ``i`` by ``delta`` gives

    den = 1 - delta * q[i, i]
    s  += (delta * s[i] / den) * q[i, :]
    q  += (delta / den) * outer(q[:, i], q[i, :])

and the channel is ``h0 + s . (r * b)``.  The state is rebuilt from an exact
LAPACK factorization every ``reseed_every`` steps (and immediately whenever a
pivot ``den`` is too small) so rounding drift cannot accumulate across the
enumeration.  Gains land at index ``sum(v_i 2^(n-1-i))``, i.e. the control
vector read as a big-endian integer.
"""

import numpy as np

cimport numpy as cnp
from libc.stdlib cimport free, malloc
from scipy.linalg.cython_lapack cimport zgetrf, zgetri

cnp.import_array()

ctypedef double complex zcomplex


cdef int _rebuild(zcomplex* w, zcomplex* q, zcomplex* s,
                  zcomplex* r, zcomplex* scratch, int* ipiv,
                  zcomplex[:, ::1] gamma, zcomplex[::1] a, int n) nogil:
    """Recompute W = (I - diag(r) gamma)^(-1), q = gamma W, s = W^T a.

    Returns the LAPACK info code (0 on success).  Row-major buffers are
    passed straight to LAPACK: it inverts the transpose, which is the
    row-major view of the inverse.
    """
    cdef int i, j, k, info = 0, lwork = 64 * n
    cdef zcomplex acc
    for i in range(n):
        for j in range(n):
            w[i * n + j] = -r[i] * gamma[i, j]
        w[i * n + i] = w[i * n + i] + 1.0
    zgetrf(&n, &n, w, &n, ipiv, &info)
    if info != 0:
        return info
    zgetri(&n, w, &n, ipiv, scratch, &lwork, &info)
    if info != 0:
        return info
    for i in range(n):
        for j in range(n):
            acc = 0
            for k in range(n):
                acc = acc + gamma[i, k] * w[k * n + j]
            q[i * n + j] = acc
    # s = W^T a: s[j] = sum_k W[k, j] a[k]
    for j in range(n):
        acc = 0
        for k in range(n):
            acc = acc + w[k * n + j] * a[k]
        s[j] = acc
    return 0


def fill_gains(zcomplex[:, ::1] gamma, zcomplex[::1] a, zcomplex[::1] b,
               zcomplex alpha, zcomplex beta, zcomplex h0,
               double[::1] gains, Py_ssize_t reseed_every=4096):
    """Fill ``gains`` (length 2^n) with |h(v)|^2 for every binary v.

    Returns the number of exact re-factorizations performed.  Raises
    ``ArithmeticError`` if a re-factorization hits an exactly singular
    terminated system (possible only for non-contractive inputs).
    """
    cdef int n = gamma.shape[0]
    cdef Py_ssize_t total = gains.shape[0]
    if total != (<Py_ssize_t> 1) << n:
        raise ValueError("gains array must have length 2**n")
    if a.shape[0] != n or b.shape[0] != n:
        raise ValueError("coupling vectors must have length n")

    cdef zcomplex* w = <zcomplex*> malloc(n * n * sizeof(zcomplex))
    cdef zcomplex* q = <zcomplex*> malloc(n * n * sizeof(zcomplex))
    cdef zcomplex* scratch = <zcomplex*> malloc(64 * n * sizeof(zcomplex))
    cdef zcomplex* s = <zcomplex*> malloc(n * sizeof(zcomplex))
    cdef zcomplex* r = <zcomplex*> malloc(n * sizeof(zcomplex))
    cdef zcomplex* rhs = <zcomplex*> malloc(n * sizeof(zcomplex))
    cdef zcomplex* qrow = <zcomplex*> malloc(n * sizeof(zcomplex))
    cdef zcomplex* qcol = <zcomplex*> malloc(n * sizeof(zcomplex))
    cdef int* ipiv = <int*> malloc(n * sizeof(int))
    if not (w and q and scratch and s and r and rhs and qrow and qcol and ipiv):
        free(w); free(q); free(scratch); free(s); free(r)
        free(rhs); free(qrow); free(qcol); free(ipiv)
        raise MemoryError()

    cdef Py_ssize_t t, code, since_reseed
    cdef int i, j, k, p, bit, info, reseeds = 0
    cdef zcomplex delta, den, coef, si, h, cj
    cdef double gr, gi
    cdef bint failed = False

    try:
        for i in range(n):
            r[i] = alpha
            rhs[i] = alpha * b[i]
        info = _rebuild(w, q, s, r, scratch, ipiv, gamma, a, n)
        if info != 0:
            failed = True
        else:
            reseeds += 1
            h = h0
            for j in range(n):
                h = h + s[j] * rhs[j]
            gr = h.real; gi = h.imag
            gains[0] = gr * gr + gi * gi
            since_reseed = 0
            code = 0
            for t in range(1, total):
                # Gray-code step: bit p of the code flips at step t.
                p = 0
                while not (t >> p) & 1:
                    p += 1
                code ^= (<Py_ssize_t> 1) << p
                bit = <int> ((code >> p) & 1)
                i = n - 1 - p
                delta = (beta - alpha) if bit else (alpha - beta)
                den = 1.0 - delta * q[i * n + i]
                since_reseed += 1
                if (den.real * den.real + den.imag * den.imag < 1e-20
                        or since_reseed >= reseed_every):
                    r[i] = r[i] + delta
                    rhs[i] = r[i] * b[i]
                    info = _rebuild(w, q, s, r, scratch, ipiv, gamma, a, n)
                    if info != 0:
                        failed = True
                        break
                    reseeds += 1
                    since_reseed = 0
                else:
                    coef = delta / den
                    si = s[i]
                    for j in range(n):
                        qrow[j] = q[i * n + j]
                        qcol[j] = q[j * n + i]
                    for j in range(n):
                        s[j] = s[j] + coef * si * qrow[j]
                    for j in range(n):
                        cj = coef * qcol[j]
                        for k in range(n):
                            q[j * n + k] = q[j * n + k] + cj * qrow[k]
                    r[i] = r[i] + delta
                    rhs[i] = r[i] * b[i]
                h = h0
                for j in range(n):
                    h = h + s[j] * rhs[j]
                gr = h.real; gi = h.imag
                gains[code] = gr * gr + gi * gi
    finally:
        free(w); free(q); free(scratch); free(s); free(r)
        free(rhs); free(qrow); free(qcol); free(ipiv)
    if failed:
        raise ArithmeticError(
            "terminated system became exactly singular during enumeration"
        )
    return reseeds
