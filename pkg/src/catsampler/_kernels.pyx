# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops.

``ryser_permanent`` and ``gamma_batch`` mirror the functions of the same name
in ``catsampler._fallback``; both follow the same summation order so results
agree to rounding.
"""
import numpy as np

from libc.math cimport sqrt, exp, log, lgamma, atan2, cos, sin
from libc.stdlib cimport malloc, calloc, free

cdef extern from *:
    """
    static inline int cs_ctz(unsigned long long x) { return __builtin_ctzll(x); }
    """
    int cs_ctz(unsigned long long x) nogil

# |beta|^2 / 2 above which exp(-|beta|^2/2) underflows and f_n needs log form
cdef double LOG_SWITCH = 700.0


def ryser_permanent(const double complex[:, ::1] a):
    """Permanent by Ryser's formula, subsets visited in Gray-code order."""
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j
    cdef unsigned long long k, nsub
    cdef double complex prod
    cdef double complex total = 0
    cdef double tr = 0.0, ti = 0.0, cr = 0.0, ci = 0.0, y, t
    cdef int parity = 0
    cdef double complex *rowsum
    cdef char *member
    if n == 0:
        return 1.0 + 0j
    rowsum = <double complex *> calloc(n, sizeof(double complex))
    member = <char *> calloc(n, sizeof(char))
    if rowsum == NULL or member == NULL:
        free(rowsum)
        free(member)
        raise MemoryError()
    nsub = 1ULL << n
    with nogil:
        for k in range(1, nsub):
            j = cs_ctz(k)
            if member[j]:
                member[j] = 0
                for i in range(n):
                    rowsum[i] = rowsum[i] - a[i, j]
            else:
                member[j] = 1
                for i in range(n):
                    rowsum[i] = rowsum[i] + a[i, j]
            parity ^= 1
            prod = rowsum[0]
            for i in range(1, n):
                prod = prod * rowsum[i]
            if parity:
                prod = -prod
            # Kahan on each component
            y = prod.real - cr
            t = tr + y
            cr = (t - tr) - y
            tr = t
            y = prod.imag - ci
            t = ti + y
            ci = (t - ti) - y
            ti = t
    free(rowsum)
    free(member)
    total = tr + 1j * ti
    if n % 2:
        total = -total
    return total


cdef inline void _fill_table(double complex beta, Py_ssize_t nmax,
                             double complex *row, const double *sqrt_n) noexcept nogil:
    cdef double half = 0.5 * (beta.real * beta.real + beta.imag * beta.imag)
    cdef Py_ssize_t n
    cdef double mag, ph, lr
    if half <= LOG_SWITCH:
        row[0] = exp(-half)
        for n in range(1, nmax + 1):
            row[n] = row[n - 1] * beta / sqrt_n[n]
    else:
        lr = 0.5 * log(2.0 * half)
        ph = atan2(beta.imag, beta.real)
        for n in range(nmax + 1):
            mag = exp(-half + n * lr - 0.5 * lgamma(n + 1.0))
            row[n] = mag * (cos(n * ph) + 1j * sin(n * ph))


def gamma_batch(const double complex[:, ::1] u,
                const double complex[:, ::1] alphas,
                const double complex[:, ::1] weights,
                const Py_ssize_t[::1] tcount,
                const Py_ssize_t[:, ::1] sigs,
                long long term_start=0,
                long long term_stop=-1):
    """Amplitudes for a batch of signatures, streaming over branch vectors.

    Branch vectors run in mixed-radix lexicographic order (last mode fastest)
    over the half-open index range ``[term_start, term_stop)``. Output
    amplitudes are accumulated with Kahan compensation per signature.
    """
    cdef Py_ssize_t m = u.shape[0]
    cdef Py_ssize_t nsig = sigs.shape[0]
    cdef Py_ssize_t i, j, k, s, start
    cdef long long total = 1, term
    cdef Py_ssize_t nmax_all = 0
    cdef double complex p, c, beta
    cdef double y, t

    for j in range(m):
        total *= tcount[j]
    if term_stop < 0 or term_stop > total:
        term_stop = total
    out = np.zeros(nsig, dtype=np.complex128)
    cdef double complex[::1] outv = out
    if term_start >= term_stop or nsig == 0:
        return out

    cdef Py_ssize_t *nmax = <Py_ssize_t *> calloc(m, sizeof(Py_ssize_t))
    cdef Py_ssize_t *digit = <Py_ssize_t *> calloc(m, sizeof(Py_ssize_t))
    cdef double complex *partial = <double complex *> calloc((m + 1) * m, sizeof(double complex))
    cdef double complex *coef = <double complex *> calloc(m + 1, sizeof(double complex))
    cdef double *acc = <double *> calloc(4 * nsig, sizeof(double))
    cdef double complex *table = NULL
    cdef double *sqrt_n = NULL
    if nmax == NULL or digit == NULL or partial == NULL or coef == NULL or acc == NULL:
        free(nmax); free(digit); free(partial); free(coef); free(acc)
        raise MemoryError()

    for k in range(nsig):
        for j in range(m):
            if sigs[k, j] > nmax[j]:
                nmax[j] = sigs[k, j]
    for j in range(m):
        if nmax[j] > nmax_all:
            nmax_all = nmax[j]
    table = <double complex *> calloc(m * (nmax_all + 1), sizeof(double complex))
    sqrt_n = <double *> calloc(nmax_all + 1, sizeof(double))
    if table == NULL or sqrt_n == NULL:
        free(nmax); free(digit); free(partial); free(coef); free(acc)
        free(table); free(sqrt_n)
        raise MemoryError()

    with nogil:
        for s in range(nmax_all + 1):
            sqrt_n[s] = sqrt(<double> s)
        # decompose term_start into mixed-radix digits
        term = term_start
        for j in range(m - 1, -1, -1):
            digit[j] = term % tcount[j]
            term = term // tcount[j]
        coef[0] = 1.0
        start = 0
        for term in range(term_start, term_stop):
            # levels start+1..m of the prefix sums are stale
            for k in range(start, m):
                c = alphas[k, digit[k]]
                for j in range(m):
                    partial[(k + 1) * m + j] = partial[k * m + j] + u[j, k] * c
                coef[k + 1] = coef[k] * weights[k, digit[k]]
            for j in range(m):
                beta = partial[m * m + j]
                _fill_table(beta, nmax[j], table + j * (nmax_all + 1), sqrt_n)
            for s in range(nsig):
                p = coef[m]
                for j in range(m):
                    p = p * table[j * (nmax_all + 1) + sigs[s, j]]
                y = p.real - acc[4 * s + 1]
                t = acc[4 * s] + y
                acc[4 * s + 1] = (t - acc[4 * s]) - y
                acc[4 * s] = t
                y = p.imag - acc[4 * s + 3]
                t = acc[4 * s + 2] + y
                acc[4 * s + 3] = (t - acc[4 * s + 2]) - y
                acc[4 * s + 2] = t
            # advance digits, last mode fastest
            j = m - 1
            while j >= 0:
                digit[j] += 1
                if digit[j] < tcount[j]:
                    break
                digit[j] = 0
                j -= 1
            start = j if j >= 0 else 0
        for s in range(nsig):
            outv[s] = acc[4 * s] + 1j * acc[4 * s + 2]

    free(nmax); free(digit); free(partial); free(coef); free(acc)
    free(table); free(sqrt_n)
    return out
