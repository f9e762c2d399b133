"""Pure-Python/numpy versions of the compiled kernels.

Selected automatically when ``catsampler._kernels`` is not importable, or
forced with ``CATSAMPLER_BACKEND=python``. Same contracts and summation
order as the Cython code; expect agreement to rounding, not bit-for-bit.
"""
import numpy as np

LOG_SWITCH = 700.0
# low columns handled by a precomputed Gray-ordered table
_LOW_BITS = 12


def _gray_table(cols):
    """Row sums and parities for every subset of ``cols`` in Gray order."""
    k = cols.shape[1]
    idx = np.arange(1 << k)
    gray = idx ^ (idx >> 1)
    bits = (gray[:, None] >> np.arange(k)) & 1
    sums = bits.astype(np.complex128) @ cols.T
    parity = bits.sum(axis=1) & 1
    return sums, parity


def ryser_permanent(a):
    """Permanent by Ryser's formula with Gray-code subset iteration."""
    a = np.ascontiguousarray(a, dtype=np.complex128)
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0j
    low = min(n, _LOW_BITS)
    low_sums, low_parity = _gray_table(a[:, :low])
    low_sign = np.where(low_parity == 1, -1.0, 1.0)
    high = n - low
    high_sum = np.zeros(n, dtype=np.complex128)
    member = np.zeros(high, dtype=bool)
    high_parity = 0
    total = 0j
    comp = 0j
    for h in range(1 << high):
        if h:
            j = (h & -h).bit_length() - 1
            if member[j]:
                high_sum = high_sum - a[:, low + j]
            else:
                high_sum = high_sum + a[:, low + j]
            member[j] = not member[j]
            high_parity ^= 1
        prods = np.prod(low_sums + high_sum, axis=1)
        block = np.sum(prods * low_sign)
        if high_parity:
            block = -block
        y = block - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return -total if n % 2 else total


def _fock_row(beta, nmax):
    half = 0.5 * (beta.real * beta.real + beta.imag * beta.imag)
    row = np.empty(nmax + 1, dtype=np.complex128)
    if half <= LOG_SWITCH:
        row[0] = np.exp(-half)
        for n in range(1, nmax + 1):
            row[n] = row[n - 1] * beta / np.sqrt(n)
    else:
        from scipy.special import gammaln

        ns = np.arange(nmax + 1)
        mag = np.exp(-half + ns * 0.5 * np.log(2.0 * half) - 0.5 * gammaln(ns + 1.0))
        row[:] = mag * np.exp(1j * ns * np.angle(beta))
    return row


def gamma_batch(u, alphas, weights, tcount, sigs, term_start=0, term_stop=-1):
    """See ``catsampler._kernels.gamma_batch``."""
    u = np.asarray(u, dtype=np.complex128)
    alphas = np.asarray(alphas, dtype=np.complex128)
    weights = np.asarray(weights, dtype=np.complex128)
    tcount = np.asarray(tcount, dtype=np.intp)
    sigs = np.asarray(sigs, dtype=np.intp)
    m = u.shape[0]
    nsig = sigs.shape[0]
    total = int(np.prod(tcount, dtype=object))
    if term_stop < 0 or term_stop > total:
        term_stop = total
    out = np.zeros(nsig, dtype=np.complex128)
    if term_start >= term_stop or nsig == 0:
        return out
    nmax = sigs.max(axis=0) if nsig else np.zeros(m, dtype=np.intp)
    cols = np.arange(m)

    digit = [0] * m
    rest = term_start
    for j in range(m - 1, -1, -1):
        digit[j] = rest % int(tcount[j])
        rest //= int(tcount[j])
    partial = np.zeros((m + 1, m), dtype=np.complex128)
    coef = np.ones(m + 1, dtype=np.complex128)
    acc = np.zeros(nsig, dtype=np.complex128)
    comp = np.zeros(nsig, dtype=np.complex128)
    start = 0
    for _ in range(term_start, term_stop):
        for k in range(start, m):
            partial[k + 1] = partial[k] + u[:, k] * alphas[k, digit[k]]
            coef[k + 1] = coef[k] * weights[k, digit[k]]
        beta = partial[m]
        tables = [_fock_row(beta[j], int(nmax[j])) for j in range(m)]
        p = np.full(nsig, coef[m])
        for j in cols:
            p = p * tables[j][sigs[:, j]]
        y = p - comp
        t = acc + y
        comp = (t - acc) - y
        acc = t
        j = m - 1
        while j >= 0:
            digit[j] += 1
            if digit[j] < tcount[j]:
                break
            digit[j] = 0
            j -= 1
        start = max(j, 0)
    out[:] = acc
    return out
