"""Output amplitudes gamma_S for photon-number signatures S.

Three routes are provided:

* ``gamma_S`` streams over all branch vectors through the compiled kernel;
  ``gamma_S_tensor`` materializes the factor table ``A[t, j]`` with numpy
  and multiplies down columns. They compute the same sum by separate code
  and are cross-checked in the tests.
* ``gamma_S_product`` is the closed form for single-term (coherent) inputs.
* ``fock_gamma_S`` is the permanent formula for Fock-state inputs, used as
  the reference in the small-amplitude limit.
"""
import itertools
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.special import gammaln

from catsampler import _backend
from catsampler.errors import DimMismatch, NOverflow, TooLarge, ValidationError
from catsampler.optics_core import PERMANENT_MAX_N, permanent
from catsampler.propagation import propagate_coherent
from catsampler.states import MAX_PHOTONS, fock_amplitude


def as_signature(counts, m):
    """Validate a photon-count tuple of length ``m``."""
    try:
        sig = tuple(int(c) for c in counts)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"signature must be a sequence of integers: {counts!r}") from exc
    if len(sig) != m:
        raise DimMismatch(f"signature has {len(sig)} modes, expected {m}")
    if any(c < 0 for c in sig):
        raise ValidationError(f"negative photon count in {sig}")
    if any(c > MAX_PHOTONS for c in sig):
        raise NOverflow(f"photon count above {MAX_PHOTONS} in signature")
    return sig


def _kernel_inputs(output):
    reg = output.source
    alphas, weights = reg.padded_arrays()
    tcount = np.array(reg.term_counts, dtype=np.intp)
    return np.ascontiguousarray(output.unitary.entries), alphas, weights, tcount


def _signature_array(sigs, m):
    arr = np.array([as_signature(s, m) for s in sigs], dtype=np.intp).reshape(-1, m)
    return np.ascontiguousarray(arr)


def gamma_S_batch(output, signatures, workers=None):
    """Amplitudes for many signatures at once.

    Signatures are split across ``workers`` threads; each signature's sum is
    computed serially in branch order, so results do not depend on the
    worker count.
    """
    m = output.m
    sigs = _signature_array(signatures, m)
    u, alphas, weights, tcount = _kernel_inputs(output)
    workers = _backend.worker_count() if workers is None else max(1, int(workers))
    if workers == 1 or len(sigs) < 2 * workers:
        return _backend.gamma_batch(u, alphas, weights, tcount, sigs)
    chunks = np.array_split(np.arange(len(sigs)), workers)
    out = np.empty(len(sigs), dtype=np.complex128)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            (idx, pool.submit(_backend.gamma_batch, u, alphas, weights, tcount,
                              np.ascontiguousarray(sigs[idx])))
            for idx in chunks
            if len(idx)
        ]
        for idx, fut in futures:
            out[idx] = fut.result()
    return out


def gamma_S(output, S, partitions=1):
    """Amplitude <S| U |psi_in> summed over every branch vector.

    ``partitions`` > 1 splits the branch range into contiguous blocks that
    are summed separately and then added in block order.
    """
    sig = _signature_array([S], output.m)
    u, alphas, weights, tcount = _kernel_inputs(output)
    total = len(output)
    partitions = max(1, min(int(partitions), total))
    if partitions == 1:
        return complex(_backend.gamma_batch(u, alphas, weights, tcount, sig)[0])
    bounds = [total * k // partitions for k in range(partitions + 1)]
    parts = [
        _backend.gamma_batch(u, alphas, weights, tcount, sig, bounds[k], bounds[k + 1])[0]
        for k in range(partitions)
    ]
    acc = 0j
    for p in parts:
        acc += p
    return complex(acc)


def gamma_S_product(u, alphas, S):
    """Closed form for a product coherent input: prod_j f_{S_j}(beta_j)."""
    beta = propagate_coherent(u, alphas)
    sig = as_signature(S, u.dim)
    out = 1 + 0j
    for b, s in zip(beta, sig):
        out *= fock_amplitude(b, s)
    return out


def _fock_table(beta, nmax):
    # f_n(beta) for n = 0..nmax, vectorized over beta
    ns = np.arange(nmax + 1)
    powers = beta[..., None] ** ns
    return np.exp(-0.5 * np.abs(beta)[..., None] ** 2) * powers / np.exp(0.5 * gammaln(ns + 1))


def gamma_S_tensor(output, S):
    """Same amplitude as :func:`gamma_S`, grouped as sum_t prod_j A[t, j].

    ``A[t, j] = weight_{t_j}^{(j)} * f_{S_j}(beta_t^{(j)})`` is built in full
    (one row per branch vector), so this is for small registers only.
    """
    reg = output.source
    m = reg.m
    sig = np.array(as_signature(S, m))
    branches = np.array(list(itertools.product(*(range(t) for t in reg.term_counts))))
    branches = branches.reshape(-1, m)
    alphas, weights = reg.padded_arrays()
    cols = np.arange(m)
    input_alphas = alphas[cols, branches]
    betas = input_alphas @ output.unitary.entries.T
    table = _fock_table(betas, int(sig.max(initial=0)))
    f = np.take_along_axis(table, np.broadcast_to(sig, betas.shape)[..., None], axis=-1)[..., 0]
    a = weights[cols, branches] * f
    return complex(np.sum(np.prod(a, axis=1)))


def fock_gamma_S(u, T, S):
    """Amplitude <S| U |T> for Fock input T and output S.

    ``Per(U_ST) / sqrt(prod s_i! prod t_j!)`` where ``U_ST`` takes row i of U
    ``S_i`` times and column j ``T_j`` times. Rows index outputs because U
    acts as ``a_j^dag -> sum_i U[i, j] a_i^dag``, the same action that sends
    coherent amplitudes to ``U @ alpha``.
    """
    m = u.dim
    t = as_signature(T, m)
    s = as_signature(S, m)
    n = sum(t)
    if n != sum(s):
        return 0j
    if n > PERMANENT_MAX_N:
        raise TooLarge(f"{n} photons exceeds permanent cap {PERMANENT_MAX_N}")
    rows = [i for i, c in enumerate(s) for _ in range(c)]
    cols = [j for j, c in enumerate(t) for _ in range(c)]
    sub = u.entries[np.ix_(rows, cols)]
    norm = math.prod(math.factorial(c) for c in s) * math.prod(math.factorial(c) for c in t)
    return permanent(sub) / math.sqrt(norm)
