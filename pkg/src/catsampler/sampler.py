"""Truncated outcome distributions and seeded sampling.

Photon number is unbounded for coherent-state inputs, so distributions are
built over a finite box of signatures ``0 <= S_j <= N_j``. The stored
probabilities are the raw ``|gamma_S|^2``; ``captured_mass`` is their sum
and the shortfall from 1 is the truncation error.
"""
import csv
import hashlib
import io
import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import poisson

from catsampler.amplitudes import gamma_S_batch
from catsampler.errors import DimMismatch, EmptyDistribution, TermExplosion, ValidationError
from catsampler.propagation import propagate_register

MAX_SIGNATURES = 10**8
_MAX_AUTO_CUTOFF = 170


@dataclass(frozen=True)
class CutoffPolicy:
    per_mode_max: tuple
    tail_epsilon: float = None

    def __post_init__(self):
        object.__setattr__(self, "per_mode_max", tuple(int(n) for n in self.per_mode_max))
        if any(n < 0 for n in self.per_mode_max):
            raise ValidationError("cutoffs must be non-negative")

    @property
    def m(self):
        return len(self.per_mode_max)

    @property
    def n_signatures(self):
        return math.prod(n + 1 for n in self.per_mode_max)


def poisson_cutoff(mu, budget):
    """Smallest N with P(Poisson(mu) > N) <= budget."""
    if mu <= 0:
        return 0
    n = max(0, int(mu))
    while poisson.sf(n, mu) > budget:
        n += 1
        if n > _MAX_AUTO_CUTOFF:
            raise TermExplosion(f"cutoff for mean photon number {mu:.3g} exceeds {_MAX_AUTO_CUTOFF}")
    # the starting guess may overshoot
    while n > 0 and poisson.sf(n - 1, mu) <= budget:
        n -= 1
    return n


def auto_cutoff(reg, u, epsilon):
    """Per-mode cutoffs whose Poisson tails keep the missed mass below ``epsilon``.

    Mode j uses the largest mean photon number ``|beta_j|^2`` over all output
    branches and a per-mode, per-branch budget ``epsilon / (m * n_branches)``.
    The union bound over branches is heuristic for superpositions (branches
    interfere), which is why captured mass is checked empirically in tests.
    """
    if not 0 < epsilon < 1:
        raise ValidationError(f"epsilon must be in (0, 1), got {epsilon}")
    out = propagate_register(u, reg)
    mu = np.zeros(reg.m)
    for term in out.terms():
        np.maximum(mu, np.abs(np.asarray(term.alphas)) ** 2, out=mu)
    budget = epsilon / (reg.m * len(out))
    return CutoffPolicy(tuple(poisson_cutoff(float(x), budget) for x in mu), epsilon)


def enumerate_signatures(policy):
    """All signatures inside the cutoff box, lexicographic (last mode fastest)."""
    if policy.n_signatures > MAX_SIGNATURES:
        raise TermExplosion(f"{policy.n_signatures} signatures exceeds cap {MAX_SIGNATURES}")
    return itertools.product(*(range(n + 1) for n in policy.per_mode_max))


def _digest(*arrays):
    h = hashlib.sha256()
    for a in arrays:
        h.update(np.ascontiguousarray(a).tobytes())
    return h.hexdigest()[:16]


@dataclass(frozen=True, eq=False)
class SampledDistribution:
    signatures: np.ndarray
    probabilities: np.ndarray
    captured_mass: float
    cutoffs: CutoffPolicy
    metadata: dict = field(default_factory=dict)

    @property
    def m(self):
        return self.signatures.shape[1]

    @property
    def entries(self):
        return {tuple(int(c) for c in s): float(p) for s, p in zip(self.signatures, self.probabilities)}

    def __getitem__(self, sig):
        return self.entries.get(tuple(sig), 0.0)

    def to_csv(self, fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"s_{i + 1}" for i in range(self.m)] + ["probability"])
        for s, p in zip(self.signatures, self.probabilities):
            w.writerow([int(c) for c in s] + [repr(float(p))])
        fh.write(f"# captured_mass={self.captured_mass!r}\n")

    def to_json(self):
        return {
            "m": self.m,
            "cutoffs": list(self.cutoffs.per_mode_max),
            "tail_epsilon": self.cutoffs.tail_epsilon,
            "captured_mass": self.captured_mass,
            "metadata": self.metadata,
            "entries": [
                {"signature": [int(c) for c in s], "probability": float(p)}
                for s, p in zip(self.signatures, self.probabilities)
            ],
        }


def distribution_from_entries(entries, cutoffs=None):
    """Wrap a ``{signature: probability}`` mapping (lexicographically sorted)."""
    items = sorted((tuple(int(c) for c in s), float(p)) for s, p in entries.items())
    if not items:
        raise EmptyDistribution("no entries")
    sigs = np.array([s for s, _ in items], dtype=np.intp)
    probs = np.array([p for _, p in items])
    if cutoffs is None:
        cutoffs = CutoffPolicy(tuple(sigs.max(axis=0)))
    return SampledDistribution(sigs, probs, math.fsum(probs), cutoffs)


def build_distribution(u, reg, policy, workers=None):
    """Exact ``|gamma_S|^2`` for every signature inside the cutoff box."""
    if u.dim != reg.m or policy.m != reg.m:
        raise DimMismatch(
            f"unitary has {u.dim} modes, register {reg.m}, cutoffs {policy.m}"
        )
    out = propagate_register(u, reg)
    sigs = np.array(list(enumerate_signatures(policy)), dtype=np.intp).reshape(-1, reg.m)
    amps = gamma_S_batch(out, sigs, workers=workers)
    probs = amps.real**2 + amps.imag**2
    alphas, weights = reg.padded_arrays()
    meta = {
        "unitary_digest": _digest(u.entries),
        "register_digest": _digest(alphas, weights, np.array(reg.term_counts)),
        "n_branches": len(out),
    }
    return SampledDistribution(sigs, probs, math.fsum(probs), policy, meta)


def draw_samples(dist, count, seed):
    """i.i.d. signatures by inverse CDF over the stored (lexicographic) order.

    Probabilities are renormalized by ``captured_mass``. Uses numpy's PCG64
    stream, so output depends only on ``(dist, count, seed)``.
    """
    if not dist.captured_mass > 0:
        raise EmptyDistribution("distribution has no probability mass")
    cdf = np.cumsum(dist.probabilities) / dist.captured_mass
    u = np.random.default_rng(seed).random(int(count))
    idx = np.searchsorted(cdf, u, side="right")
    # float round-off can leave cdf[-1] a hair under 1; also skip trailing zeros
    last = int(np.flatnonzero(dist.probabilities)[-1])
    idx = np.minimum(idx, last)
    return [tuple(int(c) for c in dist.signatures[i]) for i in idx]


def empirical_distribution(samples, cutoffs=None):
    counts = {}
    for s in samples:
        counts[s] = counts.get(s, 0) + 1
    total = len(samples)
    return distribution_from_entries({s: c / total for s, c in counts.items()}, cutoffs)


def total_variation(a, b):
    if a.m != b.m:
        raise DimMismatch(f"distributions over {a.m} and {b.m} modes")
    pa, pb = a.entries, b.entries
    return 0.5 * math.fsum(abs(pa.get(s, 0.0) - pb.get(s, 0.0)) for s in set(pa) | set(pb))


def samples_to_csv(samples, fh):
    w = csv.writer(fh, lineterminator="\n")
    for s in samples:
        w.writerow(s)


def samples_csv_text(samples):
    buf = io.StringIO()
    samples_to_csv(samples, buf)
    return buf.getvalue()


def samples_to_json(samples):
    return json.dumps({"samples": [list(s) for s in samples]})
