"""Coherent-state superpositions ("cats") and the multi-mode input register."""
import cmath
import math
from dataclasses import dataclass

import numpy as np

from catsampler.errors import DegenerateNorm, EmptyCat, NOverflow, TermExplosion, ValidationError

MAX_PHOTONS = 170
_DIRECT_MAX_N = 20
MIN_ODD_ALPHA = 1e-6
MAX_REGISTER_TERMS = 2**40
_NORM_FLOOR = 1e-24


def fock_amplitude(alpha, n):
    """<n|alpha> = exp(-|alpha|^2/2) alpha^n / sqrt(n!)."""
    if n < 0:
        raise ValueError("photon number must be non-negative")
    if n > MAX_PHOTONS:
        raise NOverflow(f"photon number {n} exceeds {MAX_PHOTONS}")
    alpha = complex(alpha)
    r2 = alpha.real * alpha.real + alpha.imag * alpha.imag
    if n <= _DIRECT_MAX_N:
        return math.exp(-0.5 * r2) * alpha**n / math.sqrt(math.factorial(n))
    if alpha == 0:
        return 0j
    log_mag = -0.5 * r2 + n * math.log(abs(alpha)) - 0.5 * math.lgamma(n + 1)
    return math.exp(log_mag) * cmath.exp(1j * n * cmath.phase(alpha))


def coherent_overlap(a, b):
    """<a|b> for coherent states."""
    a, b = complex(a), complex(b)
    return cmath.exp(-0.5 * (abs(a) ** 2 + abs(b) ** 2) + a.conjugate() * b)


def _gram_norm_sq(weights, alphas):
    # sum_jk conj(l_j) l_k <a_j|a_k>, split as |sum l|^2 + sum conj(l_j) l_k (<a_j|a_k> - 1)
    # with <a|b> = exp(-|a-b|^2/2 + i Im(conj(a) b)); keeps odd cats at tiny alpha accurate
    w = np.asarray(weights, dtype=np.complex128)
    a = np.asarray(alphas, dtype=np.complex128)
    diff = a[None, :] - a[:, None]
    z = -0.5 * np.abs(diff) ** 2 + 1j * np.imag(a.conj()[:, None] * a[None, :])
    excess = np.sum(w.conj()[:, None] * w[None, :] * np.expm1(z))
    return float((abs(w.sum()) ** 2 + excess).real)


@dataclass(frozen=True)
class CatTerm:
    weight: complex
    alpha: complex


@dataclass(frozen=True)
class CatSpec:
    """Normalized superposition sum_j weight_j |alpha_j> on one mode.

    Construct through :func:`make_cat` (or the named constructors) so the
    normalization invariant holds.
    """

    terms: tuple

    @property
    def t(self):
        return len(self.terms)

    @property
    def weights(self):
        return np.array([term.weight for term in self.terms], dtype=np.complex128)

    @property
    def alphas(self):
        return np.array([term.alpha for term in self.terms], dtype=np.complex128)

    def norm_sq(self):
        return _gram_norm_sq(self.weights, self.alphas)

    def to_json(self):
        return {
            "terms": [
                {"lambda": [t.weight.real, t.weight.imag], "alpha": [t.alpha.real, t.alpha.imag]}
                for t in self.terms
            ]
        }


def make_cat(terms):
    """Build a normalized cat from ``(weight, alpha)`` pairs.

    Zero weights are dropped and exactly-equal alphas merged (weights summed)
    before rescaling by the coherent-state Gram norm.
    """
    merged = {}
    for weight, alpha in terms:
        weight, alpha = complex(weight), complex(alpha)
        if not (cmath.isfinite(weight) and cmath.isfinite(alpha)):
            raise ValidationError("cat term has non-finite weight or amplitude")
        if weight == 0:
            continue
        merged[alpha] = merged.get(alpha, 0j) + weight
    pairs = [(w, a) for a, w in merged.items() if w != 0]
    if not pairs:
        raise EmptyCat("cat has no terms with nonzero weight")
    weights = [w for w, _ in pairs]
    alphas = [a for _, a in pairs]
    norm_sq = _gram_norm_sq(weights, alphas)
    if norm_sq <= _NORM_FLOOR:
        raise DegenerateNorm(f"cat norm^2 = {norm_sq:.3e} is numerically zero")
    scale = 1 / math.sqrt(norm_sq)
    return CatSpec(tuple(CatTerm(w * scale, a) for w, a in pairs))


def vacuum():
    return CatSpec((CatTerm(1 + 0j, 0j),))


def coherent(alpha):
    return make_cat([(1, alpha)])


def even_cat(alpha):
    """(|alpha> + |-alpha>) normalized; even photon numbers only."""
    return make_cat([(1, alpha), (1, -complex(alpha))])


def odd_cat(alpha):
    """(|alpha> - |-alpha>) normalized; odd photon numbers only.

    Tends to the single-photon state as alpha -> 0, but the norm is
    numerically degenerate for |alpha| < 1e-6, which is rejected.
    """
    if abs(alpha) < MIN_ODD_ALPHA:
        raise DegenerateNorm(f"odd cat needs |alpha| >= {MIN_ODD_ALPHA}, got {abs(alpha):.3e}")
    return make_cat([(1, alpha), (-1, -complex(alpha))])


def fock_amplitudes(cat, cutoff):
    """Amplitudes <n|cat> for n = 0..cutoff."""
    return np.array(
        [sum(t.weight * fock_amplitude(t.alpha, n) for t in cat.terms) for n in range(cutoff + 1)],
        dtype=np.complex128,
    )


def photon_number_dist(cat, cutoff):
    """Photon-number probabilities up to ``cutoff`` and their total.

    Returns
    -------
    probs : ndarray, shape (cutoff + 1,)
    captured_mass : float
    """
    if cutoff < 0:
        raise ValueError("cutoff must be >= 0")
    probs = np.abs(fock_amplitudes(cat, cutoff)) ** 2
    return probs, math.fsum(probs)


@dataclass(frozen=True)
class InputRegister:
    """Tensor product of per-mode cats; mode i carries ``modes[i]``."""

    modes: tuple

    @property
    def m(self):
        return len(self.modes)

    @property
    def term_counts(self):
        return tuple(c.t for c in self.modes)

    @property
    def n_terms(self):
        return math.prod(self.term_counts)

    def padded_arrays(self):
        """``(alphas, weights)`` as m x max(t) arrays, zero-padded."""
        tmax = max(self.term_counts)
        alphas = np.zeros((self.m, tmax), dtype=np.complex128)
        weights = np.zeros((self.m, tmax), dtype=np.complex128)
        for i, cat in enumerate(self.modes):
            alphas[i, : cat.t] = cat.alphas
            weights[i, : cat.t] = cat.weights
        return alphas, weights


def make_register(specs):
    specs = tuple(specs)
    if not specs:
        raise ValidationError("register needs at least one mode")
    for s in specs:
        if not isinstance(s, CatSpec):
            raise ValidationError(f"register entries must be CatSpec, got {type(s).__name__}")
    total = math.prod(s.t for s in specs)
    if total > MAX_REGISTER_TERMS:
        raise TermExplosion(f"register expands to {total} terms (cap 2^40)")
    return InputRegister(specs)


def _complex_pair(value, where):
    if isinstance(value, (int, float)):
        return complex(value)
    try:
        re, im = value
        return complex(float(re), float(im))
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{where}: expected [re, im], got {value!r}") from exc


def cat_from_json(obj):
    """Parse a cat spec: explicit ``terms`` or a ``kind`` shorthand."""
    if not isinstance(obj, dict):
        raise ValidationError(f"cat spec must be an object, got {obj!r}")
    if "terms" in obj:
        terms = []
        for k, term in enumerate(obj["terms"]):
            try:
                terms.append(
                    (
                        _complex_pair(term["lambda"], f"terms[{k}].lambda"),
                        _complex_pair(term["alpha"], f"terms[{k}].alpha"),
                    )
                )
            except KeyError as exc:
                raise ValidationError(f"terms[{k}] missing {exc}") from exc
        return make_cat(terms)
    kind = obj.get("kind")
    if kind == "vacuum":
        return vacuum()
    if kind in ("even_cat", "odd_cat", "coherent"):
        if "alpha" not in obj:
            raise ValidationError(f"{kind} needs an 'alpha' field")
        alpha = _complex_pair(obj["alpha"], f"{kind}.alpha")
        return {"even_cat": even_cat, "odd_cat": odd_cat, "coherent": coherent}[kind](alpha)
    raise ValidationError(f"unknown cat kind {kind!r}")
