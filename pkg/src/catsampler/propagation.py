"""Pushing coherent superpositions through a linear-optics unitary.

A product of coherent states stays a product of coherent states, with
output amplitudes ``beta_j = sum_k U[j, k] alpha_k``. A register of cats is
a sum of ``prod_i t_i`` such products, so the output is handled term by
term. Terms are produced lazily in mixed-radix lexicographic order of the
branch vector (last mode varies fastest); that order is part of the API.
"""
import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from catsampler.errors import DimMismatch, TermExplosion
from catsampler.optics_core import UnitaryMatrix
from catsampler.states import MAX_REGISTER_TERMS, InputRegister

JSONL_DUMP_LIMIT = 10**6


@dataclass(frozen=True)
class MultiModeTerm:
    coeff: complex
    alphas: tuple

    def to_json(self):
        return {
            "coeff": [self.coeff.real, self.coeff.imag],
            "alphas": [[a.real, a.imag] for a in self.alphas],
        }


def propagate_coherent(u, alphas):
    """Output coherent amplitudes for a product coherent input."""
    a = np.asarray(alphas, dtype=np.complex128)
    if a.shape != (u.dim,):
        raise DimMismatch(f"{a.shape[0] if a.ndim else 0} amplitudes for a {u.dim}-mode unitary")
    return u.entries @ a


def _check_size(reg):
    if reg.n_terms > MAX_REGISTER_TERMS:
        raise TermExplosion(f"register expands to {reg.n_terms} terms (cap 2^40)")


def branch_of(reg, index):
    """Branch vector (one term index per mode) at lexicographic position ``index``."""
    digits = []
    for t in reversed(reg.term_counts):
        index, d = divmod(index, t)
        digits.append(d)
    return tuple(reversed(digits))


def term_at(reg, index):
    branch = branch_of(reg, index)
    coeff = 1 + 0j
    alphas = []
    for cat, d in zip(reg.modes, branch):
        coeff *= cat.terms[d].weight
        alphas.append(cat.terms[d].alpha)
    return MultiModeTerm(coeff, tuple(alphas))


def expand_register(reg, start=0, stop=None):
    """Yield the input expansion terms with indices in ``[start, stop)``."""
    _check_size(reg)
    stop = reg.n_terms if stop is None else min(stop, reg.n_terms)
    if start == 0 and stop == reg.n_terms:
        for combo in itertools.product(*(cat.terms for cat in reg.modes)):
            coeff = 1 + 0j
            for term in combo:
                coeff *= term.weight
            yield MultiModeTerm(coeff, tuple(term.alpha for term in combo))
        return
    for index in range(start, stop):
        yield term_at(reg, index)


@dataclass(frozen=True)
class OutputSuperposition:
    """``U`` applied to every term of ``source``; terms are generated on demand."""

    source: InputRegister
    unitary: UnitaryMatrix

    @property
    def m(self):
        return self.source.m

    def __len__(self):
        return self.source.n_terms

    def terms(self, start=0, stop=None):
        for term in expand_register(self.source, start, stop):
            yield MultiModeTerm(
                term.coeff, tuple(complex(b) for b in propagate_coherent(self.unitary, term.alphas))
            )

    def __iter__(self):
        return self.terms()

    def dump_jsonl(self, fh):
        """Write one JSON object per output term (small outputs only)."""
        if self.m * len(self) > JSONL_DUMP_LIMIT:
            raise TermExplosion(
                f"refusing to dump {len(self)} terms x {self.m} modes (limit {JSONL_DUMP_LIMIT})"
            )
        for term in self.terms():
            fh.write(json.dumps(term.to_json()) + "\n")


def propagate_register(u, reg):
    if u.dim != reg.m:
        raise DimMismatch(f"{u.dim}-mode unitary applied to {reg.m}-mode register")
    _check_size(reg)
    return OutputSuperposition(reg, u)


def energy(alphas):
    """Mean photon number sum |alpha|^2 of a product coherent state."""
    return math.fsum(abs(complex(a)) ** 2 for a in alphas)
