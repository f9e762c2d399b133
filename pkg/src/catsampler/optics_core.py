"""Linear-optics unitaries and matrix permanents.

Conventions
-----------
Modes are 1-based in the public API (``beamsplitter(m, 1, 2, ...)``).
A unitary ``U`` acts on a column of mode amplitudes, ``beta = U @ alpha``;
``compose(U, V)`` means "U first, then V" and equals ``V @ U``.

The 2x2 beamsplitter block is ``[[cos t, e^{i p} sin t], [-e^{-i p} sin t, cos t]]``
and the balanced splitter used for two-photon interference is the Hadamard
``[[1, 1], [1, -1]] / sqrt(2)``. Other phase conventions are equally valid;
these two are fixed so that two odd cats sent through ``hadamard2`` end up
as ``|sqrt2 a, 0> - |0, sqrt2 a> - |0, -sqrt2 a> + |-sqrt2 a, 0>``.

Random unitaries use numpy's PCG64 generator (``numpy.random.default_rng``).
"""
import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from catsampler import _backend
from catsampler.errors import (
    DimMismatch,
    ModeOutOfRange,
    NonFinite,
    NonSquare,
    NotUnitary,
    TooLarge,
)

DEFAULT_TOL = 1e-10
PERMANENT_MAX_N = 30
NAIVE_MAX_N = 9


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    """Validated m x m unitary. Build it with :func:`validate_unitary`."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=np.complex128, copy=True, order="C")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self):
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, UnitaryMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash(self.entries.tobytes())

    def __repr__(self):
        return f"UnitaryMatrix(dim={self.dim})"


def unitarity_deviation(entries):
    """Max absolute entry of ``U U^dag - I``."""
    a = np.asarray(entries, dtype=np.complex128)
    return float(np.max(np.abs(a @ a.conj().T - np.eye(a.shape[0])), initial=0.0))


def _as_square(entries):
    a = np.asarray(entries, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonSquare(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFinite("matrix has NaN or infinite entries")
    return a


def validate_unitary(entries, tol=DEFAULT_TOL):
    """Check squareness, finiteness and unitarity; return a ``UnitaryMatrix``.

    Raises
    ------
    NonSquare, NonFinite, NotUnitary
    """
    if isinstance(entries, UnitaryMatrix):
        entries = entries.entries
    a = _as_square(entries)
    if a.shape[0] < 1:
        raise NonSquare("unitary must have at least one mode")
    dev = unitarity_deviation(a)
    if dev > tol:
        raise NotUnitary(dev, tol)
    return UnitaryMatrix(a)


def identity(m):
    return UnitaryMatrix(np.eye(m, dtype=np.complex128))


def hadamard2():
    """Balanced two-mode splitter ``[[1, 1], [1, -1]] / sqrt(2)``."""
    h = 1 / math.sqrt(2)
    return UnitaryMatrix(np.array([[h, h], [h, -h]], dtype=np.complex128))


def _check_mode(m, i):
    if not 1 <= i <= m:
        raise ModeOutOfRange(f"mode {i} outside 1..{m}")


def beamsplitter(m, i, j, theta, phi=0.0):
    """Two-mode mixer on modes ``i < j`` (1-based), identity elsewhere."""
    _check_mode(m, i)
    _check_mode(m, j)
    if not i < j:
        raise ModeOutOfRange(f"need i < j, got i={i}, j={j}")
    u = np.eye(m, dtype=np.complex128)
    c, s = math.cos(theta), math.sin(theta)
    a, b = i - 1, j - 1
    u[a, a] = c
    u[a, b] = np.exp(1j * phi) * s
    u[b, a] = -np.exp(-1j * phi) * s
    u[b, b] = c
    return validate_unitary(u)


def phase_shifter(m, i, phi):
    _check_mode(m, i)
    u = np.eye(m, dtype=np.complex128)
    u[i - 1, i - 1] = np.exp(1j * phi)
    return UnitaryMatrix(u)


def compose(u, v):
    """Network applying ``u`` first and ``v`` second (matrix ``v @ u``)."""
    if u.dim != v.dim:
        raise DimMismatch(f"cannot compose {u.dim}-mode and {v.dim}-mode unitaries")
    return validate_unitary(v.entries @ u.entries)


def haar_random_unitary(m, seed):
    """Haar-distributed unitary from a seeded PCG64 stream.

    QR of a complex Ginibre matrix, with each column of Q multiplied by the
    phase of the matching diagonal entry of R so the result is Haar rather
    than biased by the QR sign convention.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    q = q * (d / np.abs(d))
    return validate_unitary(q)


def permanent(matrix):
    """Permanent via Ryser's inclusion-exclusion formula (Gray-code order).

    Runs in O(2^n n); capped at n = 30.
    """
    a = _as_square(matrix)
    n = a.shape[0]
    if n > PERMANENT_MAX_N:
        raise TooLarge(f"permanent of {n}x{n} exceeds cap n <= {PERMANENT_MAX_N}")
    return complex(_backend.ryser_permanent(np.ascontiguousarray(a)))


def permanent_naive(matrix):
    """Definitional sum over all n! permutations; test oracle only."""
    a = _as_square(matrix)
    n = a.shape[0]
    if n > NAIVE_MAX_N:
        raise TooLarge(f"naive permanent limited to n <= {NAIVE_MAX_N}")
    total = 0j
    for perm in itertools.permutations(range(n)):
        p = 1 + 0j
        for row, col in enumerate(perm):
            p *= a[row, col]
        total += p
    return complex(total)


def matrix_to_json(matrix):
    a = np.asarray(matrix, dtype=np.complex128)
    return {"dim": a.shape[0], "re": a.real.tolist(), "im": a.imag.tolist()}


def matrix_from_json(obj, validate=True, tol=DEFAULT_TOL):
    """Parse ``{"dim": m, "re": [[...]], "im": [[...]]}``.

    With ``validate`` (the default) the result is a ``UnitaryMatrix``;
    otherwise a plain square complex array.
    """
    try:
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise NonSquare(f"bad matrix object: {exc}") from exc
    if re.shape != im.shape:
        raise NonSquare(f"re/im shapes differ: {re.shape} vs {im.shape}")
    a = _as_square(re + 1j * im)
    if "dim" in obj and int(obj["dim"]) != a.shape[0]:
        raise DimMismatch(f"dim field {obj['dim']} != matrix size {a.shape[0]}")
    return validate_unitary(a, tol) if validate else a


def read_matrix(path, validate=True, tol=DEFAULT_TOL):
    with open(path) as fh:
        return matrix_from_json(json.load(fh), validate=validate, tol=tol)


def write_matrix(path, matrix):
    with open(path, "w") as fh:
        json.dump(matrix_to_json(matrix), fh, indent=1)
        fh.write("\n")
