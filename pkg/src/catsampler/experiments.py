"""Canned checks: two-photon interference with odd cats, the small-amplitude
Fock limit, and the single-photon fidelity bound for odd-cat inputs.
Also holds the JSON config loader used by ``catsampler simulate``.
"""
import itertools
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from catsampler.amplitudes import fock_gamma_S, gamma_S, gamma_S_batch
from catsampler.errors import ValidationError
from catsampler.optics_core import (
    beamsplitter,
    compose,
    hadamard2,
    haar_random_unitary,
    identity,
    matrix_from_json,
    phase_shifter,
)
from catsampler.propagation import propagate_register
from catsampler.sampler import CutoffPolicy, auto_cutoff, build_distribution
from catsampler.states import cat_from_json, make_register, odd_cat, vacuum

HOM_EPSILON = 1e-12


@dataclass
class HomReport:
    alpha: float
    p11: float
    p20: float
    p02: float
    gamma20: complex
    gamma02: complex
    dev20: float
    dev02: float
    signs_ok: bool
    captured_mass: float


def hom_check(alpha):
    """Two odd cats through the balanced splitter.

    For small alpha the pair behaves like two single photons: coincidences
    (1, 1) cancel exactly and (2, 0), (0, 2) each carry probability 1/2
    with amplitudes +1/sqrt2 and -1/sqrt2.
    """
    if not 1e-6 <= alpha <= 0.1:
        raise ValidationError(f"hom_check needs 1e-6 <= alpha <= 0.1, got {alpha}")
    u = hadamard2()
    reg = make_register([odd_cat(alpha), odd_cat(alpha)])
    dist = build_distribution(u, reg, auto_cutoff(reg, u, HOM_EPSILON))
    out = propagate_register(u, reg)
    g20, g02 = gamma_S(out, (2, 0)), gamma_S(out, (0, 2))
    p20, p02 = dist[(2, 0)], dist[(0, 2)]
    return HomReport(
        alpha=alpha,
        p11=dist[(1, 1)],
        p20=p20,
        p02=p02,
        gamma20=g20,
        gamma02=g02,
        dev20=abs(p20 - 0.5),
        dev02=abs(p02 - 0.5),
        signs_ok=g02.real < 0 < g20.real,
        captured_mass=dist.captured_mass,
    )


@dataclass
class ReductionReport:
    n: int
    m: int
    alpha: float
    seed: int
    max_deviation: float
    fitted_c: float
    n_signatures: int


def shell_signatures(n, m):
    """All m-mode signatures with exactly n photons, lexicographic."""
    return [s for s in itertools.product(range(n + 1), repeat=m) if sum(s) == n]


def fock_reduction_check(n, m, alpha, seed):
    """Compare n small odd cats + vacua against n single photons.

    Both go through the same Haar unitary; the deviation is taken over every
    signature with exactly n photons. ``fitted_c`` is ``max_deviation / alpha^2``.
    """
    if not (0 <= n <= 3 and 1 <= m <= 6 and n <= m):
        raise ValidationError(f"desk-scale limits: 0 <= n <= 3, n <= m <= 6 (got n={n}, m={m})")
    if not 0 < alpha <= 1e-2:
        raise ValidationError(f"alpha must be in (0, 1e-2], got {alpha}")
    u = haar_random_unitary(m, seed)
    reg = make_register([odd_cat(alpha)] * n + [vacuum()] * (m - n))
    out = propagate_register(u, reg)
    sigs = shell_signatures(n, m)
    cat_amps = gamma_S_batch(out, sigs)
    fock_in = (1,) * n + (0,) * (m - n)
    fock_amps = np.array([fock_gamma_S(u, fock_in, s) for s in sigs])
    dev = float(np.max(np.abs(cat_amps - fock_amps)))
    return ReductionReport(n, m, alpha, seed, dev, dev / alpha**2, len(sigs))


def reduction_slope(n, m, seed, alphas=(1e-2, 1e-3, 1e-4)):
    """Log-log slope of the max deviation against alpha."""
    devs = [fock_reduction_check(n, m, a, seed).max_deviation for a in alphas]
    slope = np.polyfit(np.log10(alphas), np.log10(np.maximum(devs, 1e-300)), 1)[0]
    return float(slope), devs


def log_hardness_bound(n, alpha):
    """log of (alpha^2 csch(alpha^2))^n."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    if not alpha > 0:
        raise ValidationError("alpha must be > 0")
    x = float(alpha) ** 2
    if x < 1.0:
        log_ratio = math.log(math.sinh(x) / x)
    else:
        log_ratio = x - math.log(2.0) + math.log1p(-math.exp(-2.0 * x)) - math.log(x)
    return -n * log_ratio


def hardness_bound(n, alpha):
    """Probability that n odd cats all land on their single-photon term.

    Each cat contributes ``alpha^2 csch(alpha^2)``; underflow gives 0.0
    (see :func:`bound_check` for the flag).
    """
    return math.exp(log_hardness_bound(n, alpha))


@dataclass
class HardnessBoundReport:
    n: int
    alpha: float
    probability: float
    threshold: float
    satisfied: bool
    underflow: bool


def bound_check(n, alpha, c=1.0, k=1.0):
    """Is the single-photon probability above the polynomial floor c * n^-k?"""
    if not c > 0 or k < 0:
        raise ValidationError("need c > 0 and k >= 0")
    log_p = log_hardness_bound(n, alpha)
    p = math.exp(log_p)
    threshold = c * float(n) ** (-k)
    return HardnessBoundReport(
        n=n,
        alpha=alpha,
        probability=p,
        threshold=threshold,
        satisfied=log_p > math.log(threshold),
        underflow=p == 0.0,
    )


def bound_crossover(alpha, c=1.0, k=2.0, n_max=10_000):
    """First n at which the bound fails after having held, or None.

    Small n can fail before the first success when c * n^-k is close to 1.
    """
    held = False
    for n in range(1, n_max + 1):
        ok = bound_check(n, alpha, c, k).satisfied
        if ok:
            held = True
        elif held:
            return n
    return None


# --- config ingestion -------------------------------------------------------


class ConfigError(ValidationError):
    def __init__(self, message, path=None, line=None, col=None):
        self.path, self.line, self.col = path, line, col
        where = path or "<config>"
        if line is not None:
            where += f":{line}" + (f":{col}" if col is not None else "")
        super().__init__(f"{where}: {message}")


@dataclass
class ExperimentConfig:
    register: object
    unitary: object
    cutoff: CutoffPolicy
    samples: int
    seed: int
    raw: dict


def _line_of(text, key):
    if text is None:
        return None
    needle = f'"{key}"'
    for lineno, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return lineno
    return None


def _unitary_from_spec(spec, m):
    kind = spec.get("kind")
    if kind == "haar":
        return haar_random_unitary(int(spec.get("m", m)), int(spec["seed"]))
    if kind == "explicit":
        return matrix_from_json(spec)
    if kind == "identity":
        return identity(int(spec.get("m", m)))
    if kind == "hadamard2":
        return hadamard2()
    if kind == "gates":
        dim = int(spec.get("m", m))
        u = identity(dim)
        for gate in spec.get("gates", []):
            g = gate.get("type")
            if g == "beamsplitter":
                step = beamsplitter(dim, int(gate["i"]), int(gate["j"]),
                                    float(gate.get("theta", math.pi / 4)), float(gate.get("phi", 0.0)))
            elif g == "phase_shifter":
                step = phase_shifter(dim, int(gate["i"]), float(gate["phi"]))
            else:
                raise ValidationError(f"unknown gate type {g!r}")
            u = compose(u, step)
        return u
    raise ValidationError(f"unknown unitary kind {kind!r}")


def config_from_dict(obj, text=None, path=None):
    """Validate a parsed config; errors are anchored to the offending key's line."""

    def fail(key, msg):
        raise ConfigError(msg, path, _line_of(text, key))

    if not isinstance(obj, dict):
        raise ConfigError("top level must be a JSON object", path, 1)
    for key in ("modes", "unitary"):
        if key not in obj:
            raise ConfigError(f"missing required key {key!r}", path, 1)
    try:
        reg = make_register([cat_from_json(c) for c in obj["modes"]])
    except (ValidationError, TypeError) as exc:
        fail("modes", f"modes: {exc}")
    try:
        u = _unitary_from_spec(obj["unitary"], reg.m)
    except (ValidationError, KeyError, TypeError, ValueError) as exc:
        fail("unitary", f"unitary: {exc.__class__.__name__}: {exc}")
    if u.dim != reg.m:
        fail("unitary", f"unitary has {u.dim} modes but register has {reg.m}")
    cut = obj.get("cutoff", {"auto": 1e-9})
    try:
        if "auto" in cut:
            policy = auto_cutoff(reg, u, float(cut["auto"]))
        elif "per_mode" in cut:
            policy = CutoffPolicy(tuple(int(x) for x in cut["per_mode"]))
        else:
            raise ValidationError("cutoff needs 'auto' or 'per_mode'")
    except (ValidationError, TypeError, ValueError) as exc:
        fail("cutoff", f"cutoff: {exc}")
    if policy.m != reg.m:
        fail("cutoff", f"cutoff lists {policy.m} modes but register has {reg.m}")
    try:
        samples = int(obj.get("samples", 0))
        seed = int(obj.get("seed", 0))
    except (TypeError, ValueError) as exc:
        fail("samples", str(exc))
    if samples < 0:
        fail("samples", "samples must be >= 0")
    return ExperimentConfig(reg, u, policy, samples, seed, obj)


def load_config(path):
    with open(path) as fh:
        text = fh.read()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, str(path), exc.lineno, exc.colno) from exc
    return config_from_dict(obj, text, str(path))


def report_dict(report):
    """Dataclass report to JSON-ready dict (complex -> [re, im])."""
    out = {}
    for k, v in asdict(report).items():
        out[k] = [v.real, v.imag] if isinstance(v, complex) else v
    return out


def run_cli(argv=None):
    from catsampler.cli import run_cli as _run

    return _run(argv)
