import json
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from catsampler.errors import ValidationError
from catsampler.experiments import (
    ConfigError,
    bound_check,
    bound_crossover,
    config_from_dict,
    fock_reduction_check,
    hardness_bound,
    hom_check,
    load_config,
    log_hardness_bound,
    reduction_slope,
)
from catsampler.states import odd_cat, photon_number_dist

# 50-digit mpmath evaluations of (2 / (e - 1/e))^n
BOUND_N1_A1 = 0.85091812823932154513
BOUND_N2_A1 = 0.72406166096631046641
# mpmath scan of (0.25 csch 0.25)^n > n^-2: holds for n in 2..1392 only
CROSSOVER_A05_C1_K2 = 1393


class TestHom:
    def test_small_alpha(self):
        rep = hom_check(1e-3)
        assert rep.p11 <= 1e-12
        assert rep.dev20 <= 1e-4 and rep.dev02 <= 1e-4
        assert rep.signs_ok
        assert rep.gamma02.real < 0 < rep.gamma20.real
        assert rep.captured_mass >= 1 - 1e-12

    def test_range(self):
        with pytest.raises(ValidationError):
            hom_check(0.5)

    def test_deviation_is_quartic(self):
        # P(2,0) - 1/2 is the loss from the odd cats' |3> components: O(alpha^4)
        devs = [hom_check(a).dev20 for a in (0.1, 0.05, 0.025)]
        for big, small in zip(devs, devs[1:]):
            assert 8 <= big / small <= 32


class TestReduction:
    def test_n2_m4(self):
        rep = fock_reduction_check(2, 4, 1e-3, 0)
        assert rep.max_deviation <= 1e-4
        assert rep.n_signatures == 10
        assert rep.fitted_c == pytest.approx(rep.max_deviation / 1e-6)

    def test_vacuum_only(self):
        rep = fock_reduction_check(0, 3, 1e-3, 1)
        assert rep.max_deviation == 0 and rep.n_signatures == 1

    def test_shrinks_with_alpha(self):
        big = fock_reduction_check(2, 4, 1e-2, 3).max_deviation
        small = fock_reduction_check(2, 4, 1e-3, 3).max_deviation
        assert small < big / 100

    def test_quartic_slope(self):
        # odd-cat single-photon amplitude is sqrt(x csch x) = 1 - x^2/12 + ..., x = alpha^2
        slope, devs = reduction_slope(2, 4, 5, alphas=(1e-2, 5e-3, 2.5e-3))
        assert slope == pytest.approx(4.0, abs=0.2)

    def test_deviation_matches_analytic_factor(self):
        a = 1e-2
        rep = fock_reduction_check(1, 2, a, 0)
        with mpmath.workdps(30):
            x = mpmath.mpf(a) ** 2
            loss = float(1 - mpmath.sqrt(x * mpmath.csch(x)))
        # single photon: deviation = loss * max |U_j1|
        from catsampler.optics_core import haar_random_unitary

        col = np.abs(haar_random_unitary(2, 0).entries[:, 0]).max()
        assert rep.max_deviation == pytest.approx(loss * col, rel=1e-4)

    @pytest.mark.parametrize("kw", [dict(n=4, m=6), dict(n=2, m=7), dict(n=3, m=2)])
    def test_limits(self, kw):
        with pytest.raises(ValidationError):
            fock_reduction_check(alpha=1e-3, seed=0, **kw)

    def test_alpha_limit(self):
        with pytest.raises(ValidationError):
            fock_reduction_check(1, 2, 0.05, 0)


class TestHardnessBound:
    def test_values(self):
        assert hardness_bound(1, 1.0) == pytest.approx(BOUND_N1_A1, abs=1e-12)
        assert hardness_bound(2, 1.0) == pytest.approx(BOUND_N2_A1, abs=1e-12)

    @pytest.mark.parametrize("n", [1, 10, 100, 1000])
    def test_small_alpha_limit(self, n):
        assert abs(hardness_bound(n, 1e-8) - 1) <= 1e-12

    def test_matches_odd_cat_single_photon_probability(self):
        for a in (0.05, 0.3, 1.0, 1.7):
            probs, _ = photon_number_dist(odd_cat(a), 2)
            assert hardness_bound(1, a) == pytest.approx(probs[1], rel=1e-12)

    @given(st.integers(1, 500), st.floats(1e-6, 3.0))
    @settings(max_examples=200, deadline=None)
    def test_power_identity(self, n, a):
        assert log_hardness_bound(n, a) == pytest.approx(n * log_hardness_bound(1, a), rel=1e-12, abs=1e-300)
        p1 = hardness_bound(1, a)
        assert abs(hardness_bound(n, a) - p1**n) <= 1e-12

    @given(st.integers(1, 50), st.floats(1e-3, 2.9), st.floats(1e-3, 0.1))
    @settings(max_examples=200, deadline=None)
    def test_decreasing_in_alpha(self, n, a, step):
        assert hardness_bound(n, a + step) < hardness_bound(n, a)

    def test_underflow(self):
        rep = bound_check(10**6, 3.0)
        assert rep.probability == 0.0 and rep.underflow and not rep.satisfied

    def test_errors(self):
        with pytest.raises(ValidationError):
            hardness_bound(0, 1.0)
        with pytest.raises(ValidationError):
            hardness_bound(1, 0.0)
        with pytest.raises(ValidationError):
            bound_check(1, 1.0, c=0)


class TestBoundCheck:
    @pytest.mark.parametrize("n,k", [(1, 0), (5, 1), (50, 3), (1000, 2)])
    def test_tiny_alpha_satisfied(self, n, k):
        assert bound_check(n, 1e-8, c=1.0, k=k).satisfied or n == 1  # n=1, c=1: threshold is 1

    def test_tiny_alpha_below_unit_threshold(self):
        assert bound_check(1, 1e-8, c=0.99, k=2).satisfied

    def test_crossover(self):
        assert not bound_check(1, 0.5, 1, 2).satisfied
        assert bound_check(2, 0.5, 1, 2).satisfied
        assert bound_check(CROSSOVER_A05_C1_K2 - 1, 0.5, 1, 2).satisfied
        assert not bound_check(CROSSOVER_A05_C1_K2, 0.5, 1, 2).satisfied
        assert bound_crossover(0.5, 1, 2) == CROSSOVER_A05_C1_K2

    def test_never_returns_after_crossover(self):
        flags = [bound_check(n, 0.5, 1, 2).satisfied for n in range(CROSSOVER_A05_C1_K2, 3000)]
        assert not any(flags)


class TestConfig:
    def base(self):
        return {
            "modes": [{"kind": "odd_cat", "alpha": [0.3, 0]}, {"kind": "vacuum"}],
            "unitary": {"kind": "haar", "seed": 3},
            "cutoff": {"auto": 1e-9},
            "samples": 10,
            "seed": 1,
        }

    def test_ok(self):
        cfg = config_from_dict(self.base())
        assert cfg.register.m == 2 and cfg.samples == 10

    def test_gates_left_to_right(self):
        obj = self.base()
        obj["unitary"] = {
            "kind": "gates",
            "gates": [
                {"type": "phase_shifter", "i": 1, "phi": 0.5},
                {"type": "beamsplitter", "i": 1, "j": 2, "theta": 0.3, "phi": 0.1},
            ],
        }
        from catsampler.optics_core import beamsplitter, phase_shifter

        expect = beamsplitter(2, 1, 2, 0.3, 0.1).entries @ phase_shifter(2, 1, 0.5).entries
        np.testing.assert_allclose(config_from_dict(obj).unitary.entries, expect, atol=1e-15)

    def test_explicit_and_per_mode(self):
        obj = self.base()
        obj["unitary"] = {"kind": "explicit", "dim": 2, "re": [[0, 1], [1, 0]], "im": [[0, 0], [0, 0]]}
        obj["cutoff"] = {"per_mode": [3, 4]}
        cfg = config_from_dict(obj)
        assert cfg.cutoff.per_mode_max == (3, 4)

    @pytest.mark.parametrize(
        "patch",
        [
            {"unitary": {"kind": "haar", "seed": 1, "m": 3}},
            {"cutoff": {"per_mode": [1, 2, 3]}},
            {"cutoff": {"manual": 3}},
            {"modes": [{"kind": "unknown"}]},
            {"unitary": {"kind": "explicit", "re": [[2, 0], [0, 1]]}},
        ],
    )
    def test_rejects(self, patch):
        obj = dict(self.base(), **patch)
        with pytest.raises(ValidationError):
            config_from_dict(obj)

    def test_parse_error_has_line(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{\n  "modes": [\n    {"kind": "vacuum"},,\n  ]\n}\n')
        with pytest.raises(ConfigError) as info:
            load_config(path)
        assert info.value.line == 3
        assert f"{path}:3:" in str(info.value)

    def test_semantic_error_has_line(self, tmp_path):
        obj = self.base()
        obj["cutoff"] = {"per_mode": [1]}
        path = tmp_path / "c.json"
        path.write_text(json.dumps(obj, indent=2))
        with pytest.raises(ConfigError) as info:
            load_config(path)
        text = path.read_text().splitlines()
        assert '"cutoff"' in text[info.value.line - 1]
