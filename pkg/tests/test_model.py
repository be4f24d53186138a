import math

import numpy as np
import pytest
from helpers import S0_P1_MIN, S0_P2_MAX, S0_P2_MIN, affine_noise, random_scenarios, s0
from hypothesis import given, settings
from hypothesis import strategies as st

from conflictgains.incentives import IncentiveSpec, NoiseSpec, PdfSpec, ShiftSpec
from conflictgains.integrate import IntegratorConfig, expect_shift
from conflictgains.model import (
    Capabilities,
    Scenario,
    ScenarioError,
    SolverSettings,
    StrategyProfile,
    UtilityBounds,
    eval_cn_incomplete,
    eval_cn_perfect,
    eval_general_cn,
    eval_general_us,
    eval_us_incomplete,
    eval_us_perfect,
    scenario_notes,
    win_probabilities,
)

T = math.tanh


def termwise_us(u_win, u_lose, u_status, alpha=0.75, c=20.0, k=0.2):
    return alpha * (u_win - c * T(k * u_win) - u_status) + (1 - alpha) * (u_lose - c * T(k * u_lose) - u_status)


def termwise_cn(u_win, u_lose, u_status, beta=0.25, c=60.0, k=0.2):
    return beta * (u_win - c * T(k * u_win) - u_status) + (1 - beta) * (u_lose - c * T(k * u_lose) - u_status)


class TestWinProbabilities:
    def test_values(self):
        assert win_probabilities(Capabilities(3, 1)) == (0.75, 0.25)
        assert win_probabilities(Capabilities(60, 20)) == (0.75, 0.25)

    @pytest.mark.parametrize("c_us,c_cn", [(1, 1), (1, 2), (0, -1), (5, 0), (float("inf"), 1)])
    def test_rejects(self, c_us, c_cn):
        with pytest.raises(ValueError):
            Capabilities(c_us, c_cn)

    @given(st.floats(1e-3, 1e6), st.floats(1e-3, 0.999))
    def test_sum_exactly_one(self, c_us, frac):
        caps = Capabilities(c_us, c_us * frac)
        a, b = win_probabilities(caps)
        assert a + b == 1.0
        assert 0.5 < a < 1 and 0 < b < 0.5
        assert b == pytest.approx(caps.c_cn / (caps.c_us + caps.c_cn), abs=1e-15)  # 1 - alpha loses relative precision for tiny beta


class TestBounds:
    def test_ordering(self):
        with pytest.raises(ValueError):
            UtilityBounds(5.0, 1.0)

    def test_dominance_is_advisory(self):
        b = UtilityBounds(1.0, 5.0)
        assert not b.high_dominates
        assert UtilityBounds(1.0, 10.0).high_dominates
        assert any("not dominant" in n for n in scenario_notes(s0()))

    def test_dominance_factor_below_one(self):
        with pytest.raises(ValueError):
            UtilityBounds(1.0, 5.0, 0.5)


class TestGeneralForms:
    def test_zero(self, scenario_s0):
        caps = scenario_s0.capabilities
        assert eval_general_us(0.0, 0.0, 0.0, caps, scenario_s0.incentive_cn) == 0.0
        assert eval_general_cn(0.0, 0.0, 0.0, caps, scenario_s0.incentive_us) == 0.0

    def test_s0_us(self, scenario_s0):
        v = eval_general_us(1.0, -1.0, -1.0, scenario_s0.capabilities, scenario_s0.incentive_cn)
        assert v == pytest.approx(termwise_us(1.0, -1.0, -1.0), abs=1e-14)
        assert v == pytest.approx(-0.4738, abs=1e-3)

    def test_s0_cn(self, scenario_s0):
        v = eval_general_cn(1.0, -1.0, 1.0, scenario_s0.capabilities, scenario_s0.incentive_us)
        assert v == pytest.approx(termwise_cn(1.0, -1.0, 1.0), abs=1e-13)
        assert v == pytest.approx(4.4215, abs=1e-3)

    @settings(max_examples=100)
    @given(st.floats(-5, 5), st.floats(-5, 5))
    def test_us_collapse_when_lose_equals_status(self, u_win, u_ls):
        sc = s0()
        general = eval_general_us(u_win, u_ls, u_ls, sc.capabilities, sc.incentive_cn)
        simplified = eval_us_perfect(StrategyProfile(u_win, -u_ls), sc, check_box=False)
        assert general == pytest.approx(simplified, abs=1e-12)

    @settings(max_examples=100)
    @given(st.floats(-5, 5), st.floats(-5, 5))
    def test_cn_collapse_when_status_equals_win(self, u_win, u_lose):
        sc = s0()
        general = eval_general_cn(u_win, u_lose, u_win, sc.capabilities, sc.incentive_us)
        simplified = eval_cn_perfect(StrategyProfile(-u_lose, u_win), sc, check_box=False)
        assert general == pytest.approx(simplified, abs=1e-12)


class TestPerfect:
    def test_s0_us(self, scenario_s0):
        v = eval_us_perfect(StrategyProfile(1.0, 1.0), scenario_s0)
        assert v == pytest.approx(S0_P1_MIN, abs=1e-14)
        assert v == pytest.approx(termwise_us(1.0, -1.0, -1.0), abs=1e-14)
        assert v == pytest.approx(-0.4738, abs=1e-3)

    def test_s0_us_smaller_win_is_better(self, scenario_s0):
        assert eval_us_perfect(StrategyProfile(0.5, 1.0), scenario_s0) > eval_us_perfect(StrategyProfile(1.0, 1.0),
                                                                                        scenario_s0)

    def test_s0_cn(self, scenario_s0):
        assert eval_cn_perfect(StrategyProfile(1.0, 1.0), scenario_s0) == pytest.approx(S0_P2_MAX, abs=1e-13)
        assert eval_cn_perfect(StrategyProfile(1.0, 5.0), scenario_s0) == pytest.approx(S0_P2_MIN, abs=1e-13)
        assert eval_cn_perfect(StrategyProfile(1.0, 5.0), scenario_s0) == pytest.approx(-7.042, abs=1e-3)

    def test_zero_point(self, scenario_s0):
        zero = StrategyProfile(0.0, 0.0)
        assert eval_us_perfect(zero, scenario_s0, check_box=False) == 0.0
        assert eval_cn_perfect(zero, scenario_s0, check_box=False) == 0.0

    @pytest.mark.parametrize("profile", [StrategyProfile(0.0, 1.0), StrategyProfile(1.5, 1.0),
                                         StrategyProfile(1.0, 0.5), StrategyProfile(1.0, 5.5)])
    def test_box_rejected(self, scenario_s0, profile):
        with pytest.raises(ScenarioError):
            eval_us_perfect(profile, scenario_s0)
        with pytest.raises(ScenarioError):
            eval_cn_perfect(profile, scenario_s0)

    def test_derived_identities(self):
        p = StrategyProfile(0.7, 3.0)
        assert p.us_status == p.us_lose == -3.0
        assert p.cn_status == 3.0 and p.cn_lose == -0.7

    def test_us_monotone_in_own_utility(self, scenario_s0):
        u = np.linspace(0, 1, 102)[1:-1]
        h = 1e-6
        f = [eval_us_perfect(StrategyProfile(x, 2.0), scenario_s0, check_box=False) for x in np.r_[u - h, u + h]]
        fd = (np.array(f[len(u):]) - np.array(f[:len(u)])) / (2 * h)
        assert len(fd) >= 100 and np.all(fd < 0)

    def test_cn_monotone_in_own_utility(self, scenario_s0):
        u = np.linspace(1, 5, 150)
        vals = [eval_cn_perfect(StrategyProfile(0.4, x), scenario_s0) for x in u]
        assert np.all(np.diff(vals) < 0)


class TestIncomplete:
    def test_zero_shift_matches_perfect(self):
        zero = NoiseSpec(PdfSpec("uniform", {}), ShiftSpec("affine", {"m0": 0.0, "m1": 0.0}))
        sc = s0(noise=True)
        object.__setattr__(sc, "noise_cn", zero)  # bypass shift validation for the degenerate case
        object.__setattr__(sc, "noise_us", zero)
        p = StrategyProfile(0.6, 2.0)
        assert eval_us_incomplete(p, sc) == pytest.approx(eval_us_perfect(p, sc), abs=1e-13)
        assert eval_cn_incomplete(p, sc) == pytest.approx(eval_cn_perfect(p, sc), abs=1e-13)

    def test_s0_values(self, scenario_s0_noise):
        p = StrategyProfile(1.0, 1.0)
        us = eval_us_incomplete(p, scenario_s0_noise)
        cn = eval_cn_incomplete(p, scenario_s0_noise)
        assert us == pytest.approx(S0_P1_MIN + 20 * 0.05, abs=1e-12)
        assert us == pytest.approx(0.5262, abs=2e-3)
        assert cn == pytest.approx(S0_P2_MAX + 60 * 0.05, abs=1e-12)
        assert cn == pytest.approx(7.4215, abs=2e-3)

    def test_missing_noise(self, scenario_s0):
        with pytest.raises(ValueError, match="noise"):
            eval_us_incomplete(StrategyProfile(1.0, 1.0), scenario_s0)

    def test_separability_random(self):
        # mass residual (validated <= 1e-9) times C * I(u) bounds the gap
        rng = np.random.default_rng(0)
        for sc in random_scenarios(10, seed=3):
            em = expect_shift(sc.noise_cn, sc.integrator)
            en = expect_shift(sc.noise_us, sc.integrator)
            for _ in range(10):
                p = StrategyProfile(rng.uniform(1e-6, sc.bounds.c_low), rng.uniform(sc.bounds.c_low, sc.bounds.c_high))
                assert eval_us_incomplete(p, sc) - eval_us_perfect(p, sc) == pytest.approx(
                    sc.capabilities.c_cn * em, abs=2e-9 * sc.capabilities.c_cn)
                assert eval_cn_incomplete(p, sc) - eval_cn_perfect(p, sc) == pytest.approx(
                    sc.capabilities.c_us * en, abs=2e-9 * sc.capabilities.c_us)

    def test_gauss_rule_same_values(self, scenario_s0_noise):
        p = StrategyProfile(0.3, 4.0)
        g = IntegratorConfig("gauss-legendre")
        assert eval_us_incomplete(p, scenario_s0_noise, config=g) == pytest.approx(
            eval_us_incomplete(p, scenario_s0_noise), abs=1e-12)


class TestScenarioValidation:
    def test_collects_every_issue(self):
        with pytest.raises(ScenarioError) as err:
            Scenario(
                Capabilities(60, 20),
                UtilityBounds(1, 80),
                IncentiveSpec("odd-sigmoid", {"k": 1.5}, 20),
                IncentiveSpec("odd-sigmoid", {"k": 0.2}, 60),
                affine_noise(),
                None,
            )
        paths = {i.path for i in err.value.issues}
        assert {"bounds.c_high", "incentive_cn.params", "noise_us"} <= paths

    def test_owner_capability_mismatch(self):
        with pytest.raises(ScenarioError, match="owner_capability"):
            Scenario(Capabilities(60, 20), UtilityBounds(1, 5),
                     IncentiveSpec("odd-sigmoid", {"k": 0.2}, 60), IncentiveSpec("odd-sigmoid", {"k": 0.2}, 60))

    def test_boundary_epsilon_default(self, scenario_s0):
        assert scenario_s0.boundary_epsilon == pytest.approx(1e-6)

    def test_boundary_epsilon_too_large(self):
        with pytest.raises(ScenarioError, match="boundary_epsilon"):
            s0(settings=SolverSettings(boundary_epsilon=2.0))

    def test_bad_pdf_mass_rejected(self):
        pdf = PdfSpec("polynomial-bump", {"a": 4, "b": 4})
        noise = NoiseSpec(pdf, ShiftSpec("affine", {"m0": 0, "m1": 0.1}))
        base = s0()
        with pytest.raises(ScenarioError, match="noise_cn.pdf"):
            Scenario(base.capabilities, base.bounds, base.incentive_cn, base.incentive_us, noise, noise)
        ok = Scenario(base.capabilities, base.bounds, base.incentive_cn, base.incentive_us, noise, noise,
                      SolverSettings(integrator=IntegratorConfig(nodes=513)))
        assert ok.has_noise

    def test_seed_propagates_to_integrator(self):
        sc = s0(settings=SolverSettings(seed=9))
        assert sc.settings.integrator.seed == 9

    def test_shifted_range_noted_not_failed(self):
        sc = s0(noise=True, m1=5.0)
        assert any("outside (-1, 1)" in n for n in scenario_notes(sc))
