"""Scenario types and expected-net-gain evaluators for the two players.

The free decision variables are the two winning utilities.  Everything else
follows from the payoff identities::

    US status quo = US lose = -u_win_cn      CN status quo = u_win_cn
    CN lose       = -u_win_us
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

from .incentives import IncentiveSpec, NoiseSpec, validate_incentive, validate_noise
from .integrate import IntegratorConfig, expect_noisy_incentive, expect_shift, pdf_mass

Player = Literal["us", "cn"]
Mode = Literal["perfect", "incomplete"]
PLAYERS = ("us", "cn")
MODES = ("perfect", "incomplete")

PDF_MASS_TOL = 1e-9


@dataclass(frozen=True)
class Issue:
    path: str
    message: str

    def __str__(self):
        return f"{self.path}: {self.message}"


class ScenarioError(ValueError):
    """Raised with every invariant violation found, not just the first."""

    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("; ".join(str(i) for i in self.issues))


def _positive(name, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")


@dataclass(frozen=True)
class Capabilities:
    c_us: float
    c_cn: float

    def __post_init__(self):
        _positive("c_us", self.c_us)
        _positive("c_cn", self.c_cn)
        if not self.c_us > self.c_cn:
            raise ValueError(f"US capability must exceed China's (c_us={self.c_us}, c_cn={self.c_cn})")

    @property
    def alpha(self) -> float:
        return win_probabilities(self)[0]

    @property
    def beta(self) -> float:
        return win_probabilities(self)[1]


def win_probabilities(caps: Capabilities) -> tuple[float, float]:
    """US and China win probabilities as capability shares.

    China's share is taken as the complement so the pair sums to exactly 1;
    it is within one ulp of ``c_cn / (c_us + c_cn)``.
    """
    alpha = caps.c_us / (caps.c_us + caps.c_cn)
    return alpha, 1.0 - alpha


@dataclass(frozen=True)
class UtilityBounds:
    c_low: float
    c_high: float
    dominance_factor: float = 10.0

    def __post_init__(self):
        _positive("c_low", self.c_low)
        _positive("c_high", self.c_high)
        if isinstance(self.dominance_factor, bool) or not isinstance(self.dominance_factor, (int, float)) \
                or not math.isfinite(self.dominance_factor) or self.dominance_factor < 1:
            raise ValueError(f"dominance_factor must be a finite number >= 1, got {self.dominance_factor!r}")
        if not self.c_low < self.c_high:
            raise ValueError(f"c_low must be below c_high (c_low={self.c_low}, c_high={self.c_high})")

    @property
    def high_dominates(self) -> bool:
        """Whether c_high is "much greater" than c_low under the dominance factor."""
        return self.c_high >= self.dominance_factor * self.c_low


@dataclass(frozen=True)
class StrategyProfile:
    u_win_us: float
    u_win_cn: float

    @property
    def us_status(self) -> float:
        return -self.u_win_cn

    @property
    def us_lose(self) -> float:
        return -self.u_win_cn

    @property
    def cn_status(self) -> float:
        return self.u_win_cn

    @property
    def cn_lose(self) -> float:
        return -self.u_win_us


@dataclass(frozen=True)
class SolverSettings:
    grid: int = 201
    tolerance: float = 1e-6
    boundary_epsilon: float | None = None
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.grid, bool) or not isinstance(self.grid, int) or self.grid < 3:
            raise ValueError(f"grid must be an integer >= 3, got {self.grid!r}")
        _positive("tolerance", self.tolerance)
        if self.boundary_epsilon is not None:
            _positive("boundary_epsilon", self.boundary_epsilon)
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed!r}")
        if self.integrator.seed != self.seed:
            object.__setattr__(self, "integrator", replace(self.integrator, seed=self.seed))


@dataclass(frozen=True)
class Scenario:
    capabilities: Capabilities
    bounds: UtilityBounds
    incentive_cn: IncentiveSpec
    incentive_us: IncentiveSpec
    noise_cn: NoiseSpec | None = None
    noise_us: NoiseSpec | None = None
    settings: SolverSettings = field(default_factory=SolverSettings)

    def __post_init__(self):
        issues = scenario_issues(self)
        if issues:
            raise ScenarioError(issues)

    @property
    def alpha(self) -> float:
        return self.capabilities.alpha

    @property
    def beta(self) -> float:
        return self.capabilities.beta

    @property
    def has_noise(self) -> bool:
        return self.noise_cn is not None

    @property
    def boundary_epsilon(self) -> float:
        eps = self.settings.boundary_epsilon
        return 1e-6 * self.bounds.c_low if eps is None else eps

    @property
    def integrator(self) -> IntegratorConfig:
        return self.settings.integrator.deterministic()

    def own_interval(self, player: Player) -> tuple[float, float]:
        """Closed search interval; the US lower end stands in for the open end 0."""
        if player == "us":
            return self.boundary_epsilon, self.bounds.c_low
        return self.bounds.c_low, self.bounds.c_high

    def opponent_interval(self, player: Player) -> tuple[float, float]:
        return self.own_interval("cn" if player == "us" else "us")

    def with_settings(self, **changes) -> Scenario:
        return replace(self, settings=replace(self.settings, **changes))


def _failure_issues(path, report):
    return [
        Issue(path, f"{c.name} axiom fails ({c.detail or 'margin ' + format(c.margin, '.6g')}"
                    f"{'' if c.worst_u is None else f', at u={c.worst_u:.6g}'})")
        for c in report.failures()
    ]


def scenario_issues(s: Scenario) -> list[Issue]:
    """Every cross-field invariant violated by an assembled scenario."""
    issues: list[Issue] = []
    caps, bounds = s.capabilities, s.bounds
    if not bounds.c_high < caps.c_us:
        issues.append(Issue("bounds.c_high", f"must be below c_us={caps.c_us}, got {bounds.c_high}"))
    eps = s.settings.boundary_epsilon
    if eps is not None and not eps < bounds.c_low:
        issues.append(Issue("solver.boundary_epsilon", f"must be below c_low={bounds.c_low}, got {eps}"))
    for name, spec, cap in (("incentive_cn", s.incentive_cn, caps.c_cn), ("incentive_us", s.incentive_us, caps.c_us)):
        if spec.owner_capability != cap:
            issues.append(Issue(name, f"owner_capability {spec.owner_capability} does not match capability {cap}"))
            continue
        issues.extend(_failure_issues(f"{name}.params", validate_incentive(spec, bounds.c_high)))
    if (s.noise_cn is None) != (s.noise_us is None):
        issues.append(Issue("noise_us" if s.noise_us is None else "noise_cn",
                            "noise must be specified for both players or neither"))
    for name, noise in (("noise_cn", s.noise_cn), ("noise_us", s.noise_us)):
        if noise is None:
            continue
        issues.extend(_failure_issues(f"{name}.shift.params", validate_noise(noise)))
        try:
            mass = pdf_mass(noise.pdf, s.settings.integrator)
        except ValueError as exc:
            issues.append(Issue(f"{name}.pdf", str(exc)))
            continue
        if abs(mass - 1.0) > PDF_MASS_TOL:
            issues.append(Issue(f"{name}.pdf", f"integrates to {mass:.12g} under the configured rule, not 1"))
    return issues


def scenario_notes(s: Scenario) -> list[str]:
    """Non-fatal observations: unmet qualitative assumptions, shifted ranges."""
    notes = []
    df = s.bounds.dominance_factor
    if not s.bounds.high_dominates:
        notes.append(f"c_high={s.bounds.c_high} is not dominant over c_low={s.bounds.c_low} (factor {df})")
    if s.capabilities.c_cn < df * s.bounds.c_low:
        notes.append(f"c_cn={s.capabilities.c_cn} is not dominant over c_low (factor {df})")
    for name, inc, noise in (("incentive_cn", s.incentive_cn, s.noise_cn), ("incentive_us", s.incentive_us, s.noise_us)):
        if noise is None:
            continue
        lo = float(inc(-s.bounds.c_high)) - float(noise.shift(1.0))
        hi = float(inc(s.bounds.c_high)) - float(noise.shift(0.0))
        if lo <= -1.0 or hi >= 1.0:
            notes.append(f"{name} shifted by its noise reaches [{lo:.6g}, {hi:.6g}], outside (-1, 1)")
    return notes


# ---------------------------------------------------------------------------
# general forms (kept as oracles for the simplified forms)
# ---------------------------------------------------------------------------


def eval_general_us(u_win, u_lose, u_status, caps: Capabilities, incentive_cn: IncentiveSpec):
    alpha, _ = win_probabilities(caps)
    c = caps.c_cn
    return (alpha * (u_win - c * incentive_cn(u_win) - u_status)
            + (1.0 - alpha) * (u_lose - c * incentive_cn(u_lose) - u_status))


def eval_general_cn(u_win, u_lose, u_status, caps: Capabilities, incentive_us: IncentiveSpec):
    _, beta = win_probabilities(caps)
    c = caps.c_us
    return (beta * (u_win - c * incentive_us(u_win) - u_status)
            + (1.0 - beta) * (u_lose - c * incentive_us(u_lose) - u_status))


# ---------------------------------------------------------------------------
# simplified forms, vectorised over the decision variables
# ---------------------------------------------------------------------------


def us_gain(u_win_us, u_win_cn, scenario: Scenario, mode: Mode = "perfect", config: IntegratorConfig | None = None,
            capabilities: Capabilities | None = None):
    caps, inc = capabilities or scenario.capabilities, scenario.incentive_cn
    alpha, _ = win_probabilities(caps)
    u_status = -np.asarray(u_win_cn, dtype=float)
    if mode == "perfect":
        cost_win, cost_status = inc(u_win_us), inc(u_status)
    else:
        noise = _require_noise(scenario.noise_cn, "noise_cn")
        cfg = config or scenario.integrator
        cost_win = expect_noisy_incentive(inc, noise, u_win_us, cfg)
        cost_status = expect_noisy_incentive(inc, noise, u_status, cfg)
    return alpha * (u_win_us - caps.c_cn * cost_win - u_status) - (1.0 - alpha) * caps.c_cn * cost_status


def cn_gain(u_win_cn, u_win_us, scenario: Scenario, mode: Mode = "perfect", config: IntegratorConfig | None = None,
            capabilities: Capabilities | None = None):
    caps, psi = capabilities or scenario.capabilities, scenario.incentive_us
    _, beta = win_probabilities(caps)
    u_lose = -np.asarray(u_win_us, dtype=float)
    if mode == "perfect":
        cost_win, cost_lose = psi(u_win_cn), psi(u_lose)
    else:
        noise = _require_noise(scenario.noise_us, "noise_us")
        cfg = config or scenario.integrator
        cost_win = expect_noisy_incentive(psi, noise, u_win_cn, cfg)
        cost_lose = expect_noisy_incentive(psi, noise, u_lose, cfg)
    return -beta * caps.c_us * cost_win + (1.0 - beta) * (u_lose - caps.c_us * cost_lose - u_win_cn)


def gain(player: Player, mode: Mode, scenario: Scenario, own, opponent, config: IntegratorConfig | None = None,
         capabilities: Capabilities | None = None):
    """Expected net gain of ``player`` as a function of its own winning utility."""
    if player == "us":
        return us_gain(own, opponent, scenario, mode, config, capabilities)
    if player == "cn":
        return cn_gain(own, opponent, scenario, mode, config, capabilities)
    raise ValueError(f"unknown player {player!r}")


def gain_partial(player: Player, mode: Mode, scenario: Scenario, own, config: IntegratorConfig | None = None):
    """Analytic derivative of ``gain`` in the player's own winning utility.

    Under incomplete information the shift drops out of the derivative and
    only the density mass multiplies the incentive slope.
    """
    mass = 1.0
    if mode == "incomplete":
        noise = _require_noise(scenario.noise_cn if player == "us" else scenario.noise_us, "noise")
        mass = pdf_mass(noise.pdf, config or scenario.integrator)
    caps = scenario.capabilities
    if player == "us":
        return scenario.alpha * (1.0 - caps.c_cn * scenario.incentive_cn.derivative(own) * mass)
    return -scenario.beta * caps.c_us * scenario.incentive_us.derivative(own) * mass - (1.0 - scenario.beta)


def _require_noise(noise, name):
    if noise is None:
        raise ValueError(f"incomplete-information evaluation needs {name}; the scenario has no noise")
    return noise


def check_profile(profile: StrategyProfile, scenario: Scenario) -> None:
    b = scenario.bounds
    problems = []
    if not 0.0 < profile.u_win_us <= b.c_low:
        problems.append(Issue("u_win_us", f"must lie in (0, {b.c_low}], got {profile.u_win_us}"))
    if not b.c_low <= profile.u_win_cn <= b.c_high:
        problems.append(Issue("u_win_cn", f"must lie in [{b.c_low}, {b.c_high}], got {profile.u_win_cn}"))
    if problems:
        raise ScenarioError(problems)


def eval_us_perfect(profile: StrategyProfile, scenario: Scenario, check_box: bool = True) -> float:
    if check_box:
        check_profile(profile, scenario)
    return float(us_gain(profile.u_win_us, profile.u_win_cn, scenario, "perfect"))


def eval_cn_perfect(profile: StrategyProfile, scenario: Scenario, check_box: bool = True) -> float:
    if check_box:
        check_profile(profile, scenario)
    return float(cn_gain(profile.u_win_cn, profile.u_win_us, scenario, "perfect"))


def eval_us_incomplete(profile: StrategyProfile, scenario: Scenario, check_box: bool = True,
                       config: IntegratorConfig | None = None) -> float:
    if check_box:
        check_profile(profile, scenario)
    return float(us_gain(profile.u_win_us, profile.u_win_cn, scenario, "incomplete", config))


def eval_cn_incomplete(profile: StrategyProfile, scenario: Scenario, check_box: bool = True,
                       config: IntegratorConfig | None = None) -> float:
    if check_box:
        check_profile(profile, scenario)
    return float(cn_gain(profile.u_win_cn, profile.u_win_us, scenario, "incomplete", config))


def shift_offset(player: Player, scenario: Scenario, config: IntegratorConfig | None = None) -> float:
    """Opponent capability times the expected shift: incomplete minus perfect gain."""
    cfg = config or scenario.integrator
    if player == "us":
        return scenario.capabilities.c_cn * expect_shift(_require_noise(scenario.noise_cn, "noise_cn"), cfg)
    return scenario.capabilities.c_us * expect_shift(_require_noise(scenario.noise_us, "noise_us"), cfg)
