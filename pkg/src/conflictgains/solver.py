"""One-dimensional extremum search, best responses and proposition checks.

Each player optimises its own winning utility with the opponent's held fixed.
A grid scan brackets the extremum and golden-section search tightens the
bracketing cell; grid endpoints always stay in the candidate set, so a
monotone objective lands exactly on an interval end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

from .integrate import expect_shift
from .model import (
    MODES,
    PLAYERS,
    Capabilities,
    Mode,
    Player,
    Scenario,
    ScenarioError,
    gain,
    gain_partial,
    scenario_issues,
    scenario_notes,
    shift_offset,
)

Kind = Literal["min", "max"]
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
FD_STEP = 1e-5

P4_NOTE = (
    "statement asserts a best response exists for China while the proof text says it does not; "
    "the attained maximum at c_low supports the statement"
)


def golden_section(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12,
                   max_iter: int = 200) -> tuple[float, float]:
    """Minimise a unimodal ``f`` on [lo, hi]; returns (x, f(x))."""
    a, b = lo, hi
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= tol * max(1.0, abs(a) + abs(b)):
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


# ---------------------------------------------------------------------------
# closed-form extremum values
# ---------------------------------------------------------------------------


def analytic_extremum(formula_id: str, scenario: Scenario, fixed_opponent: float | None = None) -> float:
    """Closed-form extremum values at the status-quo point.

    ``P1-min``/``P3-min`` and ``P2-max``/``P4-max`` assume the opponent sits
    at c_low; the minima for China take the US utility as an argument.
    """
    caps, b = scenario.capabilities, scenario.bounds
    a, be = scenario.alpha, scenario.beta
    lo, hi = b.c_low, b.c_high
    inc, psi = scenario.incentive_cn, scenario.incentive_us
    u_lose = -(lo if fixed_opponent is None else fixed_opponent)
    if formula_id == "P1-min":
        return 2 * a * lo + (1 - 2 * a) * caps.c_cn * float(inc(lo))
    if formula_id == "P3-min":
        em = expect_shift(scenario.noise_cn, scenario.integrator)
        return 2 * a * lo + caps.c_cn * (em + (1 - 2 * a) * float(inc(lo)))
    if formula_id == "P2-max":
        return (1 - 2 * be) * caps.c_us * float(psi(lo)) - 2 * (1 - be) * lo
    if formula_id == "P4-max":
        en = expect_shift(scenario.noise_us, scenario.integrator)
        return caps.c_us * ((1 - 2 * be) * float(psi(lo)) + en) - 2 * (1 - be) * lo
    if formula_id == "P2-min":
        return caps.c_us * (-be * float(psi(hi)) - (1 - be) * float(psi(u_lose))) + (1 - be) * (u_lose - hi)
    if formula_id == "P4-min":
        en = expect_shift(scenario.noise_us, scenario.integrator)
        return (-be * caps.c_us * float(psi(hi)) + caps.c_us * en
                + (1 - be) * (u_lose - caps.c_us * float(psi(u_lose)) - hi))
    raise ValueError(f"unknown formula id {formula_id!r}")


_FORMULAS = {
    ("us", "perfect", "min"): "P1-min",
    ("us", "incomplete", "min"): "P3-min",
    ("cn", "perfect", "max"): "P2-max",
    ("cn", "perfect", "min"): "P2-min",
    ("cn", "incomplete", "max"): "P4-max",
    ("cn", "incomplete", "min"): "P4-min",
}
# formulas whose closed form holds only with the opponent at c_low
_STATUS_QUO_ONLY = {"P1-min", "P3-min", "P2-max", "P4-max"}


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExtremumReport:
    player: str
    mode: str
    kind: str
    attained: bool
    arg: dict
    numeric_value: float
    analytic_value: float | None = None
    analytic_formula_id: str | None = None
    gap: float | None = None

    @property
    def own_arg(self) -> float:
        return self.arg["u_win_us" if self.player == "us" else "u_win_cn"]


@dataclass(frozen=True)
class GradientReport:
    player: str
    mode: str
    points: int
    max_abs_error: float
    max_partial: float
    worst_location: float
    all_negative: bool
    passed: bool


@dataclass(frozen=True)
class BestResponse:
    exists: bool
    arg: float | None
    value: float


@dataclass(frozen=True)
class SignClaim:
    formula_id: str
    claim: str  # "<0", ">0", "likely<0"
    value: float
    holds: bool
    margin: float
    assumptions_met: bool
    strict: bool
    note: str = ""

    @property
    def status(self) -> str:
        # a violated claim only counts as a failure when its premises hold
        if not self.strict or (not self.holds and not self.assumptions_met):
            return "not-applicable"
        return "holds" if self.holds else "fails"


@dataclass(frozen=True)
class SignReport:
    claims: tuple[SignClaim, ...]

    def get(self, formula_id: str) -> SignClaim:
        for c in self.claims:
            if c.formula_id == formula_id:
                return c
        raise KeyError(formula_id)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    numeric: float | None = None
    analytic: float | None = None
    gap: float | None = None


@dataclass(frozen=True)
class PropositionReport:
    proposition: str
    monotonicity_pass: bool
    extremum_gap: float
    sign_claim: str
    best_response: str
    passed: bool
    gradient: GradientReport | None = None
    extrema: tuple[ExtremumReport, ...] = ()
    best: BestResponse | None = None
    sign: SignClaim | None = None
    checks: tuple[Check, ...] = ()
    notes: tuple[str, ...] = field(default=())


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def _check_player_mode(player, mode, scenario):
    if player not in PLAYERS:
        raise ValueError(f"unknown player {player!r}; expected one of {PLAYERS}")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    if mode == "incomplete" and not scenario.has_noise:
        raise ValueError("incomplete-information mode needs noise specs for both players")


def _default_opponent(scenario: Scenario, fixed_opponent: float | None) -> float:
    return scenario.bounds.c_low if fixed_opponent is None else float(fixed_opponent)


def _check_opponent(player, scenario, fixed):
    b = scenario.bounds
    if player == "us" and not b.c_low <= fixed <= b.c_high:
        raise ValueError(f"fixed u_win_cn must lie in [{b.c_low}, {b.c_high}], got {fixed}")
    if player == "cn" and not 0.0 < fixed <= b.c_low:
        raise ValueError(f"fixed u_win_us must lie in (0, {b.c_low}], got {fixed}")


def _profile(player, own, opponent):
    if player == "us":
        return {"u_win_us": float(own), "u_win_cn": float(opponent)}
    return {"u_win_us": float(opponent), "u_win_cn": float(own)}


def gradient_check(player: Player, mode: Mode, scenario: Scenario, points: int = 100,
                   fixed_opponent: float | None = None, step: float = FD_STEP,
                   tolerance: float = 1e-6) -> GradientReport:
    """Compare central differences of the gain with its analytic partial at interior points."""
    _check_player_mode(player, mode, scenario)
    opp = _default_opponent(scenario, fixed_opponent)
    lo, hi = scenario.own_interval(player)
    if player == "us":
        lo = 0.0
    x = np.linspace(lo, hi, points + 2)[1:-1]
    h = step * max(1.0, hi)
    fd = (gain(player, mode, scenario, x + h, opp) - gain(player, mode, scenario, x - h, opp)) / (2.0 * h)
    exact = np.asarray(gain_partial(player, mode, scenario, x), dtype=float) * np.ones_like(x)
    err = np.abs(fd - exact)
    i_max = int(np.argmax(exact))
    all_negative = bool(np.all(exact < 0.0) and np.all(fd < 0.0))
    return GradientReport(
        player=player,
        mode=mode,
        points=points,
        max_abs_error=float(err.max()),
        max_partial=float(exact[i_max]),
        worst_location=float(x[i_max]),
        all_negative=all_negative,
        passed=all_negative and float(err.max()) < tolerance,
    )


def _locate(f, xs, values, kind, tol):
    sign = 1.0 if kind == "min" else -1.0
    obj = sign * values
    i = int(np.argmin(obj))
    lo_i, hi_i = max(i - 1, 0), min(i + 1, len(xs) - 1)
    x_g, f_g = golden_section(lambda x: sign * f(x), float(xs[lo_i]), float(xs[hi_i]), tol=tol)
    candidates = [(float(obj[0]), 0, float(xs[0])), (float(obj[-1]), 1, float(xs[-1])),
                  (float(obj[i]), 2, float(xs[i])), (f_g, 3, x_g)]
    # ties resolve toward grid points, endpoints first
    best = min(candidates)
    return best[2], sign * best[0]


def solve_extrema(player: Player, mode: Mode, scenario: Scenario,
                  fixed_opponent: float | None = None) -> tuple[ExtremumReport, ExtremumReport]:
    """Minimum and maximum of a player's gain over its own feasible interval."""
    _check_player_mode(player, mode, scenario)
    opp = _default_opponent(scenario, fixed_opponent)
    _check_opponent(player, scenario, opp)
    lo, hi = scenario.own_interval(player)
    if not lo < hi:
        raise ValueError(f"empty search interval [{lo}, {hi}]")
    xs = np.linspace(lo, hi, scenario.settings.grid)
    values = np.asarray(gain(player, mode, scenario, xs, opp), dtype=float)

    def f(x):
        return float(gain(player, mode, scenario, x, opp))

    at_status_quo = math.isclose(opp, scenario.bounds.c_low, rel_tol=0.0, abs_tol=1e-12 * scenario.bounds.c_low)
    reports = []
    for kind in ("min", "max"):
        x, v = _locate(f, xs, values, kind, tol=1e-12)
        # the US interval starts at a stand-in for the excluded point 0
        attained = not (player == "us" and x == lo)
        fid = _FORMULAS.get((player, mode, kind))
        analytic = None
        if fid is not None and (fid not in _STATUS_QUO_ONLY or at_status_quo):
            analytic = analytic_extremum(fid, scenario, opp)
        else:
            fid = None
        reports.append(ExtremumReport(
            player=player, mode=mode, kind=kind, attained=attained, arg=_profile(player, x, opp),
            numeric_value=v, analytic_value=analytic, analytic_formula_id=fid,
            gap=None if analytic is None else abs(v - analytic),
        ))
    return reports[0], reports[1]


def best_response(player: Player, mode: Mode, scenario: Scenario,
                  fixed_opponent: float | None = None) -> BestResponse:
    """Attained maximiser of the player's gain, or ``exists=False`` with the supremum."""
    _, mx = solve_extrema(player, mode, scenario, fixed_opponent)
    return BestResponse(exists=mx.attained, arg=mx.own_arg if mx.attained else None, value=mx.numeric_value)


def check_sign_conditions(scenario: Scenario) -> SignReport:
    """Evaluate the sign claims of the closed-form extrema at the status-quo point."""
    b, caps = scenario.bounds, scenario.capabilities
    df = b.dominance_factor
    cn_dominant = caps.c_cn >= df * b.c_low
    high_ok = b.high_dominates and b.c_high < caps.c_us
    claims = []

    def add(fid, claim, strict, assumptions, note=""):
        v = analytic_extremum(fid, scenario)
        margin = v if claim == ">0" else -v
        claims.append(SignClaim(fid, claim, v, margin > 0, margin, assumptions, strict, note))

    add("P1-min", "<0", True, cn_dominant, "" if cn_dominant else "c_cn is not dominant over c_low")
    add("P2-max", ">0", True, high_ok, "" if high_ok else "c_high is not dominant over c_low")
    add("P2-min", "likely<0", False, high_ok)
    if scenario.has_noise:
        add("P3-min", "likely<0", False, cn_dominant)
        add("P4-max", ">0", False, high_ok)
        add("P4-min", "likely<0", False, high_ok)
    return SignReport(tuple(claims))


def _arg_ok(report: ExtremumReport, expected: float, scenario: Scenario) -> bool:
    return abs(report.own_arg - expected) <= scenario.settings.tolerance * max(1.0, scenario.bounds.c_high)


def _proposition(name, player, mode, scenario, signs, points) -> PropositionReport:
    b = scenario.bounds
    tol = scenario.settings.tolerance
    grad = gradient_check(player, mode, scenario, points)
    mn, mx = solve_extrema(player, mode, scenario, b.c_low)
    br = best_response(player, mode, scenario, b.c_low)
    gaps = [r.gap for r in (mn, mx) if r.gap is not None]
    gap = max(gaps) if gaps else 0.0

    def value_check(r: ExtremumReport, expected_arg: float | None) -> Check:
        if expected_arg is None:
            # the US supremum: only the open-endpoint location is claimed
            ok = not r.attained
        else:
            ok = r.attained and _arg_ok(r, expected_arg, scenario) and (r.gap is None or r.gap <= tol)
        return Check(f"{r.kind}-value", ok, r.numeric_value, r.analytic_value, r.gap)

    checks = [Check("monotonicity", grad.passed, grad.max_partial, None, grad.max_abs_error)]
    notes = []
    if player == "us":
        checks += [value_check(mn, b.c_low), value_check(mx, None)]
        checks.append(Check("best-response", not br.exists, br.value))
        sign = signs.get("P1-min" if mode == "perfect" else "P3-min")
    else:
        checks += [value_check(mn, b.c_high), value_check(mx, b.c_low)]
        br_ok = br.exists and br.arg is not None and abs(br.arg - b.c_low) <= tol * max(1.0, b.c_high)
        checks.append(Check("best-response", br_ok, br.arg))
        sign = signs.get("P2-max" if mode == "perfect" else "P4-max")
    if mode == "incomplete":
        perfect_mn, perfect_mx = solve_extrema(player, "perfect", scenario, b.c_low)
        offset = shift_offset(player, scenario)
        off_err = max(abs(mn.numeric_value - perfect_mn.numeric_value - offset),
                      abs(mx.numeric_value - perfect_mx.numeric_value - offset))
        checks.append(Check("shift-offset", off_err <= tol, mn.numeric_value - perfect_mn.numeric_value,
                            offset, off_err))
    for c in signs.claims:
        if c.formula_id in {r.analytic_formula_id for r in (mn, mx)} and not c.strict:
            notes.append(f"{c.formula_id} {c.claim}: value {c.value:.12g}, margin {c.margin:.6g}")
    if sign.strict:
        checks.append(Check("sign", sign.status != "fails", sign.value, None, sign.margin))
        notes.append(f"{sign.formula_id} {sign.claim}: value {sign.value:.12g}, margin {sign.margin:.6g}")
        if not sign.assumptions_met:
            notes.append(f"{sign.formula_id} scenario assumptions unmet: {sign.note}")
    if name == "P4":
        notes.append(P4_NOTE)
    return PropositionReport(
        proposition=name,
        monotonicity_pass=grad.passed,
        extremum_gap=gap,
        sign_claim=sign.status,
        best_response="exists" if br.exists else "not-attained",
        passed=all(c.passed for c in checks),
        gradient=grad,
        extrema=(mn, mx),
        best=br,
        sign=sign,
        checks=tuple(checks),
        notes=tuple(notes),
    )


def _not_applicable(name) -> PropositionReport:
    return PropositionReport(
        proposition=name, monotonicity_pass=False, extremum_gap=0.0, sign_claim="not-applicable",
        best_response="not-attained", passed=True,
        notes=("scenario has no noise specs; incomplete-information check not applicable",),
    )


PROPOSITIONS = (("P1", "us", "perfect"), ("P2", "cn", "perfect"), ("P3", "us", "incomplete"), ("P4", "cn", "incomplete"))


def verify_propositions(scenario: Scenario, points: int = 100, executor=None) -> list[PropositionReport]:
    """Run the gradient, extremum, best-response and sign checks for all four propositions.

    ``executor`` (anything with ``map``) fans the propositions out; results
    come back in proposition order regardless of scheduling.
    """
    issues = scenario_issues(scenario)
    if issues:
        raise ScenarioError(issues)
    signs = check_sign_conditions(scenario)
    notes = scenario_notes(scenario)

    def run(item):
        name, player, mode = item
        if mode == "incomplete" and not scenario.has_noise:
            return _not_applicable(name)
        rep = _proposition(name, player, mode, scenario, signs, points)
        if notes:
            rep = PropositionReport(**{**rep.__dict__, "notes": rep.notes + tuple(notes)})
        return rep

    mapper = executor.map if executor is not None else map
    return list(mapper(run, PROPOSITIONS))


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

AXES = ("own-utility", "opponent-utility", "capability-ratio")


@dataclass(frozen=True)
class Series:
    player: str
    mode: str
    axis: str
    x: tuple[float, ...]
    value: tuple[float, ...]


def sweep(player: Player, mode: Mode, scenario: Scenario, axis: str, grid: int,
          fixed_opponent: float | None = None, own: float | None = None,
          ratio_range: tuple[float, float] | None = None) -> Series:
    """Gain along one axis with the remaining inputs held fixed.

    The capability-ratio axis rescales c_us against a fixed c_cn and
    recomputes the win probabilities at each point; the default range runs
    from 1.1 to twice the scenario's ratio.
    """
    _check_player_mode(player, mode, scenario)
    if axis not in AXES:
        raise ValueError(f"unknown sweep axis {axis!r}; expected one of {AXES}")
    if isinstance(grid, bool) or not isinstance(grid, int) or grid < 2:
        raise ValueError(f"grid must be an integer >= 2, got {grid!r}")
    b = scenario.bounds
    opp = _default_opponent(scenario, fixed_opponent)
    own_v = b.c_low if own is None else float(own)
    if axis == "own-utility":
        lo, hi = scenario.own_interval(player)
        x = np.linspace(lo, hi, grid)
        y = gain(player, mode, scenario, x, opp)
    elif axis == "opponent-utility":
        lo, hi = scenario.opponent_interval(player)
        x = np.linspace(lo, hi, grid)
        y = np.array([float(gain(player, mode, scenario, own_v, xi)) for xi in x])
    else:
        caps = scenario.capabilities
        r0 = caps.c_us / caps.c_cn
        lo, hi = ratio_range if ratio_range is not None else (1.1, 2.0 * r0)
        if not 1.0 < lo < hi:
            raise ValueError(f"capability ratio range must satisfy 1 < lo < hi, got ({lo}, {hi})")
        x = np.linspace(lo, hi, grid)
        y = np.array([_gain_at_ratio(player, mode, scenario, r, own_v, opp) for r in x])
    return Series(player, mode, axis, tuple(float(v) for v in x), tuple(float(v) for v in np.asarray(y)))


def _gain_at_ratio(player, mode, scenario, ratio, own, opp) -> float:
    # only c_us and the win probabilities move; the scenario is not re-validated
    caps = Capabilities(ratio * scenario.capabilities.c_cn, scenario.capabilities.c_cn)
    return float(gain(player, mode, scenario, own, opp, capabilities=caps))
