"""Incentive, shift and density families for the conflict model.

Incentive functions are odd, increasing maps into (-1, 1) whose derivative
is bounded below by ``1 / owner_capability`` and above by 1.  The bounds are
enforced on the operating interval ``[-c_high, c_high]`` only, since the
saturating families cannot meet the lower bound on the whole real line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

INCENTIVE_FAMILIES = ("odd-sigmoid", "odd-arctan-like", "linear-plus-sigmoid")
SHIFT_FAMILIES = ("affine", "power")
PDF_FAMILIES = ("uniform", "polynomial-bump")

_INCENTIVE_KEYS = {
    "odd-sigmoid": ("k",),
    "odd-arctan-like": ("k",),
    "linear-plus-sigmoid": ("k", "gamma", "scale"),
}
_SHIFT_KEYS = {"affine": ("m0", "m1"), "power": ("m0", "m1", "p")}
_PDF_KEYS = {"uniform": (), "polynomial-bump": ("a", "b")}

ODDNESS_TOL = 1e-12
AXIOM_GRID = 1000


def _check_params(kind: str, family: str, params: Mapping[str, float], keys) -> dict:
    missing = [k for k in keys if k not in params]
    extra = [k for k in params if k not in keys]
    if missing:
        raise ValueError(f"{kind} family {family!r} requires params {missing}")
    if extra:
        raise ValueError(f"{kind} family {family!r} does not take params {extra}")
    out = {}
    for k in keys:
        v = params[k]
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ValueError(f"param {k!r} must be a finite number, got {v!r}")
        out[k] = float(v)
    return out


@dataclass(frozen=True)
class AxiomCheck:
    name: str
    passed: bool
    margin: float
    worst_u: float | None = None
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    """Per-axiom outcome of a validator; ``ok`` only if every check passed."""

    subject: str
    checks: tuple[AxiomCheck, ...]
    notes: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[AxiomCheck]:
        return [c for c in self.checks if not c.passed]

    def describe(self) -> str:
        lines = [f"{self.subject}: {'pass' if self.ok else 'FAIL'}"]
        for c in self.checks:
            where = "" if c.worst_u is None else f" at u={c.worst_u:.6g}"
            lines.append(
                f"  {c.name}: {'pass' if c.passed else 'fail'} (margin {c.margin:.6g}{where}){' ' + c.detail if c.detail else ''}"
            )
        lines.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# incentive functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IncentiveSpec:
    """A parametric odd squashing function.

    ``odd-sigmoid``         I(u) = tanh(k u)
    ``odd-arctan-like``     I(u) = (2/pi) arctan(pi k u / 2)
    ``linear-plus-sigmoid`` I(u) = gamma u / scale + (1 - gamma) tanh(k u)

    Every family has slope ``k`` at the origin (blended with ``gamma/scale``
    for the last one).  The linear part keeps the derivative at least
    ``gamma / scale`` everywhere, which is what makes wide operating
    intervals feasible.
    """

    family: str
    params: Mapping[str, float]
    owner_capability: float

    def __post_init__(self):
        if self.family not in INCENTIVE_FAMILIES:
            raise ValueError(f"unknown incentive family {self.family!r}; expected one of {INCENTIVE_FAMILIES}")
        params = _check_params("incentive", self.family, self.params, _INCENTIVE_KEYS[self.family])
        for k, v in params.items():
            if v <= 0:
                raise ValueError(f"param {k!r} must be positive, got {v}")
        if self.family == "linear-plus-sigmoid" and params["gamma"] > 1:
            raise ValueError(f"param 'gamma' must lie in (0, 1], got {params['gamma']}")
        if not (isinstance(self.owner_capability, (int, float)) and self.owner_capability > 0):
            raise ValueError(f"owner_capability must be positive, got {self.owner_capability!r}")
        object.__setattr__(self, "params", params)

    def __call__(self, u):
        k = self.params["k"]
        if self.family == "odd-sigmoid":
            return np.tanh(k * u)
        if self.family == "odd-arctan-like":
            return (2.0 / math.pi) * np.arctan(0.5 * math.pi * k * u)
        g, s = self.params["gamma"], self.params["scale"]
        return g * u / s + (1.0 - g) * np.tanh(k * u)

    def derivative(self, u):
        k = self.params["k"]
        if self.family == "odd-sigmoid":
            return k / np.cosh(k * u) ** 2
        if self.family == "odd-arctan-like":
            return k / (1.0 + (0.5 * math.pi * k * u) ** 2)
        g, s = self.params["gamma"], self.params["scale"]
        return g / s + (1.0 - g) * k / np.cosh(k * u) ** 2


def eval_incentive(spec: IncentiveSpec, u):
    return spec(u)


def eval_incentive_derivative(spec: IncentiveSpec, u):
    return spec.derivative(u)


def axiom_grid(c_high: float, points: int = AXIOM_GRID) -> np.ndarray:
    """Symmetric grid on [-c_high, c_high] with the origin added (peak slope)."""
    grid = np.linspace(-c_high, c_high, points)
    return np.union1d(grid, [0.0])


def validate_incentive(spec: IncentiveSpec, c_high: float, points: int = AXIOM_GRID) -> ValidationReport:
    """Check oddness, monotonicity, range and derivative bounds on [-c_high, c_high]."""
    if not c_high > 0:
        raise ValueError(f"operating interval half-width must be positive, got {c_high}")
    u = axiom_grid(c_high, points)
    val = np.asarray(spec(u), dtype=float)
    neg = np.asarray(spec(-u), dtype=float)
    der = np.asarray(spec.derivative(u), dtype=float)
    lower = 1.0 / spec.owner_capability

    odd_err = np.abs(val + neg)
    i_odd = int(np.argmax(odd_err))
    steps = np.diff(val)
    i_inc = int(np.argmin(steps))
    i_rng = int(np.argmax(np.abs(val)))
    i_lo = int(np.argmin(der))
    i_hi = int(np.argmax(der))

    checks = (
        AxiomCheck("odd", bool(odd_err[i_odd] <= ODDNESS_TOL), ODDNESS_TOL - float(odd_err[i_odd]), float(u[i_odd])),
        AxiomCheck("increasing", bool(steps[i_inc] > 0), float(steps[i_inc]), float(u[i_inc])),
        AxiomCheck("range", bool(abs(val[i_rng]) < 1.0), 1.0 - float(abs(val[i_rng])), float(u[i_rng])),
        AxiomCheck(
            "derivative-lower",
            bool(der[i_lo] > lower),
            float(der[i_lo]) - lower,
            float(u[i_lo]),
            f"min I' = {der[i_lo]:.6g} vs 1/C = {lower:.6g}",
        ),
        AxiomCheck(
            "derivative-upper",
            bool(der[i_hi] < 1.0),
            1.0 - float(der[i_hi]),
            float(u[i_hi]),
            f"max I' = {der[i_hi]:.6g}",
        ),
    )
    return ValidationReport(f"incentive {spec.family} {dict(spec.params)}", checks)


# ---------------------------------------------------------------------------
# shift functions
# ---------------------------------------------------------------------------


def _check_unit(z):
    z = np.asarray(z, dtype=float)
    if np.any(~np.isfinite(z)) or np.any(z < 0.0) or np.any(z > 1.0):
        raise ValueError("argument must lie in [0, 1]")
    return z


@dataclass(frozen=True)
class ShiftSpec:
    """M(z) = m0 + m1 z (affine) or m0 + m1 z**p (power) on [0, 1].

    Construction only checks the parameter shape; ``validate_shift`` decides
    whether the function is admissible (non-negative, strictly increasing).
    """

    family: str
    params: Mapping[str, float]

    def __post_init__(self):
        if self.family not in SHIFT_FAMILIES:
            raise ValueError(f"unknown shift family {self.family!r}; expected one of {SHIFT_FAMILIES}")
        params = _check_params("shift", self.family, self.params, _SHIFT_KEYS[self.family])
        if self.family == "power" and params["p"] <= 0:
            raise ValueError(f"param 'p' must be positive, got {params['p']}")
        object.__setattr__(self, "params", params)

    def __call__(self, z):
        p = self.params
        if self.family == "affine":
            return p["m0"] + p["m1"] * z
        return p["m0"] + p["m1"] * np.power(z, p["p"])


def eval_shift(spec: ShiftSpec, z):
    z = _check_unit(z)
    out = spec(z)
    return float(out) if np.ndim(out) == 0 else out


def validate_shift(spec: ShiftSpec, points: int = AXIOM_GRID) -> ValidationReport:
    z = np.linspace(0.0, 1.0, points)
    m = np.asarray(spec(z), dtype=float)
    steps = np.diff(m)
    i = int(np.argmin(steps))
    checks = (
        AxiomCheck("non-negative", bool(m[0] >= 0.0), float(m[0]), 0.0),
        AxiomCheck("strictly-increasing", bool(steps[i] > 0.0), float(steps[i]), float(z[i])),
    )
    return ValidationReport(f"shift {spec.family} {dict(spec.params)}", checks)


# ---------------------------------------------------------------------------
# densities
# ---------------------------------------------------------------------------


def _graded_gauss_legendre(func, order: int = 24, levels: int = 40) -> float:
    """Integrate on [0, 1] with panels refined geometrically toward both ends.

    Copes with the z**(a-1) endpoint behaviour of non-integer exponents.
    """
    x, w = np.polynomial.legendre.leggauss(order)
    edges = [0.5 ** j for j in range(1, levels)]
    breaks = np.unique(np.concatenate([[0.0, 1.0], np.array(edges) * 0.5, 1.0 - np.array(edges) * 0.5, [0.5]]))
    total = 0.0
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        total += half * float(np.dot(w, func(mid + half * x)))
    return total


@dataclass(frozen=True)
class PdfSpec:
    """Density on [0, 1]: uniform, or proportional to z**(a-1) (1-z)**(b-1)."""

    family: str
    params: Mapping[str, float]
    norm: float = field(default=1.0, compare=False, repr=False)

    def __post_init__(self):
        if self.family not in PDF_FAMILIES:
            raise ValueError(f"unknown pdf family {self.family!r}; expected one of {PDF_FAMILIES}")
        params = _check_params("pdf", self.family, self.params, _PDF_KEYS[self.family])
        for k, v in params.items():
            if v < 1.0:
                raise ValueError(f"param {k!r} must be >= 1, got {v}")
        object.__setattr__(self, "params", params)
        if self.family == "polynomial-bump":
            object.__setattr__(self, "norm", _graded_gauss_legendre(self._unnormalized))

    def _unnormalized(self, z):
        a, b = self.params["a"], self.params["b"]
        return np.power(z, a - 1.0) * np.power(1.0 - z, b - 1.0)

    def __call__(self, z):
        if self.family == "uniform":
            return np.ones_like(np.asarray(z, dtype=float))
        return self._unnormalized(z) / self.norm


def eval_pdf(spec: PdfSpec, z):
    z = _check_unit(z)
    out = spec(z)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class NoiseSpec:
    """Random factor on [0, 1]: its density and the shift it induces."""

    pdf: PdfSpec
    shift: ShiftSpec


def validate_noise(noise: NoiseSpec) -> ValidationReport:
    shift = validate_shift(noise.shift)
    z = np.linspace(0.0, 1.0, AXIOM_GRID)
    dens = np.asarray(noise.pdf(z), dtype=float)
    i = int(np.argmin(dens))
    checks = shift.checks + (AxiomCheck("pdf-non-negative", bool(dens[i] >= 0.0), float(dens[i]), float(z[i])),)
    return ValidationReport(f"noise {noise.pdf.family}/{noise.shift.family}", checks)
