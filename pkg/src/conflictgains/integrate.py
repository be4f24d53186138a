"""Expectations over the unit interval.

Composite Simpson is the default rule.  Gauss-Legendre is a second
deterministic rule, and a seeded Monte Carlo estimator that samples the
density directly serves as an independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np

from .incentives import IncentiveSpec, NoiseSpec, PdfSpec

METHODS = ("composite-simpson", "gauss-legendre", "monte-carlo")
DEFAULT_NODES = {"composite-simpson": 257, "gauss-legendre": 64, "monte-carlo": 257}


class IntegrationError(ValueError):
    pass


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "composite-simpson"
    nodes: int | None = None
    mc_samples: int = 200_000
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown integration method {self.method!r}; expected one of {METHODS}")
        if self.nodes is not None:
            if isinstance(self.nodes, bool) or not isinstance(self.nodes, int) or self.nodes < 3:
                raise ValueError(f"nodes must be an integer >= 3, got {self.nodes!r}")
            if self.method == "composite-simpson" and self.nodes % 2 == 0:
                raise ValueError(f"composite Simpson needs an odd node count, got {self.nodes}")
        if isinstance(self.mc_samples, bool) or not isinstance(self.mc_samples, int) or self.mc_samples < 3:
            raise ValueError(f"mc_samples must be an integer >= 3, got {self.mc_samples!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed!r}")

    @property
    def node_count(self) -> int:
        return self.nodes if self.nodes is not None else DEFAULT_NODES[self.method]

    def deterministic(self) -> IntegratorConfig:
        """The rule used wherever a reproducible exact-path value is required."""
        if self.method != "monte-carlo":
            return self
        return IntegratorConfig("composite-simpson", None, self.mc_samples, self.seed)


@lru_cache(maxsize=32)
def simpson_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n < 3 or n % 2 == 0:
        raise ValueError(f"composite Simpson needs an odd node count >= 3, got {n}")
    x = np.linspace(0.0, 1.0, n)
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= (1.0 / (n - 1)) / 3.0
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


@lru_cache(maxsize=32)
def gauss_legendre_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    t, w = np.polynomial.legendre.leggauss(n)
    x, w = 0.5 * (t + 1.0), 0.5 * w
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def rule_for(config: IntegratorConfig) -> tuple[np.ndarray, np.ndarray]:
    if config.method == "monte-carlo":
        raise ValueError("Monte Carlo has no quadrature rule; use config.deterministic()")
    if config.method == "gauss-legendre":
        return gauss_legendre_rule(config.node_count)
    return simpson_rule(config.node_count)


def quadrature(integrand: Callable[[np.ndarray], np.ndarray], config: IntegratorConfig) -> np.ndarray:
    """Integrate over [0, 1] along the last axis of ``integrand(nodes)``."""
    x, w = rule_for(config)
    values = np.asarray(integrand(x), dtype=float)
    bad = ~np.isfinite(values)
    if bad.any():
        idx = np.argwhere(bad)[0]
        raise IntegrationError(f"non-finite integrand value {values[tuple(idx)]} at node z={x[idx[-1]]:.17g}")
    return values @ w


def pdf_mass(pdf: PdfSpec, config: IntegratorConfig) -> float:
    return float(quadrature(pdf, config.deterministic()))


def expect_shift(noise: NoiseSpec, config: IntegratorConfig, tag: int = 0) -> float:
    """Expected shift, the integral of M(z) f(z) over [0, 1]."""
    if config.method == "monte-carlo":
        z = sample_noise(noise.pdf, child_rng(config.seed, tag), config.mc_samples)
        return float(np.mean(noise.shift(z)))
    return float(quadrature(lambda z: noise.shift(z) * noise.pdf(z), config))


def expect_noisy_incentive(incentive: IncentiveSpec, noise: NoiseSpec, u, config: IntegratorConfig):
    """Integral of [I(u) - M(z)] f(z) dz, vectorised over ``u``."""
    u_arr = np.asarray(u, dtype=float)
    if config.method == "monte-carlo":
        out = np.asarray(incentive(u_arr), dtype=float) - expect_shift(noise, config)
        return float(out) if u_arr.ndim == 0 else out
    base = np.asarray(incentive(u_arr), dtype=float)[..., None]

    def integrand(z):
        return (base - noise.shift(z)) * noise.pdf(z)

    out = quadrature(integrand, config)
    return float(out) if u_arr.ndim == 0 else out


def sample_noise(pdf: PdfSpec, rng: np.random.Generator, n: int) -> np.ndarray:
    if pdf.family == "uniform":
        return rng.random(n)
    return rng.beta(pdf.params["a"], pdf.params["b"], size=n)


def child_rng(seed: int, tag: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(tag,)))


class CrossCheck(NamedTuple):
    quadrature: float
    mc_estimate: float
    mc_stderr: float

    @property
    def agrees(self) -> bool:
        # the floor absorbs summation rounding when the integrand is constant
        floor = 64 * np.finfo(float).eps * max(1.0, abs(self.quadrature))
        return abs(self.quadrature - self.mc_estimate) <= 4.0 * self.mc_stderr + floor


def mc_cross_check(
    incentive: IncentiveSpec,
    noise: NoiseSpec,
    u: float,
    config: IntegratorConfig,
    tag: int = 0,
    samples: int | None = None,
) -> CrossCheck:
    n = samples if samples is not None else config.mc_samples
    q = expect_noisy_incentive(incentive, noise, u, config.deterministic())
    z = sample_noise(noise.pdf, child_rng(config.seed, tag), n)
    values = float(incentive(u)) - noise.shift(z)
    if np.all(values == values[0]):
        return CrossCheck(q, float(values[0]), 0.0)
    est = float(np.mean(values))
    stderr = float(np.std(values, ddof=1)) / math.sqrt(n)
    return CrossCheck(q, est, stderr)
