"""Scenario builders shared by the test modules."""

import numpy as np

from conflictgains import (
    Capabilities,
    IncentiveSpec,
    NoiseSpec,
    PdfSpec,
    Scenario,
    ScenarioError,
    ShiftSpec,
    UtilityBounds,
)

# reference scenario: C_US=60, C_CN=20, c_low=1, c_high=5, tanh(0.2 u) for both players
S0_P1_MIN = -0.47375320224904005
S0_P2_MAX = 4.42125960674712
S0_P2_MIN = -7.0420229292157925


def affine_noise(m1=0.1, m0=0.0, pdf=None):
    return NoiseSpec(pdf or PdfSpec("uniform", {}), ShiftSpec("affine", {"m0": m0, "m1": m1}))


def s0(noise=False, m1=0.1, **kw):
    n = affine_noise(m1) if noise else None
    return Scenario(
        Capabilities(60.0, 20.0),
        UtilityBounds(1.0, 5.0),
        IncentiveSpec("odd-sigmoid", {"k": 0.2}, 20.0),
        IncentiveSpec("odd-sigmoid", {"k": 0.2}, 60.0),
        n,
        n,
        **kw,
    )


def s0_doc():
    return {
        "schema_version": "1",
        "capabilities": {"c_us": 60, "c_cn": 20},
        "bounds": {"c_low": 1, "c_high": 5, "dominance_factor": 10},
        "incentive_cn": {"family": "odd-sigmoid", "params": {"k": 0.2}},
        "incentive_us": {"family": "odd-sigmoid", "params": {"k": 0.2}},
        "noise_cn": {"pdf": {"family": "uniform", "params": {}},
                     "shift": {"family": "affine", "params": {"m0": 0, "m1": 0.1}}},
        "noise_us": {"pdf": {"family": "uniform", "params": {}},
                     "shift": {"family": "affine", "params": {"m0": 0, "m1": 0.1}}},
        "solver": {"grid": 201, "tolerance": 1e-6, "boundary_epsilon": None,
                   "integrator": {"method": "composite-simpson", "nodes": 257, "mc_samples": 200000},
                   "seed": 0},
    }


def random_incentive(rng, capability, c_high):
    family = rng.choice(["odd-sigmoid", "odd-arctan-like", "linear-plus-sigmoid"])
    if family == "odd-sigmoid":
        params = {"k": rng.uniform(0.3, 1.0) / c_high}
    elif family == "odd-arctan-like":
        params = {"k": rng.uniform(0.3, 0.9) / c_high}
    else:
        params = {"k": rng.uniform(0.05, 1.5) / c_high, "gamma": rng.uniform(0.4, 0.95),
                  "scale": c_high * rng.uniform(1.02, 1.4)}
    return IncentiveSpec(str(family), params, capability)


def random_noise(rng):
    if rng.random() < 0.5:
        pdf = PdfSpec("uniform", {})
    else:
        pdf = PdfSpec("polynomial-bump", {"a": float(rng.integers(1, 4)), "b": float(rng.integers(1, 4))})
    m0, m1 = rng.uniform(0.0, 0.05), rng.uniform(0.01, 0.2)
    if rng.random() < 0.5:
        shift = ShiftSpec("affine", {"m0": m0, "m1": m1})
    else:
        shift = ShiftSpec("power", {"m0": m0, "m1": m1, "p": float(rng.integers(1, 4))})
    return NoiseSpec(pdf, shift)


def random_scenario(rng, noise=True):
    """A random scenario satisfying every validator; retries until one does."""
    for _ in range(1000):
        c_low = rng.uniform(0.5, 2.0)
        c_high = c_low * rng.uniform(4.0, 15.0)
        c_cn = c_high * rng.uniform(3.5, 8.0)
        c_us = c_cn * rng.uniform(1.2, 4.0)
        try:
            return Scenario(
                Capabilities(c_us, c_cn),
                UtilityBounds(c_low, c_high),
                random_incentive(rng, c_cn, c_high),
                random_incentive(rng, c_us, c_high),
                random_noise(rng) if noise else None,
                random_noise(rng) if noise else None,
            )
        except ScenarioError:
            continue
    raise RuntimeError("could not draw a valid scenario")


def random_scenarios(n, seed=0, noise=True):
    rng = np.random.default_rng(seed)
    return [random_scenario(rng, noise) for _ in range(n)]


_JUNK = ["", "x", [], {"k": 1}, [1, 2], "NaN", {"family": 3}]
# fields with defaults; removing them leaves a valid document
_OPTIONAL = {"solver", "dominance_factor", "m0", "params"}


def _paths(doc, prefix=()):
    yield prefix
    if isinstance(doc, dict):
        for k, v in doc.items():
            yield from _paths(v, prefix + (k,))


def malformed_documents(n, seed=0):
    """Scenario texts broken by deleting, retyping or corrupting one piece of a valid document."""
    import copy
    import json

    rng = np.random.default_rng(seed)
    base = s0_doc()
    paths = [p for p in _paths(base) if p]
    required = [p for p in paths if not _OPTIONAL & set(p)]
    original = json.dumps(base)
    out = []
    while len(out) < n:
        kind = int(rng.integers(0, 5))
        doc = copy.deepcopy(base)
        path = (required if kind == 0 else paths)[int(rng.integers(len(required) if kind == 0 else len(paths)))]
        parent = doc
        for k in path[:-1]:
            parent = parent[k]
        if kind == 0:
            del parent[path[-1]]
        elif kind == 1:
            parent[path[-1]] = _JUNK[int(rng.integers(len(_JUNK)))]
        elif kind == 2:
            parent["unexpected_" + str(int(rng.integers(100)))] = 1
        text = json.dumps(doc)
        if kind == 3:
            text = text[: int(rng.integers(0, len(text)))]
        elif kind == 4:
            i = int(rng.integers(0, len(text)))
            text = text[:i] + "{}[],:"[int(rng.integers(6))] + text[i + 1:]
        if text != original:
            out.append(text)
    return out
