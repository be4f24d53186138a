"""Scenario documents (JSON) and report emission (JSON / CSV).

Loading collects every problem it can find and raises a single
``ScenarioError`` whose issues each name a field path such as
``bounds.c_high`` or ``noise_cn.pdf.family``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Iterable

from .incentives import (INCENTIVE_FAMILIES, PDF_FAMILIES, SHIFT_FAMILIES, IncentiveSpec, NoiseSpec, PdfSpec,
                         ShiftSpec)
from .integrate import IntegratorConfig
from .model import Capabilities, Issue, Scenario, ScenarioError, SolverSettings, UtilityBounds
from .solver import ExtremumReport, PropositionReport, Series

SCHEMA_VERSION = "1"
SIG_DIGITS = 12

# marks a field that failed to parse, as distinct from a legitimately absent one
BAD = object()

_TOP_KEYS = {"schema_version", "capabilities", "bounds", "incentive_cn", "incentive_us", "noise_cn", "noise_us", "solver"}


class _Collector:
    def __init__(self):
        self.issues: list[Issue] = []

    def add(self, path, message):
        self.issues.append(Issue(path, message))

    def obj(self, doc, path, required=True) -> dict | None:
        if doc is None and not required:
            return None
        if not isinstance(doc, dict):
            self.add(path, f"expected an object, got {type(doc).__name__}")
            return None
        return doc

    def keys(self, doc: dict, path: str, allowed: Iterable[str], required: Iterable[str] = ()):
        allowed = set(allowed)
        for k in doc:
            if k not in allowed:
                self.add(f"{path}.{k}" if path else k, "unknown field")
        for k in required:
            if k not in doc:
                self.add(f"{path}.{k}" if path else k, "missing required field")

    def number(self, doc: dict, key: str, path: str, default=None, integer=False):
        full = f"{path}.{key}"
        if key not in doc or (doc[key] is None and default is not BAD):
            return default
        v = doc[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            self.add(full, f"expected a number, got {json.dumps(v)[:40]}")
            return BAD
        if not math.isfinite(v):
            self.add(full, "must be finite")
            return BAD
        if integer:
            if isinstance(v, float) and not v.is_integer():
                self.add(full, f"expected an integer, got {v}")
                return BAD
            return int(v)
        return float(v)

    def build(self, path, factory, *args):
        """Call ``factory`` unless an argument already failed; returns None on failure."""
        if any(a is BAD or a is None for a in args):
            return None
        try:
            return factory(*args)
        except ValueError as exc:
            self.add(path, str(exc))
            return None


def _params(c: _Collector, doc: dict, path: str) -> dict | None:
    raw = doc.get("params", {})
    if not isinstance(raw, dict):
        c.add(f"{path}.params", "expected an object")
        return None
    out = {}
    ok = True
    for k, v in raw.items():
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            c.add(f"{path}.params.{k}", f"expected a finite number, got {json.dumps(v)[:40]}")
            ok = False
        else:
            out[k] = float(v)
    return out if ok else None


def _family(c: _Collector, doc: dict, path: str, known: tuple) -> str | None:
    fam = doc.get("family")
    if not isinstance(fam, str):
        c.add(f"{path}.family", "missing or not a string")
        return None
    if fam not in known:
        c.add(f"{path}.family", f"unknown family {fam[:40]!r}; expected one of {', '.join(known)}")
        return None
    return fam


def _incentive(c: _Collector, doc, path: str, owner: float | None) -> IncentiveSpec | None:
    doc = c.obj(doc, path)
    if doc is None:
        return None
    c.keys(doc, path, ("family", "params"), ("family",))
    fam, params = _family(c, doc, path, INCENTIVE_FAMILIES), _params(c, doc, path)
    # without a valid owner capability, validate the shape against a placeholder
    spec = c.build(path, IncentiveSpec, fam, params, owner if owner is not None else 1.0)
    return spec if owner is not None else None


def _noise(c: _Collector, doc, path: str) -> NoiseSpec | None:
    doc = c.obj(doc, path)
    if doc is None:
        return None
    c.keys(doc, path, ("pdf", "shift"), ("pdf", "shift"))
    pdf = shift = None
    pdoc = c.obj(doc.get("pdf"), f"{path}.pdf")
    if pdoc is not None:
        c.keys(pdoc, f"{path}.pdf", ("family", "params"), ("family",))
        pdf = c.build(f"{path}.pdf", PdfSpec, _family(c, pdoc, f"{path}.pdf", PDF_FAMILIES),
                      _params(c, pdoc, f"{path}.pdf"))
    sdoc = c.obj(doc.get("shift"), f"{path}.shift")
    if sdoc is not None:
        c.keys(sdoc, f"{path}.shift", ("family", "params"), ("family",))
        shift = c.build(f"{path}.shift", ShiftSpec, _family(c, sdoc, f"{path}.shift", SHIFT_FAMILIES),
                        _params(c, sdoc, f"{path}.shift"))
    return c.build(path, NoiseSpec, pdf, shift)


def _settings(c: _Collector, doc) -> SolverSettings | None:
    if doc is None:
        return SolverSettings()
    doc = c.obj(doc, "solver")
    if doc is None:
        return None
    c.keys(doc, "solver", ("grid", "tolerance", "boundary_epsilon", "integrator", "seed"))
    grid = c.number(doc, "grid", "solver", 201, integer=True)
    tol = c.number(doc, "tolerance", "solver", 1e-6)
    eps = c.number(doc, "boundary_epsilon", "solver")
    seed = c.number(doc, "seed", "solver", 0, integer=True)
    integ = IntegratorConfig()
    idoc = doc.get("integrator")
    if idoc is not None:
        idoc = c.obj(idoc, "solver.integrator")
        if idoc is None:
            return None
        c.keys(idoc, "solver.integrator", ("method", "nodes", "mc_samples"))
        method = idoc.get("method", "composite-simpson")
        if not isinstance(method, str):
            c.add("solver.integrator.method", "expected a string")
            method = BAD
        nodes = c.number(idoc, "nodes", "solver.integrator", integer=True)
        mc = c.number(idoc, "mc_samples", "solver.integrator", 200_000, integer=True)
        if BAD in (method, nodes, mc):
            return None
        try:
            integ = IntegratorConfig(method, nodes, mc)
        except ValueError as exc:
            c.add("solver.integrator", str(exc))
            return None
    if BAD in (grid, tol, eps, seed):
        return None
    try:
        return SolverSettings(grid, tol, eps, integ, seed)
    except ValueError as exc:
        c.add("solver", str(exc))
        return None


def parse_scenario(doc: Any) -> Scenario:
    """Build a validated Scenario from a decoded JSON document."""
    c = _Collector()
    doc = c.obj(doc, "$")
    if doc is None:
        raise ScenarioError(c.issues)
    c.keys(doc, "", _TOP_KEYS, ("schema_version", "capabilities", "bounds", "incentive_cn", "incentive_us"))
    version = doc.get("schema_version")
    if "schema_version" in doc and version != SCHEMA_VERSION:
        c.add("schema_version", f"unsupported version {json.dumps(version)[:40]}; expected {SCHEMA_VERSION!r}")

    caps = None
    cdoc = c.obj(doc.get("capabilities"), "capabilities") if "capabilities" in doc else None
    if cdoc is not None:
        c.keys(cdoc, "capabilities", ("c_us", "c_cn"), ("c_us", "c_cn"))
        caps = c.build("capabilities", Capabilities,
                       c.number(cdoc, "c_us", "capabilities", BAD), c.number(cdoc, "c_cn", "capabilities", BAD))

    bounds = None
    bdoc = c.obj(doc.get("bounds"), "bounds") if "bounds" in doc else None
    if bdoc is not None:
        c.keys(bdoc, "bounds", ("c_low", "c_high", "dominance_factor"), ("c_low", "c_high"))
        bounds = c.build("bounds", UtilityBounds, c.number(bdoc, "c_low", "bounds", BAD),
                         c.number(bdoc, "c_high", "bounds", BAD), c.number(bdoc, "dominance_factor", "bounds", 10.0))

    inc_cn = _incentive(c, doc["incentive_cn"], "incentive_cn", caps.c_cn if caps else None) \
        if "incentive_cn" in doc else None
    inc_us = _incentive(c, doc["incentive_us"], "incentive_us", caps.c_us if caps else None) \
        if "incentive_us" in doc else None
    noise_cn = _noise(c, doc.get("noise_cn"), "noise_cn") if doc.get("noise_cn") is not None else None
    noise_us = _noise(c, doc.get("noise_us"), "noise_us") if doc.get("noise_us") is not None else None
    if (doc.get("noise_cn") is None) != (doc.get("noise_us") is None):
        c.add("noise_us" if doc.get("noise_us") is None else "noise_cn",
              "noise must be specified for both players or neither")
    settings = _settings(c, doc.get("solver"))

    parts = (caps, bounds, inc_cn, inc_us, settings)
    noise_broken = (doc.get("noise_cn") is not None and noise_cn is None) or \
                   (doc.get("noise_us") is not None and noise_us is None)
    if c.issues or any(p is None for p in parts) or noise_broken:
        if not c.issues:
            c.add("$", "scenario could not be assembled")
        raise ScenarioError(c.issues)

    # cross-field invariants are collected by the Scenario itself
    return Scenario(caps, bounds, inc_cn, inc_us, noise_cn, noise_us, settings)


def load_scenario(text: str | bytes) -> Scenario:
    """Parse and validate a UTF-8 JSON scenario document."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ScenarioError([Issue("$", f"not valid UTF-8 (byte {exc.start})")]) from None
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ScenarioError([Issue("$", f"syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}")]) from None
    except ValueError as exc:
        raise ScenarioError([Issue("$", str(exc))]) from None
    except RecursionError:
        raise ScenarioError([Issue("$", "document nested too deeply")]) from None
    return parse_scenario(doc)


def _reject_constant(name):
    raise ValueError(f"non-standard JSON constant {name} is not allowed")


def load_scenario_file(path) -> Scenario:
    with open(path, "rb") as fh:
        return load_scenario(fh.read())


def _spec_doc(spec) -> dict:
    return {"family": spec.family, "params": dict(spec.params)}


def scenario_to_doc(s: Scenario) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "capabilities": {"c_us": s.capabilities.c_us, "c_cn": s.capabilities.c_cn},
        "bounds": {"c_low": s.bounds.c_low, "c_high": s.bounds.c_high,
                   "dominance_factor": s.bounds.dominance_factor},
        "incentive_cn": _spec_doc(s.incentive_cn),
        "incentive_us": _spec_doc(s.incentive_us),
    }
    for name, noise in (("noise_cn", s.noise_cn), ("noise_us", s.noise_us)):
        if noise is not None:
            doc[name] = {"pdf": _spec_doc(noise.pdf), "shift": _spec_doc(noise.shift)}
    st = s.settings
    doc["solver"] = {
        "grid": st.grid,
        "tolerance": st.tolerance,
        "boundary_epsilon": st.boundary_epsilon,
        "integrator": {"method": st.integrator.method, "nodes": st.integrator.nodes,
                       "mc_samples": st.integrator.mc_samples},
        "seed": st.seed,
    }
    return doc


def dump_scenario(s: Scenario) -> str:
    return json.dumps(scenario_to_doc(s), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


def sig(x: float | None) -> float | None:
    """Round to 12 significant digits."""
    if x is None:
        return None
    return float(f"{x:.{SIG_DIGITS}g}")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    return f"{x:.{SIG_DIGITS}g}"


def _extremum_doc(r: ExtremumReport) -> dict:
    return {
        "player": r.player,
        "mode": r.mode,
        "kind": r.kind,
        "attained": r.attained,
        "arg": {k: sig(v) for k, v in r.arg.items()},
        "numeric_value": sig(r.numeric_value),
        "analytic_value": sig(r.analytic_value),
        "analytic_formula_id": r.analytic_formula_id,
        "gap": sig(r.gap),
    }


def proposition_doc(r: PropositionReport) -> dict:
    doc = {
        "proposition": r.proposition,
        "passed": r.passed,
        "monotonicity_pass": r.monotonicity_pass,
        "extremum_gap": sig(r.extremum_gap),
        "sign_claim": r.sign_claim,
        "best_response": r.best_response,
        "notes": list(r.notes),
        "extrema": [_extremum_doc(e) for e in r.extrema],
    }
    if r.gradient is not None:
        g = r.gradient
        doc["gradient"] = {"points": g.points, "max_abs_error": sig(g.max_abs_error),
                           "max_partial": sig(g.max_partial), "worst_location": sig(g.worst_location),
                           "all_negative": g.all_negative, "passed": g.passed}
    if r.best is not None:
        doc["best_response_detail"] = {"exists": r.best.exists, "arg": sig(r.best.arg), "value": sig(r.best.value)}
    if r.sign is not None:
        s = r.sign
        doc["sign"] = {"formula_id": s.formula_id, "claim": s.claim, "value": sig(s.value),
                       "margin": sig(s.margin), "holds": s.holds, "assumptions_met": s.assumptions_met}
    return doc


def report_rows(r: PropositionReport) -> list[tuple]:
    """(proposition, check, pass, numeric, analytic, gap) rows for one report."""
    return [(r.proposition, c.name, c.passed, c.numeric, c.analytic, c.gap) for c in r.checks]


CSV_HEADER = ("proposition", "check", "pass", "numeric", "analytic", "gap")


def emit_report(reports: list[PropositionReport], format: str = "json") -> str:
    if format == "json":
        doc = {"schema_version": SCHEMA_VERSION, "propositions": [proposition_doc(r) for r in reports]}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(CSV_HEADER)
        for r in reports:
            for row in report_rows(r):
                w.writerow([row[0], row[1]] + [_fmt(v) for v in row[2:]])
        return buf.getvalue()
    raise ValueError(f"unknown report format {format!r}")


def emit_series(series: Series, format: str = "csv") -> str:
    pairs = sorted(zip(series.x, series.value))
    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(("x", "value"))
        for x, v in pairs:
            w.writerow((_fmt(x), _fmt(v)))
        return buf.getvalue()
    if format == "json":
        doc = {"schema_version": SCHEMA_VERSION, "player": series.player, "mode": series.mode, "axis": series.axis,
               "points": [{"x": sig(x), "value": sig(v)} for x, v in pairs]}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    raise ValueError(f"unknown report format {format!r}")


def emit_document(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
