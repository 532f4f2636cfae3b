"""Scenario configuration, convergence verdicts, and the scenario runner.

A scenario names a geometry, grid, cutoff, and thresholds; the runner
samples residual norms over a ladder of resolutions and reduces them to
pass / fail / inconclusive verdicts:

* a sequence at rounding level is "exact";
* log-log slope >= slope_min counts as decaying (order >= 2 in practice);
* slope <= decay_max_slope counts as non-decaying;
* the pass threshold is pass_factor times the largest final norm among the
  decaying/exact members of the same family, and a non-decaying member
  only counts as a clean "fail" when it exceeds fail_factor times that
  threshold -- anything in the gap is "inconclusive (refine)".

Scenario kinds: "spherical" studies the static-spherical generators on one
geometry and adds the mass observables; "poincare" studies all ten
generators on flat space (expected: all pass) and on the black-hole
exterior (expected: exactly the static-spherical four pass).
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import fields as F
from .action import (EquivariantTestForm, PcConfig, einstein_residual,
                     extra_eom_term, torsion_residual)
from .conventions import LAMBDA_BASES
from .geometry import (SchwarzschildIsotropic, minkowski_metric,
                       minkowski_tetrad)
from .grid import Grid4
from .mass import adm_energy, komar_mass, positivity_check
from .report import sha256_of_file, sha256_of_text, canonical_json
from .symmetry import (CutoffFunction, PoincareElement, killing_residual,
                       symmetry_residual)

SCENARIO_KINDS = ("poincare", "spherical")
SPHERICAL_GENERATORS = ("P0", "L1", "L2", "L3")
POINCARE_GENERATORS = ("P0", "L1", "L2", "L3", "P1", "P2", "P3",
                       "K1", "K2", "K3")

DEFAULT_THRESHOLDS = {
    "slope_min": 1.7,
    "decay_max_slope": 0.5,
    "pass_factor": 4.0,
    "fail_factor": 10.0,
    "exact_floor": 1e-11,
    "eom_abs_tol": 1e-8,
    "mass_tol": 0.01,
    "mass_agreement_tol": 0.02,
}


class ScenarioError(ValueError):
    """Malformed or inconsistent scenario document."""


@dataclass(frozen=True)
class Scenario:
    kind: str
    geometry: str = "schwarzschild"
    mass: float = 1.0
    cosmological_constant: float = 0.0
    half_width: float = 20.0
    points: int = 33
    resolutions: tuple = (17, 25, 33)
    cutoff_inner: float = 6.0
    cutoff_outer: float = 10.0
    radius_mode: str = "4d"
    radii: tuple = (8.0, 12.0, 16.0)
    generators: tuple = None
    thresholds: dict = field(default_factory=dict)
    source_hash: str = "inline"

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise ScenarioError(f"unknown scenario kind {self.kind!r}")
        if self.geometry not in ("schwarzschild", "minkowski"):
            raise ScenarioError(f"unknown geometry {self.geometry!r}")
        if not self.cutoff_outer > self.cutoff_inner > 0:
            raise ScenarioError("cutoff needs R > r > 0")
        if self.cutoff_inner >= self.half_width:
            raise ScenarioError("excluded ball swallows the box (r >= L)")
        if self.radius_mode not in ("4d", "spatial"):
            raise ScenarioError("radius_mode must be '4d' or 'spatial'")
        if self.points % 2 == 0 or self.points < 5:
            raise ScenarioError("grid points must be odd and >= 5")
        merged = dict(DEFAULT_THRESHOLDS)
        merged.update(self.thresholds)
        object.__setattr__(self, "thresholds", merged)
        gens = self.generators
        if gens is None:
            gens = (SPHERICAL_GENERATORS if self.kind == "spherical"
                    else POINCARE_GENERATORS)
        object.__setattr__(self, "generators", tuple(gens))
        if self.geometry == "schwarzschild" and self.radius_mode == "4d":
            warnings.warn(
                "static chart is singular on the spatial axis, which a 4d "
                "excision keeps inside the norm region; radius_mode "
                "'spatial' is recommended for schwarzschild scenarios",
                stacklevel=3)

    def grid(self, n=None) -> Grid4:
        return Grid4(self.half_width, n or self.points, self.cutoff_inner)

    def cutoff(self) -> CutoffFunction:
        return CutoffFunction(self.cutoff_inner, self.cutoff_outer)

    def config(self, n=None) -> PcConfig:
        return PcConfig(self.cosmological_constant, self.grid(n),
                        self.radius_mode)

    def echo(self) -> dict:
        return {
            "kind": self.kind, "geometry": self.geometry, "M": self.mass,
            "Lambda": self.cosmological_constant,
            "grid": {"L": self.half_width, "N": self.points},
            "resolutions": list(self.resolutions),
            "cutoff": {"r": self.cutoff_inner, "R": self.cutoff_outer},
            "radius_mode": self.radius_mode, "radii": list(self.radii),
            "generators": list(self.generators),
            "thresholds": self.thresholds,
        }


def scenario_from_dict(doc: dict, source_hash: str = None) -> Scenario:
    if not isinstance(doc, dict) or "scenario" not in doc:
        raise ScenarioError("scenario document needs a 'scenario' key")
    grid = doc.get("grid", {})
    cutoff = doc.get("cutoff", {})
    try:
        scenario = Scenario(
            kind=doc["scenario"],
            geometry=doc.get("geometry", "schwarzschild"),
            mass=float(doc.get("M", 1.0)),
            cosmological_constant=float(doc.get("Lambda", 0.0)),
            half_width=float(grid.get("L", 20.0)),
            points=int(grid.get("N", 33)),
            resolutions=tuple(int(n) for n in doc.get("Ns", (17, 25, 33))),
            cutoff_inner=float(cutoff.get("r", 6.0)),
            cutoff_outer=float(cutoff.get("R", 10.0)),
            radius_mode=doc.get("radius_mode", "4d"),
            radii=tuple(float(r) for r in doc.get("radii", (8.0, 12.0, 16.0))),
            generators=(tuple(doc["generators"])
                        if "generators" in doc else None),
            thresholds=dict(doc.get("thresholds", {})),
            source_hash=source_hash or sha256_of_text(
                canonical_json(doc)),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"bad scenario document: {exc}") from None
    return scenario


def load_scenario(path) -> Scenario:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from None
    return scenario_from_dict(doc, source_hash=sha256_of_file(path))


# ---------------------------------------------------------------------------
# Field construction
# ---------------------------------------------------------------------------

def build_fields(scenario: Scenario, n: int, geometry: str = None,
                 need_connection: bool = True):
    """(grid, tetrad, connection, metric) for the named geometry at N = n."""
    geometry = geometry or scenario.geometry
    grid = scenario.grid(n)
    if geometry == "minkowski":
        e = minkowski_tetrad(grid)
        omega = F.zeros(grid, 1, 2) if need_connection else None
        return grid, e, omega, minkowski_metric(grid)
    chart = SchwarzschildIsotropic(scenario.mass)
    omega = chart.connection(grid) if need_connection else None
    return grid, chart.tetrad(grid), omega, chart.metric(grid)


def standard_test_form(grid: Grid4, cutoff: CutoffFunction, generator,
                       mode: str) -> EquivariantTestForm:
    """Cutoff profile on every coordinate 2-plane: a maximally generic
    test form whose support is exactly the cutoff's."""
    ups = cutoff.on_grid(grid, mode)
    alpha = F.scalar_form(grid, 2, {st: ups for st in LAMBDA_BASES[2]})
    return EquivariantTestForm(alpha, generator)


# ---------------------------------------------------------------------------
# Sequence classification and verdicts
# ---------------------------------------------------------------------------

def fit_slope(norms, spacings):
    pairs = [(h, v) for h, v in zip(spacings, norms) if v > 0.0]
    if len(pairs) < 2:
        return None
    hs, vs = zip(*pairs)
    return float(np.polyfit(np.log(hs), np.log(vs), 1)[0])


def classify_sequence(norms, spacings, thresholds) -> dict:
    """Slope fit plus a qualitative kind: exact / decaying / non-decaying."""
    norms = [float(v) for v in norms]
    out = {"norms": norms, "slope": None, "kind": "ambiguous"}
    if max(norms) <= thresholds["exact_floor"]:
        out["kind"] = "exact"
        return out
    if len(norms) < 2:
        out["kind"] = "single"
        return out
    slope = fit_slope(norms, spacings)
    out["slope"] = slope
    if slope is None:
        out["kind"] = "ambiguous"
    elif slope >= thresholds["slope_min"]:
        out["kind"] = "decaying"
    elif slope <= thresholds["decay_max_slope"]:
        out["kind"] = "non-decaying"
    return out


def apply_family_verdicts(entries: dict, thresholds) -> float:
    """Set verdicts within one residual family; returns the pass threshold.

    The reference scale is the largest final norm among members that decay
    (or are exact); fails must clear fail_factor times the pass threshold.
    """
    finals = [e["norms"][-1] for e in entries.values()
              if e["kind"] in ("exact", "decaying")]
    reference = max([thresholds["exact_floor"]] + finals)
    threshold = thresholds["pass_factor"] * reference
    for entry in entries.values():
        final = entry["norms"][-1]
        if entry["kind"] == "exact":
            entry["verdict"] = "pass"
        elif entry["kind"] == "decaying" and final <= threshold:
            entry["verdict"] = "pass"
        elif entry["kind"] == "non-decaying" and \
                final >= thresholds["fail_factor"] * threshold:
            entry["verdict"] = "fail"
        else:
            entry["verdict"] = "inconclusive"
        entry["pass_threshold"] = threshold
    return threshold


def eom_verdict(entry: dict, thresholds) -> None:
    if entry["kind"] in ("exact", "decaying"):
        entry["verdict"] = "pass"
    elif entry["kind"] == "non-decaying":
        entry["verdict"] = "fail"
    else:
        entry["verdict"] = "inconclusive"


# ---------------------------------------------------------------------------
# Studies
# ---------------------------------------------------------------------------

def _sweep(scenario: Scenario, geometry: str, gen_ns=(), eom_ns=(),
           killing_n: int = None) -> dict:
    """One pass over resolutions, building each field set exactly once."""
    names = scenario.generators
    cutoff = scenario.cutoff()
    raw = {
        "sym": {name: [] for name in names},
        "extra": {name: [] for name in names},
        "gen_spacings": [],
        "torsion": [], "einstein": [], "eom_spacings": [],
        "killing": None,
    }
    every_n = sorted(set(gen_ns) | set(eom_ns)
                     | ({killing_n} if killing_n else set()))
    for n in every_n:
        grid, e, omega, metric = build_fields(
            scenario, n, geometry, need_connection=n in eom_ns)
        cfg = scenario.config(n)
        if n in gen_ns:
            raw["gen_spacings"].append(grid.spacing)
            ups = cutoff.on_grid(grid, scenario.radius_mode)
            alpha = F.scalar_form(grid, 2,
                                  {st: ups for st in LAMBDA_BASES[2]})
            for name in names:
                gen = PoincareElement.from_name(name)
                residual = symmetry_residual(e, gen)
                raw["sym"][name].append(
                    residual.region_norm(**cfg.region_kwargs()))
                form = EquivariantTestForm(alpha, gen)
                _, enorm = extra_eom_term(e, form, cutoff, cfg,
                                          residual=residual)
                raw["extra"][name].append(enorm)
        if n in eom_ns:
            raw["eom_spacings"].append(grid.spacing)
            _, tn = torsion_residual(e, omega, cfg)
            raw["torsion"].append(tn)
            _, en = einstein_residual(e, omega, cfg)
            raw["einstein"].append(en)
        if n == killing_n:
            raw["killing"] = {
                name: killing_residual(
                    metric, PoincareElement.from_name(name),
                    r=scenario.cutoff_inner, mode=scenario.radius_mode)[1]
                for name in names}
    return raw


def _generator_section(scenario, raw, resolutions) -> dict:
    th = scenario.thresholds
    sym_entries = {k: classify_sequence(v, raw["gen_spacings"], th)
                   for k, v in raw["sym"].items()}
    extra_entries = {k: classify_sequence(v, raw["gen_spacings"], th)
                     for k, v in raw["extra"].items()}
    sym_thr = apply_family_verdicts(sym_entries, th)
    extra_thr = apply_family_verdicts(extra_entries, th)
    return {
        "resolutions": list(resolutions),
        "spacings": raw["gen_spacings"],
        "symmetry_residuals": sym_entries,
        "extra_eom_terms": extra_entries,
        "pass_thresholds": {"symmetry": sym_thr, "extra": extra_thr},
        "vacuous": not scenario.generators,
    }


def _eom_section(scenario, raw, resolutions) -> dict:
    th = scenario.thresholds
    out = {"resolutions": list(resolutions),
           "spacings": raw["eom_spacings"],
           "torsion": classify_sequence(raw["torsion"],
                                        raw["eom_spacings"], th),
           "einstein": classify_sequence(raw["einstein"],
                                         raw["eom_spacings"], th)}
    eom_verdict(out["torsion"], th)
    eom_verdict(out["einstein"], th)
    return out


def generator_study(scenario: Scenario, geometry: str, resolutions) -> dict:
    """Symmetry-residual and coupling-term norms per generator per N."""
    raw = _sweep(scenario, geometry, gen_ns=resolutions)
    return _generator_section(scenario, raw, resolutions)


def eom_study(scenario: Scenario, geometry: str, resolutions) -> dict:
    raw = _sweep(scenario, geometry, eom_ns=resolutions)
    return _eom_section(scenario, raw, resolutions)


def mass_study(scenario: Scenario, geometry: str) -> dict:
    _, _, _, metric = build_fields(scenario, scenario.points, geometry,
                                   need_connection=False)
    adm = adm_energy(metric, scenario.radii)
    komar = komar_mass(metric, scenario.radii)
    th = scenario.thresholds
    # time-symmetric slices carry zero momentum (general P is out of scope)
    positivity = positivity_check(adm["extrapolated"], (0.0, 0.0, 0.0))
    scale = max(abs(adm["extrapolated"]), abs(komar["extrapolated"]), 1e-10)
    difference = abs(adm["extrapolated"] - komar["extrapolated"])
    agreement = {
        "relative_difference": difference / scale,
        "tolerance": th["mass_agreement_tol"],
        "verdict": ("pass" if difference <= th["mass_agreement_tol"] * scale
                    else "fail"),
    }
    expected = scenario.mass if geometry == "schwarzschild" else 0.0
    deviation = abs(adm["extrapolated"] - expected)
    recovery = {
        "expected": expected,
        "deviation": deviation,
        "tolerance": th["mass_tol"],
        "verdict": ("pass" if deviation <= th["mass_tol"] * max(expected, 1e-8)
                    else "fail"),
    }
    verdicts = (positivity["passed"], agreement["verdict"] == "pass",
                recovery["verdict"] == "pass")
    return {"adm": adm, "komar": komar, "positivity": positivity,
            "komar_adm_agreement": agreement,
            "parameter_recovery": recovery,
            "verdict": "pass" if all(verdicts) else "fail"}


# ---------------------------------------------------------------------------
# Scenario runner
# ---------------------------------------------------------------------------

EXPECTED_KILLING = {
    ("poincare", "minkowski"): set(POINCARE_GENERATORS),
    ("poincare", "schwarzschild"): set(SPHERICAL_GENERATORS),
    ("spherical", "minkowski"): set(SPHERICAL_GENERATORS),
    ("spherical", "schwarzschild"): set(SPHERICAL_GENERATORS),
}


@dataclass(frozen=True)
class ScenarioReport:
    scenario: Scenario
    body: dict

    @property
    def verdict(self) -> str:
        return self.body["verdict"]

    @property
    def exit_code(self) -> int:
        return {"pass": 0, "fail": 1}.get(self.verdict, 3)


def _pattern_verdict(section: dict, expected: set, names) -> str:
    """pass iff expected generators pass and the rest cleanly fail."""
    verdicts = []
    for family in ("symmetry_residuals", "extra_eom_terms"):
        for name in names:
            entry = section[family][name]
            want = "pass" if name in expected else "fail"
            verdicts.append("pass" if entry["verdict"] == want
                            else entry["verdict"])
    if all(v == "pass" for v in verdicts):
        return "pass"
    if any(v == "inconclusive" for v in verdicts):
        return "inconclusive"
    return "fail"


def run_scenario(scenario, params: dict = None) -> ScenarioReport:
    """Run a named scenario ("poincare" / "spherical") or a Scenario."""
    if isinstance(scenario, str):
        doc = {"scenario": scenario}
        doc.update(params or {})
        scenario = scenario_from_dict(doc)
    elif params:
        raise ValueError("params are only accepted with a scenario name")

    if not scenario.generators:
        warnings.warn("scenario has no generators: vacuous pass")
        body = {"scenario": scenario.echo(), "sections": {},
                "verdict": "pass", "vacuous": True}
        return ScenarioReport(scenario, body)

    geometries = ((scenario.geometry,) if scenario.kind == "spherical"
                  else ("minkowski", "schwarzschild"))
    sections = {}
    verdicts = []
    for geometry in geometries:
        # flat-space symmetry residuals are identically zero, so one
        # resolution settles them; the field equations always get the ladder
        resolutions = (scenario.resolutions
                       if geometry == "schwarzschild"
                       else scenario.resolutions[:1])
        raw = _sweep(scenario, geometry, gen_ns=resolutions,
                     eom_ns=scenario.resolutions,
                     killing_n=max(resolutions))
        section = _generator_section(scenario, raw, resolutions)
        section["eom"] = _eom_section(scenario, raw, scenario.resolutions)
        section["killing_norms"] = raw["killing"]
        expected = EXPECTED_KILLING[(scenario.kind, geometry)]
        section["expected_killing"] = sorted(expected)
        section["verdict"] = _pattern_verdict(section, expected,
                                              scenario.generators)
        eom_ok = [section["eom"]["torsion"]["verdict"],
                  section["eom"]["einstein"]["verdict"]]
        verdicts.append(section["verdict"])
        verdicts.extend(eom_ok)
        sections[geometry] = section

    body = {"scenario": scenario.echo(), "sections": sections}
    if scenario.kind == "spherical":
        masses = mass_study(scenario, scenario.geometry)
        body["masses"] = masses
        verdicts.append(masses["verdict"])

    if all(v == "pass" for v in verdicts):
        body["verdict"] = "pass"
    elif any(v == "inconclusive" for v in verdicts):
        body["verdict"] = "inconclusive"
    else:
        body["verdict"] = "fail"
    return ScenarioReport(scenario, body)


def residual_csv_rows(section: dict, names) -> tuple:
    """(header, rows) for the per-generator residual table."""
    resolutions = section["resolutions"]
    header = (["generator"] + [f"norm_N{n}" for n in resolutions]
              + ["slope", "verdict"])
    rows = []
    for name in names:
        entry = section["symmetry_residuals"][name]
        slope = entry["slope"]
        slope_text = ("exact" if entry["kind"] == "exact"
                      else "" if slope is None else repr(slope))
        rows.append([name] + [repr(v) for v in entry["norms"]]
                    + [slope_text, entry["verdict"]])
    return header, rows
