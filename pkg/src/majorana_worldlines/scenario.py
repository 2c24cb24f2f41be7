"""Declarative scenarios: YAML parsing with schema validation, model construction and execution."""

from __future__ import annotations

import copy
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

import jsonschema
import numpy as np
import yaml

from . import analysis
from .dynamics import ReducedState, evolve, transition_prob_first, transition_prob_full
from .frames import FrameMap
from .influence import (CosineSwitch, Gaussian, Unity, influence_e, influence_m,
                        influence_thermal)
from .quadrature import TimeGrid
from .spectra import Spectrum, unruh_temperature
from .worldline import (Circular, ConstAccel, Constant, ConstVelocity, Cosine, DomainError,
                        GenericLinear, Rectangular, Static)

BUILTIN_DEFAULTS = {
    "frame": "M",
    "switching": {"kind": "unity"},
    "spectrum": {"kind": "superohmic"},
    "grid": {"tau_max": 2.0, "step": 0.005, "record_every": 1},
    "tolerance": 1e-6,
}

CSV_COLUMNS = ("tau", "I1", "I2", "exp_I1_plus_I2", "re_rho01", "im_rho01", "rho00",
               "P_full", "P_first", "flags")


class ScenarioError(ValueError):
    """Schema or semantic error, located by YAML line and field path."""

    def __init__(self, message: str, field_path: str = "", line: int | None = None,
                 source: str = "<scenario>"):
        self.field_path = field_path
        self.line = line
        self.source = source
        loc = source if line is None else f"{source}:{line}"
        where = f" (field {field_path})" if field_path else ""
        super().__init__(f"{loc}: {message}{where}")


class NonConvergenceWarning(UserWarning):
    pass


def load_schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("schema.json").read_text())


# ---------------------------------------------------------------------------
# parsing

def _node_line(node, path):
    """1-based line of the YAML node at ``path`` (deepest existing ancestor)."""
    line = node.start_mark.line + 1 if node is not None else None
    for key in path:
        if isinstance(node, yaml.MappingNode):
            nxt = next((v for k, v in node.value if k.value == key), None)
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            nxt = node.value[key]
        else:
            nxt = None
        if nxt is None:
            break
        node = nxt
        line = node.start_mark.line + 1
    return line


def _fmt_path(path) -> str:
    out = ""
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out


@dataclass
class Scenario:
    """Validated scenario tree (as written, without defaults filled in)."""

    data: dict
    source: str = "<scenario>"

    @property
    def name(self) -> str:
        return self.data["name"]

    def to_yaml(self) -> str:
        return serialize(self)

    def __eq__(self, other):
        return isinstance(other, Scenario) and self.data == other.data


def parse_scenario(text: str, source: str = "<scenario>") -> Scenario:
    """Parse and validate scenario text; raises :class:`ScenarioError`."""
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ScenarioError(f"malformed YAML: {getattr(exc, 'problem', exc)}",
                            line=None if mark is None else mark.line + 1, source=source) from None
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a mapping", line=1, source=source)
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = list(validator.iter_errors(data))
    # a failing subschema also makes its keys "unevaluated"; report the root cause instead
    specific = [e for e in errors if e.validator != "unevaluatedProperties"]
    errors = specific or errors
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        path = list(err.absolute_path)
        raise ScenarioError(err.message, _fmt_path(path), _node_line(node, path), source)
    _check_semantics(data, node, source)
    return Scenario(data, source)


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read(), str(path))


def serialize(scenario: Scenario) -> str:
    return yaml.safe_dump(scenario.data, sort_keys=False, default_flow_style=None)


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in (over or {}).items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k not in ("worldline", "switching", "spectrum", "partner"):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def resolve_curve(data: dict, curve: dict) -> dict:
    """Curve fields with scenario defaults and built-in defaults applied."""
    base = _merge(BUILTIN_DEFAULTS, data.get("defaults", {}))
    return _merge(base, curve)


class _Semantic(Exception):
    def __init__(self, message, field_path=""):
        super().__init__(message)
        self.message = message
        self.field_path = field_path


def _fail(message, field_path=""):
    return _Semantic(message, field_path)


def _check_semantics(data, node, source):
    def located(exc, path):
        full = path + (exc.field_path.split(".") if exc.field_path else [])
        return ScenarioError(exc.message, _fmt_path(full), _node_line(node, full), source)

    labels = []
    for i, raw in enumerate(data.get("curves", [])):
        try:
            _validate_curve(resolve_curve(data, raw))
        except _Semantic as exc:
            raise located(exc, ["curves", i]) from None
        labels.append(raw["label"])
    if len(set(labels)) != len(labels):
        raise ScenarioError("curve labels must be unique", "curves", _node_line(node, ["curves"]), source)
    for j, pair in enumerate(data.get("analysis", {}).get("overtaking", [])):
        for lab in pair:
            if lab not in labels:
                raise located(_Semantic(f"unknown curve label {lab!r}"), ["analysis", "overtaking", j])
    for j, scan in enumerate(data.get("scans", [])):
        try:
            _validate_scan(scan, resolve_curve(data, scan.get("template", {})))
        except _Semantic as exc:
            raise located(exc, ["scans", j]) from None


def _validate_curve(cfg):
    wl = cfg.get("worldline")
    if wl is None:
        raise _fail("missing worldline (set it on the curve or in defaults)", "worldline")
    fam = wl["family"]
    need = {"ConstVelocity": ["v"], "ConstAccel": ["a"], "GenericLinear": ["profile"]}
    for key in need.get(fam, []):
        if key not in wl:
            raise _fail(f"{fam} needs '{key}'", f"worldline.{key}")
    if fam == "Circular" and "profile" not in wl and "omega" not in wl:
        raise _fail("Circular needs 'omega' or 'profile'", "worldline")
    dim = 2 if fam == "Circular" else 1
    if cfg.get("dimension", dim) != dim:
        raise _fail(f"{fam} motion lives in d={dim}", "dimension")
    sw = cfg["switching"]
    if sw["kind"] == "gaussian" and "sigma" not in sw:
        raise _fail("gaussian switching needs 'sigma'", "switching.sigma")
    if sw["kind"] == "cosine" and "omega_m" not in sw:
        raise _fail("cosine switching needs 'omega_m'", "switching.omega_m")
    frame = cfg["frame"]
    if frame == "Thermal":
        if sw["kind"] != "unity":
            raise _fail("the thermal reference uses unit switching", "switching.kind")
        if "temperature" not in cfg and fam != "ConstAccel":
            raise _fail("Thermal frame needs 'temperature' unless the worldline is ConstAccel",
                        "temperature")
    if frame == "E" and fam == "Circular":
        raise _fail("the E frame is implemented for linear motion", "frame")
    partner = cfg.get("partner")
    if partner is not None:
        if fam != "ConstAccel" or frame != "M":
            raise _fail("incoherent partners need ConstAccel motion in the M frame", "partner")
        if "L" in partner and "a2" in partner and partner["L"] != 0:
            raise _fail("give either a separation L or a partner acceleration a2", "partner")
        if wl["a"] <= 0:
            raise _fail("incoherent frames need a > 0", "worldline.a")


def _validate_scan(scan, cfg):
    if scan["kind"] == "anti_unruh":
        for key in ("parameter", "values"):
            if key not in scan:
                raise _fail(f"anti_unruh scan needs '{key}'", key)
        section, _, leaf = scan["parameter"].partition(".")
        if section not in ("worldline", "switching", "spectrum") or not leaf:
            raise _fail("parameter must look like worldline.a, switching.sigma or spectrum.lambda_ir",
                        "parameter")
    else:
        for key in ("sigmas", "accels"):
            if key not in scan:
                raise _fail(f"backflow_region scan needs '{key}'", key)
    probe = copy.deepcopy(cfg)
    if scan["kind"] == "anti_unruh":
        _set_path(probe, scan["parameter"], scan["values"][0])
    else:
        probe["worldline"] = {"family": "ConstAccel", "a": scan["accels"][0]}
        probe["switching"] = {"kind": "gaussian", "sigma": scan["sigmas"][0]}
    _validate_curve(probe)
    if probe["switching"]["kind"] != "gaussian" and scan["kind"] == "anti_unruh" \
            and "tau_max" not in cfg.get("grid", {}):
        raise _fail("scans read out at a multiple of sigma and need gaussian switching", "template")


def _set_path(cfg, dotted, value):
    section, _, leaf = dotted.partition(".")
    cfg.setdefault(section, {})[leaf] = value


# ---------------------------------------------------------------------------
# model construction

def build_profile(spec: dict):
    kind = spec["kind"]
    if kind == "constant":
        return Constant(spec["value"])
    if kind == "rectangular":
        return Rectangular(spec["C"], spec["tau1"], spec["tau2"])
    return Cosine(spec["amplitude"], spec["omega_g"])


def build_worldline(spec: dict, partner_phase: bool = False, tau_max: float = 200.0):
    fam = spec["family"]
    if fam == "Static":
        return Static()
    if fam == "ConstVelocity":
        return ConstVelocity(spec["v"])
    if fam == "ConstAccel":
        return ConstAccel(spec["a"])
    if fam == "GenericLinear":
        return GenericLinear(build_profile(spec["profile"]), tau_max=tau_max)
    phase = spec.get("phase", 0)
    phase = math.pi if phase == "pi" else float(phase)
    if partner_phase:
        phase += math.pi
    profile = build_profile(spec["profile"]) if "profile" in spec else Constant(spec["omega"])
    return Circular(spec.get("r0", 1.0), profile, phase=phase, tau_max=tau_max)


def build_switching(spec: dict):
    if spec["kind"] == "gaussian":
        return Gaussian(spec["sigma"])
    if spec["kind"] == "cosine":
        return CosineSwitch(spec["omega_m"])
    return Unity()


def build_spectrum(spec: dict) -> Spectrum:
    kw = {k: spec[k] for k in ("q", "lambda_ir", "lambda_uv", "lambda_max") if k in spec}
    return Spectrum(spec["kind"], **kw)


# ---------------------------------------------------------------------------
# execution

@dataclass
class CurveResult:
    label: str
    nodes: np.ndarray
    I1: np.ndarray
    I2: np.ndarray
    converged: bool
    flags: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)


def _grid(cfg, wl, tau_max=None):
    g = cfg["grid"]
    tmax = tau_max if tau_max is not None else g["tau_max"]
    bps = wl.breakpoints() if hasattr(wl, "breakpoints") else ()
    return TimeGrid.uniform(tmax, g["step"], breakpoints=bps)


def compute_curve(cfg: dict, label: str = "", tolerance: float | None = None,
                  end_only: bool = False) -> CurveResult:
    """Influence functionals of both modes for one resolved curve configuration."""
    rtol = tolerance if tolerance is not None else cfg["tolerance"]
    wl_spec = cfg["worldline"]
    tau_max = cfg["grid"]["tau_max"]
    wl = build_worldline(wl_spec, tau_max=max(2.0 * tau_max, 10.0))
    sw = build_switching(cfg["switching"])
    sp = build_spectrum(cfg["spectrum"])
    flags, meta = [], {}
    frame = cfg["frame"]
    grid = _grid(cfg, wl)
    every = grid.nodes.size if end_only else cfg["grid"].get("record_every", 1)

    if frame == "Thermal":
        T = cfg.get("temperature", unruh_temperature(wl_spec.get("a", 0.0)))
        vals = influence_thermal(sp, T, grid.nodes, rtol=min(rtol, 1e-8))
        nodes = grid.nodes
        if every > 1:
            idx = np.unique(np.append(np.arange(0, nodes.size, every), nodes.size - 1))
            nodes, vals = nodes[idx], vals[idx]
        meta.update(method="thermal", temperature=T)
        return CurveResult(label, nodes, vals, vals.copy(), True, flags, meta)

    if frame == "E":
        s1 = influence_e(wl, sw, sp, grid, rtol=rtol, record_every=every)
        meta.update(s1.meta)
        return CurveResult(label, s1.nodes, s1.values, s1.values.copy(), s1.converged,
                           flags if s1.converged else flags + ["nonconverged"], meta)

    partner = cfg.get("partner")
    if partner is None:
        s1 = influence_m(wl, sw, sp, grid, rtol=rtol, record_every=every)
        if isinstance(wl, Circular):
            wl2 = build_worldline(wl_spec, partner_phase=True, tau_max=max(2.0 * tau_max, 10.0))
            s2 = influence_m(wl2, sw, sp, grid, rtol=rtol, record_every=every)
        else:
            s2 = s1
        ok = s1.converged and s2.converged
        meta.update(s1.meta)
        return CurveResult(label, s1.nodes, s1.values, s2.values.copy(), ok,
                           flags if ok else flags + ["nonconverged"], meta)

    a = wl_spec["a"]
    if "a2" in partner:
        fmap = FrameMap("two_accels", a, a2=partner["a2"])
    else:
        fmap = FrameMap("separation", a, L=partner.get("L", 0.0))
    report = fmap.report()
    bound = report["observer_bound"]
    if bound < grid.tau_max:
        if not partner.get("causal_truncation", True):
            from .frames import CausalityError
            raise CausalityError(f"partner proper time leaves its causal domain at tau = {bound}")
        grid = _grid(cfg, wl, tau_max=bound * (1.0 - 1e-6))
        flags.append("causal_truncation")
    own = influence_m(wl, sw, sp, grid, rtol=rtol, record_every=every)
    wl2 = ConstAccel(fmap.partner_accel) if fmap.partner_accel != 0 else Static()
    other = influence_m(wl2, sw, sp, grid, time_map=fmap, rtol=rtol, record_every=every)
    I1, I2 = (own.values, other.values) if partner["observer"] == 1 else (other.values, own.values)
    ok = own.converged and other.converged
    meta.update(own.meta, frame_map=report)
    return CurveResult(label, own.nodes, I1, I2, ok, flags if ok else flags + ["nonconverged"], meta)


def curve_table(res: CurveResult, state: ReducedState, switching_finite: bool):
    """Columns of the per-curve CSV."""
    traj = evolve(state, res.I1, res.I2, res.nodes)
    p_full = transition_prob_full(res.I1, res.I2)
    p_first = -0.5 * (res.I1 + res.I2)
    flags = list(res.flags)
    if not switching_finite:
        flags.append("first_order_divergent")
    return {"tau": res.nodes, "I1": res.I1, "I2": res.I2, "exp_I1_plus_I2": np.exp(res.I1 + res.I2),
            "re_rho01": traj.rho01.real, "im_rho01": traj.rho01.imag, "rho00": traj.rho00,
            "P_full": p_full, "P_first": p_first, "flags": ";".join(flags)}


def _fmt(x) -> str:
    return repr(float(x))


def write_csv(path, table: dict, columns=CSV_COLUMNS):
    n = len(table[columns[0]])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for i in range(n):
            row = []
            for c in columns:
                v = table[c]
                row.append(v if isinstance(v, str) else _fmt(v[i]))
            fh.write(",".join(row) + "\n")


def _curve_job(args):
    cfg, label, tol, end_only = args
    return compute_curve(cfg, label, tol, end_only)


def _scan_points(scan, cfg):
    """Resolved per-point configurations of a scan, with their coordinates."""
    points = []
    if scan["kind"] == "anti_unruh":
        for v in scan["values"]:
            c = copy.deepcopy(cfg)
            _set_path(c, scan["parameter"], v)
            _scan_window(scan, c)
            points.append(((v,), c))
    else:
        for s in scan["sigmas"]:
            for a in scan["accels"]:
                c = copy.deepcopy(cfg)
                c["worldline"] = {"family": "ConstAccel", "a": a}
                c["switching"] = {"kind": "gaussian", "sigma": s}
                _scan_window(scan, c)
                points.append(((s, a), c))
    return points


def resolved_configs(scenario: Scenario) -> list:
    """``(label, cfg)`` for every curve and every scan point, defaults filled in."""
    data = scenario.data
    out = [(c["label"], resolve_curve(data, c)) for c in data.get("curves", [])]
    for scan in data.get("scans", []):
        cfg = resolve_curve(data, scan.get("template", {}))
        out += [(f"{scan['label']}:{coords}", c) for coords, c in _scan_points(scan, cfg)]
    return out


def _scan_window(scan, cfg):
    sw = cfg["switching"]
    if sw["kind"] == "gaussian" and "window_sigmas" in scan:
        t = scan["window_sigmas"] * sw["sigma"]
        cfg["grid"] = dict(cfg["grid"], tau_max=t, step=min(cfg["grid"]["step"], t / 200.0))


@dataclass
class RunResult:
    scenario: Scenario
    curves: list
    scans: list
    summary: dict

    @property
    def converged(self) -> bool:
        return self.summary["converged"]


def run_scenario(scenario: Scenario, tolerance: float | None = None, jobs: int = 1) -> RunResult:
    """Execute every curve and scan of a scenario (no files written)."""
    data = scenario.data
    state_spec = data.get("initial_state", {})
    state = ReducedState(state_spec.get("rho00", 1.0),
                         complex(state_spec.get("rho01_re", 0.0), state_spec.get("rho01_im", 0.0)))
    curve_cfgs = [(resolve_curve(data, c), c["label"]) for c in data.get("curves", [])]
    jobs_list = [(cfg, lab, tolerance, False) for cfg, lab in curve_cfgs]
    scan_specs = []
    for scan in data.get("scans", []):
        cfg = resolve_curve(data, scan.get("template", {}))
        pts = _scan_points(scan, cfg)
        scan_specs.append((scan, pts))
        end_only = scan["kind"] == "anti_unruh"
        jobs_list += [(c, f"{scan['label']}:{coords}", tolerance, end_only) for coords, c in pts]
    results = _map(_curve_job, jobs_list, jobs)
    curve_res = results[:len(curve_cfgs)]
    pos = len(curve_cfgs)

    summary = {"name": scenario.name, "curves": {}, "analysis": {}, "scans": {},
               "converged": all(r.converged for r in results)}
    tables = []
    for (cfg, lab), res in zip(curve_cfgs, curve_res):
        finite = build_switching(cfg["switching"]).finite_duration
        table = curve_table(res, state, finite)
        tables.append((lab, table))
        summary["curves"][lab] = {
            "frame": cfg["frame"], "converged": res.converged, "flags": res.flags,
            "time_column": "t" if cfg["frame"] in ("E", "Thermal") else "tau",
            "final": {"I1": float(res.I1[-1]), "I2": float(res.I2[-1]),
                      "P_full": float(table["P_full"][-1])},
            "meta": _jsonable(res.meta)}
    ana = data.get("analysis", {})
    by_label = dict(zip([lab for _, lab in curve_cfgs], curve_res))
    for a_lab, b_lab in ana.get("overtaking", []):
        A, B = by_label[a_lab], by_label[b_lab]
        rep = analysis.detect_overtaking(_total(A), _total(B), labels=(a_lab, b_lab))
        summary["analysis"][f"overtaking:{a_lab}:{b_lab}"] = {
            "crossings": [c.__dict__ for c in rep.crossings], "reversal": rep.reversal}
    if ana.get("backflow"):
        thr = ana.get("backflow_threshold", analysis.BACKFLOW_THRESHOLD)
        for lab, res in by_label.items():
            rep = analysis.detect_backflow(_total(res), thr)
            summary["analysis"][f"backflow:{lab}"] = {
                "present": rep.present, "intervals": rep.intervals, "max_rebound": rep.max_rebound,
                "threshold": thr}

    scan_out = []
    for scan, pts in scan_specs:
        res = results[pos:pos + len(pts)]
        pos += len(pts)
        scan_out.append(_finish_scan(scan, pts, res, summary))
    return RunResult(scenario, tables, scan_out, summary)


def _total(res: CurveResult):
    class _S:
        pass
    s = _S()
    s.nodes = res.nodes
    s.values = res.I1 + res.I2
    return s


def _finish_scan(scan, pts, res, summary):
    lab = scan["label"]
    if scan["kind"] == "anti_unruh":
        vals = np.array([c[0] for c, _ in pts])
        p_full = np.array([float(transition_prob_full(r.I1[-1], r.I2[-1])) for r in res])
        p_first = np.array([-0.5 * float(r.I1[-1] + r.I2[-1]) for r in res])
        tol = analysis.SLOPE_TOLERANCE
        summary["scans"][lab] = {
            "kind": "anti_unruh", "parameter": scan["parameter"],
            "class_full": analysis.classify_slope(p_full, tol),
            "class_first": analysis.classify_slope(p_first, tol),
            "sign_changes_full": analysis.sign_changes(p_full, tol),
            "sign_changes_first": analysis.sign_changes(p_first, tol),
            "slope_tolerance": tol, "filter_window": 3,
            "converged": all(r.converged for r in res)}
        name = scan["parameter"].split(".")[-1]
        return lab, {name: vals, "P_full": p_full, "P_first": p_first}, (name, "P_full", "P_first")
    thr = scan.get("threshold", analysis.BACKFLOW_THRESHOLD)
    sig, acc = np.array(scan["sigmas"], float), np.array(scan["accels"], float)
    bf = np.zeros((sig.size, acc.size), bool)
    reb = np.zeros_like(bf, dtype=float)
    for k, ((s, a), _) in enumerate(pts):
        rep = analysis.detect_backflow(_total(res[k]), thr)
        i, j = divmod(k, acc.size)
        bf[i, j], reb[i, j] = rep.present, rep.max_rebound
    region = analysis.RegionScan(sig, acc, bf, reb, thr)
    summary["scans"][lab] = {"kind": "backflow_region", "threshold": thr,
                             "down_set": region.is_down_set(), "matrix": bf.astype(int).tolist(),
                             "converged": all(r.converged for r in res)}
    rows = [(s, a) for s in sig for a in acc]
    return lab, {"sigma": np.array([r[0] for r in rows]), "a": np.array([r[1] for r in rows]),
                 "backflow": bf.ravel().astype(float), "max_rebound": reb.ravel()}, \
        ("sigma", "a", "backflow", "max_rebound")


def _map(fn, items, jobs):
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


UNITS = {"tau": "proper time of the observer", "t": "coordinate time of the environment frame",
         "I1": "dimensionless", "I2": "dimensionless", "exp_I1_plus_I2": "dimensionless",
         "re_rho01": "dimensionless", "im_rho01": "dimensionless", "rho00": "dimensionless",
         "P_full": "probability", "P_first": "probability (first order)", "flags": "text",
         "a": "1/time", "sigma": "time", "backflow": "0/1", "max_rebound": "dimensionless"}


def write_outputs(result: RunResult, out_dir) -> list:
    """Write CSV files, ``summary.json`` and ``manifest.json``; returns the written paths."""
    import os

    os.makedirs(out_dir, exist_ok=True)
    name = result.scenario.name
    written, manifest = [], {"scenario": name, "files": []}
    for lab, table in result.curves:
        time_col = result.summary["curves"][lab]["time_column"]
        path = os.path.join(out_dir, f"{name}__{lab}.csv")
        write_csv(path, table)
        cols = [time_col] + list(CSV_COLUMNS[1:])
        if time_col != "tau":
            _rename_header(path, time_col)
        manifest["files"].append({"file": os.path.basename(path), "kind": "series",
                                  "columns": [{"name": c, "index": i + 1, "unit": UNITS.get(c, "")}
                                              for i, c in enumerate(cols)]})
        written.append(path)
    for lab, table, cols in result.scans:
        path = os.path.join(out_dir, f"{name}__{lab}.csv")
        write_csv(path, table, cols)
        manifest["files"].append({"file": os.path.basename(path), "kind": "scan",
                                  "columns": [{"name": c, "index": i + 1, "unit": UNITS.get(c, "natural units")}
                                              for i, c in enumerate(cols)]})
        written.append(path)
    for fname, payload in (("summary.json", _jsonable(result.summary)), ("manifest.json", manifest)):
        path = os.path.join(out_dir, f"{name}__{fname}")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        written.append(path)
    return written


def _rename_header(path, time_col):
    with open(path, encoding="utf-8") as fh:
        lines = fh.readlines()
    lines[0] = time_col + lines[0][3:]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(lines)
