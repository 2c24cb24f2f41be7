"""Built-in scenarios reproducing each published figure (parameter sets from the captions)."""

from __future__ import annotations

import copy

import numpy as np

from .scenario import Scenario, parse_scenario, serialize

_ACCELS10 = [float(a) for a in np.linspace(1.0, 10.0, 10)]
_CIRCLE = {"family": "Circular", "r0": 1.0}


def _accel(a):
    return {"family": "ConstAccel", "a": a}


def _circle(omega):
    return dict(_CIRCLE, omega=omega)


def _frames(kind):
    return {
        "name": f"fig2-{'left' if kind == 'uniform' else 'right'}",
        "description": f"a=5 hyperbolic motion, {kind} spectrum, M/E/thermal frames",
        "defaults": {"worldline": _accel(5.0), "spectrum": {"kind": kind},
                     "grid": {"tau_max": 3.0, "step": 0.005}},
        "curves": [{"label": "M", "frame": "M"}, {"label": "E", "frame": "E"},
                   {"label": "Thermal", "frame": "Thermal"}],
    }


def _accels(side, kind):
    return {
        "name": f"fig3-{side}",
        "description": f"hyperbolic motion a in (1, 5, 10), {kind} spectrum",
        "defaults": {"spectrum": {"kind": kind}, "grid": {"tau_max": 3.0, "step": 0.005}},
        "curves": [{"label": f"a{a:g}", "worldline": _accel(a)} for a in (1.0, 5.0, 10.0)],
        "analysis": {"overtaking": [["a1", "a5"], ["a5", "a10"], ["a1", "a10"]]},
    }


def _boost(side, kind):
    return {
        "name": f"fig4-{side}",
        "description": f"uniform velocity v in (0, 0.4, 0.8), {kind} spectrum",
        "defaults": {"spectrum": {"kind": kind}, "grid": {"tau_max": 5.0, "step": 0.005}},
        "curves": [{"label": f"v{v:g}", "worldline": {"family": "ConstVelocity", "v": v}}
                   for v in (0.0, 0.4, 0.8)],
        "analysis": {"overtaking": [["v0", "v0.4"], ["v0.4", "v0.8"], ["v0", "v0.8"]]},
    }


def _gauss_curves(worldlines, sigmas=(0.1, 2.0), step=0.005):
    curves = []
    for s in sigmas:
        for lab, wl in worldlines:
            t = 6.0 * s
            curves.append({"label": f"sigma{s:g}_{lab}", "worldline": wl,
                           "switching": {"kind": "gaussian", "sigma": s},
                           "grid": {"tau_max": t, "step": min(step, t / 200.0)}})
    return curves


def _anti_unruh_scans(parameter, values, sigmas, spectrum, worldline=None, prefix=""):
    scans = []
    for s in sigmas:
        tpl = {"spectrum": spectrum, "switching": {"kind": "gaussian", "sigma": s}}
        if worldline is not None:
            tpl["worldline"] = worldline
        scans.append({"kind": "anti_unruh", "label": f"{prefix}sigma{s:g}", "template": tpl,
                      "parameter": parameter, "values": list(values), "window_sigmas": 6.0})
    return scans


# oscillatory switching stalls the adaptive frequency rule near 1e-6; 1e-5 changes values by < 1e-6
_OSC_TOL = 1e-5


def _switch_mod(name, kind, worldline, desc):
    return {
        "name": name,
        "description": desc,
        "defaults": {"worldline": worldline, "spectrum": {"kind": kind},
                     "grid": {"tau_max": 5.0, "step": 0.005}, "tolerance": _OSC_TOL},
        "curves": [{"label": f"wM{w:g}", "switching": {"kind": "cosine", "omega_m": w}}
                   for w in (1.0, 5.0, 10.0)],
        "analysis": {"backflow": True},
    }


def _catalog():
    spec_so = {"kind": "superohmic", "q": 0.5}
    acc3 = [(f"a{a:g}", _accel(a)) for a in (1.0, 5.0, 10.0)]
    om3 = [(f"W{w:g}", _circle(w)) for w in (0.7, 0.9, 0.95)]
    cat = [
        _frames("uniform"), _frames("superohmic"),
        _accels("left", "uniform"), _accels("right", "superohmic"),
        _boost("left", "subohmic"), _boost("right", "superohmic"),
        {"name": "fig5-left",
         "description": "superohmic q=0.5, gaussian switching sigma in (0.1, 2), a in (1, 5, 10)",
         "defaults": {"spectrum": spec_so},
         "curves": _gauss_curves(acc3),
         "analysis": {"overtaking": [["sigma0.1_a1", "sigma0.1_a10"], ["sigma2_a1", "sigma2_a10"]]}},
        {"name": "fig5-right",
         "description": "transition probability versus a, superohmic q=0.5, sigma in (0.1, 2)",
         "scans": _anti_unruh_scans("worldline.a", _ACCELS10, (0.1, 2.0), spec_so, _accel(1.0))},
    ]
    for side, q in (("left", 0.01), ("right", 0.05)):
        cat.append({"name": f"fig6-{side}",
                    "description": f"transition probability versus a, uniform q={q}, IR cutoff 0.02",
                    "scans": _anti_unruh_scans("worldline.a", _ACCELS10, (0.1, 2.0),
                                               {"kind": "uniform", "q": q, "lambda_ir": 0.02},
                                               _accel(1.0))})
    fig7 = []
    for lir in (0.001, 0.02, 1.0):
        fig7 += _anti_unruh_scans("worldline.a", _ACCELS10, (2.0,),
                                  {"kind": "uniform", "q": 0.01, "lambda_ir": lir}, _accel(1.0),
                                  prefix=f"ir{lir:g}_")
    cat.append({"name": "fig7", "description": "uniform q=0.01, sigma=2, IR cutoff in (0.001, 0.02, 1)",
                "scans": fig7})
    cat.append({"name": "fig8", "description": "backflow region over (sigma, a), superohmic",
                "defaults": {"spectrum": {"kind": "superohmic"}},
                "scans": [{"kind": "backflow_region", "label": "region",
                           "sigmas": [float(s) for s in np.linspace(0.1, 2.0, 6)],
                           "accels": [float(a) for a in np.linspace(1.0, 10.0, 6)],
                           "window_sigmas": 3.0, "threshold": 1e-5}]})
    cat.append(_switch_mod("fig9-left", "uniform", _accel(5.0),
                           "a=5, uniform spectrum, cosine switching omega_M in (1, 5, 10)"))
    cat.append(_switch_mod("fig9-right", "superohmic", _accel(5.0),
                           "a=5, superohmic spectrum, cosine switching omega_M in (1, 5, 10)"))
    cat.append({"name": "fig10-left",
                "description": "rectangular acceleration pulse C in (1, 5, 10), tau1=0.3, tau2=0.5",
                "defaults": {"spectrum": {"kind": "superohmic"}, "grid": {"tau_max": 3.0, "step": 0.005}},
                "curves": [{"label": f"C{c:g}", "worldline": {
                    "family": "GenericLinear",
                    "profile": {"kind": "rectangular", "C": c, "tau1": 0.3, "tau2": 0.5}}}
                    for c in (1.0, 5.0, 10.0)],
                "analysis": {"backflow": True}})
    cat.append({"name": "fig10-right",
                "description": "oscillating acceleration a=10, omega_G in (10, 50, 1)",
                "defaults": {"spectrum": {"kind": "superohmic"}, "grid": {"tau_max": 3.0, "step": 0.005},
                             "tolerance": _OSC_TOL},
                "curves": [{"label": f"wG{w:g}", "worldline": {
                    "family": "GenericLinear",
                    "profile": {"kind": "cosine", "amplitude": 10.0, "omega_g": w}}}
                    for w in (10.0, 50.0, 1.0)],
                "analysis": {"backflow": True}})
    cat.append({"name": "fig11-left",
                "description": "partner mode at separation L in (0, 1, 5), a=a2=5, seen from mode 1",
                # the partner clock runs up to 1 + aL = 26 times faster near tau = 0
                "defaults": {"worldline": _accel(5.0), "spectrum": {"kind": "superohmic"},
                             "grid": {"tau_max": 3.0, "step": 0.0025}},
                "curves": [{"label": f"L{L:g}", "partner": {"observer": 1, "L": L}}
                           for L in (0.0, 1.0, 5.0)]})
    cat.append({"name": "fig11-right",
                "description": "partner acceleration a2 in (5, 2, 1, -1), a=2, L=0, seen from mode 1",
                "defaults": {"worldline": _accel(2.0), "spectrum": {"kind": "superohmic"},
                             "grid": {"tau_max": 3.0, "step": 0.005}},
                "curves": [{"label": f"a2_{a2:g}", "partner": {"observer": 1, "a2": a2}}
                           for a2 in (5.0, 2.0, 1.0, -1.0)]})
    cat.append({"name": "fig12",
                "description": "circular motion r0=1, Omega in (0.7, 0.9, 0.95), superohmic",
                "defaults": {"spectrum": {"kind": "superohmic"}, "grid": {"tau_max": 3.0, "step": 0.005}},
                "curves": [{"label": lab, "worldline": wl} for lab, wl in om3],
                "analysis": {"overtaking": [["W0.7", "W0.9"], ["W0.9", "W0.95"], ["W0.7", "W0.95"]]}})
    cat.append({"name": "fig13",
                "description": "circular motion, gaussian switching sigma in (0.1, 2), Omega in (0.7, 0.9, 0.95)",
                "defaults": {"spectrum": spec_so},
                "curves": _gauss_curves(om3),
                "scans": _anti_unruh_scans("worldline.omega", [0.7, 0.8, 0.9, 0.95], (0.1, 2.0),
                                           spec_so, _circle(0.7))})
    cat.append(_switch_mod("fig14", "superohmic", _circle(0.9),
                           "circular Omega=0.9, cosine switching omega_M in (1, 5, 10)"))
    cat.append({"name": "fig15-left",
                "description": "rectangular angular-velocity pulse C in (0.7, 0.9, 0.95), tau1=0.3, tau2=0.5",
                "defaults": {"spectrum": {"kind": "superohmic"}, "grid": {"tau_max": 3.0, "step": 0.005}},
                "curves": [{"label": f"C{c:g}", "worldline": dict(
                    _CIRCLE, profile={"kind": "rectangular", "C": c, "tau1": 0.3, "tau2": 0.5})}
                    for c in (0.7, 0.9, 0.95)],
                "analysis": {"backflow": True}})
    cat.append({"name": "fig15-right",
                "description": "oscillating angular velocity Omega=0.95, omega_G in (1, 10, 50)",
                "defaults": {"spectrum": {"kind": "superohmic"}, "grid": {"tau_max": 3.0, "step": 0.005}},
                "curves": [{"label": f"wG{w:g}", "worldline": dict(
                    _CIRCLE, profile={"kind": "cosine", "amplitude": 0.95, "omega_g": w})}
                    for w in (1.0, 10.0, 50.0)],
                "analysis": {"backflow": True}})
    return {p["name"]: p for p in cat}


PRESETS = _catalog()


def list_presets() -> list:
    """``(name, description)`` for every built-in scenario, in figure order."""
    return [(name, p["description"]) for name, p in PRESETS.items()]


def get_preset(name: str) -> Scenario:
    """The named preset, round-tripped through the scenario parser."""
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}")
    data = copy.deepcopy(PRESETS[name])
    return parse_scenario(serialize(Scenario(data)), source=f"preset:{name}")


def coarsened(scenario: Scenario, factor: float = 2.0, scan_points: int | None = None) -> Scenario:
    """Copy of a scenario with every grid step multiplied by ``factor``.

    Optionally thins every scan to at most ``scan_points`` values per axis.
    Used for quick smoke runs of the whole catalog.
    """
    data = copy.deepcopy(scenario.data)

    def scale(block):
        g = block.setdefault("grid", {})
        g["step"] = g.get("step", 0.005) * factor
        return block

    scale(data.setdefault("defaults", {}))
    for c in data.get("curves", []):
        if "grid" in c and "step" in c["grid"]:
            c["grid"]["step"] *= factor
    for s in data.get("scans", []):
        scale(s.setdefault("template", {}))
        if scan_points:
            for key in ("values", "sigmas", "accels"):
                if key in s and len(s[key]) > scan_points:
                    idx = np.unique(np.linspace(0, len(s[key]) - 1, scan_points).round().astype(int))
                    s[key] = [s[key][i] for i in idx]
    return parse_scenario(serialize(Scenario(data)), source=f"coarsened:{scenario.name}")
