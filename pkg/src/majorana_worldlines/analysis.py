"""Detectors for crossings (overtaking), coherence revivals (backflow) and anti-Unruh scans."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

# rise of e^I that counts as backflow; above the quadrature error bound rtol/e for rtol <= 1e-5
BACKFLOW_THRESHOLD = 1e-5
SLOPE_TOLERANCE = 1e-9
# coherence below this is invisible on a linear e^I plot; leads there are not counted
VISIBILITY_FLOOR = 1e-3


# ---------------------------------------------------------------------------
# overtaking

@dataclass
class Crossing:
    tau: float
    lower_before: str
    lower_after: str


@dataclass
class CrossingReport:
    crossings: list
    reversal: float = 0.0

    @property
    def count(self) -> int:
        return len(self.crossings)

    @property
    def times(self):
        return [c.tau for c in self.crossings]


def _values(series):
    return np.asarray(getattr(series, "values", series), dtype=float)


def _nodes(series, n):
    nodes = getattr(series, "nodes", None)
    return np.arange(n, dtype=float) if nodes is None else np.asarray(nodes, dtype=float)


def detect_overtaking(series_a, series_b, labels=("A", "B"), rel_floor: float = 1e-9,
                      visibility: float = VISIBILITY_FLOOR) -> CrossingReport:
    """Sign changes of ``I_A - I_B`` with linearly interpolated crossing times.

    Differences below ``rel_floor * max|I|`` count as ties and do not start a
    crossing.  For each crossing take the smaller of the largest relative
    leads ``|I_A - I_B| / max(|I_A|, |I_B|)`` in the stretches before and
    after it; ``reversal`` is the largest such value and measures how
    pronounced the overtaking is.  Only nodes where both
    coherences ``e^I`` are at least ``visibility`` enter the reversal.
    """
    a, b = _values(series_a), _values(series_b)
    if a.shape != b.shape:
        raise ValueError("series must share a grid")
    na, nb = _nodes(series_a, a.size), _nodes(series_b, b.size)
    if not np.allclose(na, nb, rtol=1e-12, atol=1e-14):
        raise ValueError("series must share a grid")
    d = a - b
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)), 1e-300)
    sign = np.where(np.abs(d) > rel_floor * scale, np.sign(d), 0.0)
    crossings = []
    last_k, last_s = None, 0.0
    for k in range(d.size):
        s = sign[k]
        if s == 0:
            continue
        if last_s != 0 and s != last_s:
            j = last_k
            # interpolate the zero of d between the last signed node and this one
            t = na[j] + (na[k] - na[j]) * d[j] / (d[j] - d[k])
            lower = lambda sg: labels[0] if sg < 0 else labels[1]
            crossings.append(Crossing(float(t), lower(last_s), lower(s)))
        last_k, last_s = k, s
    reversal = 0.0
    if crossings:
        denom = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-300)
        rel = np.abs(d) / denom
        seen = np.minimum(a, b) >= math.log(visibility) if visibility > 0 else np.ones(d.size, bool)
        cuts = [-math.inf] + [c.tau for c in crossings] + [math.inf]
        for k in range(1, len(cuts) - 1):
            before = rel[(na > cuts[k - 1]) & (na < cuts[k]) & seen]
            after = rel[(na > cuts[k]) & (na < cuts[k + 1]) & seen]
            if before.size and after.size:
                reversal = max(reversal, float(min(before.max(), after.max())))
    return CrossingReport(crossings, reversal)


# ---------------------------------------------------------------------------
# backflow

@dataclass
class BackflowReport:
    intervals: list
    max_rebound: float
    threshold: float

    @property
    def present(self) -> bool:
        return bool(self.intervals)


def detect_backflow(series, threshold: float = BACKFLOW_THRESHOLD) -> BackflowReport:
    """Maximal runs where the coherence factor ``e^I`` strictly increases by at least ``threshold``."""
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    v = _values(series)
    coh = np.exp(v)
    nodes = _nodes(series, v.size)
    up = np.diff(coh) > 0
    intervals, best = [], 0.0
    k = 0
    while k < up.size:
        if not up[k]:
            k += 1
            continue
        j = k
        while j < up.size and up[j]:
            j += 1
        rise = float(coh[j] - coh[k])
        if rise >= threshold:
            intervals.append((float(nodes[k]), float(nodes[j]), rise))
            best = max(best, rise)
        k = j
    return BackflowReport(intervals, best, threshold)


@dataclass
class RegionScan:
    sigmas: np.ndarray
    accels: np.ndarray
    backflow: np.ndarray
    rebounds: np.ndarray
    threshold: float

    def is_down_set(self) -> bool:
        """No backflow cell sits at both larger sigma and larger a than a non-backflow cell."""
        bf = self.backflow
        for i in range(bf.shape[0]):
            for j in range(bf.shape[1]):
                if bf[i, j] and not np.all(bf[:i + 1, :j + 1]):
                    return False
        return True


def backflow_region_scan(sigmas: Sequence[float], accels: Sequence[float],
                         template: Callable[[float, float], object],
                         threshold: float = BACKFLOW_THRESHOLD) -> RegionScan:
    """Run ``template(sigma, a)`` (an influence series) on a grid and mark backflow cells.

    Rows follow ``sigmas``, columns follow ``accels``; both should be ascending.
    """
    sigmas = np.asarray(sigmas, dtype=float)
    accels = np.asarray(accels, dtype=float)
    bf = np.zeros((sigmas.size, accels.size), dtype=bool)
    reb = np.zeros_like(bf, dtype=float)
    for i, s in enumerate(sigmas):
        for j, a in enumerate(accels):
            rep = detect_backflow(template(s, a), threshold)
            bf[i, j] = rep.present
            reb[i, j] = rep.max_rebound
    return RegionScan(sigmas, accels, bf, reb, threshold)


# ---------------------------------------------------------------------------
# anti-Unruh

def slope_signs(values, tol: float = SLOPE_TOLERANCE):
    """Signs of consecutive differences after a window-3 majority filter.

    Differences smaller than ``tol`` times the value range count as flat.
    The filter replaces an isolated sign flanked by two equal signs.
    """
    v = np.asarray(values, dtype=float)
    d = np.diff(v)
    span = max(float(np.ptp(v)), 1e-300)
    s = np.where(np.abs(d) > tol * span, np.sign(d), 0.0)
    out = s.copy()
    for k in range(1, s.size - 1):
        if s[k - 1] == s[k + 1] != 0 and s[k] != s[k - 1]:
            out[k] = s[k - 1]
    return out


def classify_slope(values, tol: float = SLOPE_TOLERANCE) -> str:
    s = slope_signs(values, tol)
    nz = s[s != 0]
    if nz.size == 0:
        return "flat"
    if np.all(nz < 0):
        return "anti-unruh"
    if np.all(nz > 0):
        return "unruh"
    return "crossover"


def sign_changes(values, tol: float = SLOPE_TOLERANCE) -> int:
    s = slope_signs(values, tol)
    nz = s[s != 0]
    return int(np.count_nonzero(np.diff(nz) != 0))


@dataclass
class AntiUnruhScan:
    accels: np.ndarray
    p_full: np.ndarray
    p_first: np.ndarray
    class_full: str
    class_first: str
    meta: dict = field(default_factory=dict)

    @property
    def strictly_decreasing_full(self) -> bool:
        return bool(np.all(np.diff(self.p_full) < 0))

    @property
    def strictly_decreasing_first(self) -> bool:
        return bool(np.all(np.diff(self.p_first) < 0))


def anti_unruh_scan(accels: Sequence[float], template: Callable[[float], tuple],
                    tol: float = SLOPE_TOLERANCE) -> AntiUnruhScan:
    """Transition probabilities versus acceleration and their slope classification.

    ``template(a)`` returns ``(P_full, P_first)`` at the end of the switching window.
    """
    accels = np.asarray(accels, dtype=float)
    pf, p1 = [], []
    for a in accels:
        full, first = template(a)
        pf.append(float(full))
        p1.append(float(first))
    pf, p1 = np.array(pf), np.array(p1)
    return AntiUnruhScan(accels, pf, p1, classify_slope(pf, tol), classify_slope(p1, tol),
                         {"slope_tolerance": tol, "filter_window": 3,
                          "sign_changes_full": sign_changes(pf, tol),
                          "sign_changes_first": sign_changes(p1, tol)})
