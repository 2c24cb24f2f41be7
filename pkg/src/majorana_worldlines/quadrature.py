"""Numerical integration engine.

Three pieces live here:

* an adaptive, vector-valued Gauss-Kronrod integrator for frequency integrals
  (one frequency integral per time node, all refined together);
* a Filon-type quadrature for ``int g(w) exp(-i omega w) dw`` along the
  phase coordinate ``w = t - n.x`` of a worldline, used by the factorised
  influence-functional path;
* a generic cumulative double-time integrator that adds one border
  (row + column) of the ``tau' x tau''`` square per grid step.

The complex exponential integral ``E1`` is also implemented here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numba import njit

EULER_GAMMA = 0.57721566490153286061

# 7-point Gauss / 15-point Kronrod on [-1, 1]
_XGK = np.array([
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144845693013, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.0,
    0.207784955007898467600689403773245, 0.405845151377397166906606412076961,
    0.586087235467691130294144845693013, 0.741531185599394439863864773280788,
    0.864864423359769072789712788640926, 0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
    0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
])


@dataclass(frozen=True)
class QuadResult:
    value: float
    error_estimate: float
    converged: bool = True

    def __post_init__(self):
        if not self.error_estimate >= 0:
            raise ValueError("error_estimate must be non-negative")


@dataclass(frozen=True)
class TimeGrid:
    """Ordered time nodes starting at 0.

    ``step`` is the nominal spacing; profile breakpoints may add extra nodes.
    """

    nodes: np.ndarray
    step: float
    breakpoints: tuple = field(default=())

    @classmethod
    def uniform(cls, tau_max: float, step: float = 0.005,
                breakpoints: Sequence[float] = ()) -> "TimeGrid":
        if step <= 0 or tau_max <= 0:
            raise ValueError("tau_max and step must be positive")
        n = max(1, int(round(tau_max / step)))
        nodes = np.linspace(0.0, n * step, n + 1)
        extra = [b for b in breakpoints if 0.0 < b < nodes[-1]]
        if extra:
            # a grid node within a sliver of a breakpoint gives way to the exact breakpoint
            gap = np.min(np.abs(nodes[:, None] - np.asarray(extra)[None, :]), axis=1)
            nodes = np.union1d(nodes[gap > 1e-9 * step], extra)
        return cls(nodes=nodes, step=float(step), breakpoints=tuple(sorted(extra)))

    @property
    def tau_max(self) -> float:
        return float(self.nodes[-1])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.nodes[1:] + self.nodes[:-1])

    @property
    def is_uniform(self) -> bool:
        w = self.widths
        return bool(np.all(np.abs(w - w[0]) <= 1e-12 * w[0]))

    def points(self) -> np.ndarray:
        """Nodes interleaved with interval midpoints (length ``2N - 1``)."""
        pts = np.empty(2 * self.nodes.size - 1)
        pts[0::2] = self.nodes
        pts[1::2] = self.midpoints
        return pts

    def refined(self) -> "TimeGrid":
        """Same range with the step halved (breakpoints kept)."""
        return TimeGrid.uniform(self.tau_max, self.step / 2, self.breakpoints)

    def __len__(self):
        return self.nodes.size


# ---------------------------------------------------------------------------
# exponential integral

def exp_integral_e1(z):
    """Principal-branch ``E1(z) = int_1^inf exp(-z u)/u du`` for complex ``z``.

    Power series for ``|z| <= 4``, Lentz continued fraction beyond, and the
    leading asymptotic terms once ``|z| > 1e8``.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise ValueError("E1 has a logarithmic singularity at z = 0")
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty_like(z)

    small = np.abs(z) <= 4.0
    if np.any(small):
        zs = z[small]
        term = -zs.copy()          # (-z)^k / k!
        acc = term.copy()          # sum (-z)^k / (k k!)
        for k in range(2, 80):
            term = term * (-zs) / k
            inc = term / k
            acc += inc
            if np.all(np.abs(inc) <= 1e-17 * np.abs(acc)):
                break
        out[small] = -EULER_GAMMA - np.log(zs) - acc

    huge = np.abs(z) > 1e8
    if np.any(huge):
        zh = z[huge]
        inv = 1.0 / zh
        out[huge] = np.exp(-zh) * inv * (1.0 - inv + 2.0 * inv * inv)

    mid = ~(small | huge)
    if np.any(mid):
        out[mid] = _e1_continued_fraction(z[mid])
    return out[0] if scalar else out


def _e1_continued_fraction(z: np.ndarray) -> np.ndarray:
    b = z + 1.0
    c = np.full_like(z, 1e300)
    d = 1.0 / b
    h = d.copy()
    active = np.ones(z.shape, dtype=bool)
    for i in range(1, 5000):
        an = -float(i * i)
        b = b + 2.0
        d_new = 1.0 / (an * d + b)
        c_new = b + an / c
        delta = c_new * d_new
        d = np.where(active, d_new, d)
        c = np.where(active, c_new, c)
        h = np.where(active, h * delta, h)
        active &= np.abs(delta - 1.0) > 1e-16
        if not active.any():
            break
    return h * np.exp(-z)


# ---------------------------------------------------------------------------
# angular kernel

def angular_kernel(dimension: int, omega, dx):
    """Integral of ``exp(i omega n.dx)`` over the unit sphere in ``d`` dims.

    ``d = 1`` sums the two directions, ``d = 2`` integrates the circle.
    ``dx`` is the signed separation for ``d = 1`` and ``|dx|`` for ``d = 2``.
    """
    from scipy.special import j0

    omega = np.asarray(omega, dtype=float)
    dx = np.asarray(dx, dtype=float)
    if dimension == 1:
        return (2.0 * np.cos(omega * dx)).astype(complex)
    if dimension == 2:
        return (2.0 * np.pi * j0(omega * np.abs(dx))).astype(complex)
    raise ValueError(f"unsupported spatial dimension {dimension}")


def direction_set(dimension: int, n_angles: int = 0):
    """Unit directions and their solid-angle weights."""
    if dimension == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if dimension == 2:
        th = 2.0 * np.pi * np.arange(n_angles) / n_angles
        return (np.stack([np.cos(th), np.sin(th)], axis=1),
                np.full(n_angles, 2.0 * np.pi / n_angles))
    raise ValueError(f"unsupported spatial dimension {dimension}")


def angles_needed(omega: float, radius: float) -> int:
    """Even number of trapezoid angles resolving ``exp(i omega n.dx)``, ``|dx| <= 2 radius``."""
    return 2 * int(math.ceil(omega * radius + 12.0))


# ---------------------------------------------------------------------------
# adaptive vector Gauss-Kronrod

def _panel_eval(f, a: np.ndarray, b: np.ndarray):
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = (mid[:, None] + half[:, None] * _XGK[None, :]).ravel()
    fx = np.asarray(f(x), dtype=float)
    fx = fx.reshape(a.size, _XGK.size, -1)
    kron = np.einsum("j,pjk->pk", _WGK, fx) * half[:, None]
    gauss = np.einsum("j,pjk->pk", _WG, fx[:, 1::2, :]) * half[:, None]
    return kron, np.abs(kron - gauss)


def integrate_panels(f: Callable[[np.ndarray], np.ndarray], edges: Sequence[float],
                     rtol: float = 1e-7, atol: float = 0.0, max_panels: int = 20000,
                     batch: int = 64, floor_rel: float = 0.0):
    """Integrate a vector-valued ``f`` over the panels delimited by ``edges``.

    ``f`` maps ``m`` abscissae to an ``(m, n_out)`` array.  Panels are bisected
    until the summed Kronrod error estimate meets
    ``max(rtol*|I|, atol, floor_rel*max|I|)`` for every output component.
    Returns ``(value, error, converged, n_panels)``.
    """
    edges = np.asarray(edges, dtype=float)
    a = edges[:-1].copy()
    b = edges[1:].copy()

    def evaluate(a_, b_):
        vals, errs = [], []
        for s in range(0, a_.size, batch):
            v, e = _panel_eval(f, a_[s:s + batch], b_[s:s + batch])
            vals.append(v)
            errs.append(e)
        return np.concatenate(vals), np.concatenate(errs)

    vals, errs = evaluate(a, b)
    n_out = vals.shape[1]
    retired_val = np.zeros(n_out)
    retired_err = np.zeros(n_out)
    n_panels = a.size
    converged = False
    while True:
        total = retired_val + vals.sum(axis=0)
        total_err = retired_err + errs.sum(axis=0)
        goal = np.maximum(rtol * np.abs(total), atol)
        if floor_rel > 0:
            goal = np.maximum(goal, floor_rel * np.max(np.abs(total)))
        goal = np.where(goal > 0, goal, np.finfo(float).tiny)
        if np.all(total_err <= goal):
            converged = True
            break
        if n_panels >= max_panels:
            break
        score = np.max(errs / goal[None, :], axis=1)
        # retire panels whose error is negligible at every output
        done = score < 1e-3 / max(n_panels, 1)
        if done.any():
            retired_val += vals[done].sum(axis=0)
            retired_err += errs[done].sum(axis=0)
            a, b, vals, errs, score = a[~done], b[~done], vals[~done], errs[~done], score[~done]
        split = score >= score.max() / 8.0
        mid = 0.5 * (a[split] + b[split])
        na = np.concatenate([a[split], mid])
        nb = np.concatenate([mid, b[split]])
        nv, ne = evaluate(na, nb)
        keep = ~split
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb])
        vals = np.concatenate([vals[keep], nv])
        errs = np.concatenate([errs[keep], ne])
        n_panels += int(split.sum())
    return total, total_err, converged, n_panels


def frequency_integral(f: Callable[[np.ndarray], np.ndarray], limits: tuple,
                       tol: float = 1e-7, breakpoints: Sequence[float] = (),
                       max_panels: int = 20000) -> QuadResult:
    """Adaptive integral of a scalar function of frequency.

    Infinite limits are mapped onto finite intervals.  ``breakpoints`` (and
    ``0`` when it lies inside the range) become panel boundaries.
    """
    lo, hi = float(limits[0]), float(limits[1])
    if hi < lo:
        r = frequency_integral(f, (hi, lo), tol, breakpoints, max_panels)
        return QuadResult(-r.value, r.error_estimate, r.converged)
    cuts = sorted({p for p in list(breakpoints) + [0.0] if lo < p < hi})
    pieces = [lo] + cuts + [hi]
    value, error, ok = 0.0, 0.0, True
    for x0, x1 in zip(pieces[:-1], pieces[1:]):
        g, s0, s1 = _mapped(f, x0, x1)
        edges = np.linspace(s0, s1, 9)
        v, e, c, _ = integrate_panels(lambda s: g(s)[:, None], edges, rtol=tol,
                                      atol=1e-300, max_panels=max_panels)
        value += float(v[0])
        error += float(e[0])
        ok &= c
    if not ok:
        error = max(error, 0.0)
    return QuadResult(value, error, ok)


def _mapped(f, x0: float, x1: float):
    """Return ``(g, s0, s1)`` with ``int_x0^x1 f = int_s0^s1 g``."""
    if math.isfinite(x0) and math.isfinite(x1):
        return (lambda s: np.asarray(f(s), dtype=float)), x0, x1
    if math.isfinite(x0):          # [x0, inf): x = x0 + s/(1-s)
        def g(s):
            x = x0 + s / (1.0 - s)
            return np.asarray(f(x), dtype=float) / (1.0 - s) ** 2
        return g, 0.0, 1.0
    if math.isfinite(x1):          # (-inf, x1]: x = x1 - s/(1-s)
        def g(s):
            x = x1 - s / (1.0 - s)
            return np.asarray(f(x), dtype=float) / (1.0 - s) ** 2
        return g, 0.0, 1.0
    raise ValueError("split doubly infinite ranges first")


def frequency_edges(lower: float, upper: float, width: float, gap: bool) -> np.ndarray:
    """Initial panel edges: geometric near the lower end, then roughly ``width`` wide.

    With ``gap`` the range starts at an IR cutoff; otherwise at zero, graded
    geometrically from ``1e-12 * upper`` so endpoint power laws are resolved.
    """
    pts = [lower] if gap else [0.0]
    x = lower if gap else 1e-12 * upper
    if not gap:
        pts.append(x)
    while x * 1.6 < min(1.0, upper) and x * 0.6 < width:
        x *= 1.6
        pts.append(x)
    n = max(1, int(math.ceil((upper - pts[-1]) / width)))
    pts.extend(np.linspace(pts[-1], upper, n + 1)[1:])
    return np.unique(np.asarray(pts))


# ---------------------------------------------------------------------------
# Filon quadrature in the phase variable (numba)
#
# F(w_end) = int g(w) exp(-i omega w) dw with the phase exactly linear in w.
# Each time interval [tau_k, tau_k+1] maps to [w_k, w_k+1]; the amplitude
# g = lambda / (dw/dtau) is interpolated by the quadratic through the interval
# ends and the image of the interval midpoint (at relative position xi).

def _moment_series_coefficients(n_terms: int = 16):
    c = np.zeros((3, n_terms))
    for n in range(n_terms):
        f = math.factorial(n)
        for j in range(3):
            c[j, n] = 1.0 / (f * (n + j + 1))
    return c


_MOMENT_C = _moment_series_coefficients()


@njit(cache=True)
def _moments(theta, e, coef):
    """``M_j = int_0^1 x^j exp(i theta x) dx`` for ``j = 0, 1, 2``; ``e = exp(i theta)``."""
    at = abs(theta)
    if at < 0.25:
        z = 1j * theta
        # terms needed for |theta|^n / n! below 1e-17
        if at < 0.003:
            n = 6
        elif at < 0.03:
            n = 8
        elif at < 0.1:
            n = 10
        else:
            n = 13
        m0 = coef[0, n - 1] + 0j
        m1 = coef[1, n - 1] + 0j
        m2 = coef[2, n - 1] + 0j
        for k in range(n - 2, -1, -1):
            m0 = m0 * z + coef[0, k]
            m1 = m1 * z + coef[1, k]
            m2 = m2 * z + coef[2, k]
        return m0, m1, m2
    inv = -1j / theta
    m0 = (e - 1.0) * inv
    m1 = (e - m0) * inv
    m2 = (e - 2.0 * m1) * inv
    return m0, m1, m2


@njit(cache=True)
def _accumulate_line(om, w, dws, g, g_start, weight, out_row, record, coef):
    """Add ``weight * |F|^2`` at the recorded nodes to ``out_row``.

    ``w`` and ``g`` interleave nodes and interval midpoints; ``dws[j]`` is the
    increment ``w[j+1] - w[j]`` computed without cancellation (``w`` itself
    only enters through the phase).  Interval ``k`` starts with amplitude
    ``g_start[k]`` and ends with ``g[2k+2]``, so a jump at a node keeps its
    one-sided values.  ``record[k]`` is the output column for node ``k`` (or
    -1 to skip).
    """
    n_nodes = (w.size + 1) // 2
    fr = 0.0
    fi = 0.0
    cr = 0.0
    ci = 0.0
    # exp(-i om w_k), advanced by the interval factor and re-synchronised periodically
    ph = complex(math.cos(om * w[0]), -math.sin(om * w[0]))
    for k in range(n_nodes - 1):
        d0 = dws[2 * k]
        dw = d0 + dws[2 * k + 1]
        theta = -om * dw
        if (k & 63) == 0:
            p0 = -om * w[2 * k]
            ph = complex(math.cos(p0), math.sin(p0)) if math.isfinite(p0) else 0j
        if dw > 0.0 and math.isfinite(theta) and math.isfinite(om * w[2 * k + 2]):
            e = complex(math.cos(theta), math.sin(theta))
            xi = min(max(d0 / dw, 1e-3), 1.0 - 1e-3)
            m0, m1, m2 = _moments(theta, e, coef)
            rx = 1.0 / xi
            ry = 1.0 / (1.0 - xi)
            a0 = (m2 - (1.0 + xi) * m1 + xi * m0) * rx
            am = (m1 - m2) * (rx * ry)
            a1 = (m2 - xi * m1) * ry
            c = dw * ph * (a0 * g_start[k] + am * g[2 * k + 1] + a1 * g[2 * k + 2])
            ph = ph * e
            # Neumaier-compensated running sums
            t = fr + c.real
            if abs(fr) >= abs(c.real):
                cr += (fr - t) + c.real
            else:
                cr += (c.real - t) + fr
            fr = t
            t = fi + c.imag
            if abs(fi) >= abs(c.imag):
                ci += (fi - t) + c.imag
            else:
                ci += (c.imag - t) + fi
            fi = t
        else:
            p1 = -om * w[2 * k + 2]
            ph = complex(math.cos(p1), math.sin(p1)) if math.isfinite(p1) else 0j
        r = record[k + 1]
        if r >= 0:
            gr = fr + cr
            gi = fi + ci
            out_row[r] += weight * (gr * gr + gi * gi)


@njit(cache=True)
def _power_lines(omegas, coords, incs, amps, weights, record, n_out, coef):
    out = np.zeros((omegas.size, n_out))
    for i in range(omegas.size):
        for d in range(coords.shape[0]):
            _accumulate_line(omegas[i], coords[d], incs[d], amps[d], amps[d, ::2], weights[d],
                             out[i], record, coef)
    return out


@njit(cache=True)
def _power_plane(omegas, t, theta, gam, gam_om, gam_r, gam_om_r, lam, radius, record, n_out, coef):
    out = np.zeros((omegas.size, n_out))
    w = np.empty(t.size)
    dws = np.empty(t.size - 1)
    g = np.empty(t.size)
    g0 = np.empty(gam_r.size)
    for i in range(omegas.size):
        om = omegas[i]
        n_ang = 2 * int(math.ceil(om * radius + 12.0))
        wt = 2.0 * math.pi / n_ang
        for j in range(n_ang):
            ang = 2.0 * math.pi * j / n_ang
            for m in range(t.size):
                s = theta[m] - ang
                # w = t - n.x with n = (cos ang, sin ang)
                w[m] = t[m] - radius * math.cos(s)
                g[m] = lam[m] / (gam[m] + radius * gam_om[m] * math.sin(s))
            for m in range(gam_r.size):
                s = theta[2 * m] - ang
                g0[m] = lam[2 * m] / (gam_r[m] + radius * gam_om_r[m] * math.sin(s))
            for m in range(t.size - 1):
                dws[m] = w[m + 1] - w[m]
            _accumulate_line(om, w, dws, g, g0, wt, out[i], record, coef)
    return out


def _record_index(n_nodes: int, record):
    idx = np.full(n_nodes, -1, dtype=np.int64)
    if record is None:
        idx[:] = np.arange(n_nodes)
        return idx, n_nodes
    record = np.asarray(record, dtype=np.int64)
    idx[record] = np.arange(record.size)
    return idx, record.size


def directional_power(omegas, coords, amps, weights, record=None, increments=None):
    """``sum_n weight_n |int g_n exp(-i omega w_n) dw_n|^2`` at each node.

    ``coords[n]`` is the increasing phase coordinate ``w_n = t - n.x`` sampled
    at nodes and interval midpoints (length ``2N - 1``); ``amps[n]`` is
    ``lambda / (dw_n/dtau)`` at the same points.  ``increments[n]`` holds the
    consecutive differences of ``coords[n]``; pass them when ``w_n`` saturates
    and plain differences would round to zero.  Returns ``(n_omega, N)``, or
    only the columns listed in ``record``.
    """
    coords = np.ascontiguousarray(coords, dtype=float)
    if increments is None:
        increments = np.diff(coords, axis=1)
    idx, n_out = _record_index((coords.shape[1] + 1) // 2, record)
    return _power_lines(np.ascontiguousarray(omegas, dtype=float), coords,
                        np.ascontiguousarray(increments, dtype=float),
                        np.ascontiguousarray(amps, dtype=float),
                        np.ascontiguousarray(weights, dtype=float), idx, n_out, _MOMENT_C)


def planar_power(omegas, t, theta, gamma, gamma_omega, lam, radius, record=None, right=None):
    """Circle-integrated power for motion on a circle of radius ``radius``.

    Angles use a trapezoid rule with ``2 ceil(omega r + 12)`` points, which
    resolves ``exp(i omega n.dx)`` for ``|dx| <= 2 r``.  ``right`` optionally
    gives ``(gamma, gamma_omega)`` at the nodes as limits from the right, for
    profiles that jump at a node; by default the node values are used.
    """
    t = np.ascontiguousarray(t, dtype=float)
    gamma = np.ascontiguousarray(gamma, dtype=float)
    gamma_omega = np.ascontiguousarray(gamma_omega, dtype=float)
    if right is None:
        right = (gamma[::2], gamma_omega[::2])
    idx, n_out = _record_index((t.size + 1) // 2, record)
    return _power_plane(np.ascontiguousarray(omegas, dtype=float), t,
                        np.ascontiguousarray(theta, dtype=float), gamma, gamma_omega,
                        np.ascontiguousarray(right[0], dtype=float),
                        np.ascontiguousarray(right[1], dtype=float),
                        np.ascontiguousarray(lam, dtype=float), float(radius),
                        idx, n_out, _MOMENT_C)


# ---------------------------------------------------------------------------
# cumulative double-time integral

class CountingKernel:
    """Wrap a kernel and count scalar evaluations (for complexity checks)."""

    def __init__(self, kernel):
        self.kernel = kernel
        self.calls = 0

    def __call__(self, row_tau, col_tau):
        col_tau = np.asarray(col_tau)
        self.calls += col_tau.size
        return self.kernel(row_tau, col_tau)


def cumulative_double_time(kernel: Callable, nodes: np.ndarray,
                           imag_tol: float = 1e-6) -> np.ndarray:
    """``S_k = int_0^tau_k int_0^tau_k K(t', t'') dt' dt''`` for every node.

    ``kernel(row, cols)`` returns ``K(row, cols)`` for a scalar ``row`` and an
    array of ``cols``; it must be Hermitian, ``K(a, b) = conj K(b, a)``.  One
    row of the lower triangle is evaluated per step, so an ``N``-node grid
    costs ``N (N + 1) / 2`` kernel values.  Cells use the 2-D trapezoid rule.
    """
    nodes = np.asarray(nodes, dtype=float)
    n = nodes.size
    h = np.diff(nodes)
    out = np.zeros(n, dtype=complex)
    prev = np.asarray(kernel(nodes[0], nodes[:1]), dtype=complex)
    total = 0j
    comp = 0j
    for k in range(1, n):
        row = np.asarray(kernel(nodes[k], nodes[:k + 1]), dtype=complex)
        # cells (k-1, q) for q < k-1 use K at rows k-1, k and cols q, q+1
        q = k - 1
        if q > 0:
            corners = (prev[:q] + prev[1:q + 1] + row[:q] + row[1:q + 1])
            off = np.sum(0.25 * h[q] * h[:q] * corners)
        else:
            off = 0j
        # diagonal cell: K(k-1,k-1), K(k,k), K(k,k-1) and its conjugate
        diag = 0.25 * h[q] ** 2 * (prev[q] + row[k] + row[q] + np.conj(row[q]))
        inc = 2.0 * off.real + diag
        y = inc - comp
        t = total + y
        comp = (t - total) - y
        total = t
        out[k] = total
        prev = row
    resid = np.abs(out.imag)
    scale = np.maximum(np.abs(out.real), 1e-300)
    if np.any(resid > imag_tol * scale + 1e-14):
        raise ValueError("double-time integral has an imaginary part: kernel is not Hermitian")
    return out.real
