"""Influence functionals in the comoving (M), environmental (E) and thermal frames.

For a mode with switching ``lambda`` on a worldline, expanding the angular
integral over directions ``n`` turns the double-time integral into

    I(tau) = -4 int_0^inf d omega  omega^(d-1) A(omega) sum_n w_n |F_n(omega, tau)|^2,
    F_n(omega, tau) = int_0^tau lambda(tau') exp(-i omega (t - n.x)(tau')) d tau',

which is manifestly non-positive.  In one dimension the directions are
``n = +-1``; in two dimensions the circle is integrated with weight ``d theta``.
``F_n`` is evaluated by Filon quadrature in the phase variable ``t - n.x``.

Stationary circular motion has a kernel depending only on ``tau' - tau''``;
that case is evaluated as a Toeplitz double sum over a precomputed kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.special import j0

from . import quadrature as quad
from .spectra import Spectrum, thermal_factor
from .worldline import Circular, ConstAccel, DomainError, LinearWorldline, Worldline


class CausalityError(DomainError):
    """A frame map runs backwards in time (d tau_i / d tau <= 0)."""


# ---------------------------------------------------------------------------
# switching functions

@dataclass(frozen=True)
class Unity:
    def __call__(self, tau):
        return np.ones_like(np.asarray(tau, dtype=float))

    @property
    def finite_duration(self):
        return False


@dataclass(frozen=True)
class Gaussian:
    """``exp(-tau^2 / sigma^2)``, switched on at ``tau = 0``."""

    sigma: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")

    def __call__(self, tau):
        tau = np.asarray(tau, dtype=float)
        return np.exp(-(tau / self.sigma) ** 2)

    @property
    def finite_duration(self):
        return True


@dataclass(frozen=True)
class CosineSwitch:
    """``cos(omega_m tau)``."""

    omega_m: float

    def __call__(self, tau):
        return np.cos(self.omega_m * np.asarray(tau, dtype=float))

    @property
    def finite_duration(self):
        return False


# ---------------------------------------------------------------------------
# results

@dataclass
class InfluenceSeries:
    frame: str
    nodes: np.ndarray
    values: np.ndarray
    errors: np.ndarray
    converged: bool = True
    meta: dict = field(default_factory=dict)

    @property
    def exp_values(self):
        return np.exp(self.values)

    def at(self, tau):
        """Linear interpolation of the series."""
        return np.interp(tau, self.nodes, self.values)

    def __post_init__(self):
        if self.values.size and self.values[0] != 0 and self.nodes[0] == 0:
            raise ValueError("influence functional must vanish at the origin")


# ---------------------------------------------------------------------------
# frequency integration of the directional power

def _panel_width(extent: float) -> float:
    return min(1.0, 2.0 * math.pi / max(extent, 1e-12))


def _integrate_power(power, spectrum: Spectrum, dimension: int, extent: float,
                     rtol: float, max_panels: int):
    lo, hi = spectrum.lower, spectrum.cutoff
    edges = quad.frequency_edges(lo, hi, _panel_width(extent), gap=lo > 0)

    def integrand(om):
        weight = om ** (dimension - 1) * spectrum(om)
        return weight[:, None] * power(om)

    val, err, ok, npan = quad.integrate_panels(integrand, edges, rtol=rtol, atol=1e-300,
                                               max_panels=max_panels, floor_rel=1e-3 * rtol)
    return -4.0 * val, 4.0 * err, ok, npan


def _effective_extent(coords, amps, cap=500.0):
    """Largest phase range over which the Filon amplitude is not negligible."""
    ext = 0.0
    for w, g in zip(coords, amps):
        g = np.abs(g)
        if g.max() == 0:
            continue
        keep = g >= 1e-2 * g.max()
        ext = max(ext, float(np.max(w[keep]) - w[0]))
    return min(max(ext, 1e-6), cap)


def _local_times(points, time_map):
    if time_map is None:
        return points, None
    tau_i = np.asarray(time_map(points), dtype=float)
    rate = np.asarray(time_map.derivative(points), dtype=float)
    if np.any(~np.isfinite(tau_i)) or np.any(rate <= 0) or np.any(np.diff(tau_i) <= 0):
        raise CausalityError("time map is not strictly increasing on the grid")
    return tau_i, rate


def _record(n_nodes, every):
    if every <= 1:
        return None
    idx = np.arange(0, n_nodes, every)
    if idx[-1] != n_nodes - 1:
        idx = np.append(idx, n_nodes - 1)
    return idx


def _one_sided(tau, breakpoints, side):
    """``tau`` with nodes at (or within roundoff of) a breakpoint moved just past it towards ``side``."""
    out = np.array(tau, dtype=float)
    for bp in breakpoints:
        hit = np.abs(out - bp) <= 1e-12 * max(1.0, abs(bp))
        out[hit] = np.nextafter(bp, side)
    return out


def _factorized(worldline: Worldline, switching, spectrum: Spectrum, points: np.ndarray,
                tau_local: np.ndarray, rtol: float, record, max_panels: int):
    lam = switching(tau_local)
    if isinstance(worldline, LinearWorldline):
        u, v = worldline.lightcone(tau_local)
        phi = np.clip(worldline.rapidity(tau_local), -700.0, 700.0)
        inc = np.stack(worldline.lightcone_increments(tau_local))
        coords = np.stack([np.minimum(u, 1e250), np.minimum(v, 1e250)])
        amps = np.stack([lam * np.exp(phi), lam * np.exp(-phi)])
        weights = np.ones(2)
        extent = _effective_extent(coords, amps)

        def power(om):
            return quad.directional_power(om, coords, amps, weights, record, increments=inc)
        dim = 1
    elif isinstance(worldline, Circular):
        t, theta = worldline.time_and_angle(tau_local)
        # the speed may jump at a profile breakpoint: intervals ending there use the
        # left limit, intervals starting there the right limit
        end = _one_sided(tau_local, worldline.breakpoints(), -np.inf)
        gam = worldline.gamma_of(end)
        gam_om = gam * worldline.profile(end)
        start = _one_sided(tau_local[0::2], worldline.breakpoints(), np.inf)
        gam_r = worldline.gamma_of(start)
        right = (gam_r, gam_r * worldline.profile(start))
        r0 = worldline.r0
        g = np.abs(lam) / gam
        keep = g >= 1e-2 * g.max() if g.max() > 0 else np.ones_like(g, bool)
        extent = min(float(t[keep].max()) + 2 * r0, 500.0)

        def power(om):
            return quad.planar_power(om, t, theta, gam, gam_om, lam, r0, record, right)
        dim = 2
    else:
        raise TypeError(f"unsupported worldline {worldline!r}")
    val, err, ok, npan = _integrate_power(power, spectrum, dim, extent, rtol, max_panels)
    return val, err, ok, {"method": "factorized", "dimension": dim, "n_panels": npan,
                          "extent": extent}


# ---------------------------------------------------------------------------
# stationary circular motion: Toeplitz kernel

_G2 = 0.5 / math.sqrt(3.0)


def circular_kernel(spectrum: Spectrum, r0: float, omega: float, s, rtol: float = 1e-9):
    """``K(s) = 4 pi int_0^inf w A(w) cos(w gamma s) J0(2 w r0 |sin(gamma Omega s / 2)|) dw``.

    ``-2 int int lambda lambda K(tau' - tau'')`` is the influence functional of
    uniform circular motion.
    """
    s = np.atleast_1d(np.abs(np.asarray(s, dtype=float)))
    gam = 1.0 / math.sqrt(1.0 - (r0 * omega) ** 2)
    dt = gam * s
    dx = 2.0 * r0 * np.abs(np.sin(0.5 * gam * omega * s))
    out = np.empty_like(s)
    lo, hi = spectrum.lower, spectrum.cutoff
    order = np.argsort(s)
    # chunks of similar |s| share one adaptive frequency mesh
    k0 = 4.0 * math.pi * float(spectrum.check_integrable(2)) / 2.0
    for chunk in np.array_split(order, max(1, s.size // 256)):
        ext = float(dt[chunk].max() + dx[chunk].max())
        edges = quad.frequency_edges(lo, hi, _panel_width(ext), gap=lo > 0)
        tc, xc = dt[chunk], dx[chunk]

        def f(w):
            return (w * spectrum(w))[:, None] * np.cos(np.outer(w, tc)) * j0(np.outer(w, xc))

        val, _, _, _ = quad.integrate_panels(f, edges, rtol=rtol, atol=1e-12 * k0)
        out[chunk] = 4.0 * math.pi * val
    return out


@njit(cache=True)
def _toeplitz_cumulative(lam_a, lam_b, k_same, k_plus, k_minus, h):
    """Cumulative ``int_0^tau_k int_0^tau_k lambda lambda K`` with 2x2 Gauss per cell.

    ``lam_a``/``lam_b`` are the switching values at the lower/upper Gauss point
    of each cell; ``k_same[m] = K(m h)``, ``k_plus[m] = K((m + 1/sqrt3) h)``,
    ``k_minus[m] = K(|m - 1/sqrt3| h)``.
    """
    n = lam_a.size
    out = np.zeros(n + 1)
    total = 0.0
    comp = 0.0
    q = 0.25 * h * h
    for i in range(n):
        row = 0.0
        for j in range(i):
            m = i - j
            c = (lam_a[i] * lam_a[j] + lam_b[i] * lam_b[j]) * k_same[m] \
                + lam_b[i] * lam_a[j] * k_plus[m] + lam_a[i] * lam_b[j] * k_minus[m]
            row += c
        diag = (lam_a[i] * lam_a[i] + lam_b[i] * lam_b[i]) * k_same[0] \
            + 2.0 * lam_a[i] * lam_b[i] * k_plus[0]
        inc = q * (2.0 * row + diag)
        y = inc - comp
        t = total + y
        comp = (t - total) - y
        total = t
        out[i + 1] = total
    return out


def _stationary_circular(worldline: Circular, switching, spectrum: Spectrum,
                         nodes: np.ndarray, rtol: float):
    n = nodes.size - 1
    h = float(nodes[1] - nodes[0])
    if not np.allclose(np.diff(nodes), h, rtol=1e-10, atol=0):
        raise ValueError("stationary path needs a uniform grid")
    m = np.arange(n + 1, dtype=float)
    d = 1.0 / math.sqrt(3.0)
    s = np.concatenate([m * h, (m + d) * h, np.abs(m - d) * h])
    k = circular_kernel(spectrum, worldline.r0, worldline.profile.value, s, rtol=min(rtol, 1e-9))
    k_same, k_plus, k_minus = k[:n + 1], k[n + 1:2 * n + 2], k[2 * n + 2:]
    lo = nodes[:-1] + (0.5 - _G2) * h
    hi = nodes[:-1] + (0.5 + _G2) * h
    total = _toeplitz_cumulative(switching(lo), switching(hi), k_same, k_plus, k_minus, h)
    vals = -2.0 * total
    return vals, np.abs(vals) * rtol, True, {"method": "stationary", "dimension": 2}


# ---------------------------------------------------------------------------
# public entry points

def influence_m(worldline: Worldline, switching, spectrum: Spectrum, grid: quad.TimeGrid,
                time_map=None, method: str = "auto", rtol: float = 1e-6,
                record_every: int = 1, max_panels: int = 32000) -> InfluenceSeries:
    """Influence functional of one mode, in the comoving proper time of the observer.

    ``time_map`` gives the mode's own proper time as a function of the
    observer's (identity when the observer comoves with the mode).  It must
    provide ``__call__`` and ``derivative``.  The switching function is always
    evaluated at the mode's own proper time, and the Jacobian ``d tau_i/d tau``
    is part of the operator definition.  In the phase variable it cancels
    against ``dw/dtau``.

    ``method``: ``factorized`` (Filon + frequency quadrature, any worldline),
    ``stationary`` (Toeplitz kernel, uniform circular motion only) or ``auto``.
    """
    nodes = grid.nodes
    if method == "auto":
        method = ("stationary" if isinstance(worldline, Circular) and worldline.is_stationary
                  and time_map is None and grid.is_uniform else "factorized")
    if spectrum.q == 0:
        zero = np.zeros(nodes.size)
        return InfluenceSeries("M", nodes, zero, zero.copy(), True, {"method": "trivial"})
    if method == "stationary":
        if not (isinstance(worldline, Circular) and worldline.is_stationary) or time_map is not None:
            raise ValueError("stationary method needs uniform circular motion without a time map")
        vals, errs, ok, meta = _stationary_circular(worldline, switching, spectrum, nodes, rtol)
        out_nodes = nodes
        rec = _record(nodes.size, record_every)
        if rec is not None:
            out_nodes, vals, errs = nodes[rec], vals[rec], errs[rec]
    elif method == "factorized":
        points = grid.points()
        tau_local, _ = _local_times(points, time_map)
        rec = _record(nodes.size, record_every)
        vals, errs, ok, meta = _factorized(worldline, switching, spectrum, points, tau_local,
                                           rtol, rec, max_panels)
        out_nodes = nodes if rec is None else nodes[rec]
    else:
        raise ValueError(f"unknown method {method!r}")
    vals = np.minimum(vals, 0.0)
    vals[out_nodes == 0] = 0.0
    meta.update(rtol=rtol, step=grid.step)
    if time_map is not None:
        meta["local_time_end"] = float(time_map(np.array([nodes[-1]]))[0])
    return InfluenceSeries("M", out_nodes, vals, errs, bool(ok), meta)


def influence_e(worldline: Worldline, switching, spectrum: Spectrum, grid: quad.TimeGrid,
                rtol: float = 1e-6, record_every: int = 1,
                max_panels: int = 32000) -> InfluenceSeries:
    """Influence functional in the environment frame, on a grid of coordinate time."""
    points = grid.points()
    tau_local = np.asarray(worldline.proper_time_of_coord(points), dtype=float)
    if spectrum.q == 0:
        zero = np.zeros(grid.nodes.size)
        return InfluenceSeries("E", grid.nodes, zero, zero.copy(), True, {"method": "trivial"})
    rec = _record(grid.nodes.size, record_every)
    vals, errs, ok, meta = _factorized(worldline, switching, spectrum, points, tau_local,
                                       rtol, rec, max_panels)
    out_nodes = grid.nodes if rec is None else grid.nodes[rec]
    vals = np.minimum(vals, 0.0)
    vals[out_nodes == 0] = 0.0
    meta.update(rtol=rtol, step=grid.step)
    return InfluenceSeries("E", out_nodes, vals, errs, bool(ok), meta)


def influence_const_accel_closed(a: float, spectrum: Spectrum, tau, rtol: float = 1e-8):
    """Closed form for hyperbolic motion with unit switching (d = 1).

    ``-(4/a^2) int_0^inf A [|E1(iw/a) - E1(iw/a e^{-a tau})|^2
    + |E1(-iw/a) - E1(-iw/a e^{a tau})|^2] dw``.
    """
    if a <= 0:
        raise ValueError("closed form needs a > 0")
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    if np.any(tau < 0):
        raise ValueError("tau must be non-negative")
    out = np.zeros_like(tau)
    pos = tau > 0
    if not pos.any() or spectrum.q == 0:
        return out
    tp = tau[pos]
    wl = ConstAccel(a)
    u, v = wl.lightcone(np.linspace(0, tp.max(), 513))
    du, dv = wl.lightcone_rates(np.linspace(0, tp.max(), 513))
    extent = _effective_extent(np.stack([u, np.minimum(v, 1e250)]), np.stack([1 / du, 1 / dv]))
    grow = np.exp(np.minimum(a * tp, 700.0))

    def f(om):
        z = 1j * om / a
        e_p = quad.exp_integral_e1(z)
        e_m = np.conj(e_p)
        zp = np.outer(z, 1.0 / grow)
        zm = np.outer(-z, grow)
        term = np.abs(e_p[:, None] - quad.exp_integral_e1(zp).reshape(zp.shape)) ** 2 \
            + np.abs(e_m[:, None] - quad.exp_integral_e1(zm).reshape(zm.shape)) ** 2
        return spectrum(om)[:, None] * term

    lo, hi = spectrum.lower, spectrum.cutoff
    edges = quad.frequency_edges(lo, hi, _panel_width(extent), gap=lo > 0)
    val, _, _, _ = quad.integrate_panels(f, edges, rtol=rtol, atol=1e-300, floor_rel=1e-3 * rtol)
    out[pos] = -4.0 / a ** 2 * val
    return out


def influence_thermal(spectrum: Spectrum, T: float, t, rtol: float = 1e-9):
    """Static mode in a thermal bath: ``-16 int_0^inf coth(w/2T) A (1 - cos w t)/w^2 dw``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    out = np.zeros_like(t)
    pos = t > 0
    if not pos.any() or spectrum.q == 0:
        return out
    tp = t[pos]

    def f(om):
        # 1 - cos(w t) = 2 sin^2(w t / 2) avoids cancellation at small w t
        s = np.sin(0.5 * np.outer(om, tp)) / om[:, None]
        return (thermal_factor(T, om) * spectrum(om))[:, None] * 2.0 * s * s

    lo, hi = spectrum.lower, spectrum.cutoff
    edges = quad.frequency_edges(lo, hi, _panel_width(float(tp.max())), gap=lo > 0)
    val, _, _, _ = quad.integrate_panels(f, edges, rtol=rtol, atol=1e-300, floor_rel=1e-3 * rtol)
    out[pos] = -16.0 * val
    return out


def influence_static_exact(spectrum: Spectrum, t, rtol: float = 1e-9):
    """Static mode, unit switching, vacuum: the thermal formula at ``T = 0``."""
    return influence_thermal(spectrum, 0.0, t, rtol)


def influence_bruteforce(worldline: Worldline, switching, spectrum: Spectrum, nodes,
                         rtol: float = 1e-8, counter=None):
    """Oracle: frequency integral for every time pair, then the trapezoid double-time sum.

    ``O(N^2)`` scalar frequency integrals; use on coarse grids only.
    """
    nodes = np.asarray(nodes, dtype=float)
    t, *xs = worldline.position(nodes)
    xs = np.stack(xs) if xs else np.zeros((1, nodes.size))
    lam = switching(nodes)
    dim = worldline.dimension
    lo, hi = spectrum.lower, spectrum.cutoff
    index = {float(v): i for i, v in enumerate(nodes)}

    def kernel(row_tau, cols):
        i = index[float(row_tau)]
        dt = t[i] - t[:cols.size]
        dx = xs[:, i:i + 1] - xs[:, :cols.size]
        if dim == 1:
            sep = dx[0]
        else:
            sep = np.sqrt(np.sum(dx * dx, axis=0))
        ext = float(np.max(np.abs(dt)) + np.max(np.abs(sep)))
        edges = quad.frequency_edges(lo, hi, _panel_width(ext), gap=lo > 0)

        def f(om):
            ang = quad.angular_kernel(dim, om[:, None], sep[None, :]).real
            return (om ** (dim - 1) * spectrum(om))[:, None] * 2.0 * np.cos(np.outer(om, dt)) * ang

        val, _, _, _ = quad.integrate_panels(f, edges, rtol=rtol, atol=1e-13)
        return lam[i] * lam[:cols.size] * val

    k = kernel if counter is None else counter(kernel)
    return -2.0 * quad.cumulative_double_time(k, nodes)
