"""Relativistic trajectories in (1+1)D and (2+1)D Minkowski space, with c = 1.

Linear families are parametrised by the rapidity ``phi(tau) = int_0^tau a``.
They store the light-cone coordinates ``u = t - x`` and ``v = t + x``
directly, so ``u`` never suffers the cancellation of ``t - x`` at large
rapidity.  Circular worldlines store ``t(tau)`` and the polar angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_GL_X, _GL_W = np.polynomial.legendre.leggauss(5)
_CACHE_STEP = 1e-3


class DomainError(ValueError):
    """Parameters outside the physically allowed (subluminal, causal) range."""


# ---------------------------------------------------------------------------
# profiles shared by accelerations and angular velocities

@dataclass(frozen=True)
class Constant:
    value: float

    def __call__(self, tau):
        return np.full_like(np.asarray(tau, dtype=float), self.value)

    def integral(self, tau):
        return self.value * np.asarray(tau, dtype=float)

    def breakpoints(self):
        return ()

    def max_abs(self):
        return abs(self.value)


@dataclass(frozen=True)
class Rectangular:
    """``C`` on ``(tau1, tau2)``, ``-C`` on ``(tau2, 2 tau2 - tau1)``, zero elsewhere."""

    C: float
    tau1: float
    tau2: float

    def __post_init__(self):
        if not 0 <= self.tau1 < self.tau2:
            raise ValueError("need 0 <= tau1 < tau2")

    def __call__(self, tau):
        tau = np.asarray(tau, dtype=float)
        t1, t2 = self.tau1, self.tau2
        out = np.zeros_like(tau)
        out = np.where((tau > t1) & (tau < t2), self.C, out)
        out = np.where((tau > t2) & (tau < 2 * t2 - t1), -self.C, out)
        return out

    def integral(self, tau):
        tau = np.asarray(tau, dtype=float)
        span = self.tau2 - self.tau1
        return self.C * (np.clip(tau - self.tau1, 0, span) - np.clip(tau - self.tau2, 0, span))

    def breakpoints(self):
        return (self.tau1, self.tau2, 2 * self.tau2 - self.tau1)

    def max_abs(self):
        return abs(self.C)


@dataclass(frozen=True)
class Cosine:
    """``amplitude * cos(omega_g tau)``."""

    amplitude: float
    omega_g: float

    def __call__(self, tau):
        return self.amplitude * np.cos(self.omega_g * np.asarray(tau, dtype=float))

    def integral(self, tau):
        tau = np.asarray(tau, dtype=float)
        if self.omega_g == 0:
            return self.amplitude * tau
        return self.amplitude * np.sin(self.omega_g * tau) / self.omega_g

    def breakpoints(self):
        return ()

    def max_abs(self):
        return abs(self.amplitude)


# ---------------------------------------------------------------------------
# prefix-integral cache

class _PrefixCache:
    """Cumulative integrals of several integrands on cells of width <= 1e-3.

    ``integrand(tau)`` returns an array of shape ``(k, len(tau))``.  Queries
    add a 5-point Gauss-Legendre integral from the left cell edge.
    """

    def __init__(self, integrand, tau_max: float, breakpoints=()):
        n = max(1, int(math.ceil(tau_max / _CACHE_STEP)))
        edges = np.linspace(0.0, n * _CACHE_STEP, n + 1)
        extra = [b for b in breakpoints if 0 < b < edges[-1]]
        if extra:
            edges = np.union1d(edges, extra)
        self.edges = edges
        self.integrand = integrand
        lo, hi = edges[:-1], edges[1:]
        cells = self._gauss(lo, hi)
        k = cells.shape[0]
        self.prefix = np.zeros((k, edges.size))
        # row-wise running sums; fsum-level accuracy is not needed at 1e-3 cells
        self.prefix[:, 1:] = np.cumsum(cells, axis=1)

    def _gauss(self, lo, hi):
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        x = mid[None, :] + half[None, :] * _GL_X[:, None]
        f = self.integrand(x.ravel()).reshape(-1, *x.shape)
        return np.einsum("j,kjn->kn", _GL_W, f) * half[None, :]

    @property
    def tau_max(self):
        return float(self.edges[-1])

    def __call__(self, tau):
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        if tau.size and (tau.min() < 0 or tau.max() > self.tau_max * (1 + 1e-12)):
            raise ValueError(f"tau outside cached range [0, {self.tau_max}]; "
                             "construct the worldline with a larger tau_max")
        idx = np.clip(np.searchsorted(self.edges, tau, side="right") - 1, 0, self.edges.size - 2)
        return self.prefix[:, idx] + self._gauss(self.edges[idx], tau)


# ---------------------------------------------------------------------------
# worldlines

class Worldline:
    """Base class.  Subclasses set ``dimension`` and implement the coordinates."""

    dimension = 1
    is_stationary = False

    def position(self, tau):
        raise NotImplementedError

    def lapse(self, tau):
        raise NotImplementedError

    def velocity(self, tau):
        """``(dt/dtau, dx/dtau[, dy/dtau])``."""
        raise NotImplementedError

    def breakpoints(self):
        return ()

    def proper_time_of_coord(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("coordinate time must be non-negative")
        # t(tau) >= tau, so tau lies in [0, t]
        lo = np.zeros_like(t)
        hi = t.copy()
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            below = self.position(mid)[0] < t
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if np.all(hi - lo <= 1e-12 * np.maximum(1.0, hi)):
                break
        return 0.5 * (lo + hi)


class LinearWorldline(Worldline):
    """Motion along ``x`` described by a rapidity ``phi(tau)``, ``phi(0)`` arbitrary."""

    dimension = 1
    x0 = 0.0

    def rapidity(self, tau):
        raise NotImplementedError

    def lightcone(self, tau):
        """``(u, v) = (t - x + x0, t + x - x0)``, computed without cancellation."""
        raise NotImplementedError

    def lightcone_rates(self, tau):
        """``(du/dtau, dv/dtau) = (exp(-phi), exp(phi))``."""
        phi = self.rapidity(tau)
        return np.exp(-phi), np.exp(phi)

    def lightcone_increments(self, tau):
        """Consecutive differences of ``(u, v)`` along the sorted samples ``tau``.

        Subclasses override this where ``u`` or ``v`` saturates and plain
        differences would lose every digit.
        """
        u, v = self.lightcone(tau)
        return np.diff(u), np.diff(v)

    def position(self, tau):
        u, v = self.lightcone(tau)
        return 0.5 * (u + v), 0.5 * (v - u) + self.x0

    def lapse(self, tau):
        return np.cosh(self.rapidity(tau))

    def velocity(self, tau):
        phi = self.rapidity(tau)
        return np.cosh(phi), np.sinh(phi)

    def max_extent(self, tau_max):
        """Largest ``|u|, |v|`` reached on ``[0, tau_max]``."""
        u, v = self.lightcone(np.linspace(0, tau_max, 257))
        return float(max(np.max(np.abs(u)), np.max(np.abs(v))))


class Static(LinearWorldline):
    is_stationary = True

    def rapidity(self, tau):
        return np.zeros_like(np.asarray(tau, dtype=float))

    def lightcone(self, tau):
        tau = np.asarray(tau, dtype=float)
        return tau.copy(), tau.copy()

    def proper_time_of_coord(self, t):
        return np.asarray(t, dtype=float).copy()

    def __repr__(self):
        return "Static()"


class ConstVelocity(LinearWorldline):
    is_stationary = True

    def __init__(self, v: float):
        if not abs(v) < 1:
            raise DomainError(f"superluminal velocity v={v}")
        self.v = float(v)
        self.phi = math.atanh(v)
        self.gamma = 1.0 / math.sqrt(1.0 - v * v)

    def rapidity(self, tau):
        return np.full_like(np.asarray(tau, dtype=float), self.phi)

    def lightcone(self, tau):
        tau = np.asarray(tau, dtype=float)
        return math.exp(-self.phi) * tau, math.exp(self.phi) * tau

    def position(self, tau):
        tau = np.asarray(tau, dtype=float)
        return self.gamma * tau, self.gamma * self.v * tau

    def proper_time_of_coord(self, t):
        return np.asarray(t, dtype=float) / self.gamma

    def __repr__(self):
        return f"ConstVelocity(v={self.v})"


class ConstAccel(LinearWorldline):
    """Hyperbolic motion ``t = sinh(a tau)/a``, ``x = x0 + (cosh(a tau) - 1)/a``.

    Negative ``a`` accelerates towards ``-x``.
    """

    def __init__(self, a: float, x0: float = 0.0):
        self.a = float(a)
        self.x0 = float(x0)

    def rapidity(self, tau):
        return self.a * np.asarray(tau, dtype=float)

    def lightcone(self, tau):
        tau = np.asarray(tau, dtype=float)
        if self.a == 0:
            return tau.copy(), tau.copy()
        with np.errstate(over="ignore"):
            u = -np.expm1(-self.a * tau) / self.a
            v = np.expm1(self.a * tau) / self.a
        return u, v

    def lightcone_increments(self, tau):
        tau = np.asarray(tau, dtype=float)
        if self.a == 0:
            return np.diff(tau), np.diff(tau)
        a, t0, dt = self.a, tau[:-1], np.diff(tau)
        with np.errstate(over="ignore"):
            du = np.exp(-a * t0) * (-np.expm1(-a * dt)) / a
            dv = np.exp(a * t0) * np.expm1(a * dt) / a
        return du, dv

    def position(self, tau):
        tau = np.asarray(tau, dtype=float)
        if self.a == 0:
            return tau.copy(), np.full_like(tau, self.x0)
        return np.sinh(self.a * tau) / self.a, self.x0 + 2.0 * np.sinh(0.5 * self.a * tau) ** 2 / self.a

    def proper_time_of_coord(self, t):
        t = np.asarray(t, dtype=float)
        if self.a == 0:
            return t.copy()
        return np.arcsinh(self.a * t) / self.a

    def __repr__(self):
        return f"ConstAccel(a={self.a})"


class GenericLinear(LinearWorldline):
    """Linear motion driven by a time-dependent proper acceleration profile."""

    def __init__(self, profile, tau_max: float = 200.0):
        self.profile = profile
        phi = profile.integral

        def integrand(tau):
            p = phi(tau)
            return np.stack([np.exp(-p), np.exp(p)])

        self._cache = _PrefixCache(integrand, tau_max, profile.breakpoints())

    @property
    def tau_max(self):
        return self._cache.tau_max

    def rapidity(self, tau):
        return self.profile.integral(tau)

    def lightcone(self, tau):
        tau = np.asarray(tau, dtype=float)
        uv = self._cache(tau.ravel())
        return uv[0].reshape(tau.shape), uv[1].reshape(tau.shape)

    def lightcone_increments(self, tau):
        tau = np.asarray(tau, dtype=float)
        lo, dt = tau[:-1], np.diff(tau)
        x, w = np.polynomial.legendre.leggauss(5)
        pts = lo[:, None] + 0.5 * dt[:, None] * (x[None, :] + 1.0)
        phi = self.profile.integral(pts.ravel()).reshape(pts.shape)
        du = 0.5 * dt * (np.exp(-phi) @ w)
        dv = 0.5 * dt * (np.exp(phi) @ w)
        return du, dv

    def breakpoints(self):
        return tuple(self.profile.breakpoints())

    def __repr__(self):
        return f"GenericLinear({self.profile})"


class Circular(Worldline):
    """Circular motion of radius ``r0`` in the ``xy`` plane.

    ``phase`` is the initial polar angle (0 for one mode, pi for its partner).
    """

    dimension = 2

    def __init__(self, r0: float, profile, phase: float = 0.0, tau_max: float = 200.0):
        if r0 <= 0:
            raise ValueError("radius must be positive")
        if r0 * profile.max_abs() >= 1:
            raise DomainError(f"superluminal circular motion: r0*Omega = {r0 * profile.max_abs()}")
        self.r0 = float(r0)
        self.profile = profile
        self.phase = float(phase)
        self.is_stationary = isinstance(profile, Constant)
        if self.is_stationary:
            om = profile.value
            self.gamma = 1.0 / math.sqrt(1.0 - (r0 * om) ** 2)
            self._cache = None
        else:
            def integrand(tau):
                om = profile(tau)
                g = 1.0 / np.sqrt(1.0 - (r0 * om) ** 2)
                return np.stack([g, g * om])

            self._cache = _PrefixCache(integrand, tau_max, profile.breakpoints())

    def gamma_of(self, tau):
        om = self.profile(tau)
        return 1.0 / np.sqrt(1.0 - (self.r0 * om) ** 2)

    def time_and_angle(self, tau):
        """``(t(tau), Theta(tau))`` including the initial phase."""
        tau = np.asarray(tau, dtype=float)
        if self._cache is None:
            om = self.profile.value
            return self.gamma * tau, self.gamma * om * tau + self.phase
        ta = self._cache(tau.ravel())
        return ta[0].reshape(tau.shape), ta[1].reshape(tau.shape) + self.phase

    def position(self, tau):
        t, th = self.time_and_angle(tau)
        return t, self.r0 * np.cos(th), self.r0 * np.sin(th)

    def lapse(self, tau):
        return self.gamma_of(tau)

    def velocity(self, tau):
        g = self.gamma_of(tau)
        om = self.profile(tau)
        _, th = self.time_and_angle(tau)
        return g, -self.r0 * g * om * np.sin(th), self.r0 * g * om * np.cos(th)

    def proper_time_of_coord(self, t):
        if self._cache is None:
            return np.asarray(t, dtype=float) / self.gamma
        return super().proper_time_of_coord(t)

    def breakpoints(self):
        return tuple(self.profile.breakpoints())

    def __repr__(self):
        return f"Circular(r0={self.r0}, {self.profile}, phase={self.phase})"
