"""Comoving-frame maps between the proper times of two Majorana modes.

Mode 1 is uniformly accelerated with ``a``.  Mode 2 either shares the
acceleration but starts a distance ``L`` away, or has its own acceleration
``a2``.  In both cases the relation has the form

    tau2 = (1/a2) log[(B + sqrt(B^2 + coth^2(a tau) - 1)) / (coth(a tau) - 1)]

with ``B = a L`` (and ``a2 = a``) or ``B = a2/a - 1``.  The evaluation below
avoids the cancellations of the literal expression near ``tau = 0`` and at
large ``a tau``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .worldline import DomainError


class CausalityError(DomainError):
    """Rindler time of the partner mode would run backwards."""


def rindler_to_minkowski(a: float, tau, xi):
    """Rindler coordinates ``(tau, xi)`` of an observer with acceleration ``a`` to ``(t, x)``."""
    xi = np.asarray(xi, dtype=float)
    tau = np.asarray(tau, dtype=float)
    if a <= 0:
        raise ValueError("acceleration must be positive")
    if np.any(xi <= -1.0 / a):
        raise CausalityError("need xi > -1/a")
    r = 1.0 / a + xi
    return r * np.sinh(a * tau), r * np.cosh(a * tau) - 1.0 / a


def _log_ratio(a: float, B: float, tau):
    """``s = log[(B + W) / (c - 1)]`` with ``c = coth(a tau)`` and ``W = sqrt(B^2 + c^2 - 1)``."""
    tau = np.asarray(tau, dtype=float)
    x = a * tau
    out = np.zeros_like(tau)
    pos = x > 0
    x = x[pos]
    em = np.expm1(2.0 * np.minimum(x, 350.0))
    cm1 = 2.0 / em                               # c - 1
    c = 1.0 + cm1
    W = np.sqrt(B * B + cm1 * (c + 1.0))
    if B >= 0:
        # B + W - (c - 1) as a sum of non-negative terms
        N = B + (B * B + 2.0 * cm1) / (W + cm1)
        log_cm1 = math.log(2.0) - 2.0 * x - np.log(-np.expm1(-2.0 * x))
        s = np.logaddexp(0.0, np.log(N) - log_cm1)
    else:
        N = (B + 1.0) + (B * B - 1.0) / (W + c)  # B + W - (c - 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.where(cm1 >= 1.0, np.log1p(N / cm1), np.log((c + 1.0) / (W - B)))
    out[pos] = s
    return out


def _log_ratio_rate(a: float, B: float, tau):
    """``ds/dtau`` for :func:`_log_ratio`; the limit at ``tau = 0`` is ``a (B + 1)``."""
    tau = np.asarray(tau, dtype=float)
    x = a * tau
    out = np.full_like(tau, a * (B + 1.0))
    pos = x > 1e-12
    x = x[pos]
    cm1 = 2.0 / np.expm1(2.0 * np.minimum(x, 350.0))
    c = 1.0 + cm1
    W = np.sqrt(B * B + cm1 * (c + 1.0))
    if B >= 0:
        t2 = c * cm1 * (c + 1.0) / (W * (B + W))
    else:
        t2 = c * (W - B) / W
    out[pos] = a * ((c + 1.0) - t2)
    return out


def tau2_separation(a: float, L: float, tau):
    """Proper time of a partner mode starting a distance ``L`` ahead, same acceleration ``a``."""
    if a <= 0:
        raise ValueError("acceleration must be positive")
    if L < 0:
        raise ValueError("separation must be non-negative")
    tau = np.asarray(tau, dtype=float)
    if L == 0:
        return tau.copy()
    return _log_ratio(a, a * L, tau) / a


def tau2_two_accels(a: float, a2: float, tau, check: bool = True):
    """Proper time of a partner mode with acceleration ``a2`` (any sign)."""
    if a <= 0:
        raise ValueError("acceleration must be positive")
    tau = np.asarray(tau, dtype=float)
    if a2 == a:
        return tau.copy()
    if a2 == 0:
        return np.tanh(a * tau) / a
    out = _log_ratio(a, a2 / a - 1.0, tau) / a2
    if check:
        bound = causal_domain(a, a2)
        if np.any(out >= bound):
            raise CausalityError(f"tau2 exceeds the causal bound {bound}")
    return out


def causal_domain(a: float, a2: float) -> float:
    """Upper bound on the partner's proper time (``inf`` if unconstrained)."""
    if a <= 0:
        raise ValueError("acceleration must be positive")
    if a2 >= 0:
        return math.inf
    return -math.acosh(1.0 - a2 / a) / a2


def tau2_limit(a: float, a2: float) -> float:
    """``tau2`` as ``tau -> inf`` (finite when ``a2 < a``)."""
    if a2 >= a:
        return math.inf
    if a2 == 0:
        return 1.0 / a
    return math.log(abs(a2 / a - 1.0)) / -a2 if a2 < 0 else math.log(a / (a - a2)) / a2


@dataclass(frozen=True)
class FrameMap:
    """Partner proper time as a function of the observer's: ``tau2(tau)``.

    kind ``separation`` uses ``(a, L)``; ``two_accels`` uses ``(a, a2)``.
    """

    kind: str
    a: float
    L: float = 0.0
    a2: float | None = None

    def __post_init__(self):
        if self.kind not in ("identity", "separation", "two_accels"):
            raise ValueError(f"unknown frame map {self.kind!r}")
        if self.kind == "two_accels" and self.a2 is None:
            raise ValueError("two_accels needs a2")

    @property
    def partner_accel(self) -> float:
        return self.a2 if self.kind == "two_accels" else self.a

    def __call__(self, tau):
        if self.kind == "identity":
            return np.asarray(tau, dtype=float).copy()
        if self.kind == "separation":
            return tau2_separation(self.a, self.L, tau)
        return tau2_two_accels(self.a, self.a2, tau)

    def derivative(self, tau):
        tau = np.asarray(tau, dtype=float)
        if self.kind == "identity" or (self.kind == "separation" and self.L == 0) \
                or (self.kind == "two_accels" and self.a2 == self.a):
            return np.ones_like(tau)
        if self.kind == "separation":
            return _log_ratio_rate(self.a, self.a * self.L, tau) / self.a
        if self.a2 == 0:
            return 1.0 / np.cosh(self.a * tau) ** 2
        return _log_ratio_rate(self.a, self.a2 / self.a - 1.0, tau) / self.a2

    def causal_bound(self) -> float:
        if self.kind == "two_accels":
            return causal_domain(self.a, self.a2)
        return math.inf

    def observer_bound(self) -> float:
        """Observer time at which the partner reaches the causal bound (``inf`` if never)."""
        bound = self.causal_bound()
        if math.isinf(bound) or tau2_limit(self.a, self.partner_accel) <= bound:
            return math.inf
        f = lambda t: float(_log_ratio(self.a, self.a2 / self.a - 1.0, np.array([t]))[0]) / self.a2 - bound
        hi = 1.0
        while f(hi) < 0:
            hi *= 2.0
        return brentq(f, 0.0, hi, xtol=1e-13)

    def report(self) -> dict:
        return {"kind": self.kind, "a": self.a, "L": self.L, "a2": self.a2,
                "causal_bound_tau2": self.causal_bound(),
                "tau2_limit": tau2_limit(self.a, self.partner_accel) if self.kind != "identity" else math.inf,
                "observer_bound": self.observer_bound()}


def circular_tau_shift(omega: float, r0: float) -> dict:
    """Proper-time offset between diametrically opposite modes on a circle.

    Returns the explicit shift ``(1/(gamma Omega)) [arccos(1 - r0^2 Omega^2) - pi]``,
    the residual of the implicit relation
    ``D / sin(gamma Omega D + pi) - Omega r0^2 / gamma`` at that shift, and the
    roots of the implicit relation.  The ratio form has no real root; clearing
    the denominator gives ``gamma D + Omega r0^2 sin(gamma Omega D) = 0``, which
    is strictly increasing in ``D`` and vanishes only at ``D = 0``.
    """
    if r0 <= 0 or omega <= 0:
        raise ValueError("need r0 > 0 and Omega > 0")
    if r0 * omega >= 1:
        raise DomainError("r0 * Omega must be below 1")
    gam = 1.0 / math.sqrt(1.0 - (r0 * omega) ** 2)
    delta = (math.acos(1.0 - (r0 * omega) ** 2) - math.pi) / (gam * omega)

    def ratio_residual(d):
        return d / math.sin(gam * omega * d + math.pi) - omega * r0 ** 2 / gam

    def cleared(d):
        return gam * d + omega * r0 ** 2 * math.sin(gam * omega * d)

    # cleared form is monotone: bracket its unique root
    span = 10.0 / (gam * omega)
    root = brentq(cleared, -span, span, xtol=1e-15)
    return {"explicit_shift": delta, "explicit_residual": ratio_residual(delta),
            "cleared_residual": cleared(delta), "implicit_root": root,
            "ratio_form_has_root": False, "gamma": gam}
