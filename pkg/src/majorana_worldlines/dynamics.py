"""Reduced qubit state, transition probabilities and rates from influence functionals."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

# tolerance for tiny positive quadrature residue in an influence functional
_POSITIVE_SLACK = 1e-12


@dataclass(frozen=True)
class ReducedState:
    """Qubit density matrix ``[[rho00, rho01], [conj(rho01), 1 - rho00]]``."""

    rho00: float
    rho01: complex = 0j

    def __post_init__(self):
        if not 0.0 <= self.rho00 <= 1.0:
            raise ValueError("rho00 must lie in [0, 1]")
        if not self.is_positive(1e-12):
            raise ValueError("state is not positive semidefinite")

    def is_positive(self, tol: float = 1e-12) -> bool:
        return (self.rho00 - 0.5) ** 2 + abs(self.rho01) ** 2 <= 0.25 + tol

    def matrix(self) -> np.ndarray:
        return np.array([[self.rho00, self.rho01],
                         [np.conj(self.rho01), 1.0 - self.rho00]], dtype=complex)


@dataclass
class Trajectory:
    """Reduced state sampled on a grid."""

    nodes: np.ndarray
    rho00: np.ndarray
    rho01: np.ndarray

    def is_positive(self, tol: float = 1e-12) -> np.ndarray:
        return (self.rho00 - 0.5) ** 2 + np.abs(self.rho01) ** 2 <= 0.25 + tol

    def state(self, k: int) -> ReducedState:
        return ReducedState(float(self.rho00[k]), complex(self.rho01[k]))


def _check_nonpositive(*series):
    for s in series:
        if np.any(np.asarray(s) > _POSITIVE_SLACK):
            raise ValueError("influence functionals must be non-positive")


def evolve(rho0: ReducedState, I1, I2, nodes=None):
    """Reduced state at every sample of ``I1``, ``I2``.

    ``rho00 -> 1/2 + (rho00 - 1/2) e^(I1+I2)``,
    ``rho01 -> e^I2 Re rho01 + i e^I1 Im rho01``.
    Scalar inputs return a :class:`ReducedState`.
    """
    _check_nonpositive(I1, I2)
    I1 = np.minimum(np.asarray(I1, dtype=float), 0.0)
    I2 = np.minimum(np.asarray(I2, dtype=float), 0.0)
    r00 = 0.5 + (rho0.rho00 - 0.5) * np.exp(I1 + I2)
    r01 = np.exp(I2) * rho0.rho01.real + 1j * np.exp(I1) * rho0.rho01.imag
    if r00.ndim == 0:
        return ReducedState(float(r00), complex(r01))
    if nodes is None:
        nodes = np.arange(r00.size, dtype=float)
    return Trajectory(np.asarray(nodes, dtype=float), r00, r01)


def transition_prob_full(I1, I2):
    """``P = (1 - e^(I1+I2)) / 2`` for the qubit prepared in ``|0>``."""
    _check_nonpositive(I1, I2)
    s = np.minimum(np.asarray(I1, dtype=float) + np.asarray(I2, dtype=float), 0.0)
    return -0.5 * np.expm1(s) + 0.0


@dataclass(frozen=True)
class FirstOrder:
    value: np.ndarray
    divergent: bool


def transition_prob_first(I1, I2, switching=None) -> FirstOrder:
    """First-order probability ``-(I1 + I2) / 2``.

    Without a finite-duration switching function this quantity grows without
    bound; the ``divergent`` flag marks that case.
    """
    value = -0.5 * (np.asarray(I1, dtype=float) + np.asarray(I2, dtype=float)) + 0.0
    finite = switching is not None and getattr(switching, "finite_duration", False)
    return FirstOrder(value, not finite)


@dataclass
class LimitEstimate:
    value: float
    converged: bool
    change: float


def late_time_limit(values, tol: float = 1e-3) -> LimitEstimate:
    """Last grid value, flagged converged when it moved less than ``tol`` over the last 10%."""
    values = np.asarray(values, dtype=float)
    n = values.size
    start = min(n - 1, int(math.floor(0.9 * (n - 1))))
    window = values[start:]
    change = float(window.max() - window.min()) if window.size else 0.0
    return LimitEstimate(float(values[-1]), change < tol, change)


@dataclass
class RateLadder:
    windows: np.ndarray
    rates: np.ndarray
    extrapolated: float
    plateau: bool
    meta: dict = field(default_factory=dict)


def transition_rate(total_influence: Callable[[float], float],
                    windows: Sequence[float] = (10.0, 20.0, 40.0),
                    plateau_tol: float = 0.1) -> RateLadder:
    """First-order transition rate ``P1(T) / T`` on a ladder of windows.

    ``total_influence(T)`` returns ``I1(T) + I2(T)`` for unit switching.  The
    extrapolated value ``2 r(T_n) - r(T_{n-1})`` removes a ``1/T`` correction
    when the windows double, so a bounded influence extrapolates to zero.
    ``plateau`` reports whether the last two rates agree within ``plateau_tol``.
    """
    windows = np.asarray(sorted(windows), dtype=float)
    if np.any(windows <= 0):
        raise ValueError("windows must be positive")
    rates = np.array([-0.5 * total_influence(T) / T for T in windows])
    if rates.size >= 2:
        extrap = 2.0 * rates[-1] - rates[-2]
        scale = max(abs(rates[-1]), abs(rates[-2]))
        plateau = scale == 0 or abs(rates[-1] - rates[-2]) <= plateau_tol * scale
    else:
        extrap, plateau = float(rates[-1]), False
    return RateLadder(windows, rates, float(extrap), bool(plateau),
                      {"plateau_tol": plateau_tol})
